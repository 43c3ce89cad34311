use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::quadrature::{self, GaussLegendre};

/// Decay class of a law's density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailClass {
    GaussianDominated,
    Exponential,
    Compact,
}

/// Base shape `U0` of a potential, before the affine change of variable.
#[derive(Debug, Clone)]
pub enum Shape {
    /// `U0(y) = y^2`.
    Gaussian,
    /// `U0(y) = sum c_k y^k`.
    Polynomial(Vec<f64>),
    /// `U0(y) = rate * |y|`.
    TwoSidedExponential { rate: f64 },
    /// Density relative to `exp(-y^2)` proportional to `(1 - y^2)^power` on
    /// `[-1, 1]`: `U0(y) = y^2 - power * ln(1 - y^2)`.
    Bump { power: f64 },
    /// `(w * phi + nu) / (1 + w)` with `phi` the centred Gaussian of
    /// variance 1/2 and `nu` the density of `component`.
    GaussianMixture { weight: f64, component: Box<EntryLaw> },
}

#[derive(Debug)]
struct Inner {
    shape: Shape,
    /// `U(x) = U0((x + shift) / scale) + offset`.
    scale: f64,
    shift: f64,
    offset: f64,
    /// Hard truncation window in the `x` variable.
    window: Option<(f64, f64)>,
    tail: TailClass,
    variance: f64,
    table: OnceLock<std::result::Result<InverseCdf, String>>,
}

/// Probability law of one real matrix coordinate, `nu(dx) = exp(-U(x)) dx`.
///
/// Cloning is cheap; the inverse-CDF sampling table is built once on first
/// use and shared between clones.
#[derive(Debug, Clone)]
pub struct EntryLaw(Arc<Inner>);

impl EntryLaw {
    fn build(
        shape: Shape,
        scale: f64,
        shift: f64,
        offset: f64,
        window: Option<(f64, f64)>,
        tail: TailClass,
        variance: f64,
    ) -> Self {
        EntryLaw(Arc::new(Inner {
            shape,
            scale,
            shift,
            offset,
            window,
            tail,
            variance,
            table: OnceLock::new(),
        }))
    }

    /// Centred Gaussian of the given variance, sampled exactly.
    pub fn gaussian(variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::input(format!("variance must be positive, got {variance}")));
        }
        let scale = (2.0 * variance).sqrt();
        Ok(Self::build(
            Shape::Gaussian,
            scale,
            0.0,
            (PI.sqrt() * scale).ln(),
            None,
            TailClass::GaussianDominated,
            variance,
        ))
    }

    /// Raw potential `U(x) = U0((x + shift)/scale) + offset` with a declared
    /// variance and tail class. No normalization is performed; use
    /// [`validate_law`] to check it.
    pub fn from_potential(
        shape: Shape,
        scale: f64,
        shift: f64,
        offset: f64,
        tail: TailClass,
        declared_variance: f64,
    ) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::input("scale must be positive"));
        }
        Ok(Self::build(shape, scale, shift, offset, None, tail, declared_variance))
    }

    /// Normalized law with potential `x^2 + coeff x^4 + const`, rescaled to
    /// the requested variance.
    pub fn quartic(coeff: f64, variance: f64) -> Result<Self> {
        if !(coeff >= 0.0) {
            return Err(Error::input("quartic coefficient must be nonnegative"));
        }
        let base = Self::from_potential(
            Shape::Polynomial(vec![0.0, 0.0, 1.0, 0.0, coeff]),
            1.0,
            0.0,
            0.0,
            TailClass::GaussianDominated,
            0.5,
        )?;
        base.normalized()?.with_variance(variance)
    }

    /// Normalized two-sided exponential density `(rate/2) exp(-rate |x|)`.
    pub fn two_sided_exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0) {
            return Err(Error::input("rate must be positive"));
        }
        Ok(Self::build(
            Shape::TwoSidedExponential { rate },
            1.0,
            0.0,
            (2.0 / rate).ln(),
            None,
            TailClass::Exponential,
            2.0 / (rate * rate),
        ))
    }

    /// Normalized compactly supported law on `[-1, 1]` whose density
    /// relative to `exp(-x^2)` is proportional to `(1 - x^2)^power`.
    pub fn bump(power: f64) -> Result<Self> {
        if !(power >= 0.0) {
            return Err(Error::input("bump power must be nonnegative"));
        }
        let raw = Self::from_potential(
            Shape::Bump { power },
            1.0,
            0.0,
            0.0,
            TailClass::Compact,
            0.0,
        )?;
        raw.normalized()
    }

    pub fn shape(&self) -> &Shape {
        &self.0.shape
    }

    pub fn tail_class(&self) -> TailClass {
        self.0.tail
    }

    /// Declared variance.
    pub fn variance(&self) -> f64 {
        self.0.variance
    }

    /// Declared mean; every law built here is centred.
    pub fn mean(&self) -> f64 {
        0.0
    }

    /// Closed support interval, `(-inf, inf)` when unbounded.
    pub fn support(&self) -> (f64, f64) {
        let i = &self.0;
        let natural = match &i.shape {
            Shape::Bump { .. } => (-i.scale - i.shift, i.scale - i.shift),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        };
        match i.window {
            Some((lo, hi)) => (natural.0.max(lo), natural.1.min(hi)),
            None => natural,
        }
    }

    fn base_jet(shape: &Shape, y: Jet) -> Jet {
        match shape {
            Shape::Gaussian => y * y,
            Shape::Polynomial(c) => c
                .iter()
                .rev()
                .fold(Jet::constant(0.0), |acc, &ck| acc * y + ck),
            Shape::TwoSidedExponential { rate } => y.abs() * *rate,
            Shape::Bump { power } => y * y - (-(y * y) + 1.0).ln() * *power,
            Shape::GaussianMixture { weight, component } => {
                let x = y;
                let phi = (-(x * x)).exp() * (1.0 / PI.sqrt());
                let (lo, hi) = component.support();
                let dens = if x.value() > lo && x.value() < hi {
                    phi * *weight + (-component.potential_jet_at(x)).exp()
                } else {
                    phi * *weight
                };
                -(dens * (1.0 / (1.0 + weight))).ln()
            }
        }
    }

    fn potential_jet_at(&self, x: Jet) -> Jet {
        let i = &self.0;
        let y = (x + i.shift) * (1.0 / i.scale);
        Self::base_jet(&i.shape, y) + i.offset
    }

    /// `U(x)`; `+inf` outside the support.
    pub fn potential(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return f64::INFINITY;
        }
        if matches!(self.0.shape, Shape::Bump { .. }) && (x <= lo || x >= hi) {
            return f64::INFINITY;
        }
        self.potential_jet(x).value()
    }

    /// Taylor jet of `U` at `x` (derivatives through sixth order).
    pub fn potential_jet(&self, x: f64) -> Jet {
        self.potential_jet_at(Jet::linear(x, 1.0))
    }

    /// `exp(-U(x))`.
    pub fn density(&self, x: f64) -> f64 {
        let u = self.potential(x);
        if u.is_infinite() {
            0.0
        } else {
            (-u).exp()
        }
    }

    /// Density relative to the Gaussian probability measure of variance 1/2.
    pub fn density_wrt_gaussian(&self, x: f64) -> f64 {
        self.density(x) * PI.sqrt() * (x * x).exp()
    }

    /// Finite interval carrying all but a negligible (~1e-22 relative)
    /// fraction of the mass, or `None` if the density does not decay.
    pub(crate) fn effective_range(&self) -> Result<Option<(f64, f64)>> {
        let (lo, hi) = self.support();
        let center = (-self.0.shift).clamp(lo.max(-1e300), hi.min(1e300));
        let step = self.0.scale.max(1e-300);
        let u0 = self.potential(center);
        if u0.is_nan() {
            return Err(Error::input("potential evaluates to NaN"));
        }
        let mut umin = u0;
        let mut ends = [lo, hi];
        for (side, dir) in [(0usize, -1.0f64), (1, 1.0)] {
            let bound = if dir < 0.0 { lo } else { hi };
            if bound.is_finite() {
                continue;
            }
            let mut k = 1.0;
            loop {
                let x = center + dir * k * step * 0.25;
                let u = self.potential(x);
                if u.is_nan() {
                    return Err(Error::input(format!("potential evaluates to NaN at {x}")));
                }
                umin = umin.min(u);
                if u - umin > 52.0 {
                    ends[side] = x;
                    break;
                }
                k += 1.0;
                if k > 40_000.0 {
                    return Ok(None);
                }
            }
        }
        Ok(Some((ends[0], ends[1])))
    }

    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let c = -self.0.shift;
        let s = self.0.scale;
        let mut v: Vec<f64> = [c - 2.0 * s, c - s, c, c + s, c + 2.0 * s]
            .into_iter()
            .filter(|&x| x > lo && x < hi)
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// `∫ g(x) exp(-U(x)) dx` over the effective range.
    pub(crate) fn integrate(&self, g: impl Fn(f64) -> f64) -> Result<f64> {
        let (lo, hi) = self
            .effective_range()?
            .ok_or_else(|| Error::numerical("density does not decay; law is not normalizable"))?;
        let br = self.breakpoints(lo, hi);
        let e = quadrature::adaptive(|x| g(x) * self.density(x), lo, hi, &br, 1e-300, 1e-13)?;
        Ok(e.value)
    }

    /// Rescale the additive constant so the density has unit mass.
    pub fn normalized(&self) -> Result<Self> {
        let mass = self.integrate(|_| 1.0)?;
        let i = &self.0;
        let var = self.integrate(|x| x * x)? / mass;
        let var = if i.variance > 0.0 && matches!(i.shape, Shape::Gaussian) {
            i.variance
        } else {
            var
        };
        Ok(Self::build(
            i.shape.clone(),
            i.scale,
            i.shift,
            i.offset + mass.ln(),
            i.window,
            i.tail,
            var,
        ))
    }

    /// The law of `c X` where `c` is chosen so that the variance becomes
    /// `variance`. Requires a normalized, centred law.
    pub fn with_variance(&self, variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::input(format!("variance must be positive, got {variance}")));
        }
        let current = self.integrate(|x| x * x)?;
        let c = (variance / current).sqrt();
        let i = &self.0;
        let window = i.window.map(|(a, b)| (a * c, b * c));
        Ok(Self::build(
            i.shape.clone(),
            i.scale * c,
            i.shift * c,
            i.offset + c.ln(),
            window,
            i.tail,
            variance,
        ))
    }

    fn table(&self) -> Result<&InverseCdf> {
        self.0
            .table
            .get_or_init(|| InverseCdf::build(self).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| Error::numerical(e.clone()))
    }

    /// Quantile function.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if let Shape::Gaussian = self.0.shape {
            if p <= 0.0 || p >= 1.0 {
                return Err(Error::input("quantile level must lie in (0, 1)"));
            }
        }
        Ok(self.table()?.invert(p))
    }

    /// Build the sampling table eagerly, surfacing construction errors.
    pub fn prepare_sampler(&self) -> Result<()> {
        if let Shape::Gaussian = self.0.shape {
            return Ok(());
        }
        self.table().map(|_| ())
    }

    /// One draw. Gaussian laws are sampled exactly; all other laws use the
    /// inverse-CDF table.
    ///
    /// Panics if the sampling table cannot be built; call
    /// [`EntryLaw::prepare_sampler`] first to get the error instead.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.0.shape {
            Shape::Gaussian => {
                let z: f64 = rng.sample(StandardNormal);
                z * self.0.variance.sqrt()
            }
            _ => {
                let table = self.table().expect("sampling table");
                table.invert(rng.random::<f64>())
            }
        }
    }

    /// Rejection sampler used to cross-check the inverse-CDF path.
    pub fn rejection_sampler(&self) -> Result<RejectionSampler> {
        RejectionSampler::new(self)
    }
}

/// Proposes from a wide Gaussian (or uniformly on compact support) and
/// accepts against a grid envelope of the density ratio.
#[derive(Debug, Clone)]
pub struct RejectionSampler {
    law: EntryLaw,
    lo: f64,
    hi: f64,
    compact: bool,
    sd: f64,
    envelope: f64,
}

impl RejectionSampler {
    fn new(law: &EntryLaw) -> Result<Self> {
        let (lo, hi) = law
            .effective_range()?
            .ok_or_else(|| Error::numerical("law is not normalizable"))?;
        let (s0, s1) = law.support();
        let compact = s0.is_finite() && s1.is_finite();
        let sd = (2.0 * law.variance().max(1e-12)).sqrt().max((hi - lo) / 12.0);
        let mut out = RejectionSampler {
            law: law.clone(),
            lo,
            hi,
            compact,
            sd,
            envelope: 0.0,
        };
        let grid = 4001;
        out.envelope = (0..grid)
            .map(|k| lo + (hi - lo) * k as f64 / (grid - 1) as f64)
            .map(|x| law.density(x) / out.proposal(x))
            .fold(0.0f64, f64::max)
            * 1.1;
        Ok(out)
    }

    fn proposal(&self, x: f64) -> f64 {
        if self.compact {
            1.0 / (self.hi - self.lo)
        } else {
            (-0.5 * (x / self.sd).powi(2)).exp() / (self.sd * (2.0 * PI).sqrt())
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        for _ in 0..1_000_000 {
            let x = if self.compact {
                self.lo + (self.hi - self.lo) * rng.random::<f64>()
            } else {
                let z: f64 = rng.sample(StandardNormal);
                z * self.sd
            };
            if x < self.lo || x > self.hi {
                continue;
            }
            if rng.random::<f64>() * self.envelope * self.proposal(x) <= self.law.density(x) {
                return Ok(x);
            }
        }
        Err(Error::numerical("rejection sampler exceeded its trial budget"))
    }
}

/// Piecewise-linear inverse CDF on a fine grid; cell masses come from a
/// Gauss–Legendre panel per cell.
#[derive(Debug)]
struct InverseCdf {
    xs: Vec<f64>,
    cdf: Vec<f64>,
}

impl InverseCdf {
    const CELLS: usize = 8192;

    fn build(law: &EntryLaw) -> Result<Self> {
        let (lo, hi) = law
            .effective_range()?
            .ok_or_else(|| Error::numerical("law is not normalizable"))?;
        let gl = GaussLegendre::new(8);
        let h = (hi - lo) / Self::CELLS as f64;
        let xs: Vec<f64> = (0..=Self::CELLS).map(|k| lo + h * k as f64).collect();
        let mut cdf = Vec::with_capacity(xs.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in xs.windows(2) {
            acc += gl.integrate(w[0], w[1], |x| law.density(x));
            cdf.push(acc);
        }
        if !(acc > 0.0 && acc.is_finite()) {
            return Err(Error::numerical("law has no mass on its effective range"));
        }
        for c in &mut cdf {
            *c /= acc;
        }
        Ok(InverseCdf { xs, cdf })
    }

    fn invert(&self, p: f64) -> f64 {
        let k = self.cdf.partition_point(|&c| c < p).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[k - 1], self.cdf[k]);
        let frac = if c1 > c0 { (p - c0) / (c1 - c0) } else { 0.5 };
        self.xs[k - 1] + frac * (self.xs[k] - self.xs[k - 1])
    }
}

/// Outcome of [`validate_law`].
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub mass: f64,
    pub mean: f64,
    pub variance: f64,
    pub declared_variance: f64,
    pub normalized: bool,
    pub mean_zero: bool,
    pub variance_matches: bool,
    /// Smallest `k` with `sum_{j=1..6} |V^(j)(x)| <= C (1 + x^2)^k` on the
    /// test grid (`C <= 1e4`), where `V(x) = U(x) - x^2`. Grid estimate.
    pub derivative_growth_k: Option<u32>,
    pub tail_bound: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.normalized
            && self.mean_zero
            && self.variance_matches
            && self.derivative_growth_k.is_some()
            && self.tail_bound
    }
}

/// Check normalization, centring, variance, derivative growth and the tail
/// bound of a law.
pub fn validate_law(law: &EntryLaw) -> Result<ValidationReport> {
    let range = law.effective_range()?;
    let declared = law.variance();
    let Some((lo, hi)) = range else {
        return Ok(ValidationReport {
            mass: f64::INFINITY,
            mean: f64::NAN,
            variance: f64::NAN,
            declared_variance: declared,
            normalized: false,
            mean_zero: false,
            variance_matches: false,
            derivative_growth_k: None,
            tail_bound: false,
        });
    };
    let mass = law.integrate(|_| 1.0)?;
    let mean = law.integrate(|x| x)?;
    let second = law.integrate(|x| x * x)?;
    let variance = second / mass - (mean / mass).powi(2);

    let grid: Vec<f64> = (0..=2000)
        .map(|k| lo + (hi - lo) * k as f64 / 2000.0)
        .filter(|&x| law.potential(x).is_finite())
        .collect();
    if grid.iter().any(|&x| law.potential(x).is_nan()) {
        return Err(Error::input("potential evaluates to NaN"));
    }

    let smooth = !matches!(law.shape(), Shape::TwoSidedExponential { .. })
        && law.tail_class() != TailClass::Compact;
    let derivative_growth_k = if smooth {
        let sums: Vec<(f64, f64)> = grid
            .iter()
            .map(|&x| {
                let jet = law.potential_jet(x) - Jet::linear(x, 1.0) * Jet::linear(x, 1.0);
                let s: f64 = (1..=6).map(|j| jet.derivative(j).abs()).sum();
                (x, s)
            })
            .collect();
        (0..=6u32).find(|&k| {
            sums.iter()
                .all(|&(x, s)| s.is_finite() && s <= 1e4 * (1.0 + x * x).powi(k as i32))
        })
    } else {
        None
    };

    let tail_bound = match law.tail_class() {
        TailClass::Compact => {
            let (a, b) = law.support();
            a.is_finite() && b.is_finite()
        }
        class => {
            // U(x) - U_min must dominate a multiple of x^2 (resp. |x|) in the tails.
            let umin = grid
                .iter()
                .map(|&x| law.potential(x))
                .fold(f64::INFINITY, f64::min);
            let sd = variance.max(1e-300).sqrt();
            let tail: Vec<f64> = grid
                .iter()
                .copied()
                .filter(|x| x.abs() > 3.0 * sd)
                .collect();
            !tail.is_empty()
                && tail.iter().all(|&x| {
                    let excess = law.potential(x) - umin;
                    match class {
                        TailClass::GaussianDominated => excess >= 1e-3 * x * x / (2.0 * sd * sd),
                        _ => excess >= 1e-3 * x.abs() / sd,
                    }
                })
        }
    };

    Ok(ValidationReport {
        mass,
        mean,
        variance,
        declared_variance: declared,
        normalized: (mass - 1.0).abs() <= 1e-10,
        mean_zero: mean.abs() <= 1e-9,
        variance_matches: (variance - declared).abs() <= 1e-8,
        derivative_growth_k,
        tail_bound,
    })
}

/// Restrict a law to `[-ell, ell]` after recentring by `a_ell` and
/// renormalizing by `Z_ell`. Returns the new law with `(a_ell, Z_ell)`.
pub fn truncate_law(law: &EntryLaw, ell: f64) -> Result<(EntryLaw, f64, f64)> {
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(Error::input("truncation radius must be positive"));
    }
    let iqr = law.quantile(0.75)? - law.quantile(0.25)?;
    if ell < iqr {
        return Err(Error::input(format!(
            "truncation radius {ell} is below the interquartile range {iqr:.4}"
        )));
    }
    let gl = GaussLegendre::new(64);
    let panels = 64usize;
    let restricted = |a: f64, g: &dyn Fn(f64) -> f64| -> f64 {
        let h = 2.0 * ell / panels as f64;
        (0..panels)
            .map(|p| {
                let x0 = -ell + h * p as f64;
                gl.integrate(x0, x0 + h, |x| g(x) * law.density(x + a))
            })
            .sum()
    };
    let first_moment = |a: f64| restricted(a, &|x| x) / restricted(a, &|_| 1.0);
    let sd = law.variance().sqrt();
    let m0 = first_moment(0.0);
    let a = if m0.abs() <= 1e-14 * sd {
        0.0
    } else {
        // Mean of x under nu(x + a) on the window decreases in a; bracket and bisect.
        let (mut lo, mut hi) = (-ell / 2.0, ell / 2.0);
        if first_moment(lo).signum() == first_moment(hi).signum() {
            return Err(Error::numerical("could not bracket the recentring shift"));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if first_moment(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 * ell {
                break;
            }
        }
        0.5 * (lo + hi)
    };
    let z = restricted(a, &|_| 1.0);
    let variance = restricted(a, &|x| x * x) / z;
    let i = &law.0;
    let out = EntryLaw::build(
        i.shape.clone(),
        i.scale,
        i.shift + a,
        i.offset + z.ln(),
        Some(match i.window {
            Some((w0, w1)) => ((w0 - a).max(-ell), (w1 - a).min(ell)),
            None => (-ell, ell),
        }),
        TailClass::Compact,
        variance,
    );
    Ok((out, a, z))
}

/// Mix a compactly supported law `u` with the Gaussian of variance 1/2:
/// relative to that Gaussian the density becomes `(tau^m + u) / (1 + tau^m)`.
pub fn bump_mixture(u: &EntryLaw, tau: f64, m: u32) -> Result<EntryLaw> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::input(format!("tau must lie in (0, 1), got {tau}")));
    }
    if m < 2 {
        return Err(Error::input("mixture exponent must be at least 2"));
    }
    let weight = tau.powi(m as i32);
    let raw = EntryLaw::build(
        Shape::GaussianMixture {
            weight,
            component: Box::new(u.clone()),
        },
        1.0,
        0.0,
        0.0,
        None,
        TailClass::GaussianDominated,
        (0.5 * weight + u.variance()) / (1.0 + weight),
    );
    Ok(raw)
}

/// Named built-in law, as written in experiment config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LawSpec {
    pub potential: PotentialName,
    /// Quartic coefficient (quartic only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeff: Option<f64>,
    /// Exponent of the bump (bump only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
    /// Decay rate (two-sided exponential only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    /// Target variance; the law is rescaled to it when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialName {
    Gaussian,
    Quartic,
    Bump,
    TwoSidedExponential,
}

impl LawSpec {
    pub fn gaussian(variance: f64) -> Self {
        LawSpec {
            potential: PotentialName::Gaussian,
            coeff: None,
            power: None,
            rate: None,
            variance: Some(variance),
        }
    }

    pub fn to_law(&self) -> Result<EntryLaw> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::input(format!("{:?} law requires `{name}`", self.potential)))
        };
        let law = match self.potential {
            PotentialName::Gaussian => EntryLaw::gaussian(self.variance.unwrap_or(0.5))?,
            PotentialName::Quartic => {
                EntryLaw::quartic(need(self.coeff, "coeff")?, self.variance.unwrap_or(0.5))?
            }
            PotentialName::Bump => {
                let b = EntryLaw::bump(need(self.power, "power")?)?;
                match self.variance {
                    Some(v) => b.with_variance(v)?,
                    None => b,
                }
            }
            PotentialName::TwoSidedExponential => {
                let e = EntryLaw::two_sided_exponential(self.rate.unwrap_or(2.0))?;
                match self.variance {
                    Some(v) => e.with_variance(v)?,
                    None => e,
                }
            }
        };
        Ok(law)
    }
}
