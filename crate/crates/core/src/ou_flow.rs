//! Ornstein–Uhlenbeck flow on entry densities and on matrices.
//!
//! Densities are taken relative to the Gaussian probability measure
//! `mu(dx) = exp(-x^2) dx / sqrt(pi)` and stored in the orthonormal Hermite
//! basis `h_k = H_k / sqrt(2^k k!)`, with `h_0 = 1`. The generator
//! `L = 1/4 d^2/dx^2 - (x/2) d/dx` is diagonal there, `L h_k = -(k/2) h_k`,
//! so every flow operation is a per-mode scalar multiplication.

use std::fmt::Write as _;

use crate::ensemble::{sample_gue, WignerMatrix};
use crate::error::{Error, Result};
use crate::quadrature::gauss_hermite;
use crate::rng;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 64;
/// Test grid used for positivity checks and flow bounds.
pub const GRID_POINTS: usize = 2001;
pub const GRID_HALF_WIDTH: f64 = 8.0;
/// Negativity tolerated on the grid.
pub const POSITIVITY_TOL: f64 = -1e-12;
const TAIL_WARN: f64 = 1e-12;

/// The evaluation grid: `GRID_POINTS` equispaced points on `[-8, 8]`.
pub fn grid() -> impl Iterator<Item = f64> {
    let h = 2.0 * GRID_HALF_WIDTH / (GRID_POINTS - 1) as f64;
    (0..GRID_POINTS).map(move |i| -GRID_HALF_WIDTH + i as f64 * h)
}

/// Values `h_0(x), ..., h_k(x)`.
pub fn hermite_values(x: f64, k: usize) -> Vec<f64> {
    let mut h = Vec::with_capacity(k + 1);
    h.push(1.0);
    if k >= 1 {
        h.push(std::f64::consts::SQRT_2 * x);
    }
    for j in 1..k {
        let jf = j as f64;
        let next = (2.0 / (jf + 1.0)).sqrt() * x * h[j] - (jf / (jf + 1.0)).sqrt() * h[j - 1];
        h.push(next);
    }
    h
}

/// Nodes and weights integrating against the probability measure `mu`.
fn mu_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, mut w) = gauss_hermite(n);
    let s = std::f64::consts::PI.sqrt();
    w.iter_mut().for_each(|w| *w /= s);
    (x, w)
}

fn rule_size(k: usize) -> usize {
    (2 * k + 2).max(160)
}

/// A density relative to `mu`, in the Hermite basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteDensity {
    coeffs: Vec<f64>,
    probability: bool,
}

impl HermiteDensity {
    /// From coefficients `c_0..c_K`; the probability flag is set when the
    /// reconstruction is nonnegative on the grid and `c_0 = 1`.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::input("at least the coefficient c_0 is required"));
        }
        if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::input(format!("coefficient c_{k} is not finite")));
        }
        let mut d = HermiteDensity {
            coeffs,
            probability: false,
        };
        d.probability = (d.coeffs[0] - 1.0).abs() < 1e-12 && d.grid_min() >= POSITIVITY_TOL;
        Ok(d)
    }

    /// The constant density 1.
    pub fn constant(order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = 1.0;
        HermiteDensity {
            coeffs,
            probability: true,
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_probability(&self) -> bool {
        self.probability
    }

    /// Total mass with respect to `mu`.
    pub fn mass(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn eval(&self, x: f64) -> f64 {
        let h = hermite_values(x, self.order());
        self.coeffs.iter().zip(&h).map(|(c, h)| c * h).sum()
    }

    /// Smallest reconstructed value over the grid.
    pub fn grid_min(&self) -> f64 {
        grid().map(|x| self.eval(x)).fold(f64::INFINITY, f64::min)
    }

    fn map_modes(&self, f: impl Fn(usize) -> f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * f(k))
            .collect();
        HermiteDensity {
            coeffs,
            probability: false,
        }
    }

    fn flagged(mut self) -> Self {
        self.probability = self.grid_min() >= POSITIVITY_TOL;
        self
    }

    /// Text export: a `K=<order>` header followed by one coefficient per
    /// line.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# hermite coefficients\n");
        let _ = writeln!(out, "K={}", self.order());
        for c in &self.coeffs {
            let _ = writeln!(out, "{c:e}");
        }
        out
    }

    /// Parse the format written by [`to_text`](Self::to_text). Blank lines
    /// and `#` comments are ignored; the header may also read `K <order>`.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line, header) = lines
            .next()
            .ok_or_else(|| Error::parse(0, "missing K header"))?;
        let rest = header
            .strip_prefix('K')
            .map(|r| r.trim_start().trim_start_matches('=').trim())
            .ok_or_else(|| Error::parse(line, "expected header `K=<order>`"))?;
        let order: usize = rest
            .parse()
            .map_err(|_| Error::parse(line, format!("bad order `{rest}`")))?;
        if order > 1 << 16 {
            return Err(Error::parse(line, format!("order {order} is too large")));
        }
        let mut coeffs = Vec::with_capacity(order + 1);
        for (line, l) in lines {
            let c: f64 = l
                .parse()
                .map_err(|_| Error::parse(line, format!("bad coefficient `{l}`")))?;
            if !c.is_finite() {
                return Err(Error::parse(line, "coefficient is not finite"));
            }
            if coeffs.len() > order {
                return Err(Error::parse(line, format!("more than K+1 = {} coefficients", order + 1)));
            }
            coeffs.push(c);
        }
        if coeffs.len() != order + 1 {
            return Err(Error::parse(
                0,
                format!("expected {} coefficients, found {}", order + 1, coeffs.len()),
            ));
        }
        HermiteDensity::from_coeffs(coeffs)
    }
}

/// Output of [`hermite_project`]: the expansion and its `L^2(mu)` error.
#[derive(Debug, Clone)]
pub struct Projection {
    pub density: HermiteDensity,
    pub l2_error: f64,
}

/// Expand `f` (a density relative to `mu`) in `h_0..h_K` by Gauss–Hermite
/// quadrature.
pub fn hermite_project(f: impl Fn(f64) -> f64, order: usize) -> Result<Projection> {
    let (x, w) = mu_rule(rule_size(order));
    let mut coeffs = vec![0.0; order + 1];
    let mut norm_sq = 0.0;
    for (&x, &w) in x.iter().zip(&w) {
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::input(format!("density is not finite at x = {x}")));
        }
        norm_sq += w * fx * fx;
        for (c, h) in coeffs.iter_mut().zip(hermite_values(x, order)) {
            *c += w * fx * h;
        }
    }
    let captured: f64 = coeffs.iter().map(|c| c * c).sum();
    let l2_error = (norm_sq - captured).max(0.0).sqrt();
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let tail = coeffs[order.saturating_sub(3)..]
        .iter()
        .fold(0.0f64, |m, c| m.max(c.abs()));
    if order >= 4 && tail > 1e-2 * scale && l2_error > 1e-2 * norm_sq.sqrt() {
        return Err(Error::numerical(format!(
            "Hermite coefficients do not decay: tail {tail:.3e}, L2 error {l2_error:.3e}"
        )));
    }
    if tail > TAIL_WARN * scale {
        log::warn!("Hermite coefficient tail {tail:.3e} above {TAIL_WARN:e} at order {order}");
    }
    let density = HermiteDensity::from_coeffs(coeffs)?;
    Ok(Projection { density, l2_error })
}

/// Projection of a diagonal-entry density `f`, given relative to
/// `exp(-x^2/2) dx / sqrt(2 pi)`; the substitution `x = sqrt(2) y` maps it
/// onto `mu`, where the diagonal generator becomes `L`.
pub fn hermite_project_diagonal(f: impl Fn(f64) -> f64, order: usize) -> Result<Projection> {
    hermite_project(|y| f(std::f64::consts::SQRT_2 * y), order)
}

/// `L^power d`.
pub fn apply_generator(d: &HermiteDensity, power: u32) -> HermiteDensity {
    d.map_modes(|k| (-(k as f64) / 2.0).powi(power as i32))
}

/// `exp(t L) d`.
pub fn semigroup(d: &HermiteDensity, t: f64) -> Result<HermiteDensity> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::input(format!(
            "semigroup time must be finite and >= 0, got {t}; use reversal_approximant"
        )));
    }
    let mut out = d.map_modes(|k| (-(k as f64) * t / 2.0).exp());
    out.probability = d.probability;
    if d.probability {
        out = out.flagged();
    }
    Ok(out)
}

/// Partial sums `sum_{j < m} s^j / j!`.
fn exp_partial(s: f64, m: u32) -> f64 {
    let (mut term, mut sum) = (1.0, 0.0);
    for j in 0..m {
        sum += term;
        term *= s / (j + 1) as f64;
    }
    sum
}

/// `exp(-s) sum_{j >= m} s^j / j!`, summed directly so that small `s` keeps
/// full relative accuracy.
fn exp_tail(s: f64, m: u32) -> f64 {
    if s > 20.0 + m as f64 {
        return 1.0 - (-s).exp() * exp_partial(s, m);
    }
    let mut term = (-s).exp();
    for j in 0..m {
        term *= s / (j + 1) as f64;
    }
    let mut sum = 0.0;
    let mut j = m;
    while term > 1e-18 * sum || j < m + 2 {
        sum += term;
        j += 1;
        term *= s / j as f64;
        if j > m + 2000 {
            break;
        }
    }
    sum
}

/// The truncated backward series `sum_{j < m} (-t L)^j / j!` applied to
/// `d`. The result is flagged as a probability density iff it is
/// nonnegative on the grid.
pub fn reversal_approximant(d: &HermiteDensity, t: f64, m: u32) -> Result<HermiteDensity> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::input(format!("reversal time must be >= 0, got {t}")));
    }
    if m < 2 {
        return Err(Error::input(format!("reversal order must be >= 2, got {m}")));
    }
    if m == 3 && t > 0.0 {
        let b = flow_bounds(d).ok();
        if let Some(b) = b {
            if t * b.a1 + t * t * b.a2 / 2.0 > 1.0 {
                log::warn!("t A1 + t^2 A2 / 2 > 1 at t = {t}: approximant may fail positivity");
            }
        }
    }
    Ok(d.map_modes(|k| exp_partial(t * k as f64 / 2.0, m)).flagged())
}

/// `v_t - v` for `v_t = exp(tL) reversal_approximant(v, t, m)`, per mode.
pub fn round_trip_defect(d: &HermiteDensity, t: f64, m: u32) -> HermiteDensity {
    d.map_modes(|k| -exp_tail(t * k as f64 / 2.0, m))
}

/// Chi-square distance `int (v_t - v)^2 / v_t dmu` between `v` and its
/// round trip `v_t = exp(tL) reversal_approximant(v, t, m)`.
pub fn reversal_error_chi2(d: &HermiteDensity, t: f64, m: u32) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::input(format!("time must be >= 0, got {t}")));
    }
    if m < 2 {
        return Err(Error::input(format!("reversal order must be >= 2, got {m}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let defect = round_trip_defect(d, t, m);
    let order = d.order();
    let (x, w) = mu_rule(rule_size(order));
    let check = |x: f64, vt: f64| {
        if vt > 0.0 {
            Ok(())
        } else {
            Err(Error::numerical(format!(
                "round-trip density {vt:.3e} <= 0 at x = {x}: chi-square undefined"
            )))
        }
    };
    for g in grid() {
        check(g, d.eval(g) + defect.eval(g))?;
    }
    let mut chi2 = 0.0;
    for (&x, &w) in x.iter().zip(&w) {
        let h = hermite_values(x, order);
        let dot = |c: &[f64]| c.iter().zip(&h).map(|(c, h)| c * h).sum::<f64>();
        let diff = dot(defect.coeffs());
        let vt = dot(d.coeffs()) + diff;
        check(x, vt)?;
        chi2 += w * diff * diff / vt;
    }
    Ok(chi2)
}

/// Grid estimates of the constants in `Lv <= A1 v`, `L^2 v >= -A2 v`,
/// `|L^3 v| <= A3 v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowBounds {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

/// Suprema of the ratios over the grid (not rigorous bounds off the grid).
pub fn flow_bounds(d: &HermiteDensity) -> Result<FlowBounds> {
    let l1 = apply_generator(d, 1);
    let l2 = apply_generator(d, 2);
    let l3 = apply_generator(d, 3);
    let mut b = FlowBounds {
        a1: 0.0,
        a2: 0.0,
        a3: 0.0,
    };
    for x in grid() {
        let v = d.eval(x);
        if !(v > 0.0) {
            return Err(Error::input(format!("density {v:.3e} is not positive at x = {x}")));
        }
        b.a1 = b.a1.max(l1.eval(x) / v);
        b.a2 = b.a2.max(-l2.eval(x) / v);
        b.a3 = b.a3.max(l3.eval(x).abs() / v);
    }
    Ok(b)
}

/// Degree-7 smoothstep cutoff: 1 on `[-1, 1]`, 0 outside `[-2, 2]`, three
/// continuous derivatives.
pub fn theta(y: f64) -> f64 {
    let s = y.abs() - 1.0;
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        let s4 = s.powi(4);
        1.0 - s4 * (35.0 - 84.0 * s + 70.0 * s * s - 20.0 * s * s * s)
    }
}

/// Solution of the cutoff problem for a potential `V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    /// Centre of the cutoff window.
    pub c: f64,
    /// Additive constant.
    pub d: f64,
    /// Cutoff half-width where `theta = 1` (`N^{lambda/4k}`).
    pub width: f64,
    /// Residuals of the normalization and zero-mean conditions.
    pub residuals: [f64; 2],
}

impl Cutoff {
    /// `V_c(x) = V(x) theta((x - c)/width) + d`.
    pub fn apply(&self, v: impl Fn(f64) -> f64, x: f64) -> f64 {
        v(x) * theta((x - self.c) / self.width) + self.d
    }
}

fn mu_integral(f: impl Fn(f64) -> f64, centre: f64, width: f64) -> Result<f64> {
    let g = |x: f64| f(x) * (-x * x).exp() / std::f64::consts::PI.sqrt();
    let breaks = [
        centre - 2.0 * width,
        centre - width,
        0.0,
        centre + width,
        centre + 2.0 * width,
    ];
    let mut b = breaks.to_vec();
    b.sort_by(f64::total_cmp);
    let r = 40.0f64.max(centre.abs() + 2.0 * width + 1.0);
    Ok(crate::quadrature::adaptive(g, -r, r, &b, 1e-16, 1e-13)?.value)
}

/// Cut `V` off outside a window of half-width `N^{lambda/4k}` centred at
/// `c`, choosing `(c, d)` so that `exp(-V_c)` is a probability density with
/// zero mean relative to `mu`. The constant `d` is explicit given `c`
/// (`d = ln int exp(-V theta) dmu`), leaving a scalar root in `c`.
pub fn cutoff_potential(v: impl Fn(f64) -> f64, n: f64, lambda: f64, k: f64) -> Result<Cutoff> {
    if !(n >= 1.0 && lambda > 0.0 && k > 0.0) {
        return Err(Error::input("cutoff needs N >= 1, lambda > 0, k > 0"));
    }
    let width = n.powf(lambda / (4.0 * k));
    let weight = |c: f64, x: f64| (-v(x) * theta((x - c) / width)).exp();
    let moments = |c: f64| -> Result<(f64, f64)> {
        let z = mu_integral(|x| weight(c, x), c, width)?;
        let m = mu_integral(|x| x * weight(c, x), c, width)?;
        Ok((z, m / z))
    };
    let (z0, m0) = moments(0.0)?;
    let tol = 1e-12;
    let (mut c, mut z) = (0.0, z0);
    let mut mean = m0;
    if mean.abs() > tol {
        // Bracket the zero-mean condition by stepping outwards.
        let step = 0.25 * width;
        let mut bracket = None;
        for i in 1..=16 {
            for dir in [1.0, -1.0] {
                let ci = dir * step * i as f64;
                let (_, mi) = moments(ci)?;
                if mi.signum() != m0.signum() {
                    let prev = dir * step * (i - 1) as f64;
                    bracket = Some(if dir > 0.0 { (prev, ci) } else { (ci, prev) });
                    break;
                }
            }
            if bracket.is_some() {
                break;
            }
        }
        let (mut lo, mut hi) = bracket.ok_or_else(|| {
            Error::numerical(format!("cutoff centre not bracketed; mean residual {m0:.3e}"))
        })?;
        let (_, mut mlo) = moments(lo)?;
        for _ in 0..200 {
            c = 0.5 * (lo + hi);
            let (zc, mc) = moments(c)?;
            z = zc;
            mean = mc;
            if mc.abs() <= tol || hi - lo < 1e-15 * width {
                break;
            }
            if mc.signum() == mlo.signum() {
                lo = c;
                mlo = mc;
            } else {
                hi = c;
            }
        }
        if mean.abs() > 1e-10 {
            return Err(Error::numerical(format!(
                "cutoff root did not converge: residuals (0, {mean:.3e})"
            )));
        }
    }
    let d = z.ln();
    let mass = mu_integral(|x| (-v(x) * theta((x - c) / width) - d).exp(), c, width)?;
    Ok(Cutoff {
        c,
        d,
        width,
        residuals: [mass - 1.0, mean],
    })
}

/// Exact OU transition over time `t`: `exp(-t/2) H + sqrt(1 - exp(-t)) V`
/// with `V` a fresh GUE matrix in the convention of `H`.
pub fn matrix_ou_step(h: &WignerMatrix, t: f64, seed: u64) -> Result<WignerMatrix> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::input(format!("OU step time must be finite and >= 0, got {t}")));
    }
    if h.asymmetry() > 1e-12 {
        return Err(Error::input("OU step needs a Hermitian matrix"));
    }
    if t == 0.0 {
        return Ok(h.clone());
    }
    let scale = (2.0 * h.convention.off_diag_variance()).sqrt();
    let v = sample_gue(h.dim(), scale, h.convention, rng::tagged_seed(seed, "ou"));
    let mut out = h.combine((-t / 2.0).exp(), &v, (-(-t).exp_m1()).sqrt());
    out.seed = seed;
    Ok(out)
}

/// Chi-square divergence `sum |f/g - 1|^2 g` of two discrete laws.
pub fn chi2_discrete(f: &[f64], g: &[f64]) -> f64 {
    f.iter()
        .zip(g)
        .map(|(f, g)| (f - g) * (f - g) / g)
        .sum()
}

/// Row marginal of a row-major `rows x cols` table.
pub fn row_marginal(p: &[f64], cols: usize) -> Vec<f64> {
    p.chunks(cols).map(|r| r.iter().sum()).collect()
}
