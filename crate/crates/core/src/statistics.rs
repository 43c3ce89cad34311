//! Semicircle references, Stieltjes transforms, good-set membership, the gap
//! statistic and rescaled pair-correlation histograms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::ensemble::Convention;
use crate::error::{Error, Result};
use crate::rng;
use crate::spectra::SpectralSample;

/// Semicircle law of a (possibly GUE-deformed) Wigner ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemicircleRef {
    pub convention: Convention,
    /// Deformation `a >= 0`.
    pub a: f64,
}

impl SemicircleRef {
    pub fn new(convention: Convention, a: f64) -> Self {
        SemicircleRef { convention, a }
    }

    pub fn of_sample(sample: &SpectralSample) -> Self {
        SemicircleRef::new(sample.convention, sample.deformation)
    }

    pub fn radius(&self) -> f64 {
        self.convention.radius(self.a)
    }

    pub fn density(&self, x: f64) -> f64 {
        let r = self.radius();
        let s = r * r - x * x;
        if s <= 0.0 {
            0.0
        } else {
            2.0 / (PI * r * r) * s.sqrt()
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let r = self.radius();
        if x <= -r {
            return 0.0;
        }
        if x >= r {
            return 1.0;
        }
        0.5 + (x * (r * r - x * x).sqrt() + r * r * (x / r).asin()) / (PI * r * r)
    }
}

/// Closed-form semicircle density; zero outside the support.
pub fn semicircle_density(x: f64, sc: &SemicircleRef) -> f64 {
    sc.density(x)
}

fn require_upper(z: Complex64) -> Result<()> {
    if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::input(format!("Stieltjes argument must have Im z > 0, got {z}")));
    }
    Ok(())
}

/// `(1/N) sum_j 1/(z - y_j)`. With this sign convention `Im m < 0` for
/// `Im z > 0`.
pub fn stieltjes_empirical(sample: &SpectralSample, z: Complex64) -> Result<Complex64> {
    require_upper(z)?;
    if sample.is_empty() {
        return Err(Error::input("empty sample"));
    }
    Ok(stieltjes_sum(&sample.eigenvalues, z))
}

fn stieltjes_sum(y: &[f64], z: Complex64) -> Complex64 {
    let s: Complex64 = y.iter().map(|&yj| 1.0 / (z - yj)).sum();
    s / y.len() as f64
}

/// `∫ rho_sc(r) dr / (z - r) = (2/R^2) (z - sqrt(z - R) sqrt(z + R))` with
/// principal square roots, which behaves like `1/z` at infinity.
pub fn stieltjes_semicircle(z: Complex64, sc: &SemicircleRef) -> Result<Complex64> {
    require_upper(z)?;
    let r = sc.radius();
    Ok(stieltjes_semicircle_unchecked(z, r))
}

fn stieltjes_semicircle_unchecked(z: Complex64, r: f64) -> Complex64 {
    let root = (z - r).sqrt() * (z + r).sqrt();
    let diff = z - root;
    // For large |z| the difference cancels; use R^2 / (z + root) instead.
    let stable = if diff.norm() < 0.5 * z.norm() {
        r * r / (z + root)
    } else {
        diff
    };
    stable * (2.0 / (r * r))
}

/// Quantile sample: `y_j` with `F(y_j) = (j - 1/2)/N`, by bisection.
pub fn semicircle_quantiles(n: usize, sc: &SemicircleRef) -> Result<SpectralSample> {
    if n < 2 {
        return Err(Error::input("need N >= 2 quantiles"));
    }
    let r = sc.radius();
    let values = (1..=n)
        .map(|j| {
            let target = (j as f64 - 0.5) / n as f64;
            if 2 * j - 1 == n {
                return 0.0;
            }
            let (mut lo, mut hi) = (-r, r);
            while hi - lo > 1e-13 * r {
                let mid = 0.5 * (lo + hi);
                if sc.cdf(mid) < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect();
    let mut s = SpectralSample::from_values(values, sc.convention, 0);
    s.deformation = sc.a;
    Ok(s)
}

/// Parameters of the good-set test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodSetParams {
    /// Lowest imaginary part.
    pub eta: f64,
    /// Allowed deviation of the Stieltjes transforms.
    pub delta: f64,
    /// Bound on `max |y_j|`.
    pub k: f64,
    /// Energy window; defaults to one unit beyond the semicircle support.
    pub window: Option<(f64, f64)>,
}

impl GoodSetParams {
    pub fn new(eta: f64, delta: f64) -> Self {
        GoodSetParams {
            eta,
            delta,
            k: 10.0,
            window: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoodSetReport {
    pub pass: bool,
    /// Largest `|m_N(z) - m_sc(z)|` over the grid.
    pub worst: f64,
    pub worst_at: (f64, f64),
    pub within_k: bool,
    pub grid_points: usize,
}

/// Membership in the good set: `max_j |y_j| <= K` and
/// `|m_N(z) - m_sc(z)| <= delta` on a grid of spacing `eta/2` covering the
/// energy window times `Im z` in `[eta, 1]`.
pub fn in_good_set(sample: &SpectralSample, p: &GoodSetParams) -> Result<GoodSetReport> {
    if sample.is_empty() {
        return Err(Error::input("empty sample"));
    }
    if !(p.eta > 0.0) {
        return Err(Error::input("eta must be positive"));
    }
    let sc = SemicircleRef::of_sample(sample);
    let r = sc.radius();
    let (e0, e1) = p.window.unwrap_or((-r - 1.0, r + 1.0));
    let h = p.eta / 2.0;
    let ne = ((e1 - e0) / h).ceil() as usize + 1;
    let ni = ((1.0 - p.eta).max(0.0) / h).ceil() as usize + 1;
    let y = &sample.eigenvalues;
    let mut worst = 0.0;
    let mut worst_at = (e0, p.eta);
    for a in 0..ne {
        let e = (e0 + a as f64 * h).min(e1);
        for b in 0..ni {
            let im = (p.eta + b as f64 * h).min(1.0f64.max(p.eta));
            let z = Complex64::new(e, im);
            let dev = (stieltjes_sum(y, z) - stieltjes_semicircle_unchecked(z, r)).norm();
            if dev > worst {
                worst = dev;
                worst_at = (e, im);
            }
        }
    }
    let within_k = y.iter().all(|x| x.abs() <= p.k);
    Ok(GoodSetReport {
        pass: within_k && worst <= p.delta,
        worst,
        worst_at,
        within_k,
        grid_points: ne * ni,
    })
}

/// Sup distance between the pooled empirical CDF of `samples` and the
/// semicircle CDF.
pub fn cdf_sup_distance(samples: &[SpectralSample], sc: &SemicircleRef) -> Result<f64> {
    let mut xs: Vec<f64> = samples.iter().flat_map(|s| s.eigenvalues.iter().copied()).collect();
    if xs.is_empty() {
        return Err(Error::input("no eigenvalues"));
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    Ok(xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = sc.cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max))
}

/// Running `(count, sum, sum of squares)`; merging is associative.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(mut self, other: Moments) -> Moments {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Sample standard deviation (divisor `count - 1`).
    pub fn std(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0).sqrt()
    }

    pub fn stderr(&self) -> f64 {
        self.std() / (self.count as f64).sqrt()
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::default();
        iter.into_iter().for_each(|x| m.push(x));
        m
    }
}

/// Gap statistic averaged over `count` samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapEstimate {
    pub u: f64,
    pub s: f64,
    pub delta: f64,
    pub value: f64,
    pub count: u64,
    pub stderr: f64,
    /// Eigenvalues inside the `t_N` window, summed over samples.
    pub window_count: u64,
    /// Set when the window held fewer than 10 eigenvalues per sample.
    pub low_count: bool,
}

/// Value of the gap statistic for one sample, with the number of eigenvalues
/// in the window.
pub fn gap_statistic_value(sample: &SpectralSample, u: f64, s: f64, delta: f64) -> Result<(f64, u64)> {
    if sample.is_empty() {
        return Err(Error::input("empty sample"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::input(format!("window exponent must lie in (0, 1), got {delta}")));
    }
    if !(s >= 0.0) {
        return Err(Error::input("s must be nonnegative"));
    }
    let sc = SemicircleRef::of_sample(sample);
    let rho = sc.density(u);
    if !(rho > 0.0) {
        return Err(Error::input(format!("u = {u} is outside the bulk")));
    }
    let mut x = sample.eigenvalues.clone();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let t_n = n.powf(-1.0 + delta);
    let threshold = s / (n * rho);
    let mut hits = 0u64;
    let in_window = x.iter().filter(|&&xj| (xj - u).abs() <= t_n).count() as u64;
    if s > 0.0 {
        for w in x.windows(2) {
            if (w[0] - u).abs() <= t_n && w[1] - w[0] <= threshold {
                hits += 1;
            }
        }
    }
    Ok((hits as f64 / (2.0 * n * t_n * rho), in_window))
}

/// Gap statistic `Lambda(u; s)` for one sample.
pub fn gap_statistic(sample: &SpectralSample, u: f64, s: f64, delta: f64) -> Result<GapEstimate> {
    gap_statistic_pooled(std::slice::from_ref(sample), u, s, delta)
}

/// Mean gap statistic over several samples, with standard error
/// `std / sqrt(M)`.
pub fn gap_statistic_pooled(
    samples: &[SpectralSample],
    u: f64,
    s: f64,
    delta: f64,
) -> Result<GapEstimate> {
    if samples.is_empty() {
        return Err(Error::input("no samples"));
    }
    let mut m = Moments::default();
    let mut window = 0;
    for sample in samples {
        let (v, w) = gap_statistic_value(sample, u, s, delta)?;
        m.push(v);
        window += w;
    }
    Ok(GapEstimate {
        u,
        s,
        delta,
        value: m.mean(),
        count: m.count,
        stderr: m.stderr(),
        window_count: window,
        low_count: window < 10 * m.count,
    })
}

/// Pair-correlation histogram in the rescaled separation
/// `tau = N rho_sc(u) |x_i - x_j|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub u: f64,
    pub half_width: f64,
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Normalized so a Poisson process of intensity `N rho_sc` gives 1.
    pub density: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Pairs with both points in the window.
    pub total_pairs: u64,
    /// Of those, pairs beyond the last bin.
    pub out_of_range: u64,
    pub samples: usize,
    /// No pair fell in the window.
    pub empty: bool,
}

/// Histogram of rescaled separations over unordered pairs of eigenvalues
/// that both lie within `half_width` of `u`, in `bins` equal bins on
/// `[0, tau_max]`.
pub fn pair_correlation_estimate(
    samples: &[SpectralSample],
    u: f64,
    half_width: f64,
    tau_max: f64,
    bins: usize,
) -> Result<CorrelationEstimate> {
    if samples.is_empty() {
        return Err(Error::input("no samples"));
    }
    if bins == 0 || !(tau_max > 0.0) || !(half_width > 0.0) {
        return Err(Error::input("need bins > 0, tau_max > 0 and a positive window"));
    }
    let sc = SemicircleRef::of_sample(&samples[0]);
    let rho = sc.density(u);
    if !(rho > 0.0) {
        return Err(Error::input(format!("u = {u} is outside the bulk")));
    }
    let dtau = tau_max / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|k| k as f64 * dtau).collect();
    let mut counts = vec![0u64; bins];
    let mut per_sample = vec![Moments::default(); bins];
    let mut total_pairs = 0u64;
    let mut out_of_range = 0u64;
    let mut expected = vec![0.0; bins];
    for sample in samples {
        let lambda = sample.len() as f64 * rho;
        for (k, e) in expected.iter_mut().enumerate() {
            let (a, b) = (edges[k], edges[k + 1]);
            *e = lambda * (2.0 * half_width * (b - a) - (b * b - a * a) / (2.0 * lambda));
        }
        let mut local: Vec<f64> = sample
            .eigenvalues
            .iter()
            .copied()
            .filter(|x| (x - u).abs() <= half_width)
            .collect();
        local.sort_by(f64::total_cmp);
        let mut c = vec![0u64; bins];
        for i in 0..local.len() {
            for j in i + 1..local.len() {
                total_pairs += 1;
                let tau = lambda * (local[j] - local[i]);
                let k = (tau / dtau) as usize;
                if k < bins {
                    c[k] += 1;
                } else {
                    out_of_range += 1;
                    if tau > tau_max * 2.0 {
                        // Sorted: later j are farther away.
                        out_of_range += (local.len() - j - 1) as u64;
                        total_pairs += (local.len() - j - 1) as u64;
                        break;
                    }
                }
            }
        }
        for k in 0..bins {
            counts[k] += c[k];
            per_sample[k].push(c[k] as f64 / expected[k]);
        }
    }
    let empty = total_pairs == 0;
    Ok(CorrelationEstimate {
        u,
        half_width,
        density: per_sample.iter().map(|m| m.mean()).collect(),
        stderr: per_sample.iter().map(|m| m.stderr()).collect(),
        edges,
        counts,
        total_pairs,
        out_of_range,
        samples: samples.len(),
        empty,
    })
}

/// Poisson point process of intensity `N rho_sc(x)`: a Poisson(N) number of
/// i.i.d. semicircle points.
pub fn poisson_control(n: usize, sc: &SemicircleRef, seed: u64) -> Result<SpectralSample> {
    let mut rng = rng::stream(seed, 0);
    let count = Poisson::new(n as f64)
        .map_err(|e| Error::input(e.to_string()))?
        .sample(&mut rng) as usize;
    let r = sc.radius();
    let values = (0..count)
        .map(|_| {
            // Rejection from the uniform law on [-R, R].
            loop {
                let x = r * (2.0 * rng.random::<f64>() - 1.0);
                if rng.random::<f64>() * r <= (r * r - x * x).sqrt() {
                    break x;
                }
            }
        })
        .collect();
    let mut s = SpectralSample::from_values(values, sc.convention, seed);
    s.deformation = sc.a;
    Ok(s)
}
