//! Contour-integral correlation kernel of the Gaussian-divisible ensemble
//! `diag(y) + a V` (support1 convention, `t = a^2`, `S = t/N`), its saddle
//! points and the two-saddle approximation.
//!
//! With `f(z) = (z^2 - 2uz)/(2t) + (1/N) sum log(z - y_j)`, the rescaled
//! kernel is
//!
//! ```text
//! (1/N rho) K(u, u + tau/(N rho)) = N ∫_γ dz/2πi ∫_Γ dw/2πi h(w) g(z, w) e^{N(f(w) - f(z))}
//! ```
//!
//! `g` is a finite sum of products of a `z`-function and a `w`-function, so
//! the double integral is assembled exactly from one-dimensional contour
//! integrals.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensemble::Convention;
use crate::error::{Error, Result};
use crate::fredholm::sine_kernel;
use crate::linalg;
use crate::quadrature::adaptive_vec;
use crate::statistics::SemicircleRef;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Everything needed to evaluate the kernel at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    /// Bulk energy (support1 convention).
    pub u: f64,
    /// Rescaled separation.
    pub tau: f64,
    /// Gaussian time `t = a^2`.
    pub t: f64,
    /// The fixed spectrum.
    pub y: Vec<f64>,
    /// Reference point in `h`; defaults to `Re q_N`.
    pub r: Option<f64>,
    /// Height of the horizontal `z`-contours; defaults to `Im q_N`.
    pub omega: Option<f64>,
    /// Density in the rescaling; defaults to the deformed semicircle at `u`.
    pub rho: Option<f64>,
    /// Contours are cut where the Gaussian factor drops below this.
    pub cutoff: f64,
    /// Relative tolerance of the contour quadratures.
    pub rel_tol: f64,
    pub max_panels: usize,
    /// Bound `K` on `|y_j|`.
    pub bound: f64,
}

impl KernelConfig {
    pub fn new(u: f64, tau: f64, t: f64, y: Vec<f64>) -> Self {
        KernelConfig {
            u,
            tau,
            t,
            y,
            r: None,
            omega: None,
            rho: None,
            cutoff: 1e-16,
            rel_tol: 1e-10,
            max_panels: 4000,
            bound: 10.0,
        }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(Error::input(format!("t must be positive, got {}", self.t)));
        }
        if !(self.u.is_finite() && self.tau.is_finite()) {
            return Err(Error::input("u and tau must be finite"));
        }
        if self.y.is_empty() {
            return Err(Error::input("empty spectrum"));
        }
        if let Some(y) = self.y.iter().find(|y| !(y.abs() <= self.bound)) {
            return Err(Error::input(format!("y = {y} outside [-K, K], K = {}", self.bound)));
        }
        if let Some(w) = self.omega {
            if !(w > 0.0) {
                return Err(Error::input(format!("omega must be positive, got {w}")));
            }
        }
        if let Some(rho) = self.rho {
            if !(rho > 0.0) {
                return Err(Error::input(format!("rho must be positive, got {rho}")));
            }
        }
        if !(self.cutoff > 0.0 && self.cutoff < 1.0 && self.rel_tol > 0.0) {
            return Err(Error::input("cutoff must lie in (0, 1) and rel_tol be positive"));
        }
        Ok(())
    }

    /// Deformed semicircle density `varrho(u)` with `a^2 = t`, unless
    /// overridden.
    pub fn rho(&self) -> f64 {
        self.rho.unwrap_or_else(|| {
            SemicircleRef::new(Convention::Support1, self.t.sqrt()).density(self.u)
        })
    }

    fn check_rho(&self) -> Result<f64> {
        let rho = self.rho();
        if rho > 0.0 {
            Ok(rho)
        } else {
            Err(Error::input(format!("u = {} is outside the bulk", self.u)))
        }
    }
}

/// `f_N` and its derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FValues {
    pub f: Complex64,
    pub f1: Complex64,
    pub f2: Complex64,
}

fn pole_check(z: Complex64, y: &[f64]) -> Result<()> {
    match y.iter().find(|&&y| (z - y).norm() < 1e-13) {
        Some(y) => Err(Error::numerical(format!("z = {z} hits the pole y = {y}"))),
        None => Ok(()),
    }
}

/// `f_N(z)` with principal logarithms term by term, and its first two
/// derivatives.
pub fn f_n(z: Complex64, cfg: &KernelConfig) -> Result<FValues> {
    pole_check(z, &cfg.y)?;
    let n = cfg.n() as f64;
    let (mut lg, mut s1, mut s2) = (Complex64::default(), Complex64::default(), Complex64::default());
    for &y in &cfg.y {
        let d = z - y;
        let inv = d.inv();
        lg += d.ln();
        s1 += inv;
        s2 += inv * inv;
    }
    Ok(FValues {
        f: (z * z - 2.0 * cfg.u * z) / (2.0 * cfg.t) + lg / n,
        f1: (z - cfg.u) / cfg.t + s1 / n,
        f2: 1.0 / cfg.t - s2 / n,
    })
}

/// `f_N'` only.
pub fn f_n_prime(z: Complex64, cfg: &KernelConfig) -> Result<Complex64> {
    pole_check(z, &cfg.y)?;
    let s: Complex64 = cfg.y.iter().map(|&y| (z - y).inv()).sum();
    Ok((z - cfg.u) / cfg.t + s / cfg.n() as f64)
}

/// `g_N(z, w)` in its defining form; needs `w != r`.
pub fn g_explicit(z: Complex64, w: Complex64, r: f64, cfg: &KernelConfig) -> Result<Complex64> {
    pole_check(z, &cfg.y)?;
    pole_check(w, &cfg.y)?;
    let wr = w - r;
    if wr.norm() < 1e-300 {
        return Err(Error::input("explicit g_N is singular at w = r"));
    }
    let s: Complex64 = cfg
        .y
        .iter()
        .map(|&y| (y - r) / ((w - y) * (z - y)))
        .sum();
    Ok((wr + z - cfg.u) / (cfg.t * wr) - s / (cfg.n() as f64 * wr))
}

/// `g_N(z, w) = f'(z)/(w - r) + (f'(z) - f'(w))/(z - w)`, with the
/// difference quotient replaced by `f''(z)` at `z = w`.
pub fn g_identity(z: Complex64, w: Complex64, r: f64, cfg: &KernelConfig) -> Result<Complex64> {
    let fz = f_n(z, cfg)?;
    let wr = w - r;
    if wr.norm() < 1e-300 {
        return Err(Error::input("g_N is singular at w = r"));
    }
    let quotient = if (z - w).norm() <= 1e-12 * z.norm().max(1.0) {
        fz.f2
    } else {
        (fz.f1 - f_n_prime(w, cfg)?) / (z - w)
    };
    Ok(fz.f1 / wr + quotient)
}

/// `g_N`: the defining form, switching to the identity form near `w = r`.
pub fn g_n(z: Complex64, w: Complex64, r: f64, cfg: &KernelConfig) -> Result<Complex64> {
    if (w - r).norm() < 1e-8 {
        g_identity(z, w, r, cfg)
    } else {
        g_explicit(z, w, r, cfg)
    }
}

/// `(1 - e^{-x})/x`, accurate near 0.
fn psi(x: Complex64) -> Complex64 {
    if x.norm() < 0.1 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..20 {
            term *= -x / k as f64;
            sum += term;
        }
        sum
    } else {
        (1.0 - (-x).exp()) / x
    }
}

/// `h_N(w) = (e^{-tau (w - r)/(t rho)} - 1)/tau`, with the limit
/// `-(w - r)/(t rho)` at `tau = 0`.
pub fn h_n(w: Complex64, r: f64, tau: f64, t: f64, rho: f64) -> Complex64 {
    let x = (w - r) / (t * rho);
    -x * psi(tau * x)
}

/// `h_N(w)/(w - r)`, regular at `w = r`.
fn h_over(w: Complex64, r: f64, tau: f64, t: f64, rho: f64) -> Complex64 {
    -psi(tau * (w - r) / (t * rho)) / (t * rho)
}

/// `h_N(w) g_N(z, w)`, regular at `w = r`.
pub fn h_times_g(z: Complex64, w: Complex64, r: f64, cfg: &KernelConfig) -> Result<Complex64> {
    pole_check(z, &cfg.y)?;
    pole_check(w, &cfg.y)?;
    let rho = cfg.check_rho()?;
    let phi = h_over(w, r, cfg.tau, cfg.t, rho);
    let s: Complex64 = cfg
        .y
        .iter()
        .map(|&y| (y - r) / ((w - y) * (z - y)))
        .sum();
    Ok(phi * ((w - r + z - cfg.u) / cfg.t - s / cfg.n() as f64))
}

/// A located saddle point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleResult {
    /// `q_N` in the upper half plane; the other saddle is its conjugate.
    pub q: Complex64,
    pub f_second: Complex64,
    pub residual: f64,
    /// Continuum saddle `q+`.
    pub closed_form_q: Complex64,
    pub iterations: usize,
}

impl SaddleResult {
    pub fn conjugate(&self) -> Complex64 {
        self.q.conj()
    }
}

/// The continuum saddle `q+` of `(z - u)/t + 2(z - sqrt(z^2 - 1)) = 0`.
pub fn continuum_saddle(u: f64, t: f64) -> Complex64 {
    let d = 1.0 + 4.0 * t;
    Complex64::new((2.0 * t + 1.0) * u, 2.0 * t * (d - u * u).sqrt()) / d
}

/// Critical point of `f_N` in the upper half plane: Newton's method from
/// the continuum saddle, falling back to the fixed-point iteration
/// `z = u - (t/N) sum 1/(z - y_j)`.
pub fn solve_saddle(cfg: &KernelConfig) -> Result<SaddleResult> {
    cfg.validate()?;
    if cfg.u.abs() >= (1.0 + 4.0 * cfg.t).sqrt() {
        return Err(Error::input(format!("u = {} is outside the bulk", cfg.u)));
    }
    const TOL: f64 = 1e-12;
    let seed = continuum_saddle(cfg.u, cfg.t);
    let mut trace = Vec::new();
    let finish = |q: Complex64, iterations: usize| -> Result<SaddleResult> {
        if q.im <= 1e-8 * cfg.t {
            return Err(Error::numerical(format!(
                "saddle collapsed onto the real axis at {q:.6e}; no complex critical point"
            )));
        }
        let fv = f_n(q, cfg)?;
        Ok(SaddleResult {
            q,
            f_second: fv.f2,
            residual: fv.f1.norm(),
            closed_form_q: seed,
            iterations,
        })
    };
    let newton = |mut z: Complex64, trace: &mut Vec<Complex64>| -> Result<Option<(Complex64, usize)>> {
        for it in 1..=100 {
            let fv = f_n(z, cfg)?;
            let next = z - fv.f1 / fv.f2;
            trace.push(next);
            if !(next.im > 0.0) || !next.re.is_finite() {
                return Ok(None);
            }
            z = next;
            let res = f_n_prime(z, cfg)?.norm();
            if res < TOL {
                return Ok(Some((z, it)));
            }
        }
        Ok(None)
    };
    if let Some((q, it)) = newton(seed, &mut trace)? {
        return finish(q, it);
    }
    // Fixed-point iteration, then Newton polishing.
    let n = cfg.n() as f64;
    let mut z = seed;
    for it in 1..=100 {
        let s: Complex64 = cfg.y.iter().map(|&y| (z - y).inv()).sum();
        z = cfg.u - cfg.t * s / n;
        trace.push(z);
        if !(z.im > 0.0) {
            break;
        }
        if f_n_prime(z, cfg)?.norm() < 1e-6 {
            if let Some((q, more)) = newton(z, &mut trace)? {
                return finish(q, it + more);
            }
            break;
        }
    }
    let tail: Vec<String> = trace.iter().rev().take(5).map(|z| format!("{z:.6e}")).collect();
    Err(Error::numerical(format!(
        "saddle search failed after {} steps; last iterates {}",
        trace.len(),
        tail.join(", ")
    )))
}

/// `(i/2pi)[h(q+) - h(q-)]` for an arbitrary ordered pair of saddles.
pub fn two_saddle_sum(qp: Complex64, qm: Complex64, r: f64, tau: f64, t: f64, rho: f64) -> Complex64 {
    I / (2.0 * PI) * (h_n(qp, r, tau, t, rho) - h_n(qm, r, tau, t, rho))
}

/// Two-saddle approximation `sin(theta)/(pi tau)`, `theta = tau Im q_N/(t rho)`.
pub fn saddle_approx_kernel(cfg: &KernelConfig) -> Result<f64> {
    let s = solve_saddle(cfg)?;
    let rho = cfg.check_rho()?;
    let r = cfg.r.unwrap_or(s.q.re);
    Ok(two_saddle_sum(s.q, s.conjugate(), r, cfg.tau, cfg.t, rho).re)
}

/// Result of a kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    /// Imaginary part of the assembled integral (zero in exact arithmetic).
    pub imag: f64,
    /// Largest per-component quadrature error estimate, scaled into the
    /// kernel value.
    pub error: f64,
    pub saddle: SaddleResult,
    /// Imaginary part below `1e-6` relative.
    pub valid: bool,
}

struct Weights<'a> {
    cfg: &'a KernelConfig,
    n: f64,
    /// `N Re f(q)`, removed from every exponent.
    shift: f64,
}

impl Weights<'_> {
    /// `N f(z) - shift` up to multiples of `2 pi i`.
    fn log_weight(&self, z: Complex64) -> Complex64 {
        let cfg = self.cfg;
        let mut lg = Complex64::default();
        let mut prod = Complex64::new(1.0, 0.0);
        for (k, &y) in cfg.y.iter().enumerate() {
            prod *= z - y;
            if k % 8 == 7 {
                lg += prod.ln();
                prod = Complex64::new(1.0, 0.0);
            }
        }
        lg += prod.ln();
        self.n * (z * z - 2.0 * cfg.u * z) / (2.0 * cfg.t) + lg - self.shift
    }

    fn log_mag(&self, z: Complex64) -> f64 {
        self.log_weight(z).re
    }
}

/// Walk from `start` in steps of `step` until `g` stays below `floor`.
fn extent(g: impl Fn(f64) -> f64, start: f64, step: f64, floor: f64) -> Result<f64> {
    let mut s = start;
    let mut below = 0;
    for _ in 0..200_000 {
        s += step;
        if g(s) < floor {
            below += 1;
            if below == 4 {
                return Ok(s);
            }
        } else {
            below = 0;
        }
    }
    Err(Error::numerical("contour truncation point not found"))
}

/// `(1/N rho) K(u, u + tau/(N rho); y)` by contour quadrature.
pub fn eval_kernel(cfg: &KernelConfig) -> Result<KernelValue> {
    let saddle = solve_saddle(cfg)?;
    let rho = cfg.check_rho()?;
    let r = cfg.r.unwrap_or(saddle.q.re);
    eval_with(cfg, &saddle, r, rho)
}

fn eval_with(cfg: &KernelConfig, saddle: &SaddleResult, r: f64, rho: f64) -> Result<KernelValue> {
    let q = saddle.q;
    let n = cfg.n();
    let nf = n as f64;
    let omega = cfg.omega.unwrap_or(q.im);
    let x0 = q.re;
    let w8 = Weights {
        cfg,
        n: nf,
        shift: nf * f_n(q, cfg)?.f.re,
    };
    let floor = cfg.cutoff.ln();
    let step = (cfg.t / nf).sqrt() / 2.0;
    let dim = n + 2;

    // w-integrals along Γ: components h, h/(w-r), h/((w-r)(w-y_j)).
    let w_integrand = |w: Complex64, dw: Complex64, out: &mut [Complex64]| {
        let e = w8.log_weight(w).exp() * dw / (2.0 * PI * I);
        let phi = h_over(w, r, cfg.tau, cfg.t, rho);
        out[0] = phi * (w - r) * e;
        out[1] = phi * e;
        for (o, &y) in out[2..].iter_mut().zip(&cfg.y) {
            *o = phi * e / (w - y);
        }
    };
    let s_top = extent(|s| w8.log_mag(Complex64::new(x0, s)), q.im.max(0.0), step, floor)?;
    let s_bot = -extent(|s| w8.log_mag(Complex64::new(x0, -s)), q.im.max(0.0), step, floor)?;
    let radius = (1e-2 / (nf * nf)).max(10.0 * f64::EPSILON * x0.abs().max(1.0));
    let close = cfg
        .y
        .iter()
        .copied()
        .filter(|y| (y - x0).abs() < radius)
        .min_by(|a, b| (a - x0).abs().total_cmp(&(b - x0).abs()));
    let mut w_sum = vec![Complex64::default(); dim];
    let mut err_w: f64 = 0.0;
    let add = |acc: &mut Vec<Complex64>, part: (Vec<Complex64>, f64), err: &mut f64| {
        for (a, p) in acc.iter_mut().zip(part.0) {
            *a += p;
        }
        *err = err.max(part.1);
    };
    let vertical = |lo: f64, hi: f64, cuts: &[f64]| {
        let mut c: Vec<f64> = std::iter::once(lo)
            .chain(cuts.iter().copied().filter(|&s| s > lo && s < hi))
            .chain(std::iter::once(hi))
            .collect();
        c.dedup();
        adaptive_vec(
            |s, out| w_integrand(Complex64::new(x0, s), I, out),
            dim,
            &c,
            cfg.rel_tol,
            1e-300,
            cfg.max_panels,
        )
    };
    match close {
        None => {
            let part = vertical(s_bot, s_top, &[-q.im, 0.0, q.im])?;
            add(&mut w_sum, part, &mut err_w);
        }
        Some(yc) => {
            // Semicircular detour to the right of y_c.
            let d = x0 - yc;
            let sigma = (radius * radius - d * d).sqrt();
            add(&mut w_sum, vertical(s_bot, -sigma, &[-q.im])?, &mut err_w);
            add(&mut w_sum, vertical(sigma, s_top, &[q.im])?, &mut err_w);
            let th = sigma.atan2(d);
            let arc = adaptive_vec(
                |a, out| {
                    let e = Complex64::from_polar(radius, a);
                    w_integrand(yc + e, I * e, out)
                },
                dim,
                &[-th, 0.0, th],
                cfg.rel_tol,
                1e-300,
                cfg.max_panels,
            )?;
            add(&mut w_sum, arc, &mut err_w);
        }
    }

    // z-integrals along γ: γ- rightwards at -iω, γ+ leftwards at +iω.
    let z_integrand = |x: f64, out: &mut [Complex64]| {
        out.iter_mut().for_each(|o| *o = Complex64::default());
        for (z, sign) in [(Complex64::new(x, -omega), 1.0), (Complex64::new(x, omega), -1.0)] {
            let e = (-w8.log_weight(z)).exp() * sign / (2.0 * PI * I);
            out[0] += e;
            out[1] += (z - cfg.u) * e;
            for (o, &y) in out[2..].iter_mut().zip(&cfg.y) {
                *o += e / (z - y);
            }
        }
    };
    let z_mag = |x: f64| {
        (-w8.log_mag(Complex64::new(x, omega))).max(-w8.log_mag(Complex64::new(x, -omega)))
    };
    let x_hi = extent(z_mag, x0, step, floor)?;
    let x_lo = -extent(|x| z_mag(-x), -x0, step, floor)?;
    let (z_sum, err_z) = adaptive_vec(z_integrand, dim, &[x_lo, x0, x_hi], cfg.rel_tol, 1e-300, cfg.max_panels)?;

    let mut total = (w_sum[0] * z_sum[0] + w_sum[1] * z_sum[1]) / cfg.t;
    let mut mixed = Complex64::default();
    for (j, &y) in cfg.y.iter().enumerate() {
        mixed += (y - r) * w_sum[2 + j] * z_sum[2 + j];
    }
    total = nf * total - mixed;
    let scale_w = w_sum.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let scale_z = z_sum.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let error = nf * (err_w * scale_z + err_z * scale_w) * (1.0 / cfg.t + 1.0);
    let valid = total.im.abs() <= 1e-6 * total.re.abs().max(1e-3);
    if !valid {
        log::warn!("kernel imaginary part {:.3e} is not negligible", total.im);
    }
    Ok(KernelValue {
        value: total.re,
        imag: total.im,
        error,
        saddle: *saddle,
        valid,
    })
}

/// `det[(1/N rho) K(u + a_i/(N rho), u + a_j/(N rho))]` for rescaled
/// positions `alpha` around `cfg.u`; `rho` and `r` stay those of `cfg.u`.
pub fn correlation_determinant(alpha: &[f64], cfg: &KernelConfig) -> Result<f64> {
    let m = alpha.len();
    if m == 0 || m > 4 {
        return Err(Error::input(format!("need 1 to 4 points, got {m}")));
    }
    let anchor = solve_saddle(cfg)?;
    let rho = cfg.check_rho()?;
    let r = cfg.r.unwrap_or(anchor.q.re);
    let scale = cfg.n() as f64 * rho;
    let mut cache: Vec<Option<SaddleResult>> = vec![None; m];
    let mut k = vec![0.0; m * m];
    for i in 0..m {
        let mut row_cfg = cfg.clone();
        row_cfg.u = cfg.u + alpha[i] / scale;
        row_cfg.rho = Some(rho);
        if cache[i].is_none() {
            cache[i] = Some(solve_saddle(&row_cfg)?);
        }
        let saddle = cache[i].unwrap();
        for j in 0..m {
            row_cfg.tau = alpha[j] - alpha[i];
            k[i * m + j] = eval_with(&row_cfg, &saddle, r, rho)?.value;
        }
    }
    Ok(linalg::det(k, m))
}

fn vandermonde(v: &[f64]) -> f64 {
    let mut p = 1.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            p *= v[j] - v[i];
        }
    }
    p
}

/// Density of the eigenvalues `x` of `diag(y) + sqrt(N S) V` (V standard
/// GUE), symmetric in `x` with total mass `N!`, so that restricted to
/// ordered `x` it is a probability density.
#[allow(non_snake_case)]
pub fn qS_density_smallN(x: &[f64], y: &[f64], s: f64) -> Result<f64> {
    let n = y.len();
    if n == 0 || n > 4 || x.len() != n {
        return Err(Error::input("need 1 <= N <= 4 and matching lengths"));
    }
    if !(s > 0.0) {
        return Err(Error::input(format!("S must be positive, got {s}")));
    }
    let dy = vandermonde(y);
    if dy == 0.0 {
        return Err(Error::input("coincident y values"));
    }
    let mut m = vec![0.0; n * n];
    for j in 0..n {
        for k in 0..n {
            m[j * n + k] = (-(x[j] - y[k]).powi(2) / (2.0 * s)).exp();
        }
    }
    let norm = (2.0 * PI * s).powf(-(n as f64) / 2.0);
    Ok(norm * vandermonde(x) / dy * linalg::det(m, n))
}

/// One row of a kernel sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub tau: f64,
    pub kernel: f64,
    pub saddle: f64,
    pub sinc: f64,
    pub abs_error: f64,
}

/// Evaluate the kernel, its two-saddle approximation and the sine kernel
/// at each `tau`.
pub fn kernel_sweep(cfg: &KernelConfig, taus: &[f64]) -> Result<Vec<SweepRow>> {
    let saddle = solve_saddle(cfg)?;
    let rho = cfg.check_rho()?;
    let r = cfg.r.unwrap_or(saddle.q.re);
    taus.iter()
        .map(|&tau| {
            let mut c = cfg.clone();
            c.tau = tau;
            let k = eval_with(&c, &saddle, r, rho)?.value;
            let a = two_saddle_sum(saddle.q, saddle.conjugate(), r, tau, cfg.t, rho).re;
            let sinc = sine_kernel(tau);
            Ok(SweepRow {
                tau,
                kernel: k,
                saddle: a,
                sinc,
                abs_error: (k - sinc).abs(),
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("tau,kernel,saddle_approx,sinc,abs_error\n");
    for r in rows {
        let _ = writeln!(out, "{},{:.12e},{:.12e},{:.12e},{:.6e}", r.tau, r.kernel, r.saddle, r.sinc, r.abs_error);
    }
    out
}
