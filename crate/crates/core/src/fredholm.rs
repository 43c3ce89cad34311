//! Sine-kernel reference quantities: the Fredholm determinant
//! `det(1 - K_alpha)` on `L^2(0, alpha)`, the gap density, the
//! inclusion–exclusion series and determinantal correlations.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::quadrature::GaussLegendre;

/// `sin(pi tau) / (pi tau)`, with a Taylor series near the origin.
pub fn sine_kernel(tau: f64) -> f64 {
    let x = PI * tau;
    if tau.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// Nyström discretization of the sine kernel restricted to `(0, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineKernelOp {
    pub alpha: f64,
    pub order: usize,
}

impl SineKernelOp {
    pub fn new(alpha: f64, order: usize) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::input(format!("interval length must be >= 0, got {alpha}")));
        }
        if order < 10 {
            return Err(Error::input("quadrature order must be at least 10"));
        }
        Ok(SineKernelOp { alpha, order })
    }

    /// Symmetrized matrix `W^{1/2} K W^{1/2}` on the Gauss–Legendre nodes.
    pub fn matrix(&self) -> Vec<f64> {
        let gl = GaussLegendre::new(self.order);
        let (x, w): (Vec<f64>, Vec<f64>) = gl.mapped(0.0, self.alpha).unzip();
        let n = self.order;
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                k[i * n + j] = w[i].sqrt() * sine_kernel(x[i] - x[j]) * w[j].sqrt();
            }
        }
        k
    }

    pub fn det(&self) -> f64 {
        if self.alpha == 0.0 {
            return 1.0;
        }
        let n = self.order;
        let mut m = self.matrix();
        for v in m.iter_mut() {
            *v = -*v;
        }
        for i in 0..n {
            m[i * n + i] += 1.0;
        }
        linalg::det(m, n)
    }
}

/// Default quadrature order: enough nodes for near machine precision on
/// `(0, alpha)`.
pub fn default_order(alpha: f64) -> usize {
    (20.0 + 6.0 * alpha).ceil() as usize
}

/// `det(1 - K_alpha)` by Nyström discretization with `order` nodes.
pub fn fredholm_det(alpha: f64, order: usize) -> Result<f64> {
    Ok(SineKernelOp::new(alpha, order)?.det())
}

fn det_auto(alpha: f64) -> f64 {
    let a = alpha.max(0.0);
    SineKernelOp {
        alpha: a,
        order: default_order(a),
    }
    .det()
}

/// Step of the central differences.
pub const DIFF_STEP: f64 = 1e-3;

/// Gap density `p(alpha) = d^2/d alpha^2 det(1 - K_alpha)`, by central second
/// differences with step `1e-3` and one Richardson level.
pub fn gap_density(alpha: f64) -> Result<f64> {
    let h = DIFF_STEP;
    if !(alpha > 2.0 * h) {
        return Err(Error::input(format!(
            "gap density needs alpha > {} for the difference stencil, got {alpha}",
            2.0 * h
        )));
    }
    let f0 = det_auto(alpha);
    let d2 = |h: f64| (det_auto(alpha + h) - 2.0 * f0 + det_auto(alpha - h)) / (h * h);
    let (coarse, fine) = (d2(h), d2(h / 2.0));
    let p = (4.0 * fine - coarse) / 3.0;
    if !p.is_finite() {
        return Err(Error::numerical("gap density difference quotient is not finite"));
    }
    Ok(p)
}

/// `∫_0^s p = F'(s) - F'(0) = F'(s) + 1` with `F(alpha) = det(1 - K_alpha)`,
/// `F'` by central differences with one Richardson level.
pub fn gap_integral(s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::input("s must be nonnegative"));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let h = DIFF_STEP.min(s / 4.0);
    let d1 = |h: f64| (det_auto(s + h) - det_auto(s - h)) / (2.0 * h);
    let fprime = (4.0 * d1(h / 2.0) - d1(h)) / 3.0;
    Ok(fprime + 1.0)
}

/// Truncated inclusion–exclusion series for `∫_0^s p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Individual terms `m = 2..=M`.
    pub terms: Vec<f64>,
    /// Magnitude of the last term, bounding the truncation error of an
    /// alternating series.
    pub remainder_bound: f64,
}

/// `sum_{m=2}^{M} (-1)^m/(m-1)! ∫_{[0,s]^{m-1}} det(sinc(a_i - a_j))_{i,j<=m}`
/// with `a_1 = 0`, each integral by tensor Gauss–Legendre.
pub fn series_gap_integral(s: f64, m_max: usize) -> Result<SeriesValue> {
    if !(s >= 0.0) {
        return Err(Error::input("s must be nonnegative"));
    }
    if !(2..=6).contains(&m_max) {
        return Err(Error::input(format!("truncation must be in 2..=6, got {m_max}")));
    }
    if s == 0.0 {
        return Ok(SeriesValue {
            value: 0.0,
            terms: vec![0.0; m_max - 1],
            remainder_bound: 0.0,
        });
    }
    let q = (8.0 + 4.0 * s).ceil() as usize;
    let gl = GaussLegendre::new(q);
    let (x, w): (Vec<f64>, Vec<f64>) = gl.mapped(0.0, s).unzip();
    let mut terms = Vec::new();
    let mut fact = 1.0;
    for m in 2..=m_max {
        fact *= (m - 1) as f64;
        let dims = m - 1;
        let mut idx = vec![0usize; dims];
        let mut total = 0.0;
        let mut a = vec![0.0; m];
        let mut mat = vec![0.0; m * m];
        loop {
            let mut weight = 1.0;
            for (d, &k) in idx.iter().enumerate() {
                a[d + 1] = x[k];
                weight *= w[k];
            }
            for i in 0..m {
                for j in 0..m {
                    mat[i * m + j] = sine_kernel(a[i] - a[j]);
                }
            }
            total += weight * linalg::det(mat.clone(), m);
            // Odometer increment.
            let mut d = 0;
            while d < dims {
                idx[d] += 1;
                if idx[d] < q {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == dims {
                break;
            }
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        terms.push(sign * total / fact);
    }
    Ok(SeriesValue {
        value: terms.iter().sum(),
        remainder_bound: terms.last().map_or(0.0, |t| t.abs()),
        terms,
    })
}

/// `det(sinc(a_i - a_j))_{i,j=1}^k`.
pub fn determinantal_correlation(points: &[f64]) -> f64 {
    let k = points.len();
    if k == 0 {
        return 1.0;
    }
    let mut m = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            m[i * k + j] = sine_kernel(points[i] - points[j]);
        }
    }
    linalg::det(m, k)
}

/// One row of the reference table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FredholmRow {
    pub alpha: f64,
    pub det: f64,
    pub p: f64,
    pub int_p: f64,
}

/// Rows at `alpha = 0, step, 2 step, ..., alpha_max`. The `alpha = 0` row
/// carries the exact values `(1, 0, 0)`.
pub fn fredholm_table(alpha_max: f64, step: f64) -> Result<Vec<FredholmRow>> {
    if !(step > 2.0 * DIFF_STEP) || !(alpha_max >= 0.0) {
        return Err(Error::input(format!(
            "need step > {} and alpha_max >= 0",
            2.0 * DIFF_STEP
        )));
    }
    let count = (alpha_max / step + 1e-9).floor() as usize;
    (0..=count)
        .map(|k| {
            let alpha = k as f64 * step;
            if k == 0 {
                return Ok(FredholmRow {
                    alpha,
                    det: 1.0,
                    p: 0.0,
                    int_p: 0.0,
                });
            }
            Ok(FredholmRow {
                alpha,
                det: det_auto(alpha),
                p: gap_density(alpha)?,
                int_p: gap_integral(alpha)?,
            })
        })
        .collect()
}

/// CSV body (header row plus data) for [`fredholm_table`] output.
pub fn table_csv(rows: &[FredholmRow]) -> String {
    let mut s = String::from("alpha,det,p,int_p\n");
    for r in rows {
        writeln!(s, "{},{:.15e},{:.15e},{:.15e}", r.alpha, r.det, r.p, r.int_p).unwrap();
    }
    s
}
