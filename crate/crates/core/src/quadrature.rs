//! Quadrature rules: Gauss–Legendre, Gauss–Hermite and adaptive
//! Gauss–Kronrod (10/21 point) for scalar and complex-vector integrands.

use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j as f64 - 1.0) * z * p2 - (j as f64 - 1.0) * p3) / j as f64;
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Gauss–Legendre rule mapped onto `[a, b]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(node, weight)` pairs on `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (c + h * x, h * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Nodes and weights of the `n`-point Gauss–Hermite rule for the weight
/// `exp(-x^2)`, nodes ascending.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    const PIM4: f64 = 0.751_125_544_464_942_5;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            let (mut p1, mut p2) = (PIM4, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-14 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    x.reverse();
    w.reverse();
    (x, w)
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_2,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];
// Weights of the embedded 10-point Gauss rule at XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

/// Single Gauss–Kronrod panel: `(kronrod, |kronrod - gauss|, ∫|f|)`.
fn gk21(a: f64, b: f64, f: &mut impl FnMut(f64) -> f64) -> (f64, f64, f64) {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let fc = f(c);
    let mut k = WGK[10] * fc;
    let mut g = 0.0;
    let mut abs = WGK[10] * fc.abs();
    for i in 0..10 {
        let f1 = f(c - h * XGK[i]);
        let f2 = f(c + h * XGK[i]);
        k += WGK[i] * (f1 + f2);
        abs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            g += WG[i / 2] * (f1 + f2);
        }
    }
    (k * h, ((k - g) * h).abs(), abs * h.abs())
}

#[derive(Debug, PartialEq)]
struct Panel {
    err: f64,
    a: f64,
    b: f64,
    value: f64,
    abs: f64,
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`, with
/// the interval initially split at `breaks`. Stops once the error estimate
/// is below `abs_tol` or `rel_tol` times the integral of `|f|`.
pub fn adaptive(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Estimate> {
    const MAX_PANELS: usize = 4000;
    let mut cuts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    cuts.dedup();
    let mut heap = BinaryHeap::new();
    let (mut total_abs, mut total_err) = (0.0, 0.0);
    for w in cuts.windows(2) {
        let (value, err, abs) = gk21(w[0], w[1], &mut f);
        total_abs += abs;
        total_err += err;
        heap.push(Panel { err, a: w[0], b: w[1], value, abs });
    }
    while total_err > abs_tol.max(rel_tol * total_abs) {
        if heap.len() >= MAX_PANELS {
            return Err(Error::numerical(format!(
                "adaptive quadrature on [{a}, {b}] stopped at error {total_err:.3e}"
            )));
        }
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        let (v1, e1, a1) = gk21(p.a, m, &mut f);
        let (v2, e2, a2) = gk21(m, p.b, &mut f);
        total_abs += a1 + a2 - p.abs;
        total_err += e1 + e2 - p.err;
        heap.push(Panel { err: e1, a: p.a, b: m, value: v1, abs: a1 });
        heap.push(Panel { err: e2, a: m, b: p.b, value: v2, abs: a2 });
    }
    // Re-sum to shed the drift of the running updates.
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.err).sum();
    Ok(Estimate { value, error })
}

struct VecPanel {
    a: f64,
    b: f64,
    value: Vec<Complex64>,
    err: Vec<f64>,
    abs: Vec<f64>,
}

fn gk21_vec(
    a: f64,
    b: f64,
    dim: usize,
    f: &mut impl FnMut(f64, &mut [Complex64]),
    scratch: &mut [Complex64],
) -> VecPanel {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut k = vec![Complex64::new(0.0, 0.0); dim];
    let mut g = vec![Complex64::new(0.0, 0.0); dim];
    let mut abs = vec![0.0; dim];
    let mut eval = |x: f64, wk: f64, wg: f64, scratch: &mut [Complex64]| {
        f(x, scratch);
        for d in 0..dim {
            k[d] += scratch[d] * wk;
            abs[d] += scratch[d].norm() * wk;
            if wg != 0.0 {
                g[d] += scratch[d] * wg;
            }
        }
    };
    eval(c, WGK[10], 0.0, scratch);
    for i in 0..10 {
        let wg = if i % 2 == 1 { WG[i / 2] } else { 0.0 };
        eval(c - h * XGK[i], WGK[i], wg, scratch);
        eval(c + h * XGK[i], WGK[i], wg, scratch);
    }
    let err = k.iter().zip(&g).map(|(k, g)| ((k - g) * h).norm()).collect();
    VecPanel {
        a,
        b,
        value: k.into_iter().map(|v| v * h).collect(),
        err,
        abs: abs.into_iter().map(|v| v * h.abs()).collect(),
    }
}

/// Adaptive Gauss–Kronrod integration of a vector of complex functions of a
/// real parameter. Convergence requires, for every component, the summed
/// error to be below `rel_tol` times the integral of its modulus (or
/// `abs_floor`, whichever is larger).
pub fn adaptive_vec(
    mut f: impl FnMut(f64, &mut [Complex64]),
    dim: usize,
    cuts: &[f64],
    rel_tol: f64,
    abs_floor: f64,
    max_panels: usize,
) -> Result<(Vec<Complex64>, f64)> {
    let mut scratch = vec![Complex64::new(0.0, 0.0); dim];
    let mut panels: Vec<VecPanel> = cuts
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk21_vec(w[0], w[1], dim, &mut f, &mut scratch))
        .collect();
    loop {
        let mut err = vec![0.0; dim];
        let mut abs = vec![0.0; dim];
        for p in &panels {
            for d in 0..dim {
                err[d] += p.err[d];
                abs[d] += p.abs[d];
            }
        }
        let scale: Vec<f64> = abs.iter().map(|a| (rel_tol * a).max(abs_floor)).collect();
        let worst = err
            .iter()
            .zip(&scale)
            .map(|(e, s)| e / s)
            .fold(0.0f64, f64::max);
        if worst <= 1.0 {
            break;
        }
        if panels.len() >= max_panels {
            return Err(Error::numerical(format!(
                "vector quadrature did not converge: error/tolerance ratio {worst:.3e}"
            )));
        }
        // Split every panel carrying a significant share of the worst ratio.
        let score = |p: &VecPanel| {
            p.err
                .iter()
                .zip(&scale)
                .map(|(e, s)| e / s)
                .fold(0.0f64, f64::max)
        };
        let threshold = panels.iter().map(score).fold(0.0f64, f64::max) * 0.25;
        let mut next = Vec::with_capacity(panels.len() * 2);
        for p in panels {
            if score(&p) >= threshold && score(&p) > 0.0 {
                let m = 0.5 * (p.a + p.b);
                next.push(gk21_vec(p.a, m, dim, &mut f, &mut scratch));
                next.push(gk21_vec(m, p.b, dim, &mut f, &mut scratch));
            } else {
                next.push(p);
            }
        }
        panels = next;
    }
    let mut total = vec![Complex64::new(0.0, 0.0); dim];
    let mut max_err: f64 = 0.0;
    let mut err = vec![0.0; dim];
    for p in &panels {
        for d in 0..dim {
            total[d] += p.value[d];
            err[d] += p.err[d];
        }
    }
    for e in err {
        max_err = max_err.max(e);
    }
    Ok((total, max_err))
}
