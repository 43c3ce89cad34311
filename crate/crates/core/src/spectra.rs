//! Dense Hermitian eigenvalues: Householder reduction to real symmetric
//! tridiagonal form followed by implicit QL with Wilkinson shifts.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensemble::{Convention, WignerMatrix};
use crate::error::{Error, Result};

/// Sorted spectrum with the metadata of the matrix it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSample {
    pub eigenvalues: Vec<f64>,
    pub convention: Convention,
    /// Coefficient of an added GUE component (0 for plain Wigner matrices).
    pub deformation: f64,
    pub seed: u64,
    /// Backward-error bound `N * eps * ||H||_F` on each eigenvalue.
    pub residual_bound: f64,
}

impl SpectralSample {
    /// Sorts the given values; the residual bound is set to zero.
    pub fn from_values(mut eigenvalues: Vec<f64>, convention: Convention, seed: u64) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        SpectralSample {
            eigenvalues,
            convention,
            deformation: 0.0,
            seed,
            residual_bound: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// CSV export: `#` metadata lines, a header row, one eigenvalue per line.
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# n={},convention={},deformation={:e},seed={},residual_bound={:e}\neigenvalue\n",
            self.len(),
            self.convention.name(),
            self.deformation,
            self.seed,
            self.residual_bound
        );
        for x in &self.eigenvalues {
            writeln!(s, "{x:e}").unwrap();
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut out = SpectralSample::from_values(Vec::new(), Convention::Support2, 0);
        let mut declared = None;
        for (lineno, line) in text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())) {
            if line.is_empty() || line == "eigenvalue" {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                for kv in meta.split(',') {
                    let Some((k, v)) = kv.split_once('=') else { continue };
                    let v = v.trim();
                    let num = |what: &str| {
                        v.parse::<f64>()
                            .map_err(|e| Error::parse(lineno, format!("bad {what}: {e}")))
                    };
                    match k.trim() {
                        "n" => {
                            declared = Some(v.parse::<usize>().map_err(|e| {
                                Error::parse(lineno, format!("bad n: {e}"))
                            })?)
                        }
                        "convention" => {
                            out.convention = Convention::parse(v)
                                .map_err(|e| Error::parse(lineno, e.to_string()))?
                        }
                        "deformation" => out.deformation = num("deformation")?,
                        "seed" => {
                            out.seed = v.parse().map_err(|e| {
                                Error::parse(lineno, format!("bad seed: {e}"))
                            })?
                        }
                        "residual_bound" => out.residual_bound = num("residual bound")?,
                        _ => {}
                    }
                }
                continue;
            }
            let x: f64 = line
                .parse()
                .map_err(|e| Error::parse(lineno, format!("bad eigenvalue: {e}")))?;
            if !x.is_finite() {
                return Err(Error::parse(lineno, "eigenvalue is not finite"));
            }
            out.eigenvalues.push(x);
        }
        if let Some(n) = declared {
            if n != out.eigenvalues.len() {
                return Err(Error::parse(
                    0,
                    format!("header declares {n} eigenvalues, found {}", out.eigenvalues.len()),
                ));
            }
        }
        if out.eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::parse(0, "eigenvalues are not sorted"));
        }
        Ok(out)
    }
}

/// All eigenvalues of a Wigner matrix, sorted ascending.
pub fn hermitian_eigenvalues(h: &WignerMatrix) -> Result<SpectralSample> {
    let mut s = eigenvalues_of(h.dim(), h.entries())?;
    s.convention = h.convention;
    s.deformation = h.deformation;
    s.seed = h.seed;
    Ok(s)
}

/// Eigenvalues of a row-major Hermitian matrix given as raw entries.
pub fn eigenvalues_of(n: usize, entries: &[Complex64]) -> Result<SpectralSample> {
    if entries.len() != n * n {
        return Err(Error::input("entry count does not match N*N"));
    }
    if n == 0 {
        return Err(Error::input("empty matrix"));
    }
    let scale = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = 1e-12 * scale;
    for i in 0..n {
        if !entries[i * n + i].re.is_finite() || entries[i * n + i].im.abs() > tol {
            return Err(Error::input(format!("diagonal entry {i} is not real and finite")));
        }
        for j in 0..i {
            let (a, b) = (entries[i * n + j], entries[j * n + i]);
            if !(a - b.conj()).norm().le(&tol) {
                return Err(Error::input(format!("matrix is not Hermitian at ({i}, {j})")));
            }
        }
    }
    let frob = entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut ar = vec![0.0; n * n];
    let mut ai = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            ar[i * n + j] = entries[i * n + j].re;
            ai[i * n + j] = entries[i * n + j].im;
        }
    }
    let (mut d, mut e) = tridiagonalize(n, &mut ar, &mut ai);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(SpectralSample {
        eigenvalues: d,
        convention: Convention::Support2,
        deformation: 0.0,
        seed: 0,
        residual_bound: n as f64 * f64::EPSILON * frob,
    })
}

/// `sum_j a_j * b_j` with four independent accumulators.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// For row `i` of a Hermitian matrix stored by its strict lower part
/// `(rr, ri)`: returns `sum_{j<i} A_ij v_j` and adds `conj(A_ij) v_i` to
/// `p_j`.
#[inline]
fn hermitian_row_product(
    (rr, ri): (&[f64], &[f64]),
    (vr, vi): (&[f64], &[f64]),
    (pr, pi): (&mut [f64], &mut [f64]),
    i: usize,
) -> (f64, f64) {
    let (xr, xi) = (vr[i], vi[i]);
    let (vr, vi) = (&vr[..i], &vi[..i]);
    let mut sr = [0.0; 4];
    let mut si = [0.0; 4];
    let lanes = rr
        .chunks_exact(4)
        .zip(ri.chunks_exact(4))
        .zip(vr.chunks_exact(4).zip(vi.chunks_exact(4)))
        .zip(pr.chunks_exact_mut(4).zip(pi.chunks_exact_mut(4)));
    for (((a, b), (x, y)), (p, q)) in lanes {
        for l in 0..4 {
            sr[l] += a[l] * x[l] - b[l] * y[l];
            si[l] += a[l] * y[l] + b[l] * x[l];
            p[l] += a[l] * xr + b[l] * xi;
            q[l] += a[l] * xi - b[l] * xr;
        }
    }
    let (mut tr, mut ti) = (0.0, 0.0);
    for j in i / 4 * 4..i {
        tr += rr[j] * vr[j] - ri[j] * vi[j];
        ti += rr[j] * vi[j] + ri[j] * vr[j];
        pr[j] += rr[j] * xr + ri[j] * xi;
        pi[j] += rr[j] * xi - ri[j] * xr;
    }
    ((sr[0] + sr[1]) + (sr[2] + sr[3]) + tr, (si[0] + si[1]) + (si[2] + si[3]) + ti)
}

/// Reduce the Hermitian matrix held in the lower triangles of `(ar, ai)` to
/// a real symmetric tridiagonal matrix with the same eigenvalues. Returns
/// the diagonal and the off-diagonal (last entry 0).
///
/// Blocked: within a panel of `NB` steps the rank-2 updates
/// `A -= v w^H + w v^H` are kept as vectors and applied on the fly to the
/// columns and products that need them; the trailing block is rewritten
/// once per panel.
fn tridiagonalize(n: usize, ar: &mut [f64], ai: &mut [f64]) -> (Vec<f64>, Vec<f64>) {
    const NB: usize = 32;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    // Panel vectors, indexed by global row; zero above their start row.
    let mut ur = vec![vec![0.0; n]; NB];
    let mut ui = vec![vec![0.0; n]; NB];
    let mut wr = vec![vec![0.0; n]; NB];
    let mut wi = vec![vec![0.0; n]; NB];
    let mut cr = vec![0.0; n];
    let mut ci = vec![0.0; n];
    let mut pr = vec![0.0; n];
    let mut pi = vec![0.0; n];
    let mut k0 = 0;
    while k0 < n {
        let kend = (k0 + NB).min(n);
        let mut used = 0;
        for k in k0..kend {
            let nv = k - k0;
            // Current column k, rows k..n.
            for i in k..n {
                cr[i] = ar[i * n + k];
                ci[i] = ai[i * n + k];
            }
            for q in 0..nv {
                let (u_r, u_i, w_r, w_i) = (&ur[q], &ui[q], &wr[q], &wi[q]);
                let (a, b, c, dd) = (u_r[k], u_i[k], w_r[k], w_i[k]);
                for i in k..n {
                    cr[i] -= u_r[i] * c + u_i[i] * dd + w_r[i] * a + w_i[i] * b;
                    ci[i] -= u_i[i] * c - u_r[i] * dd + w_i[i] * a - w_r[i] * b;
                }
            }
            d[k] = cr[k];
            if k + 1 == n {
                break;
            }
            let off = k + 1;
            let (alr, ali) = (cr[off], ci[off]);
            let xnorm2: f64 = (off + 1..n).map(|i| cr[i] * cr[i] + ci[i] * ci[i]).sum();
            let (vr, vi) = (&mut ur[nv], &mut ui[nv]);
            vr.fill(0.0);
            vi.fill(0.0);
            let (tr, ti);
            if xnorm2 == 0.0 && ali == 0.0 {
                e[k] = alr;
                tr = 0.0;
                ti = 0.0;
            } else {
                let norm = (alr * alr + ali * ali + xnorm2).sqrt();
                let beta = if alr > 0.0 { -norm } else { norm };
                tr = (beta - alr) / beta;
                ti = -ali / beta;
                let (dr, di) = (alr - beta, ali);
                let den = dr * dr + di * di;
                let (sr, si) = (dr / den, -di / den);
                vr[off] = 1.0;
                for i in off + 1..n {
                    vr[i] = cr[i] * sr - ci[i] * si;
                    vi[i] = cr[i] * si + ci[i] * sr;
                }
                e[k] = beta;
            }
            used = nv + 1;
            let (vr, vi) = (&ur[nv][off..], &ui[nv][off..]);
            let m = n - off;

            // p = A_stored v over the trailing block (lower triangle only) ...
            let (p_r, p_i) = (&mut pr[off..], &mut pi[off..]);
            p_r.fill(0.0);
            p_i.fill(0.0);
            for i in 0..m {
                let row = (off + i) * n + off;
                let (sr, si) = hermitian_row_product(
                    (&ar[row..row + i], &ai[row..row + i]),
                    (vr, vi),
                    (&mut p_r[..i], &mut p_i[..i]),
                    i,
                );
                let diag = ar[row + i];
                p_r[i] += sr + diag * vr[i];
                p_i[i] += si + diag * vi[i];
            }
            // ... minus the pending panel updates.
            for q in 0..nv {
                let (u_r, u_i) = (&ur[q][off..], &ui[q][off..]);
                let (w_r, w_i) = (&wr[q][off..], &wi[q][off..]);
                // s1 = w^H v, s2 = u^H v
                let s1r = dot(w_r, vr) + dot(w_i, vi);
                let s1i = dot(w_r, vi) - dot(w_i, vr);
                let s2r = dot(u_r, vr) + dot(u_i, vi);
                let s2i = dot(u_r, vi) - dot(u_i, vr);
                for i in 0..m {
                    p_r[i] -= u_r[i] * s1r - u_i[i] * s1i + w_r[i] * s2r - w_i[i] * s2i;
                    p_i[i] -= u_r[i] * s1i + u_i[i] * s1r + w_r[i] * s2i + w_i[i] * s2r;
                }
            }
            // w = tau p, then w += (-tau/2 (w^H v)) v
            for i in 0..m {
                let (a, b) = (p_r[i], p_i[i]);
                p_r[i] = tr * a - ti * b;
                p_i[i] = tr * b + ti * a;
            }
            let whv_r = dot(p_r, vr) + dot(p_i, vi);
            let whv_i = dot(p_r, vi) - dot(p_i, vr);
            let (gr, gi) = (-0.5 * (tr * whv_r - ti * whv_i), -0.5 * (tr * whv_i + ti * whv_r));
            let (w_r, w_i) = (&mut wr[nv], &mut wi[nv]);
            w_r.fill(0.0);
            w_i.fill(0.0);
            for i in 0..m {
                w_r[off + i] = p_r[i] + gr * vr[i] - gi * vi[i];
                w_i[off + i] = p_i[i] + gr * vi[i] + gi * vr[i];
            }
        }
        // Apply the panel to the remaining trailing block.
        for i in kend..n {
            let row = i * n;
            let (rr, ri) = (&mut ar[row + kend..=row + i], &mut ai[row + kend..=row + i]);
            for q in 0..used {
                let (u_r, u_i) = (&ur[q][kend..=i], &ui[q][kend..=i]);
                let (w_r, w_i) = (&wr[q][kend..=i], &wi[q][kend..=i]);
                let (a, b, c, dd) = (ur[q][i], ui[q][i], wr[q][i], wi[q][i]);
                let len = rr.len();
                let (x, y) = (&mut rr[..len], &mut ri[..len]);
                let (u_r, u_i, w_r, w_i) = (&u_r[..len], &u_i[..len], &w_r[..len], &w_i[..len]);
                for j in 0..len {
                    x[j] -= a * w_r[j] + b * w_i[j] + c * u_r[j] + dd * u_i[j];
                    y[j] -= b * w_r[j] - a * w_i[j] + dd * u_r[j] - c * u_i[j];
                }
            }
            ri[i - kend] = 0.0;
        }
        k0 = kend;
    }
    e[n - 1] = 0.0;
    (d, e)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` (`e[i]` couples `i` and `i + 1`), overwriting `d`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    const MAX_ITER: usize = 30;
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_ITER {
                return Err(Error::numerical(format!(
                    "QL iteration did not converge for eigenvalue {l} after {MAX_ITER} sweeps"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_matrix() {
        let s = eigenvalues_of(3, &[c(0.0, 0.0); 9]).unwrap();
        assert_eq!(s.eigenvalues, vec![0.0; 3]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let s = eigenvalues_of(2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)]).unwrap();
        assert!(s.eigenvalues[0].abs() < 1e-15);
        assert!((s.eigenvalues[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn one_by_one() {
        let s = eigenvalues_of(1, &[c(-3.5, 0.0)]).unwrap();
        assert_eq!(s.eigenvalues, vec![-3.5]);
    }

    #[test]
    fn rejects_non_hermitian() {
        let r = eigenvalues_of(2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)]);
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn tridiagonal_toeplitz() {
        // 2 on the diagonal, -1 off: eigenvalues 2 - 2 cos(k pi / (n + 1)).
        let n = 40;
        let mut d = vec![2.0; n];
        let mut e = vec![-1.0; n];
        e[n - 1] = 0.0;
        tridiagonal_ql(&mut d, &mut e).unwrap();
        d.sort_by(f64::total_cmp);
        for (k, x) in d.iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((x - want).abs() < 1e-13);
        }
    }

    #[test]
    fn csv_round_trip() {
        let s = SpectralSample::from_values(vec![0.5, -1.25, 2.0], Convention::Support1, 4);
        let back = SpectralSample::from_csv(&s.to_csv()).unwrap();
        assert_eq!(back, s);
        assert!(SpectralSample::from_csv("# n=2\n1.0\n").is_err());
        assert!(SpectralSample::from_csv("2.0\n1.0\n").is_err());
    }
}
