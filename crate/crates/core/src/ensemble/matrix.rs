use std::fmt::Write as _;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::law::EntryLaw;
use crate::error::{Error, Result};
use crate::rng::{self, StreamFamily};

/// Variance normalization of a Wigner matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// Off-diagonal real and imaginary parts of variance 1/2, diagonal
    /// variance 1 (before the `N^{-1/2}` scaling); spectrum in `[-2, 2]`.
    Support2,
    /// Everything halved: off-diagonal parts of variance 1/8, diagonal 1/4;
    /// spectrum in `[-1, 1]`.
    Support1,
}

impl Convention {
    pub fn off_diag_variance(self) -> f64 {
        match self {
            Convention::Support2 => 0.5,
            Convention::Support1 => 0.125,
        }
    }

    pub fn diag_variance(self) -> f64 {
        2.0 * self.off_diag_variance()
    }

    /// Factor by which entries are multiplied when converting to `to`.
    pub fn scale_to(self, to: Convention) -> f64 {
        match (self, to) {
            (Convention::Support2, Convention::Support1) => 0.5,
            (Convention::Support1, Convention::Support2) => 2.0,
            _ => 1.0,
        }
    }

    /// Semicircle radius after adding `a V` with `V` a standard GUE matrix.
    pub fn radius(self, a: f64) -> f64 {
        match self {
            Convention::Support2 => 2.0 * (1.0 + a * a).sqrt(),
            Convention::Support1 => (1.0 + 4.0 * a * a).sqrt(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Convention::Support2 => "support2",
            Convention::Support1 => "support1",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "support2" => Ok(Convention::Support2),
            "support1" => Ok(Convention::Support1),
            other => Err(Error::input(format!("unknown convention `{other}`"))),
        }
    }
}

/// Dense Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerMatrix {
    n: usize,
    entries: Vec<Complex64>,
    pub convention: Convention,
    /// Coefficient `a` of an added standard GUE component, 0 if none.
    pub deformation: f64,
    pub seed: u64,
}

impl WignerMatrix {
    /// Wrap row-major entries after checking Hermitian symmetry to `1e-12`
    /// relative; the stored matrix is exactly Hermitian.
    pub fn from_entries(
        n: usize,
        mut entries: Vec<Complex64>,
        convention: Convention,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("matrix dimension must be positive"));
        }
        if entries.len() != n * n {
            return Err(Error::input(format!(
                "expected {} entries for N = {n}, got {}",
                n * n,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::input("matrix has non-finite entries"));
        }
        let scale = entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
        for i in 0..n {
            if entries[i * n + i].im.abs() > tol {
                return Err(Error::input(format!("diagonal entry {i} is not real")));
            }
            entries[i * n + i].im = 0.0;
            for j in i + 1..n {
                let (a, b) = (entries[i * n + j], entries[j * n + i]);
                if (a - b.conj()).norm() > tol {
                    return Err(Error::input(format!("matrix is not Hermitian at ({i}, {j})")));
                }
                let m = 0.5 * (a + b.conj());
                entries[i * n + j] = m;
                entries[j * n + i] = m.conj();
            }
        }
        Ok(WignerMatrix {
            n,
            entries,
            convention,
            deformation: 0.0,
            seed,
        })
    }

    pub fn zeros(n: usize, convention: Convention) -> Self {
        WignerMatrix {
            n,
            entries: vec![Complex64::new(0.0, 0.0); n * n],
            convention,
            deformation: 0.0,
            seed: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn asymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            worst = worst.max(self.entries[i * n + i].im.abs());
            for j in i + 1..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).re).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Same matrix expressed in another convention.
    pub fn converted(&self, to: Convention) -> Self {
        let f = self.convention.scale_to(to);
        WignerMatrix {
            n: self.n,
            entries: self.entries.iter().map(|z| z * f).collect(),
            convention: to,
            deformation: self.deformation,
            seed: self.seed,
        }
    }

    /// `self + c I`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.entries[i * self.n + i].re += c;
        }
        out
    }

    /// `alpha * self + beta * other`, entrywise; Hermitian symmetry is kept
    /// bitwise because both triangles see identical operations.
    pub(crate) fn combine(&self, alpha: f64, other: &WignerMatrix, beta: f64) -> Self {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * alpha + b * beta)
            .collect();
        WignerMatrix {
            n: self.n,
            entries,
            convention: self.convention,
            deformation: self.deformation,
            seed: self.seed,
        }
    }

    /// Build from upper-triangle values; `upper(i, j)` is called once for
    /// each `i <= j`, in parallel over rows.
    pub(crate) fn from_upper<F>(n: usize, convention: Convention, seed: u64, upper: F) -> Self
    where
        F: Fn(usize, usize) -> Complex64 + Sync,
    {
        let rows: Vec<Vec<Complex64>> = (0..n)
            .into_par_iter()
            .map(|i| (i..n).map(|j| upper(i, j)).collect())
            .collect();
        let mut entries = vec![Complex64::new(0.0, 0.0); n * n];
        for (i, row) in rows.iter().enumerate() {
            for (k, &z) in row.iter().enumerate() {
                let j = i + k;
                if i == j {
                    entries[i * n + i] = Complex64::new(z.re, 0.0);
                } else {
                    entries[i * n + j] = z;
                    entries[j * n + i] = z.conj();
                }
            }
        }
        WignerMatrix {
            n,
            entries,
            convention,
            deformation: 0.0,
            seed,
        }
    }

    const MAGIC: &'static [u8; 4] = b"WLMX";
    const VERSION: u16 = 1;
    const HEADER: usize = 24;

    /// Binary export: `b"WLMX"`, version `u16`, convention `u8`
    /// (0 = support2, 1 = support1), one reserved byte, `N: u64`,
    /// `seed: u64`, then `N*N` pairs `(re, im)` of `f64`, row-major; all
    /// little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(Self::HEADER + 16 * self.entries.len());
        out.extend_from_slice(Self::MAGIC);
        out.extend_from_slice(&Self::VERSION.to_le_bytes());
        out.push(match self.convention {
            Convention::Support2 => 0,
            Convention::Support1 => 1,
        });
        out.push(0);
        out.extend_from_slice(&(self.n as u64).to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        for z in &self.entries {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| Error::parse(0, msg.to_string());
        if bytes.len() < Self::HEADER {
            return Err(bad("truncated header"));
        }
        if &bytes[..4] != Self::MAGIC {
            return Err(bad("bad magic"));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != Self::VERSION {
            return Err(bad("unsupported version"));
        }
        let convention = match bytes[6] {
            0 => Convention::Support2,
            1 => Convention::Support1,
            _ => return Err(bad("unknown convention byte")),
        };
        let n = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
        let seed = u64::from_le_bytes(bytes[16..24].try_into().unwrap());
        let body = &bytes[Self::HEADER..];
        let expected = n
            .checked_mul(n)
            .and_then(|m| m.checked_mul(16))
            .filter(|&m| m == body.len() as u64)
            .ok_or_else(|| bad("body length does not match N"))?;
        let _ = expected;
        let entries = body
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        Self::from_entries(n as usize, entries, convention, seed)
    }

    /// CSV export: `#`-prefixed header with N, convention and seed, then one
    /// line per row holding `re,im` pairs for each column.
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# wigner matrix\n# n={},convention={},seed={}\n",
            self.n,
            self.convention.name(),
            self.seed
        );
        for i in 0..self.n {
            for j in 0..self.n {
                let z = self.get(i, j);
                if j > 0 {
                    s.push(',');
                }
                write!(s, "{:e},{:e}", z.re, z.im).unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut n = None;
        let mut convention = Convention::Support2;
        let mut seed = 0u64;
        let mut entries = Vec::new();
        let mut rows = 0usize;
        for (lineno, line) in text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())) {
            if line.is_empty() {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                for kv in meta.split(',') {
                    let Some((k, v)) = kv.split_once('=') else { continue };
                    match k.trim() {
                        "n" => {
                            n = Some(v.trim().parse::<usize>().map_err(|e| {
                                Error::parse(lineno, format!("bad n: {e}"))
                            })?)
                        }
                        "convention" => {
                            convention = Convention::parse(v)
                                .map_err(|e| Error::parse(lineno, e.to_string()))?
                        }
                        "seed" => {
                            seed = v.trim().parse().map_err(|e| {
                                Error::parse(lineno, format!("bad seed: {e}"))
                            })?
                        }
                        _ => {}
                    }
                }
                continue;
            }
            let n = n.ok_or_else(|| Error::parse(lineno, "data before `n=` header"))?;
            let vals: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::parse(lineno, format!("bad number: {e}")))?;
            if vals.len() != 2 * n {
                return Err(Error::parse(
                    lineno,
                    format!("expected {} values, got {}", 2 * n, vals.len()),
                ));
            }
            if rows == n {
                return Err(Error::parse(lineno, "too many rows"));
            }
            entries.extend(vals.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])));
            rows += 1;
        }
        let n = n.ok_or_else(|| Error::parse(0, "missing `n=` header"))?;
        if rows != n {
            return Err(Error::parse(0, format!("expected {n} rows, got {rows}")));
        }
        Self::from_entries(n, entries, convention, seed)
    }
}

fn check_variance(law: &EntryLaw, want: f64, what: &str) -> Result<()> {
    if (law.variance() - want).abs() > 1e-6 * want {
        return Err(Error::input(format!(
            "{what} law has variance {} but the convention requires {want}",
            law.variance()
        )));
    }
    law.prepare_sampler()
}

/// Wigner matrix `h_ij = N^{-1/2} z_ij`: off-diagonal real and imaginary
/// parts drawn from `off_diag`, diagonal from `diag`, each entry from its own
/// counter-based stream.
pub fn sample_wigner(
    n: usize,
    off_diag: &EntryLaw,
    diag: &EntryLaw,
    convention: Convention,
    seed: u64,
) -> Result<WignerMatrix> {
    if n == 0 {
        return Err(Error::input("N must be positive"));
    }
    check_variance(off_diag, convention.off_diag_variance(), "off-diagonal")?;
    check_variance(diag, convention.diag_variance(), "diagonal")?;
    let family = StreamFamily::new(seed);
    let s = 1.0 / (n as f64).sqrt();
    Ok(WignerMatrix::from_upper(n, convention, seed, |i, j| {
        let mut rng = family.entry(i, j);
        if i == j {
            Complex64::new(diag.sample(&mut rng) * s, 0.0)
        } else {
            let re = off_diag.sample(&mut rng);
            let im = off_diag.sample(&mut rng);
            Complex64::new(re * s, im * s)
        }
    }))
}

/// GUE matrix with `E|V_ij|^2 = scale^2 / N` off the diagonal.
pub(crate) fn sample_gue(n: usize, scale: f64, convention: Convention, seed: u64) -> WignerMatrix {
    let family = StreamFamily::new(seed);
    let s = scale / (n as f64).sqrt();
    let half = std::f64::consts::FRAC_1_SQRT_2;
    WignerMatrix::from_upper(n, convention, seed, |i, j| {
        let mut rng = family.entry(i, j);
        let x: f64 = StandardNormal.sample(&mut rng);
        if i == j {
            Complex64::new(x * s, 0.0)
        } else {
            let y: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(x * s * half, y * s * half)
        }
    })
}

/// Standard GUE in the support2 normalization (`E|V_ij|^2 = 1/N`).
pub fn sample_gue_standard(n: usize, seed: u64) -> Result<WignerMatrix> {
    if n == 0 {
        return Err(Error::input("N must be positive"));
    }
    Ok(sample_gue(n, 1.0, Convention::Support2, seed))
}

/// `base + a V` with `V` an independent standard GUE matrix
/// (`E|V_ij|^2 = 1/N`).
pub fn sample_deformed(base: &WignerMatrix, a: f64, seed: u64) -> Result<WignerMatrix> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::input(format!("deformation a must be >= 0, got {a}")));
    }
    if a == 0.0 {
        return Ok(base.clone());
    }
    let v = sample_gue(base.dim(), 1.0, base.convention, rng::tagged_seed(seed, "gue"));
    let mut out = base.combine(1.0, &v, a);
    out.deformation = (base.deformation.powi(2) + a * a).sqrt();
    Ok(out)
}
