use num_complex::Complex64;
use wigner_lab::ensemble::{sample_gue_standard, sample_wigner, Convention, EntryLaw, WignerMatrix};
use wigner_lab::rng;
use wigner_lab::spectra::{eigenvalues_of, hermitian_eigenvalues};

use rand::Rng;

/// Cyclic Jacobi: first rotate the phase of `a_pq` away, then apply a real
/// plane rotation. Independent of the Householder/QL path.
fn jacobi_eigenvalues(n: usize, a: &[Complex64]) -> Vec<f64> {
    let mut m = a.to_vec();
    let frob2: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j].norm_sqr())
            .sum();
        if off <= 1e-30 * frob2 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = m[p * n + q];
                if g.norm() == 0.0 {
                    continue;
                }
                let d = (g / g.norm()).conj();
                for i in 0..n {
                    m[i * n + q] *= d;
                }
                for j in 0..n {
                    m[q * n + j] *= d.conj();
                }
                let b = m[p * n + q].re;
                let theta = (m[q * n + q].re - m[p * n + p].re) / (2.0 * b);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let (x, y) = (m[i * n + p], m[i * n + q]);
                    m[i * n + p] = x * c - y * s;
                    m[i * n + q] = x * s + y * c;
                }
                for j in 0..n {
                    let (x, y) = (m[p * n + j], m[q * n + j]);
                    m[p * n + j] = x * c - y * s;
                    m[q * n + j] = x * s + y * c;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| m[i * n + i].re).collect();
    d.sort_by(f64::total_cmp);
    d
}

fn random_hermitian(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = rng::stream(seed, 0);
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        a[i * n + i] = Complex64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            a[i * n + j] = z;
            a[j * n + i] = z.conj();
        }
    }
    a
}

#[test]
fn matches_inertia_bisection_oracle() {
    let n = 50;
    let a = random_hermitian(n, 5);
    let s = eigenvalues_of(n, &a).unwrap();
    let frob: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let oracle = jacobi_eigenvalues(n, &a);
    for (x, y) in s.eigenvalues.iter().zip(&oracle) {
        assert!((x - y).abs() < 1e-8, "{x} vs {y}");
    }
    let trace: f64 = (0..n).map(|i| a[i * n + i].re).sum();
    let sum: f64 = s.eigenvalues.iter().sum();
    let sum_sq: f64 = s.eigenvalues.iter().map(|x| x * x).sum();
    assert!((sum - trace).abs() < 1e-9 * n as f64 * frob);
    assert!((sum_sq - frob * frob).abs() < 1e-9 * n as f64 * frob * frob);
    assert!(s.residual_bound > 0.0 && s.residual_bound < 1e-10);
}

#[test]
fn invariant_under_householder_conjugation() {
    for (n, seed) in [(3usize, 1u64), (17, 2), (64, 3), (200, 4)] {
        let a = random_hermitian(n, seed);
        let mut rng = rng::stream(seed, 1);
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
        // Q = I - 2 v v^H is unitary; B = Q A Q.
        let av: Vec<Complex64> = (0..n)
            .map(|i| (0..n).map(|j| a[i * n + j] * v[j]).sum())
            .collect();
        let vhav: Complex64 = (0..n).map(|i| v[i].conj() * av[i]).sum();
        let mut b = a.clone();
        for i in 0..n {
            for j in 0..n {
                b[i * n + j] += -2.0 * av[i] * v[j].conj() - 2.0 * v[i] * av[j].conj()
                    + 4.0 * vhav * v[i] * v[j].conj();
            }
        }
        for i in 0..n {
            b[i * n + i].im = 0.0;
            for j in i + 1..n {
                b[j * n + i] = b[i * n + j].conj();
            }
        }
        let x = eigenvalues_of(n, &a).unwrap().eigenvalues;
        let y = eigenvalues_of(n, &b).unwrap().eigenvalues;
        let worst = x.iter().zip(&y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "n={n}: {worst}");
    }
}

#[test]
fn shift_moves_every_eigenvalue() {
    let law = EntryLaw::gaussian(0.5).unwrap();
    let diag = EntryLaw::gaussian(1.0).unwrap();
    let h = sample_wigner(60, &law, &diag, Convention::Support2, 8).unwrap();
    let c = 0.731;
    let x = hermitian_eigenvalues(&h).unwrap().eigenvalues;
    let y = hermitian_eigenvalues(&h.shifted(c)).unwrap().eigenvalues;
    for (p, q) in x.iter().zip(&y) {
        assert!((q - p - c).abs() < 1e-10);
    }
}

#[test]
fn gue_edge_and_metadata() {
    let v = sample_gue_standard(500, 3).unwrap();
    let s = hermitian_eigenvalues(&v).unwrap();
    let edge = s.eigenvalues[499].max(-s.eigenvalues[0]);
    assert!((edge - 2.0).abs() < 0.1, "{edge}");
    assert_eq!(s.seed, 3);
    let zero = WignerMatrix::zeros(4, Convention::Support1);
    assert!(hermitian_eigenvalues(&zero).unwrap().eigenvalues.iter().all(|&x| x == 0.0));
}


