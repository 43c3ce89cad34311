use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use wigner_lab::bh_kernel::*;
use wigner_lab::ensemble::{sample_deformed, Convention, WignerMatrix};
use wigner_lab::quadrature::adaptive;
use wigner_lab::spectra::hermitian_eigenvalues;
use wigner_lab::statistics::{semicircle_quantiles, SemicircleRef};

fn quantiles(n: usize) -> Vec<f64> {
    semicircle_quantiles(n, &SemicircleRef::new(Convention::Support1, 0.0))
        .unwrap()
        .eigenvalues
}

fn lambda_config(n: usize, u: f64, tau: f64) -> KernelConfig {
    KernelConfig::new(u, tau, (n as f64).powf(-0.5), quantiles(n))
}

fn sinc(tau: f64) -> f64 {
    wigner_lab::fredholm::sine_kernel(tau)
}

#[test]
fn f_prime_matches_finite_difference() {
    let cfg = KernelConfig::new(0.2, 1.0, 0.05, quantiles(40));
    for (x, y) in [(0.1, 0.3), (-0.7, 0.05), (1.4, -0.2), (0.33, 1.1)] {
        let z = Complex64::new(x, y);
        let h = 1e-5;
        let fp = f_n(z + h, &cfg).unwrap().f;
        let fm = f_n(z - h, &cfg).unwrap().f;
        let fd = (fp - fm) / (2.0 * h);
        let exact = f_n(z, &cfg).unwrap().f1;
        assert!((fd - exact).norm() < 1e-7 * exact.norm().max(1.0), "z={z}");
        let gp = f_n(z + h, &cfg).unwrap().f1;
        let gm = f_n(z - h, &cfg).unwrap().f1;
        let exact2 = f_n(z, &cfg).unwrap().f2;
        assert!(((gp - gm) / (2.0 * h) - exact2).norm() < 1e-6 * exact2.norm().max(1.0));
    }
}

#[test]
fn f_is_schwarz_symmetric() {
    let cfg = KernelConfig::new(-0.3, 1.0, 0.05, quantiles(25));
    for (x, y) in [(0.1, 0.3), (-2.0, 0.01), (0.5, 3.0)] {
        let z = Complex64::new(x, y);
        let a = f_n(z.conj(), &cfg).unwrap();
        let b = f_n(z, &cfg).unwrap();
        assert!((a.f - b.f.conj()).norm() < 1e-13);
        assert!((a.f1 - b.f1.conj()).norm() < 1e-12);
    }
}

#[test]
fn exponential_weight_is_continuous_across_the_real_axis() {
    // N f jumps by 2 pi i across a branch cut, leaving e^{N f} continuous.
    let cfg = KernelConfig::new(0.0, 1.0, 0.05, quantiles(30));
    let n = 30.0;
    for x in [-0.8, -0.1, 0.02, 0.5] {
        let up = (n * f_n(Complex64::new(x, 1e-12), &cfg).unwrap().f).exp();
        let down = (n * f_n(Complex64::new(x, -1e-12), &cfg).unwrap().f).exp();
        assert!((up - down).norm() < 1e-8 * up.norm(), "x={x}");
    }
}

#[test]
fn g_at_coincident_saddle_is_f_second() {
    let cfg = lambda_config(200, 0.1, 1.0);
    let s = solve_saddle(&cfg).unwrap();
    let g = g_identity(s.q, s.q, s.q.re, &cfg).unwrap();
    assert!((g - s.f_second).norm() < 1e-9 * s.f_second.norm());
    let e = g_explicit(s.q, s.q, s.q.re, &cfg).unwrap();
    assert!((e - s.f_second).norm() < 1e-9 * s.f_second.norm());
}

#[test]
fn mixed_saddle_values_vanish() {
    for u in [0.0, 0.4, -0.6] {
        let cfg = lambda_config(300, u, 1.0);
        let s = solve_saddle(&cfg).unwrap();
        let (qp, qm) = (s.q, s.conjugate());
        let r = qp.re;
        let scale = (1.0 / cfg.t) * (1.0 + (qp - cfg.u).norm() / (qm - r).norm());
        for (z, w) in [(qp, qm), (qm, qp)] {
            let g = g_explicit(z, w, r, &cfg).unwrap();
            assert!(g.norm() < 1e-10 * scale, "u={u}: {g}");
        }
    }
}

#[test]
fn h_vanishes_at_reference_point() {
    for tau in [0.0, 0.3, 5.0] {
        assert_eq!(h_n(Complex64::new(0.25, 0.0), 0.25, tau, 0.02, 0.6).norm(), 0.0);
    }
}

#[test]
fn continuum_saddle_value() {
    let q = continuum_saddle(0.0, 0.01);
    assert!((q - Complex64::new(0.0, 0.019_611_613_513_818_4)).norm() < 1e-12);
    // First-order form u(1-2t) + 2ti sqrt(1-u^2)
    let q = continuum_saddle(0.5, 1e-4);
    let approx = Complex64::new(0.5 * (1.0 - 2e-4), 2e-4 * 0.75f64.sqrt());
    assert!((q - approx).norm() < 1e-7);
}

#[test]
fn saddle_close_to_continuum_for_quantiles() {
    let y = quantiles(2000);
    for u in [0.0, 0.5, -0.5] {
        let cfg = KernelConfig::new(u, 1.0, 0.01, y.clone());
        let s = solve_saddle(&cfg).unwrap();
        assert!(s.residual < 1e-12);
        assert!(s.q.im > 0.0);
        assert!((s.q - s.closed_form_q).norm() < 0.1 * cfg.t, "u={u}: {}", s.q);
    }
}

#[test]
fn saddle_rejects_energies_outside_bulk() {
    let cfg = KernelConfig::new(1.5, 1.0, 0.01, quantiles(50));
    assert!(solve_saddle(&cfg).is_err());
}

#[test]
fn saddle_approximation_is_sinc_at_continuum() {
    // With the continuum saddle and r = Re q, theta = pi tau exactly.
    for &(u, t) in &[(0.0, 0.01), (0.3, 0.02), (-0.5, 0.001)] {
        let q = continuum_saddle(u, t);
        let rho = SemicircleRef::new(Convention::Support1, f64::sqrt(t)).density(u);
        for tau in [0.25, 0.5, 1.0, 2.0] {
            let v = two_saddle_sum(q, q.conj(), q.re, tau, t, rho);
            assert!(v.im.abs() < 1e-15);
            assert!((v.re - sinc(tau)).abs() < 1e-12, "u={u} t={t} tau={tau}");
            let swapped = two_saddle_sum(q.conj(), q, q.re, tau, t, rho);
            assert!((swapped + v).norm() < 1e-15);
        }
        let zero = two_saddle_sum(q, q.conj(), q.re, 0.0, t, rho);
        assert!((zero.re - 1.0).abs() < 1e-12);
    }
}

/// One-point density of the N = 2 model, from the explicit joint density.
fn one_point(u: f64, y: &[f64], s: f64) -> f64 {
    adaptive(|x| qS_density_smallN(&[u, x], y, s).unwrap(), -6.0, 6.0, y, 1e-15, 1e-12)
        .unwrap()
        .value
}

#[test]
fn kernel_matches_exact_two_by_two_model() {
    // y spacing small against sqrt(t): f_N has a complex critical pair.
    let y = vec![-0.2, 0.2];
    let s = 0.05;
    let t = 2.0 * s;
    for u in [0.0, 0.15, -0.3] {
        let mut cfg = KernelConfig::new(u, 0.0, t, y.clone());
        cfg.rho = Some(1.0);
        let k = eval_kernel(&cfg).unwrap();
        assert!(k.valid);
        let want = one_point(u, &y, s);
        // (1/N rho) K(u, u) with rho = 1
        assert!((k.value * 2.0 - want).abs() < 1e-8 * want, "u={u}: {} vs {want}", k.value * 2.0);
    }
    // Two-point function: det of the kernel matrix equals q_S itself.
    let mut cfg = KernelConfig::new(0.05, 0.0, t, y.clone());
    cfg.rho = Some(1.0);
    for gap in [0.1, 0.3] {
        // positions u and u + gap, in units of 1/(N rho) = 1/2
        let d = correlation_determinant(&[0.0, 2.0 * gap], &cfg).unwrap();
        let want = qS_density_smallN(&[0.05, 0.05 + gap], &y, s).unwrap();
        assert!((d * 4.0 - want).abs() < 1e-8 * want.abs().max(1e-3), "gap={gap}");
    }
}

#[test]
fn contour_parameters_act_as_expected() {
    // omega moves the z-contours without changing the value; r is a gauge
    // parameter: K picks up exp((r' - r) tau/(t rho)), determinants do not.
    let mut cfg = lambda_config(100, 0.2, 0.7);
    let base = eval_kernel(&cfg).unwrap().value;
    let s = solve_saddle(&cfg).unwrap();
    let delta = 0.01;
    cfg.r = Some(s.q.re + delta);
    let shifted_r = eval_kernel(&cfg).unwrap().value;
    let gauge = (delta * cfg.tau / (cfg.t * cfg.rho())).exp();
    assert!((shifted_r - base * gauge).abs() < 1e-7, "{shifted_r} vs {}", base * gauge);
    cfg.r = None;
    cfg.omega = Some(1.5 * s.q.im);
    let shifted_omega = eval_kernel(&cfg).unwrap().value;
    assert!((shifted_omega - base).abs() < 1e-7, "{shifted_omega} vs {base}");
    let mut cfg = lambda_config(100, 0.2, 0.0);
    let d0 = correlation_determinant(&[0.0, 0.8], &cfg).unwrap();
    cfg.r = Some(s.q.re - 0.02);
    let d1 = correlation_determinant(&[0.0, 0.8], &cfg).unwrap();
    assert!((d0 - d1).abs() < 1e-7, "{d0} vs {d1}");
}

#[test]
fn saddle_requires_complex_critical_point() {
    // Two points with a large gap: all critical points of f_N are real.
    let cfg = KernelConfig::new(0.0, 0.0, 0.1, vec![-0.5, 0.5]);
    assert!(matches!(solve_saddle(&cfg), Err(wigner_lab::Error::Numerical(_))));
}

#[test]
fn kernel_near_sine_kernel_at_n500() {
    let k1 = eval_kernel(&lambda_config(500, 0.0, 1.0)).unwrap();
    assert!(k1.value.abs() <= 0.05);
    assert!(k1.imag.abs() < 1e-6);
    let k05 = eval_kernel(&lambda_config(500, 0.0, 0.5)).unwrap();
    assert!((k05.value / (2.0 / PI) - 1.0).abs() < 0.05, "{}", k05.value);
}

#[test]
fn kernel_converges_in_n() {
    let taus = [0.5, 1.0, 1.5, 2.0];
    let mut last_sinc = f64::INFINITY;
    let mut last_saddle = f64::INFINITY;
    for n in [125, 250, 500] {
        let rows = kernel_sweep(&lambda_config(n, 0.0, 0.0), &taus).unwrap();
        let dev = rows.iter().map(|r| r.abs_error).fold(0.0, f64::max);
        let gap = rows.iter().map(|r| (r.kernel - r.saddle).abs()).fold(0.0, f64::max);
        assert!(dev < last_sinc, "N={n}: {dev}");
        assert!(gap < last_saddle, "N={n}: {gap}");
        last_sinc = dev;
        last_saddle = gap;
    }
}

#[test]
fn correlation_determinants() {
    let cfg = lambda_config(250, 0.0, 0.0);
    let one = correlation_determinant(&[0.0], &cfg).unwrap();
    assert!((one - 1.0).abs() < 0.05, "{one}");
    let same = correlation_determinant(&[0.3, 0.3], &cfg).unwrap();
    assert!(same.abs() < 1e-8);
    let two = correlation_determinant(&[0.0, 0.5], &cfg).unwrap();
    let want = 1.0 - (2.0 / PI).powi(2);
    assert!((two / want - 1.0).abs() < 0.1, "{two} vs {want}");
    for pts in [[0.0, 0.1], [-0.4, 1.3], [0.2, 2.2]] {
        assert!(correlation_determinant(&pts, &cfg).unwrap() >= -1e-6);
    }
    assert!(correlation_determinant(&[0.0; 5], &cfg).is_err());
}

#[test]
fn sweep_csv_columns() {
    let rows = kernel_sweep(&lambda_config(60, 0.0, 0.0), &[0.5, 1.0]).unwrap();
    let csv = sweep_csv(&rows);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("tau,kernel,saddle_approx,sinc,abs_error"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn qs_is_permutation_symmetric_and_normalized() {
    let y = [-0.5, 0.5];
    let s = 0.01;
    let a = qS_density_smallN(&[0.1, -0.3], &y, s).unwrap();
    let b = qS_density_smallN(&[-0.3, 0.1], &y, s).unwrap();
    assert!((a - b).abs() < 1e-15 * a.abs().max(1e-300));
    let y3 = [-0.4, 0.1, 0.7];
    let x3 = [0.05, -0.35, 0.72];
    let p = qS_density_smallN(&x3, &y3, 0.02).unwrap();
    let q = qS_density_smallN(&[x3[2], x3[0], x3[1]], &y3, 0.02).unwrap();
    assert!((p - q).abs() < 1e-12 * p.abs());
    // Mass over ordered pairs x1 < x2.
    let inner = |x1: f64| {
        adaptive(|x2| qS_density_smallN(&[x1, x2], &y, s).unwrap(), x1, 2.0, &[0.5], 1e-14, 1e-11)
            .unwrap()
            .value
    };
    let mass = adaptive(inner, -2.0, 2.0, &[-0.5, 0.5], 1e-12, 1e-10).unwrap().value;
    assert!((mass - 1.0).abs() < 1e-8, "{mass}");
}

#[test]
fn qs_matches_monte_carlo_extremes() {
    let y = [-0.5, 0.5];
    let s = 0.01;
    let n = 2usize;
    let base = WignerMatrix::from_entries(
        n,
        vec![
            Complex64::new(y[0], 0.0),
            Complex64::default(),
            Complex64::default(),
            Complex64::new(y[1], 0.0),
        ],
        Convention::Support1,
        0,
    )
    .unwrap();
    let a = (n as f64 * s).sqrt();
    let samples = 20_000u64;
    let mut lo = Vec::new();
    for seed in 0..samples {
        let h = sample_deformed(&base, a, seed).unwrap();
        lo.push(hermitian_eigenvalues(&h).unwrap().eigenvalues[0]);
    }
    lo.sort_by(f64::total_cmp);
    // CDF of the smaller eigenvalue from the ordered-pair density.
    let cdf = |x: f64| {
        let inner = |x1: f64| {
            adaptive(|x2| qS_density_smallN(&[x1, x2], &y, s).unwrap(), x1, 1.5, &[0.5], 1e-14, 1e-10)
                .unwrap()
                .value
        };
        adaptive(inner, -1.5, x, &[-0.5], 1e-12, 1e-9).unwrap().value
    };
    let mut ks: f64 = 0.0;
    for k in (0..samples as usize).step_by(200) {
        let f = cdf(lo[k]);
        let e1 = k as f64 / samples as f64;
        let e2 = (k + 1) as f64 / samples as f64;
        ks = ks.max((f - e1).abs()).max((f - e2).abs());
    }
    assert!(ks < 0.02, "KS {ks}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn explicit_and_identity_forms_agree(
        zr in -2.0f64..2.0, zi in 0.05f64..1.0, zs in prop::bool::ANY,
        wr in -2.0f64..2.0, wi in 0.05f64..1.0, ws in prop::bool::ANY,
        r in -1.0f64..1.0, u in -0.9f64..0.9,
    ) {
        let cfg = KernelConfig::new(u, 1.0, 0.05, quantiles(64));
        let z = Complex64::new(zr, if zs { zi } else { -zi });
        let w = Complex64::new(wr, if ws { wi } else { -wi });
        let a = g_explicit(z, w, r, &cfg).unwrap();
        let b = g_identity(z, w, r, &cfg).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(b.norm()).max(1.0 / cfg.t * 1e-3));
    }
}
