use chsh_core::ensembles::{bures_state, ginibre, haar_unitary, nonlocality_scan, RngStream};
use chsh_core::linalg::{eigvalsh, ComplexMatrix};
use chsh_core::OptimizerConfig;

/// Mean purity of 4x4 Bures states, from an independent Monte Carlo (200k draws,
/// standard error 2.2e-4).
const BURES_MEAN_PURITY_D4: f64 = 0.56271;

#[test]
fn ginibre_products_are_psd() {
    let mut rng = RngStream::new(71, 0);
    for _ in 0..100 {
        let g = ginibre::<f64>(5, &mut rng);
        let gg = chsh_core::linalg::HermitianMatrix::new(g.matmul(&g.adjoint())).unwrap();
        assert!(eigvalsh(&gg).unwrap()[0] > -1e-12);
    }
}

#[test]
fn haar_unitary_determinant_has_unit_modulus() {
    let mut rng = RngStream::new(72, 0);
    for _ in 0..100 {
        let u = haar_unitary::<f64>(3, &mut rng);
        let e = |i: usize, j: usize| u[(i, j)];
        let det = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
            + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
        assert!((det.norm() - 1.0).abs() < 1e-12);
        assert!(u.adjoint().matmul(&u).distance(&ComplexMatrix::identity(3)) < 1e-12);
    }
}

/// Eigenphases of Haar 2x2 unitaries are uniform on the circle (one-point density).
#[test]
fn haar_eigenphases_pass_kolmogorov_smirnov() {
    let mut rng = RngStream::new(73, 0);
    let mut phases = Vec::with_capacity(20_000);
    for _ in 0..10_000 {
        let u = haar_unitary::<f64>(2, &mut rng);
        let tr = u[(0, 0)] + u[(1, 1)];
        let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
        let disc = (tr * tr - det * 4.0).sqrt();
        for root in [(tr + disc) / 2.0, (tr - disc) / 2.0] {
            assert!((root.norm() - 1.0).abs() < 1e-9);
            phases.push((root.arg() + std::f64::consts::PI) / std::f64::consts::TAU);
        }
    }
    phases.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = phases.len() as f64;
    let ks = phases
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
        .fold(0.0, f64::max);
    // critical value at the 1% level
    assert!(ks < 1.628 / n.sqrt(), "KS statistic {ks}");
}

#[test]
fn bures_mean_purity_regression() {
    let mut rng = RngStream::new(12345, 0);
    let n = 10_000;
    let mut sum = 0.0;
    for _ in 0..n {
        let rho = bures_state::<f64>(4, &mut rng);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        sum += rho.trace_product(&rho);
    }
    let mean = sum / n as f64;
    // sd of a single purity is about 0.097, so 4 standard errors is about 0.004
    assert!((mean - BURES_MEAN_PURITY_D4).abs() < 0.004, "mean purity {mean}");
}

#[test]
fn bures_states_are_valid_in_single_precision() {
    let mut rng = RngStream::new(74, 0);
    for _ in 0..20 {
        let rho = bures_state::<f32>(4, &mut rng);
        assert!((rho.trace() - 1.0).abs() < 1e-5);
        assert!(eigvalsh(&rho).unwrap()[0] > -1e-5);
    }
}

#[test]
fn scan_is_deterministic_and_consistent() {
    let config = OptimizerConfig::default();
    let a = nonlocality_scan::<f64>(2, 40, 9, &config).unwrap();
    let b = nonlocality_scan::<f64>(2, 40, 9, &config).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.histogram.counts.iter().sum::<u64>(), 40);
    assert_eq!(a.p_violation, a.violations as f64 / 40.0);
    assert_eq!(a.purity_bound_failures + a.bound_sandwich_failures, 0);
    assert_ne!(a, nonlocality_scan::<f64>(2, 40, 10, &config).unwrap());
}

#[test]
fn streams_do_not_depend_on_draw_order() {
    let mut first = RngStream::new(5, 7);
    let x: Vec<f64> = (0..4).map(|_| first.normal()).collect();
    let mut other = RngStream::new(5, 8);
    let _ = other.normal();
    let mut again = RngStream::new(5, 7);
    let y: Vec<f64> = (0..4).map(|_| again.normal()).collect();
    assert_eq!(x, y);
    assert!(x.iter().all(|v| v.is_finite()));
}
