mod common;

use chsh_core::ensembles::{bures_qubit_qudit, RngStream};
use chsh_core::linalg::{
    eigh, frobenius_norm_sq, kron, partial_transpose_second, pauli, sign_involution, trace_norm, ComplexMatrix,
    HermitianMatrix,
};
use chsh_core::{Complex64, State};
use common::{random_hermitian, random_involution};
use proptest::prelude::*;

/// Real roots of `λ³ + aλ² + bλ + c` (all real for a Hermitian characteristic polynomial),
/// by the trigonometric formula, ascending.
fn cubic_roots(a: f64, b: f64, c: f64) -> [f64; 3] {
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = -a / 3.0;
    if p.abs() < 1e-300 {
        let t = (-q).cbrt();
        return [t + shift; 3];
    }
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
    let theta = arg.acos() / 3.0;
    let mut r = [0, 1, 2].map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift);
    r.sort_by(|x, y| x.partial_cmp(y).unwrap());
    r
}

fn char_poly_3x3(h: &HermitianMatrix<f64>) -> (f64, f64, f64) {
    let m = h.as_matrix();
    let e = |i: usize, j: usize| m[(i, j)];
    let tr = (e(0, 0) + e(1, 1) + e(2, 2)).re;
    let minors = (e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0)) + (e(0, 0) * e(2, 2) - e(0, 2) * e(2, 0))
        + (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1));
    let det = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
        + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
    (-tr, minors.re, -det.re)
}

#[test]
fn pauli_spectra() {
    for s in pauli::<f64>() {
        let v = eigh(&s).unwrap().values;
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
    }
}

#[test]
fn random_3x3_matches_cubic_oracle() {
    let mut rng = RngStream::new(31, 0);
    for _ in 0..200 {
        let h = random_hermitian(3, &mut rng);
        let (a, b, c) = char_poly_3x3(&h);
        let oracle = cubic_roots(a, b, c);
        let values = eigh(&h).unwrap().values;
        for (x, y) in values.iter().zip(&oracle) {
            assert!((x - y).abs() < 1e-9, "{values:?} vs {oracle:?}");
        }
    }
}

#[test]
fn trace_norm_examples() {
    assert_eq!(trace_norm(&HermitianMatrix::from_real_diagonal(&[3.0, -2.0])), 5.0);
    assert!((trace_norm(&pauli::<f64>()[0].scale(0.5)) - 1.0).abs() < 1e-15);
    let i = Complex64::new(0.0, 1.0);
    let z = Complex64::new(0.0, 0.0);
    let m = ComplexMatrix::from_rows(&[vec![z, i, -i], vec![-i, z, i], vec![i, -i, z]]).unwrap();
    let m = HermitianMatrix::new(m).unwrap();
    let (a, b, c) = char_poly_3x3(&m);
    let oracle: f64 = cubic_roots(a, b, c).iter().map(|x| x.abs()).sum();
    assert!((oracle - 2.0 * 3f64.sqrt()).abs() < 1e-12);
    assert!((trace_norm(&m) - 2.0 * 3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn kron_examples() {
    let i2 = ComplexMatrix::<f64>::identity(2);
    assert_eq!(kron(&i2, &ComplexMatrix::identity(3)), ComplexMatrix::identity(6));
    let s = pauli::<f64>();
    let diag = ComplexMatrix::from_real_diagonal(&[1.5, -0.5, 2.0]);
    let k = kron(s[2].as_matrix(), &diag);
    assert_eq!(k, ComplexMatrix::from_real_diagonal(&[1.5, -0.5, 2.0, -1.5, 0.5, -2.0]));
    let xx = kron(s[0].as_matrix(), s[0].as_matrix());
    assert!(xx.matmul(&xx).distance(&ComplexMatrix::identity(4)) < 1e-15);
}

#[test]
fn bell_partial_transpose_spectrum() {
    let pt = partial_transpose_second(State::bell().rho().as_matrix(), 2).unwrap();
    let v = eigh(&HermitianMatrix::new(pt).unwrap()).unwrap().values;
    for (x, y) in v.iter().zip(&[-0.5, 0.5, 0.5, 0.5]) {
        assert!((x - y).abs() < 1e-14);
    }
}

#[test]
fn partial_transpose_is_an_involution_on_bures_states() {
    for i in 0..100 {
        let d = 2 + (i as usize % 4);
        let s = bures_qubit_qudit::<f64>(d, 17, i).unwrap();
        let m = s.rho().as_matrix();
        let once = partial_transpose_second(m, d).unwrap();
        assert!(HermitianMatrix::new(once.clone()).is_ok());
        assert!(partial_transpose_second(&once, d).unwrap().distance(m) < 1e-15);
    }
}

#[test]
fn sign_involution_examples() {
    let b = sign_involution(&HermitianMatrix::from_real_diagonal(&[3.0, -2.0])).unwrap();
    assert!(b.distance(&HermitianMatrix::from_real_diagonal(&[1.0, -1.0])) < 1e-15);
    let s1 = pauli::<f64>()[0].clone();
    assert!(sign_involution(&s1).unwrap().distance(&s1) < 1e-14);
    assert!(sign_involution(&HermitianMatrix::<f64>::zeros(3)).unwrap().distance(&HermitianMatrix::identity(3)) < 1e-15);
}

#[test]
fn eigh_is_deterministic() {
    let mut rng = RngStream::new(5, 5);
    let h = random_hermitian(7, &mut rng);
    let a = eigh(&h).unwrap();
    let b = eigh(&h).unwrap();
    assert_eq!(a.values, b.values);
    assert_eq!(a.vectors, b.vectors);
}

fn hermitian_strategy() -> impl Strategy<Value = HermitianMatrix<f64>> {
    (1usize..9, prop::collection::vec(-2.0..2.0f64, 2 * 64)).prop_map(|(n, e)| {
        HermitianMatrix::symmetrized(ComplexMatrix::from_fn(n, n, |i, j| Complex64::new(e[2 * (8 * i + j)], e[2 * (8 * i + j) + 1])))
    })
}

proptest! {
    #[test]
    fn eigensystem_invariants(h in hermitian_strategy()) {
        let es = eigh(&h).unwrap();
        let n = h.dim();
        let v = &es.vectors;
        let hv = h.as_matrix().matmul(v);
        let vd = v.matmul(&ComplexMatrix::from_real_diagonal(&es.values));
        let scale = 1.0 + h.as_matrix().frobenius_norm();
        prop_assert!(hv.distance(&vd) < 1e-10 * scale);
        prop_assert!(v.adjoint().matmul(v).distance(&ComplexMatrix::identity(n)) < 1e-10);
        prop_assert!(es.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn trace_norm_dominates_trace(h in hermitian_strategy()) {
        let tn = trace_norm(&h);
        let values = eigh(&h).unwrap().values;
        prop_assert!(tn + 1e-12 >= h.trace().abs());
        let same_sign = values.iter().all(|&x| x >= -1e-12) || values.iter().all(|&x| x <= 1e-12);
        if same_sign {
            prop_assert!((tn - h.trace().abs()).abs() < 1e-10);
        } else {
            prop_assert!(tn > h.trace().abs() + 1e-12);
        }
    }

    #[test]
    fn norm_inequality_and_frobenius_identity(h in hermitian_strategy()) {
        let tn = trace_norm(&h);
        let f = frobenius_norm_sq(&h);
        prop_assert!(tn * tn <= h.dim() as f64 * f * (1.0 + 1e-12) + 1e-12);
        let sum_sq: f64 = eigh(&h).unwrap().values.iter().map(|x| x * x).sum();
        prop_assert!((f - sum_sq).abs() < 1e-10 * (1.0 + f));
    }

    #[test]
    fn diagonal_input_is_exact(diag in prop::collection::vec(-5.0..5.0f64, 1..10)) {
        let values = eigh(&HermitianMatrix::from_real_diagonal(&diag)).unwrap().values;
        let mut sorted = diag.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        prop_assert_eq!(values, sorted);
    }

    #[test]
    fn sign_involution_is_optimal(h in hermitian_strategy(), seed in any::<u64>()) {
        let b = sign_involution(&h).unwrap();
        let n = h.dim();
        prop_assert!(b.as_matrix().matmul(b.as_matrix()).distance(&ComplexMatrix::identity(n)) < 1e-10);
        let tn = trace_norm(&h);
        prop_assert!((h.trace_product(&b) - tn).abs() < 1e-10 * (1.0 + tn));
        let mut rng = RngStream::new(seed, 0);
        for _ in 0..100 {
            let r = random_involution(n, &mut rng);
            prop_assert!(h.trace_product(&r) <= tn + 1e-9);
        }
    }
}
