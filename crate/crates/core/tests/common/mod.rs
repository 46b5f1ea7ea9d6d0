#![allow(dead_code)]

use chsh_core::ensembles::{haar_unitary, RngStream};
use chsh_core::linalg::{ComplexMatrix, HermitianMatrix};
use chsh_core::Complex64;

pub fn random_hermitian(n: usize, rng: &mut RngStream) -> HermitianMatrix<f64> {
    let m = ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(rng.normal(), rng.normal()));
    HermitianMatrix::symmetrized(m)
}

/// `U diag(±1) U†` with Haar `U` and independent fair signs.
pub fn random_involution(n: usize, rng: &mut RngStream) -> HermitianMatrix<f64> {
    let u = haar_unitary::<f64>(n, rng);
    let signs: Vec<f64> = (0..n).map(|_| if rng.uniform() < 0.5 { -1.0 } else { 1.0 }).collect();
    let d = ComplexMatrix::from_real_diagonal(&signs);
    HermitianMatrix::symmetrized(u.matmul(&d).matmul(&u.adjoint()))
}

pub fn random_rotation(rng: &mut RngStream) -> [[f64; 3]; 3] {
    let angles = [rng.uniform() * std::f64::consts::TAU, rng.uniform() * std::f64::consts::PI, rng.uniform() * std::f64::consts::TAU];
    chsh_core::rotation::RotationSO3::from_angles(angles).to_matrix()
}
