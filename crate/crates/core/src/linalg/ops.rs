//! Norms, tensor products and partial operations on qubit-qudit matrices.
//!
//! Composite indices follow `|a⟩ ⊗ |b⟩ ↦ a·d + b` with `a ∈ {0, 1}` on the qubit.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::eigen::{eigh, EigenWorkspace};
use super::matrix::{ComplexMatrix, HermitianMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `Σ |λ_i|`.
pub fn trace_norm<T: Real>(h: &HermitianMatrix<T>) -> T {
    let mut ws = EigenWorkspace::new(h.dim());
    ws.buffer_mut().copy_from_slice(h.as_matrix().as_slice());
    ws.trace_norm_loaded()
}

/// `Tr(H H†) = Σ |h_ij|²`.
pub fn frobenius_norm_sq<T: Real>(h: &HermitianMatrix<T>) -> T {
    h.frobenius_norm_sq()
}

pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

pub fn kron_hermitian<T: Real>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>) -> HermitianMatrix<T> {
    HermitianMatrix::symmetrized(kron(a.as_matrix(), b.as_matrix()))
}

fn check_bipartite<T: Real>(m: &ComplexMatrix<T>, d: usize) -> Result<()> {
    if d == 0 || !m.is_square() || m.rows() != 2 * d {
        return Err(Error::Dimension(format!(
            "expected a {0}x{0} matrix for qudit dimension {d}, got {1}x{2}",
            2 * d,
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Traces out the qubit: `(Tr_A M)_jk = M_jk + M_{d+j, d+k}`.
pub fn partial_trace_first<T: Real>(m: &ComplexMatrix<T>, d: usize) -> Result<ComplexMatrix<T>> {
    check_bipartite(m, d)?;
    Ok(ComplexMatrix::from_fn(d, d, |j, k| m[(j, k)] + m[(d + j, d + k)]))
}

/// Transposes every `d x d` block of the 2x2 block structure.
pub fn partial_transpose_second<T: Real>(m: &ComplexMatrix<T>, d: usize) -> Result<ComplexMatrix<T>> {
    check_bipartite(m, d)?;
    Ok(ComplexMatrix::from_fn(2 * d, 2 * d, |i, j| {
        let (a, b) = (i / d, i % d);
        let (a2, b2) = (j / d, j % d);
        m[(a * d + b2, a2 * d + b)]
    }))
}

/// `U diag(sign λ_i) U†` with `sign(0) = +1`: the ±1 observable maximizing `Tr(H·B)`.
pub fn sign_involution<T: Real>(h: &HermitianMatrix<T>) -> Result<HermitianMatrix<T>> {
    let es = eigh(h)?;
    Ok(es.reassemble(|x| if x >= T::zero() { T::one() } else { -T::one() }))
}

/// The Pauli matrices `σ_1, σ_2, σ_3`.
pub fn pauli<T: Real>() -> [HermitianMatrix<T>; 3] {
    let o = Complex::<T>::zero();
    let l = Complex::<T>::one();
    let i = Complex::<T>::i();
    let mk = |a: [Complex<T>; 4]| {
        HermitianMatrix::symmetrized(ComplexMatrix::from_row_major(2, 2, a.to_vec()).expect("2x2"))
    };
    [mk([o, l, l, o]), mk([o, -i, i, o]), mk([l, o, o, -l])]
}

/// `½ r·σ` for a real 3-vector `r`.
pub fn bloch_matrix<T: Real>(r: [T; 3]) -> HermitianMatrix<T> {
    let s = pauli::<T>();
    let half = T::lit(0.5);
    HermitianMatrix::linear_combination(&[(half * r[0], &s[0]), (half * r[1], &s[1]), (half * r[2], &s[2])])
}
