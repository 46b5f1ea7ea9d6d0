//! Small dense complex linear algebra for Hermitian matrices.

mod eigen;
mod matrix;
mod ops;
mod tridiagonal;

pub use eigen::{eigh, eigh_checked, eigvalsh, EigenSystem, EigenWorkspace};
pub use matrix::{hermiticity_defect, ComplexMatrix, HermitianMatrix};
pub use ops::{
    bloch_matrix, frobenius_norm_sq, kron, kron_hermitian, partial_trace_first, partial_transpose_second,
    pauli, sign_involution, trace_norm,
};
