//! Maximal CHSH violation for qubit-qudit quantum states.
//!
//! A `2d x 2d` density matrix is written as `ρ = ½ (I⊗β₀ + Σ σ_i⊗β_i)`; the maximal CHSH
//! value then reduces to a search over three Euler angles (see [`chsh::max_chsh`]).
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases below fix `f64`.

pub mod case_study;
pub mod chsh;
pub mod ensembles;
pub mod error;
pub mod io;
pub mod linalg;
pub mod optimize;
pub mod rotation;
pub mod scalar;
pub mod seesaw;
pub mod state;
pub mod validation;

pub use error::{Error, Result};
pub use optimize::OptimizerConfig;
pub use scalar::{Real, Tolerances};

pub type Complex64 = num_complex::Complex<f64>;
pub type Matrix = linalg::ComplexMatrix<f64>;
pub type Hermitian = linalg::HermitianMatrix<f64>;
pub type State = state::QubitQuditState<f64>;
pub type Betas = state::BetaDecomposition<f64>;
pub type Rotation = rotation::RotationSO3<f64>;
pub type ChshResult = chsh::ChshResult<f64>;
pub type Observables = chsh::ChshObservables<f64>;
