use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: worst entry ({row}, {col}) deviates by {defect:e}")]
    NotHermitian { row: usize, col: usize, defect: f64 },

    #[error("trace defect: trace is {trace} instead of 1")]
    Trace { trace: f64 },

    #[error("matrix is not positive semidefinite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal mass {residual:e})")]
    NotConverged { sweeps: usize, residual: f64 },

    #[error("internal consistency: {0}")]
    Internal(String),

    #[error("parse error at {location}: {reason}")]
    Parse { location: String, reason: String },

    #[error("shape error at {location}: {reason}")]
    Shape { location: String, reason: String },
}

impl Error {
    /// True for failures caused by the caller's input (as opposed to numerical trouble).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::NotConverged { .. } | Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
