//! Scalar abstraction and numerical tolerances.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating point scalar the whole crate is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Default tolerance record for this precision.
    fn tolerances() -> Tolerances;

    /// Lossy conversion from an `f64` constant.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn tolerances() -> Tolerances {
        Tolerances::default()
    }
}

impl Real for f32 {
    fn tolerances() -> Tolerances {
        Tolerances {
            hermiticity: 1e-5,
            trace: 1e-5,
            psd: 1e-5,
            jacobi_relative: 1e-6,
            jacobi_max_sweeps: 100,
            involution: 1e-4,
            axis_norm: 1e-4,
            degenerate_direction: 1e-6,
            violation_margin: 1e-5,
            entanglement: 1e-5,
        }
    }
}

/// Every numerical threshold used by the crate, in one place.
///
/// Values are stored as `f64` and converted to the working scalar on use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute per-entry bound on `|H_ij - conj(H_ji)|` and on diagonal imaginary parts.
    pub hermiticity: f64,
    /// Absolute bound on `|Tr(rho) - 1|`.
    pub trace: f64,
    /// Smallest admissible eigenvalue is `-psd`.
    pub psd: f64,
    /// Jacobi stops when the off-diagonal Frobenius mass drops below this times `||H||_F`.
    pub jacobi_relative: f64,
    pub jacobi_max_sweeps: usize,
    /// Frobenius bound on `B^2 - I` for a ±1 observable.
    pub involution: f64,
    /// Bound on `| ||r|| - 2 |` for qubit observable axes.
    pub axis_norm: f64,
    /// Below this norm `r_B ± r_B'` is treated as a vanishing direction.
    pub degenerate_direction: f64,
    /// A value counts as a CHSH violation only if it exceeds `2 + violation_margin`.
    pub violation_margin: f64,
    /// Logarithmic negativity (bits) above which a state is flagged entangled.
    pub entanglement: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-12,
            trace: 1e-10,
            psd: 1e-10,
            jacobi_relative: 1e-13,
            jacobi_max_sweeps: 100,
            involution: 1e-10,
            axis_norm: 1e-10,
            degenerate_direction: 1e-12,
            violation_margin: 1e-9,
            entanglement: 1e-9,
        }
    }
}
