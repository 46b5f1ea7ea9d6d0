//! The qubit-qutrit family `ρ = x|ψ₁⟩⟨ψ₁| + y|ψ₂⟩⟨ψ₂| + z|ψ₃⟩⟨ψ₃|`, `z = 1 − x − y`, with
//! `ψ₁ = (|00⟩+|11⟩)/√2`, `ψ₂ = (|01⟩+|12⟩)/√2`, `ψ₃ = (|02⟩+|10⟩)/√2`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chsh::max_chsh;
use crate::error::{Error, Result};
use crate::linalg::{partial_transpose_second, trace_norm, ComplexMatrix, HermitianMatrix};
use crate::optimize::OptimizerConfig;
use crate::scalar::Real;
use crate::state::{BetaDecomposition, QubitQuditState};

/// A point `(x, y)` of the closed simplex `x, y ≥ 0`, `x + y ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyPoint<T> {
    x: T,
    y: T,
}

impl<T: Real> FamilyPoint<T> {
    pub fn new(x: T, y: T) -> Result<Self> {
        let ok = x.is_finite() && y.is_finite() && x >= T::zero() && y >= T::zero() && x + y <= T::one();
        if !ok {
            return Err(Error::Domain(format!("({x}, {y}) is outside the simplex x, y >= 0, x + y <= 1")));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> T {
        self.x
    }

    pub fn y(&self) -> T {
        self.y
    }

    pub fn z(&self) -> T {
        T::one() - self.x - self.y
    }
}

/// The explicit 6x6 density matrix of the family.
pub fn qutrit_family_state<T: Real>(p: &FamilyPoint<T>) -> Result<QubitQuditState<T>> {
    let h = T::lit(0.5);
    let (x, y, z) = (p.x() * h, p.y() * h, p.z() * h);
    let o = T::zero();
    let rows = [
        [x, o, o, o, x, o],
        [o, y, o, o, o, y],
        [o, o, z, z, o, o],
        [o, o, z, z, o, o],
        [x, o, o, o, x, o],
        [o, y, o, o, o, y],
    ];
    QubitQuditState::new(ComplexMatrix::from_fn(6, 6, |i, j| Complex::new(rows[i][j], o)), 3)
}

/// The same state assembled from the three Bell-like vectors.
pub fn qutrit_family_mixture<T: Real>(p: &FamilyPoint<T>) -> Result<QubitQuditState<T>> {
    let s = T::FRAC_1_SQRT_2();
    // basis index a·3 + b for |a b⟩
    let psi = |i: usize, j: usize| {
        let mut v = vec![Complex::new(T::zero(), T::zero()); 6];
        v[i] = Complex::new(s, T::zero());
        v[j] = Complex::new(s, T::zero());
        v
    };
    let vectors = [(p.x(), psi(0, 4)), (p.y(), psi(1, 5)), (p.z(), psi(2, 3))];
    let m = ComplexMatrix::from_fn(6, 6, |i, j| {
        vectors.iter().fold(Complex::new(T::zero(), T::zero()), |acc, (w, v)| acc + v[i] * v[j].conj() * *w)
    });
    QubitQuditState::new(m, 3)
}

/// Closed-form β matrices of the family.
pub fn qutrit_family_betas<T: Real>(p: &FamilyPoint<T>) -> Result<BetaDecomposition<T>> {
    let h = T::lit(0.5);
    let (x, y) = (p.x(), p.y());
    let one = T::one();
    let two = T::lit(2.0);
    let o = T::zero();
    let re = |rows: [[T; 3]; 3]| {
        HermitianMatrix::symmetrized(ComplexMatrix::from_fn(3, 3, |i, j| Complex::new(rows[i][j] * h, o)))
    };
    let b0 = re([[one - y, o, o], [o, x + y, o], [o, o, one - x]]);
    let b1 = re([[o, x, one - x - y], [x, o, y], [one - x - y, y, o]]);
    let im = [[o, x, x + y - one], [-x, o, y], [-(x + y - one), -y, o]];
    let b2 = HermitianMatrix::symmetrized(ComplexMatrix::from_fn(3, 3, |i, j| Complex::new(o, im[i][j] * h)));
    let b3 = re([[two * x + y - one, o, o], [o, y - x, o], [o, o, one - x - two * y]]);
    BetaDecomposition::new([b0, b1, b2, b3])
}

/// `E = log₂ ‖ρ^{T₂}‖₁` in bits.
pub fn log_negativity<T: Real>(state: &QubitQuditState<T>) -> T {
    let pt = partial_transpose_second(state.rho().as_matrix(), state.d()).expect("shape checked");
    let norm = trace_norm(&HermitianMatrix::symmetrized(pt));
    norm.log2().max(T::zero())
}

/// Zero-padding of every β to `d2 x d2`.
pub fn embed<T: Real>(betas: &BetaDecomposition<T>, d2: usize) -> Result<BetaDecomposition<T>> {
    betas.embed(d2)
}

/// One point of the family scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct GridRow {
    pub x: f64,
    pub y: f64,
    pub E: f64,
    pub B: f64,
    pub lower: f64,
    pub upper: f64,
    pub entangled: bool,
    pub violates: bool,
    pub excluded_by_upper: bool,
}

/// Evaluates a single family point.
pub fn grid_row<T: Real>(p: &FamilyPoint<T>, config: &OptimizerConfig) -> Result<GridRow> {
    let tol = T::tolerances();
    let state = qutrit_family_state(p)?;
    let betas = qutrit_family_betas(p)?;
    let res = max_chsh(&betas, config)?;
    let e = log_negativity(&state).as_f64();
    Ok(GridRow {
        x: p.x().as_f64(),
        y: p.y().as_f64(),
        E: e,
        B: res.value.as_f64(),
        lower: res.lower.as_f64(),
        upper: res.upper.as_f64(),
        entangled: e > tol.entanglement,
        violates: res.violates,
        excluded_by_upper: res.upper.as_f64() <= 2.0,
    })
}

/// Grid points `(i, j)/(resolution − 1)` with `i + j ≤ resolution − 1`, `x` outer.
pub fn grid_points(resolution: usize) -> Result<Vec<(usize, usize)>> {
    if resolution < 2 {
        return Err(Error::Domain(format!("grid resolution must be at least 2, got {resolution}")));
    }
    let last = resolution - 1;
    Ok((0..=last).flat_map(|i| (0..=last - i).map(move |j| (i, j))).collect())
}

/// Family scan over the simplex, rows in `(x, y)` order.
pub fn grid_scan<T: Real>(resolution: usize, config: &OptimizerConfig) -> Result<Vec<GridRow>> {
    let points = grid_points(resolution)?;
    let den = T::from_usize(resolution - 1).unwrap();
    points
        .par_iter()
        .map(|&(i, j)| {
            let p = FamilyPoint::new(T::from_usize(i).unwrap() / den, T::from_usize(j).unwrap() / den)?;
            grid_row(&p, config)
        })
        .collect()
}
