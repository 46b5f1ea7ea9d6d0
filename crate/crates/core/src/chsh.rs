//! Maximal CHSH value of a qubit-qudit state.
//!
//! For `ρ = ½ (I⊗β₀ + Σ σ_i⊗β_i)` the optimum over all ±1 observables is
//! `𝓑 = 2 max_R sqrt(‖(Rβ)₁‖₁² + ‖(Rβ)₂‖₁²)` with `R ∈ SO(3)` acting on the
//! triple `(β₁, β₂, β₃)`. The maximization runs over the three Euler angles of `R`;
//! the optimal observables follow in closed form from the maximizing rotation.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    bloch_matrix, eigvalsh, kron, pauli, sign_involution, trace_norm, ComplexMatrix, EigenWorkspace,
    HermitianMatrix,
};
use crate::optimize::{maximize_over_so3, OptimizerConfig, Symmetry};
use crate::rotation::{mat_vec, norm3, transpose, Mat3, RotationSO3};
use crate::scalar::Real;
use crate::state::{BetaDecomposition, QubitQuditState};

/// Qubit observable `½ r·σ` with `‖r‖ = 2`, i.e. eigenvalues exactly ±1.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable2<T> {
    matrix: HermitianMatrix<T>,
    axis: [T; 3],
}

impl<T: Real> Observable2<T> {
    pub fn from_axis(axis: [T; 3]) -> Result<Self> {
        let n = norm3(axis);
        if (n - T::lit(2.0)).abs().as_f64() > T::tolerances().axis_norm {
            return Err(Error::InvalidObservable(format!("qubit axis has norm {n}, expected 2")));
        }
        Ok(Self { matrix: bloch_matrix(axis), axis })
    }

    /// Observable along the direction of `v` (any nonzero length).
    pub fn along(v: [T; 3]) -> Result<Self> {
        let n = norm3(v);
        if !(n > T::zero()) {
            return Err(Error::InvalidObservable("zero direction".into()));
        }
        let s = T::lit(2.0) / n;
        Self::from_axis(v.map(|x| x * s))
    }

    pub fn sigma(i: usize) -> Self {
        let mut axis = [T::zero(); 3];
        axis[i - 1] = T::lit(2.0);
        Self::from_axis(axis).expect("unit Pauli axis")
    }

    pub fn matrix(&self) -> &HermitianMatrix<T> {
        &self.matrix
    }

    /// `r = (Tr σ₁A, Tr σ₂A, Tr σ₃A)`, of norm 2.
    pub fn axis(&self) -> [T; 3] {
        self.axis
    }
}

/// Qudit observable: Hermitian with `B² = I` (eigenvalues ±1, any degeneracy).
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableD<T> {
    matrix: HermitianMatrix<T>,
}

impl<T: Real> ObservableD<T> {
    pub fn new(matrix: HermitianMatrix<T>) -> Result<Self> {
        let sq = matrix.as_matrix().matmul(matrix.as_matrix());
        let defect = sq.distance(&ComplexMatrix::identity(matrix.dim()));
        if defect.as_f64() > T::tolerances().involution {
            return Err(Error::InvalidObservable(format!("B² deviates from the identity by {defect}")));
        }
        Ok(Self { matrix })
    }

    /// Optimal partner of `m`: `sign(m)` with `sign(0) = +1`.
    pub fn aligned_with(m: &HermitianMatrix<T>) -> Result<Self> {
        Self::new(sign_involution(m)?)
    }

    pub fn matrix(&self) -> &HermitianMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// The four CHSH observables `A, A′` (qubit) and `B, B′` (qudit).
#[derive(Debug, Clone, PartialEq)]
pub struct ChshObservables<T> {
    pub a: Observable2<T>,
    pub a_prime: Observable2<T>,
    pub b: ObservableD<T>,
    pub b_prime: ObservableD<T>,
}

/// Outcome of [`max_chsh`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChshResult<T> {
    /// Maximal CHSH value 𝓑.
    pub value: T,
    /// Maximizing rotation of the β triple.
    pub rotation: RotationSO3<T>,
    pub observables: ChshObservables<T>,
    pub lower: T,
    pub upper: T,
    /// `value > 2` (beyond the violation margin).
    pub violates: bool,
    pub evaluations: usize,
}

/// Flattened rotation-ready copy of `(β₁, β₂, β₃)` plus eigenvalue scratch.
struct ObjectiveKernel<'a, T> {
    betas: [&'a [Complex<T>]; 3],
    ws: EigenWorkspace<T>,
}

impl<'a, T: Real> ObjectiveKernel<'a, T> {
    fn new(betas: &'a BetaDecomposition<T>) -> Self {
        let v = betas.vector();
        Self {
            betas: [v[0].as_matrix().as_slice(), v[1].as_matrix().as_slice(), v[2].as_matrix().as_slice()],
            ws: EigenWorkspace::new(betas.d()),
        }
    }

    fn row_trace_norm(&mut self, row: &[T; 3]) -> T {
        let buf = self.ws.buffer_mut();
        let [b1, b2, b3] = self.betas;
        for (k, z) in buf.iter_mut().enumerate() {
            *z = b1[k] * row[0] + b2[k] * row[1] + b3[k] * row[2];
        }
        self.ws.trace_norm_loaded()
    }

    fn eval(&mut self, r: &Mat3<T>) -> T {
        let t1 = self.row_trace_norm(&r[0]);
        let t2 = self.row_trace_norm(&r[1]);
        t1 * t1 + t2 * t2
    }
}

/// `‖(Rβ)₁‖₁² + ‖(Rβ)₂‖₁²` where `(Rβ)_a = Σ_b R_ab β_b`.
pub fn objective<T: Real>(betas: &BetaDecomposition<T>, rotation: &RotationSO3<T>) -> T {
    ObjectiveKernel::new(betas).eval(&rotation.to_matrix())
}

/// Same as [`objective`] for an explicit 3x3 matrix (rows 1 and 2 are used).
pub fn objective_matrix<T: Real>(betas: &BetaDecomposition<T>, r: &Mat3<T>) -> T {
    ObjectiveKernel::new(betas).eval(r)
}

/// `2 sqrt(t₁² + t₂²)` with `t₁ ≥ t₂` the two largest trace norms among `β₁, β₂, β₃`.
pub fn lower_bound<T: Real>(betas: &BetaDecomposition<T>) -> T {
    let mut t = betas.vector().map(trace_norm);
    t.sort_by(|a, b| b.partial_cmp(a).expect("finite norms"));
    T::lit(2.0) * (t[0] * t[0] + t[1] * t[1]).sqrt()
}

/// `2 sqrt(d Σ_a ‖β_a‖₂²)`.
pub fn upper_bound<T: Real>(betas: &BetaDecomposition<T>) -> T {
    let s: T = betas.vector().iter().map(|b| b.frobenius_norm_sq()).sum();
    T::lit(2.0) * (T::from_usize(betas.d()).unwrap() * s).sqrt()
}

/// Qubit-qubit closed form `2 sqrt(κ₁ + κ₂)` from the two largest eigenvalues of `CᵀC`,
/// `C_ij = Tr(β_i σ_j)`.
pub fn horodecki_qubit_qubit<T: Real>(betas: &BetaDecomposition<T>) -> Result<T> {
    if betas.d() != 2 {
        return Err(Error::Dimension(format!("closed form requires d = 2, got {}", betas.d())));
    }
    let s = pauli::<T>();
    let c: Mat3<T> = [1, 2, 3].map(|i| [0, 1, 2].map(|j| betas.beta(i).trace_product(&s[j])));
    let ctc = ComplexMatrix::from_fn(3, 3, |i, j| {
        Complex::new((0..3).map(|k| c[k][i] * c[k][j]).sum(), T::zero())
    });
    let kappa = eigvalsh(&HermitianMatrix::symmetrized(ctc))?;
    Ok(T::lit(2.0) * (kappa[2] + kappa[1]).max(T::zero()).sqrt())
}

/// Maximal CHSH value with the maximizing rotation, observables and bounds.
pub fn max_chsh<T: Real>(betas: &BetaDecomposition<T>, config: &OptimizerConfig) -> Result<ChshResult<T>> {
    let found = maximize_over_so3(config, Symmetry::RowSignsAndSwap, || ObjectiveKernel::new(betas), |k, r| k.eval(r));
    let value = T::lit(2.0) * found.value.max(T::zero()).sqrt();
    let lower = lower_bound(betas);
    let upper = upper_bound(betas);
    let tol = T::tolerances();
    let slack = T::lit(1e-8) * (T::one() + lower);
    if value < lower - slack {
        return Err(Error::Internal(format!("optimizer value {value} fell below the lower bound {lower}")));
    }
    let observables = extract_observables(betas, &found.rotation)?;
    Ok(ChshResult {
        value,
        rotation: found.rotation,
        observables,
        lower,
        upper,
        violates: value.as_f64() > 2.0 + tol.violation_margin,
        evaluations: found.evaluations,
    })
}

/// Observables realizing the CHSH value at rotation `R`.
///
/// `B = sign((Rβ)₁)`, `B′ = sign((Rβ)₂)`; `A, A′` point along `r_B ± r_B′` computed from
/// the rotated triple, then mapped back so their axes refer to the original Pauli frame.
/// When one of `r_B ± r_B′` vanishes, both qubit observables use the surviving direction;
/// when both vanish, `A = σ₃` and `A′ = σ₁`.
pub fn extract_observables<T: Real>(
    betas: &BetaDecomposition<T>,
    rotation: &RotationSO3<T>,
) -> Result<ChshObservables<T>> {
    let r = rotation.to_matrix();
    let rotated = betas.rotated(&r);
    let b = ObservableD::aligned_with(rotated.beta(1))?;
    let b_prime = ObservableD::aligned_with(rotated.beta(2))?;
    let rv = rotated.vector();
    let r_b = rv.map(|m| m.trace_product(b.matrix()));
    let r_bp = rv.map(|m| m.trace_product(b_prime.matrix()));
    let (a, a_prime) = align_qubit_observables(r_b, r_bp, &transpose(&r))?;
    Ok(ChshObservables { a, a_prime, b, b_prime })
}

/// `A ∥ r_B + r_B′`, `A′ ∥ r_B − r_B′`, with axes mapped through `to_original`.
pub(crate) fn align_qubit_observables<T: Real>(
    r_b: [T; 3],
    r_bp: [T; 3],
    to_original: &Mat3<T>,
) -> Result<(Observable2<T>, Observable2<T>)> {
    let sum = [0, 1, 2].map(|k| r_b[k] + r_bp[k]);
    let diff = [0, 1, 2].map(|k| r_b[k] - r_bp[k]);
    let eps = T::lit(T::tolerances().degenerate_direction);
    let (ns, nd) = (norm3(sum), norm3(diff));
    let (u, u_prime) = match (ns < eps, nd < eps) {
        (true, true) => return Ok((Observable2::sigma(3), Observable2::sigma(1))),
        (false, true) => (sum, sum),
        (true, false) => (diff, diff),
        (false, false) => (sum, diff),
    };
    Ok((Observable2::along(mat_vec(to_original, u))?, Observable2::along(mat_vec(to_original, u_prime))?))
}

/// `Tr(ρ [A⊗(B+B′) + A′⊗(B−B′)])`.
pub fn bell_value<T: Real>(state: &QubitQuditState<T>, obs: &ChshObservables<T>) -> Result<T> {
    let d = state.d();
    if obs.b.dim() != d || obs.b_prime.dim() != d {
        return Err(Error::Dimension(format!("observables of dimension {} for a d = {d} state", obs.b.dim())));
    }
    let bsum = obs.b.matrix().as_matrix() + obs.b_prime.matrix().as_matrix();
    let bdiff = obs.b.matrix().as_matrix() - obs.b_prime.matrix().as_matrix();
    let op = &kron(obs.a.matrix().as_matrix(), &bsum) + &kron(obs.a_prime.matrix().as_matrix(), &bdiff);
    Ok(state.rho().as_matrix().trace_product(&op).re)
}

/// `½ Σ_i [Tr(σ_i A) Tr(β_i (B+B′)) + Tr(σ_i A′) Tr(β_i (B−B′))]`.
pub fn bell_value_from_betas<T: Real>(betas: &BetaDecomposition<T>, obs: &ChshObservables<T>) -> Result<T> {
    if obs.b.dim() != betas.d() || obs.b_prime.dim() != betas.d() {
        return Err(Error::Dimension("observable dimension does not match the betas".into()));
    }
    let bsum = obs.b.matrix() + obs.b_prime.matrix();
    let bdiff = obs.b.matrix() - obs.b_prime.matrix();
    let (ra, rap) = (obs.a.axis(), obs.a_prime.axis());
    let mut acc = T::zero();
    for (i, beta) in betas.vector().iter().enumerate() {
        acc = acc + ra[i] * beta.trace_product(&bsum) + rap[i] * beta.trace_product(&bdiff);
    }
    Ok(acc * T::lit(0.5))
}

/// Both sides of `(‖v+w‖ + ‖v−w‖)² = 4 max_R [(Rv)₁² + (Rw)₂²]`, the right side
/// obtained by the same rotation search used for the CHSH objective.
pub fn lemma_rotation_identity<T: Real>(v: [T; 3], w: [T; 3], config: &OptimizerConfig) -> (T, T) {
    let plus = norm3([0, 1, 2].map(|k| v[k] + w[k]));
    let minus = norm3([0, 1, 2].map(|k| v[k] - w[k]));
    let lhs = (plus + minus) * (plus + minus);
    let found = maximize_over_so3(config, Symmetry::RowSigns, || (), |_, r: &Mat3<T>| {
        let x = r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2];
        let y = r[1][0] * w[0] + r[1][1] * w[1] + r[1][2] * w[2];
        x * x + y * y
    });
    (lhs, T::lit(4.0) * found.value)
}
