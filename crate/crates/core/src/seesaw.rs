//! See-saw search for the CHSH maximum: alternately fix Alice's or Bob's pair of observables
//! and solve for the other pair exactly. It only ever finds lower bounds, which makes it a
//! useful independent check on [`max_chsh`](crate::chsh::max_chsh).

use rayon::prelude::*;

use crate::chsh::{align_qubit_observables, ChshObservables, Observable2, ObservableD};
use crate::ensembles::RngStream;
use crate::error::Result;
use crate::linalg::{kron, partial_trace_first, trace_norm, ComplexMatrix, HermitianMatrix};
use crate::rotation::Mat3;
use crate::scalar::Real;
use crate::state::{BetaDecomposition, QubitQuditState};

pub const DEFAULT_STARTS: usize = 16;
pub const MAX_ROUNDS: usize = 200;
pub const IMPROVEMENT_TOLERANCE: f64 = 1e-10;

/// Best value over all starts and the observables attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct SeesawReport<T> {
    pub value: T,
    /// Rounds used by the winning start.
    pub iterations: usize,
    pub starts: usize,
    /// Whether the winning start stopped on the improvement criterion.
    pub converged: bool,
    pub best_observables: ChshObservables<T>,
}

/// One start of the see-saw: the value after each full round.
#[derive(Debug, Clone, PartialEq)]
pub struct SeesawTrace<T> {
    pub values: Vec<T>,
    pub converged: bool,
    pub observables: ChshObservables<T>,
}

/// Bob's optimal pair for fixed `A, A′`: `B = sign(M_B)`, `B′ = sign(M_B′)` with
/// `M_B = Tr_A[ρ((A+A′)⊗I)]`, `M_B′ = Tr_A[ρ((A−A′)⊗I)]`. The value is `‖M_B‖₁ + ‖M_B′‖₁`.
pub fn optimal_bs_given_as<T: Real>(
    state: &QubitQuditState<T>,
    a: &Observable2<T>,
    a_prime: &Observable2<T>,
) -> Result<(ObservableD<T>, ObservableD<T>, T)> {
    let d = state.d();
    let id = ComplexMatrix::identity(d);
    let conditional = |x: &ComplexMatrix<T>| -> Result<HermitianMatrix<T>> {
        let prod = state.rho().as_matrix().matmul(&kron(x, &id));
        Ok(HermitianMatrix::symmetrized(partial_trace_first(&prod, d)?))
    };
    let m_b = conditional(&(a.matrix().as_matrix() + a_prime.matrix().as_matrix()))?;
    let m_bp = conditional(&(a.matrix().as_matrix() - a_prime.matrix().as_matrix()))?;
    let value = trace_norm(&m_b) + trace_norm(&m_bp);
    Ok((ObservableD::aligned_with(&m_b)?, ObservableD::aligned_with(&m_bp)?, value))
}

/// Alice's optimal pair for fixed `B, B′`: `A ∥ r_B + r_B′`, `A′ ∥ r_B − r_B′` with
/// `r_B = (Tr β₁B, Tr β₂B, Tr β₃B)`. The value is `‖r_B + r_B′‖ + ‖r_B − r_B′‖`.
/// If both directions vanish the value is 0 and `A = σ₃`, `A′ = σ₁`.
pub fn optimal_as_given_bs<T: Real>(
    betas: &BetaDecomposition<T>,
    b: &ObservableD<T>,
    b_prime: &ObservableD<T>,
) -> Result<(Observable2<T>, Observable2<T>, T)> {
    let bv = betas.vector();
    let r_b = bv.map(|m| m.trace_product(b.matrix()));
    let r_bp = bv.map(|m| m.trace_product(b_prime.matrix()));
    let norm = |v: [T; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let value = norm([0, 1, 2].map(|k| r_b[k] + r_bp[k])) + norm([0, 1, 2].map(|k| r_b[k] - r_bp[k]));
    let identity: Mat3<T> = [0, 1, 2].map(|i| [0, 1, 2].map(|j| if i == j { T::one() } else { T::zero() }));
    let (a, a_prime) = align_qubit_observables(r_b, r_bp, &identity)?;
    Ok((a, a_prime, value))
}

/// Runs the alternation from the given Alice pair until a round improves by less than
/// `1e-10` or [`MAX_ROUNDS`] is reached.
pub fn seesaw_from<T: Real>(
    state: &QubitQuditState<T>,
    betas: &BetaDecomposition<T>,
    a: Observable2<T>,
    a_prime: Observable2<T>,
) -> Result<SeesawTrace<T>> {
    let tol = T::lit(IMPROVEMENT_TOLERANCE);
    let (mut a, mut a_prime) = (a, a_prime);
    let mut values: Vec<T> = Vec::new();
    let mut converged = false;
    let mut bs = None;
    for _ in 0..MAX_ROUNDS {
        let (b, b_prime, _) = optimal_bs_given_as(state, &a, &a_prime)?;
        let (na, nap, value) = optimal_as_given_bs(betas, &b, &b_prime)?;
        a = na;
        a_prime = nap;
        bs = Some((b, b_prime));
        let improved = values.last().map_or(true, |&prev| value - prev >= tol);
        values.push(value);
        if !improved {
            converged = true;
            break;
        }
    }
    let (b, b_prime) = bs.expect("at least one round");
    Ok(SeesawTrace { values, converged, observables: ChshObservables { a, a_prime, b, b_prime } })
}

/// Best see-saw value over `n_starts` random starts. Start `s` draws the axes of `A` and `A′`
/// uniformly from the sphere using stream `(seed + s, 0)`; ties go to the lowest start.
pub fn seesaw_max<T: Real>(state: &QubitQuditState<T>, n_starts: usize, seed: u64) -> Result<SeesawReport<T>> {
    let betas = state.decompose();
    let n_starts = n_starts.max(1);
    let traces: Vec<SeesawTrace<T>> = (0..n_starts as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = RngStream::new(seed.wrapping_add(s), 0);
            let a = Observable2::along(rng.unit_vector().map(T::lit))?;
            let a_prime = Observable2::along(rng.unit_vector().map(T::lit))?;
            seesaw_from(state, &betas, a, a_prime)
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (s, t) in traces.iter().enumerate() {
        if t.values.last() > traces[best].values.last() {
            best = s;
        }
    }
    let winner = &traces[best];
    Ok(SeesawReport {
        value: *winner.values.last().expect("nonempty trace"),
        iterations: winner.values.len(),
        starts: n_starts,
        converged: winner.converged,
        best_observables: winner.observables.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chsh::bell_value;
    use crate::linalg::pauli;

    #[test]
    fn bob_step_on_bell_state() {
        let bell = QubitQuditState::<f64>::bell();
        let (b, bp, v) = optimal_bs_given_as(&bell, &Observable2::sigma(3), &Observable2::sigma(1)).unwrap();
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        let obs = ChshObservables { a: Observable2::sigma(3), a_prime: Observable2::sigma(1), b, b_prime: bp };
        assert!((bell_value(&bell, &obs).unwrap() - v).abs() < 1e-12);
    }

    #[test]
    fn bob_step_on_maximally_mixed_is_zero() {
        let mm = QubitQuditState::<f64>::maximally_mixed(3);
        let a = Observable2::along([0.2, -0.4, 0.9]).unwrap();
        let (_, _, v) = optimal_bs_given_as(&mm, &a, &Observable2::sigma(2)).unwrap();
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn alice_step_examples() {
        let betas = QubitQuditState::<f64>::bell().decompose();
        let s = pauli::<f64>();
        let z = ObservableD::new(s[2].clone()).unwrap();
        let (_, _, v) = optimal_as_given_bs(&betas, &z, &z).unwrap();
        assert!((v - 2.0).abs() < 1e-12);

        let h = 0.5f64.sqrt();
        let b = ObservableD::new(HermitianMatrix::linear_combination(&[(h, &s[2]), (h, &s[0])])).unwrap();
        let bp = ObservableD::new(HermitianMatrix::linear_combination(&[(h, &s[2]), (-h, &s[0])])).unwrap();
        let (_, _, v) = optimal_as_given_bs(&betas, &b, &bp).unwrap();
        assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-12);

        let mm = QubitQuditState::<f64>::maximally_mixed(2).decompose();
        let (a, ap, v) = optimal_as_given_bs(&mm, &z, &z).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!((a.axis(), ap.axis()), ([0.0, 0.0, 2.0], [2.0, 0.0, 0.0]));
    }

    #[test]
    fn reaches_known_maxima() {
        let r = seesaw_max(&QubitQuditState::<f64>::bell(), 8, 3).unwrap();
        assert!((r.value - 2.0 * 2f64.sqrt()).abs() < 1e-8);
        let w = seesaw_max(&QubitQuditState::<f64>::werner(0.9).unwrap(), 8, 3).unwrap();
        assert!((w.value - 2.0 * 2f64.sqrt() * 0.9).abs() < 1e-7);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let s = crate::ensembles::bures_qubit_qudit::<f64>(3, 5, 0).unwrap();
        assert_eq!(seesaw_max(&s, 4, 11).unwrap(), seesaw_max(&s, 4, 11).unwrap());
    }
}
