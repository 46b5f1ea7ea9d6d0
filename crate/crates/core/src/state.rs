//! Qubit-qudit density matrices and their Pauli (β) decomposition
//! `ρ = ½ (I₂⊗β₀ + σ₁⊗β₁ + σ₂⊗β₂ + σ₃⊗β₃)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    eigvalsh, hermiticity_defect, kron, partial_trace_first, pauli, ComplexMatrix, HermitianMatrix,
};
use crate::scalar::Real;

/// A validated `2d x 2d` density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitQuditState<T> {
    d: usize,
    rho: HermitianMatrix<T>,
}

/// Raw validation measurements of a candidate density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
    pub purity: f64,
}

impl StateDiagnostics {
    /// Measures `m` without rejecting it. The eigenvalue and purity fields refer to the
    /// Hermitian part of `m`.
    pub fn measure<T: Real>(m: &ComplexMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension(format!("density matrix must be square, got {}x{}", m.rows(), m.cols())));
        }
        let (_, _, hermiticity_defect) = hermiticity_defect(m);
        let h = HermitianMatrix::symmetrized(m.clone());
        let values = eigvalsh(&h)?;
        Ok(Self {
            hermiticity_defect,
            trace_defect: (h.trace() - T::one()).as_f64(),
            min_eigenvalue: values[0].as_f64(),
            purity: h.trace_product(&h).as_f64(),
        })
    }
}

impl<T: Real> QubitQuditState<T> {
    /// Validates `rho` as a qubit-qudit density matrix with qudit dimension `d`.
    pub fn new(rho: ComplexMatrix<T>, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Dimension(format!("qudit dimension must be at least 2, got {d}")));
        }
        if !rho.is_square() || rho.rows() != 2 * d {
            return Err(Error::Dimension(format!(
                "expected a {0}x{0} density matrix for d = {d}, got {1}x{2}",
                2 * d,
                rho.rows(),
                rho.cols()
            )));
        }
        Self::from_hermitian(HermitianMatrix::new(rho)?, d)
    }

    pub fn from_hermitian(rho: HermitianMatrix<T>, d: usize) -> Result<Self> {
        if d < 2 || rho.dim() != 2 * d {
            return Err(Error::Dimension(format!("expected dimension {} for d = {d}, got {}", 2 * d, rho.dim())));
        }
        let tol = T::tolerances();
        let trace = rho.trace();
        if (trace - T::one()).abs().as_f64() > tol.trace {
            return Err(Error::Trace { trace: trace.as_f64() });
        }
        let min_eigenvalue = eigvalsh(&rho)?[0];
        if min_eigenvalue.as_f64() < -tol.psd {
            return Err(Error::NotPositive { min_eigenvalue: min_eigenvalue.as_f64() });
        }
        Ok(Self { d, rho })
    }

    /// Builds `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩` for a `2d`-component vector.
    pub fn pure(psi: &[Complex<T>], d: usize) -> Result<Self> {
        if psi.len() != 2 * d {
            return Err(Error::Dimension(format!("state vector of length {} for d = {d}", psi.len())));
        }
        let norm: T = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm > T::zero()) {
            return Err(Error::Domain("zero state vector".into()));
        }
        let m = ComplexMatrix::from_fn(2 * d, 2 * d, |i, j| psi[i] * psi[j].conj() / norm);
        Self::from_hermitian(HermitianMatrix::symmetrized(m), d)
    }

    /// `I / (2d)`.
    pub fn maximally_mixed(d: usize) -> Self {
        let n = 2 * d;
        Self { d, rho: HermitianMatrix::identity(n).scale(T::one() / T::from_usize(n).unwrap()) }
    }

    /// `(|00⟩ + |11⟩)/√2` for `d = 2`.
    pub fn bell() -> Self {
        let h = T::FRAC_1_SQRT_2();
        let z = T::zero();
        let psi = [Complex::new(h, z), Complex::new(z, z), Complex::new(z, z), Complex::new(h, z)];
        Self::pure(&psi, 2).expect("Bell state is valid")
    }

    /// `¼ (I⊗I − η Σ σ_i⊗σ_i)`, valid for `-1/3 ≤ η ≤ 1`.
    pub fn werner(eta: T) -> Result<Self> {
        let s = pauli::<T>();
        let mut m = ComplexMatrix::<T>::identity(4);
        for si in &s {
            m = &m - &kron(si.as_matrix(), si.as_matrix()).scale(eta);
        }
        Self::new(m.scale(T::lit(0.25)), 2)
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn rho(&self) -> &HermitianMatrix<T> {
        &self.rho
    }

    pub fn diagnostics(&self) -> StateDiagnostics {
        StateDiagnostics::measure(self.rho.as_matrix()).expect("valid state")
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> T {
        self.rho.trace_product(&self.rho)
    }

    /// Bob's reduced state `Tr_A ρ`.
    pub fn reduced_qudit(&self) -> HermitianMatrix<T> {
        HermitianMatrix::symmetrized(partial_trace_first(self.rho.as_matrix(), self.d).expect("shape checked"))
    }

    /// `β₀ = Tr_A ρ` and `β_i = Tr_A(ρ (σ_i ⊗ I_d))`.
    pub fn decompose(&self) -> BetaDecomposition<T> {
        let d = self.d;
        let r = self.rho.as_matrix();
        let s = pauli::<T>();
        let beta = |k: usize| -> HermitianMatrix<T> {
            if k == 0 {
                return self.reduced_qudit();
            }
            // (ρ(σ⊗I))_{jk} summed over the qubit index: Σ_{a,a'} ρ[(a,j),(a',k)] σ[a',a]
            let sig = s[k - 1].as_matrix();
            let m = ComplexMatrix::from_fn(d, d, |j, l| {
                let mut acc = Complex::new(T::zero(), T::zero());
                for a in 0..2 {
                    for ap in 0..2 {
                        let sv = sig[(ap, a)];
                        if sv.re != T::zero() || sv.im != T::zero() {
                            acc = acc + r[(a * d + j, ap * d + l)] * sv;
                        }
                    }
                }
                acc
            });
            HermitianMatrix::symmetrized(m)
        };
        BetaDecomposition { d, betas: [beta(0), beta(1), beta(2), beta(3)] }
    }

    /// Necessary condition for a CHSH violation: `Tr ρ² > ½ (Tr β₀² + 1/d)`.
    pub fn purity_violation_bound(&self) -> PurityBound<T> {
        let b0 = self.reduced_qudit();
        let threshold = T::lit(0.5) * (b0.trace_product(&b0) + T::one() / T::from_usize(self.d).unwrap());
        let purity = self.purity();
        PurityBound { threshold, purity, satisfied: purity > threshold }
    }
}

/// Result of the purity test: when `satisfied` is false the state cannot violate CHSH.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurityBound<T> {
    pub threshold: T,
    pub purity: T,
    pub satisfied: bool,
}

/// The four `d x d` Hermitian matrices `(β₀, β₁, β₂, β₃)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaDecomposition<T> {
    d: usize,
    betas: [HermitianMatrix<T>; 4],
}

impl<T: Real> BetaDecomposition<T> {
    /// Checks shapes and `Tr β₀ = 1`; positivity of the reconstructed state is checked by
    /// [`reconstruct`](Self::reconstruct).
    pub fn new(betas: [HermitianMatrix<T>; 4]) -> Result<Self> {
        let d = betas[0].dim();
        if d < 2 {
            return Err(Error::Dimension(format!("qudit dimension must be at least 2, got {d}")));
        }
        if let Some(k) = betas.iter().position(|b| b.dim() != d) {
            return Err(Error::Dimension(format!("beta_{k} has dimension {} but beta_0 has {d}", betas[k].dim())));
        }
        let trace = betas[0].trace();
        if (trace - T::one()).abs().as_f64() > T::tolerances().trace {
            return Err(Error::Trace { trace: trace.as_f64() });
        }
        Ok(Self { d, betas })
    }

    #[inline]
    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn beta0(&self) -> &HermitianMatrix<T> {
        &self.betas[0]
    }

    /// `β_i` for `i ∈ {1, 2, 3}`.
    #[inline]
    pub fn beta(&self, i: usize) -> &HermitianMatrix<T> {
        assert!((1..=3).contains(&i), "beta index must be 1, 2 or 3");
        &self.betas[i]
    }

    /// The correlation triple `(β₁, β₂, β₃)`.
    pub fn vector(&self) -> [&HermitianMatrix<T>; 3] {
        [&self.betas[1], &self.betas[2], &self.betas[3]]
    }

    pub fn all(&self) -> &[HermitianMatrix<T>; 4] {
        &self.betas
    }

    /// `ρ = ½ (I₂⊗β₀ + Σ σ_i⊗β_i)`, validated.
    pub fn reconstruct(&self) -> Result<QubitQuditState<T>> {
        let s = pauli::<T>();
        let mut m = kron(HermitianMatrix::<T>::identity(2).as_matrix(), self.betas[0].as_matrix());
        for (si, bi) in s.iter().zip(&self.betas[1..]) {
            m = &m + &kron(si.as_matrix(), bi.as_matrix());
        }
        QubitQuditState::from_hermitian(HermitianMatrix::symmetrized(m.scale(T::lit(0.5))), self.d)
    }

    /// Replaces `β⃗` by `S β⃗` for a real 3x3 matrix `S`; `β₀` is untouched.
    pub fn rotated(&self, s: &[[T; 3]; 3]) -> Self {
        let v = self.vector();
        let row = |r: &[T; 3]| HermitianMatrix::linear_combination(&[(r[0], v[0]), (r[1], v[1]), (r[2], v[2])]);
        Self { d: self.d, betas: [self.betas[0].clone(), row(&s[0]), row(&s[1]), row(&s[2])] }
    }

    /// Pads every β with zeros to `d2 x d2` (upper-left block embedding).
    pub fn embed(&self, d2: usize) -> Result<Self> {
        if d2 <= self.d {
            return Err(Error::Domain(format!("embedding dimension {d2} must exceed {}", self.d)));
        }
        Ok(Self { d: d2, betas: self.betas.clone().map(|b| b.pad_to(d2)) })
    }
}
