//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation annihilates one off-diagonal pair `(p, q)` with the unitary
//! `V = Φ P Φ†`, where `Φ = diag(1, e^{-iφ})` strips the phase of `H_pq` and `P`
//! is the classical real Jacobi rotation. Sweeps stop once the off-diagonal
//! Frobenius mass falls below `jacobi_relative * ||H||_F`.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::{ComplexMatrix, HermitianMatrix};
use super::tridiagonal::hermitian_eigenvalues;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Eigenvalues sorted ascending and the unitary matrix of matching eigenvector columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> EigenSystem<T> {
    /// `V diag(f(λ)) V†`.
    pub fn reassemble(&self, f: impl Fn(T) -> T) -> HermitianMatrix<T> {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w.is_zero() {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + vik * self.vectors[(j, k)].conj();
                }
            }
        }
        HermitianMatrix::symmetrized(out)
    }
}

/// Outcome of running Jacobi sweeps on a working buffer.
#[derive(Debug, Clone, Copy)]
pub(crate) struct JacobiStats {
    pub sweeps: usize,
    pub converged: bool,
    pub residual: f64,
}

/// Runs cyclic Jacobi on the row-major Hermitian `n x n` buffer `a` in place.
///
/// On return the diagonal holds the eigenvalues. When `vecs` is given it must
/// hold an `n x n` unitary (normally the identity) that is right-multiplied by
/// every rotation.
pub(crate) fn jacobi_in_place<T: Real>(
    a: &mut [Complex<T>],
    n: usize,
    mut vecs: Option<&mut [Complex<T>]>,
    rel_tol: T,
    max_sweeps: usize,
) -> JacobiStats {
    debug_assert_eq!(a.len(), n * n);
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    let target = rel_tol * norm;
    let off_mass = |a: &[Complex<T>]| -> T {
        let mut s = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                s = s + a[i * n + j].norm_sqr();
            }
        }
        (s + s).sqrt()
    };
    let mut off = off_mass(a);
    if norm.is_zero() || off <= target {
        return JacobiStats { sweeps: 0, converged: true, residual: off.as_f64() };
    }
    let skip = target * T::lit(1e-3) / T::from_usize(n).unwrap();
    let half = T::lit(0.5);
    let one = T::one();
    for sweep in 1..=max_sweeps {
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[p * n + q];
                let babs = b.norm();
                if babs <= skip {
                    continue;
                }
                let e = b / babs;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let theta = (aqq - app) * half / babs;
                let t = if theta.abs() > T::lit(1e150) {
                    half / theta
                } else {
                    let t = one / (theta.abs() + (theta * theta + one).sqrt());
                    if theta < T::zero() {
                        -t
                    } else {
                        t
                    }
                };
                let c = one / (t * t + one).sqrt();
                let s = t * c;
                let se = e * s; // s·e
                let sec = se.conj(); // s·e*
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let nrp = arp * c - arq * sec;
                    let nrq = arp * se + arq * c;
                    a[r * n + p] = nrp;
                    a[p * n + r] = nrp.conj();
                    a[r * n + q] = nrq;
                    a[q * n + r] = nrq.conj();
                }
                a[p * n + p] = Complex::new(app - t * babs, T::zero());
                a[q * n + q] = Complex::new(aqq + t * babs, T::zero());
                a[p * n + q] = Complex::zero();
                a[q * n + p] = Complex::zero();
                if let Some(v) = vecs.as_deref_mut() {
                    for r in 0..n {
                        let vrp = v[r * n + p];
                        let vrq = v[r * n + q];
                        v[r * n + p] = vrp * c - vrq * sec;
                        v[r * n + q] = vrp * se + vrq * c;
                    }
                }
            }
        }
        off = off_mass(a);
        if off <= target {
            return JacobiStats { sweeps: sweep, converged: true, residual: off.as_f64() };
        }
    }
    JacobiStats { sweeps: max_sweeps, converged: false, residual: off.as_f64() }
}

/// Full eigendecomposition of a Hermitian matrix, values ascending.
pub fn eigh<T: Real>(h: &HermitianMatrix<T>) -> Result<EigenSystem<T>> {
    let tol = T::tolerances();
    let n = h.dim();
    let mut a = h.as_matrix().as_slice().to_vec();
    let mut v = ComplexMatrix::<T>::identity(n).into_vec();
    let stats = jacobi_in_place(&mut a, n, Some(&mut v), T::lit(tol.jacobi_relative), tol.jacobi_max_sweeps);
    if !stats.converged {
        return Err(Error::NotConverged { sweeps: stats.sweeps, residual: stats.residual });
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a[i * n + i].re).collect();
    // stable sort keeps equal eigenvalues in Jacobi order, so output is deterministic
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, k| v[r * n + order[k]]);
    Ok(EigenSystem { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigvalsh<T: Real>(h: &HermitianMatrix<T>) -> Result<Vec<T>> {
    let mut ws = EigenWorkspace::new(h.dim());
    let mut values = ws.eigenvalues(h.as_matrix().as_slice())?.to_vec();
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(values)
}

/// Validating entry point for an arbitrary complex matrix.
pub fn eigh_checked<T: Real>(m: &ComplexMatrix<T>) -> Result<EigenSystem<T>> {
    eigh(&HermitianMatrix::new(m.clone())?)
}

/// Reusable scratch space for repeated eigenvalue-only solves of one size.
#[derive(Debug, Clone)]
pub struct EigenWorkspace<T> {
    n: usize,
    buf: Vec<Complex<T>>,
    values: Vec<T>,
    off: Vec<T>,
    hv: Vec<Complex<T>>,
    hp: Vec<Complex<T>>,
    spare: Vec<Complex<T>>,
}

impl<T: Real> EigenWorkspace<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            buf: vec![Complex::zero(); n * n],
            values: vec![T::zero(); n],
            off: vec![T::zero(); n],
            hv: vec![Complex::zero(); n],
            hp: vec![Complex::zero(); n],
            spare: vec![Complex::zero(); n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Unsorted eigenvalues of the Hermitian row-major buffer `h`.
    pub fn eigenvalues(&mut self, h: &[Complex<T>]) -> Result<&[T]> {
        self.buf.copy_from_slice(h);
        self.solve_loaded()
    }

    /// Mutable access to the working buffer, for callers that assemble the matrix in place.
    pub fn buffer_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.buf
    }

    /// Eigenvalues of whatever is currently in the working buffer (which is overwritten).
    ///
    /// Uses a closed form for 2x2, Householder tridiagonalization with implicit QL for larger
    /// sizes, and falls back to Jacobi if QL fails to converge.
    pub fn solve_loaded(&mut self) -> Result<&[T]> {
        let n = self.n;
        if n == 1 {
            self.values[0] = self.buf[0].re;
            return Ok(&self.values);
        }
        if n == 2 {
            closed_form_2x2(&mut self.buf);
            self.values[0] = self.buf[0].re;
            self.values[1] = self.buf[3].re;
            return Ok(&self.values);
        }
        self.spare.copy_from_slice(&self.buf);
        if hermitian_eigenvalues(&mut self.buf, n, &mut self.values, &mut self.off, &mut self.hv, &mut self.hp) {
            return Ok(&self.values);
        }
        self.buf.copy_from_slice(&self.spare);
        let tol = T::tolerances();
        let stats = jacobi_in_place(&mut self.buf, n, None, T::lit(tol.jacobi_relative), tol.jacobi_max_sweeps);
        for i in 0..n {
            self.values[i] = self.buf[i * n + i].re;
        }
        if !stats.converged {
            return Err(Error::NotConverged { sweeps: stats.sweeps, residual: stats.residual });
        }
        Ok(&self.values)
    }

    /// `Σ |λ_i|` of the matrix in the working buffer.
    pub fn trace_norm_loaded(&mut self) -> T {
        match self.solve_loaded() {
            Ok(v) => v.iter().map(|x| x.abs()).sum(),
            // Jacobi ran out of sweeps; its diagonal is still the best available estimate.
            Err(_) => self.values.iter().map(|x| x.abs()).sum(),
        }
    }
}

/// Writes the two eigenvalues of a 2x2 Hermitian buffer onto its diagonal.
fn closed_form_2x2<T: Real>(a: &mut [Complex<T>]) {
    let half = T::lit(0.5);
    let p = a[0].re;
    let q = a[3].re;
    let mean = (p + q) * half;
    let gap = ((p - q) * half).hypot(a[1].norm());
    a[0] = Complex::new(mean - gap, T::zero());
    a[3] = Complex::new(mean + gap, T::zero());
    a[1] = Complex::zero();
    a[2] = Complex::zero();
}
