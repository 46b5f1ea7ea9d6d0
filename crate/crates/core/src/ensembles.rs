//! Random matrix ensembles and CHSH statistics over random Bures states.

use num_complex::Complex;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chsh::max_chsh;
use crate::error::Result;
use crate::linalg::{ComplexMatrix, HermitianMatrix};
use crate::optimize::OptimizerConfig;
use crate::scalar::Real;
use crate::state::QubitQuditState;

/// Seeded counter-based random stream.
///
/// `(seed, counter)` selects a ChaCha20 key and stream id, so the output is identical on every
/// platform and independent of how many other streams are in use.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    counter: u64,
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl RngStream {
    pub fn new(seed: u64, counter: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(counter);
        Self { seed, counter, rng, spare: None }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform(); // (0, 1]
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    /// Uniformly distributed unit vector in R³.
    pub fn unit_vector(&mut self) -> [f64; 3] {
        loop {
            let v = [self.normal(), self.normal(), self.normal()];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 1e-300 {
                return v.map(|x| x / n);
            }
        }
    }
}

/// `D x D` complex Ginibre matrix, real and imaginary parts i.i.d. `N(0, 1)`.
pub fn ginibre<T: Real>(dim: usize, rng: &mut RngStream) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(dim, dim, |_, _| {
        let re = rng.normal();
        let im = rng.normal();
        Complex::new(T::lit(re), T::lit(im))
    })
}

/// Haar-distributed unitary: QR of a Ginibre matrix with column phases fixed so that `R`
/// has a positive diagonal.
pub fn haar_unitary<T: Real>(dim: usize, rng: &mut RngStream) -> ComplexMatrix<T> {
    let g = ginibre::<T>(dim, rng);
    let (mut q, r_diag) = gram_schmidt_qr(&g);
    for (j, r) in r_diag.iter().enumerate() {
        let n = r.norm();
        if n > T::zero() {
            let phase = r / n;
            for i in 0..dim {
                q[(i, j)] = q[(i, j)] * phase;
            }
        }
    }
    q
}

/// Modified Gram-Schmidt with one reorthogonalization pass. Returns `Q` and the diagonal of `R`.
fn gram_schmidt_qr<T: Real>(a: &ComplexMatrix<T>) -> (ComplexMatrix<T>, Vec<Complex<T>>) {
    let n = a.rows();
    let mut cols: Vec<Vec<Complex<T>>> = (0..a.cols()).map(|j| a.column(j)).collect();
    let mut diag = Vec::with_capacity(cols.len());
    for j in 0..cols.len() {
        let mut v = std::mem::take(&mut cols[j]);
        for _pass in 0..2 {
            for prev in cols.iter().take(j) {
                let proj = prev.iter().zip(&v).fold(Complex::new(T::zero(), T::zero()), |acc, (p, x)| acc + p.conj() * x);
                for (x, p) in v.iter_mut().zip(prev) {
                    *x = *x - *p * proj;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        for x in v.iter_mut() {
            *x = *x / norm;
        }
        diag.push(Complex::new(norm, T::zero()));
        cols[j] = v;
    }
    (ComplexMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]), diag)
}

/// Random Bures density matrix `(I+U) G G† (I+U†) / Tr[...]`.
pub fn bures_state<T: Real>(dim: usize, rng: &mut RngStream) -> HermitianMatrix<T> {
    assert!(dim >= 2, "Bures states need dimension at least 2");
    loop {
        let g = ginibre::<T>(dim, rng);
        let u = haar_unitary::<T>(dim, rng);
        let m = (&ComplexMatrix::identity(dim) + &u).matmul(&g);
        let mm = m.matmul(&m.adjoint());
        let tr = mm.trace().re;
        if tr > T::zero() && tr.is_finite() {
            return HermitianMatrix::symmetrized(mm.scale(T::one() / tr));
        }
    }
}

/// Random Bures state on `C² ⊗ C^d` drawn from stream `(seed, index)`.
pub fn bures_qubit_qudit<T: Real>(d: usize, seed: u64, index: u64) -> Result<QubitQuditState<T>> {
    let mut rng = RngStream::new(seed, index);
    QubitQuditState::from_hermitian(bures_state(2 * d, &mut rng), d)
}

/// Per-sample measurements gathered by [`nonlocality_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSample {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub purity: f64,
    pub purity_threshold: f64,
}

/// Fixed-width histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn uniform(lo: f64, hi: f64, bins: usize) -> Self {
        let edges = (0..=bins).map(|k| lo + (hi - lo) * k as f64 / bins as f64).collect();
        Self { edges, counts: vec![0; bins] }
    }

    /// Values outside the range are clamped into the first or last bin.
    pub fn add(&mut self, x: f64) {
        let bins = self.counts.len();
        let (lo, hi) = (self.edges[0], self.edges[bins]);
        let k = (((x - lo) / (hi - lo)) * bins as f64).floor();
        let k = if k.is_nan() || k < 0.0 { 0 } else { (k as usize).min(bins - 1) };
        self.counts[k] += 1;
    }
}

/// Aggregate CHSH statistics of a random Bures scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanStatistics {
    pub d: usize,
    pub n_samples: usize,
    pub seed: u64,
    pub violations: usize,
    pub p_violation: f64,
    pub histogram: Histogram,
    pub mean: f64,
    pub stddev: f64,
    pub max_value: f64,
    /// Mean of `(𝓑 - lower)/𝓑` over samples with `𝓑 > 0`.
    pub lower_bound_rel_error_mean: f64,
    pub lower_bound_rel_error_max: f64,
    /// Violating samples whose purity does not exceed `½ (Tr β₀² + 1/d)`; must be zero.
    pub purity_bound_failures: usize,
    /// Samples for which the purity test already rules out a violation.
    pub purity_excluded: usize,
    /// Samples with `lower ≤ 𝓑 ≤ upper` violated beyond `1e-8`; must be zero.
    pub bound_sandwich_failures: usize,
}

pub const HISTOGRAM_BINS: usize = 60;

impl ScanStatistics {
    pub fn from_samples(d: usize, seed: u64, samples: &[ScanSample], violation_margin: f64) -> Self {
        let n = samples.len();
        let mut histogram = Histogram::uniform(0.0, 2.0 * std::f64::consts::SQRT_2, HISTOGRAM_BINS);
        let mut violations = 0;
        let mut sum = 0.0;
        let mut max_value = f64::NEG_INFINITY;
        let (mut rel_sum, mut rel_max, mut rel_n) = (0.0, 0.0f64, 0usize);
        let mut purity_bound_failures = 0;
        let mut purity_excluded = 0;
        let mut bound_sandwich_failures = 0;
        for s in samples {
            histogram.add(s.value);
            sum += s.value;
            max_value = max_value.max(s.value);
            let violates = s.value > 2.0 + violation_margin;
            if violates {
                violations += 1;
                if s.purity <= s.purity_threshold {
                    purity_bound_failures += 1;
                }
            }
            if s.purity <= s.purity_threshold {
                purity_excluded += 1;
            }
            if s.value < s.lower - 1e-8 || s.value > s.upper + 1e-8 {
                bound_sandwich_failures += 1;
            }
            if s.value > 0.0 {
                let rel = (s.value - s.lower) / s.value;
                rel_sum += rel;
                rel_max = rel_max.max(rel);
                rel_n += 1;
            }
        }
        let mean = if n > 0 { sum / n as f64 } else { 0.0 };
        let var = if n > 1 {
            samples.iter().map(|s| (s.value - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            d,
            n_samples: n,
            seed,
            violations,
            p_violation: if n > 0 { violations as f64 / n as f64 } else { 0.0 },
            histogram,
            mean,
            stddev: var.sqrt(),
            max_value,
            lower_bound_rel_error_mean: if rel_n > 0 { rel_sum / rel_n as f64 } else { 0.0 },
            lower_bound_rel_error_max: rel_max,
            purity_bound_failures,
            purity_excluded,
            bound_sandwich_failures,
        }
    }
}

/// Draws and analyzes sample `index` of a scan.
pub fn scan_sample<T: Real>(d: usize, seed: u64, index: u64, config: &OptimizerConfig) -> Result<ScanSample> {
    let state = bures_qubit_qudit::<T>(d, seed, index)?;
    let betas = state.decompose();
    let res = max_chsh(&betas, config)?;
    let pb = state.purity_violation_bound();
    Ok(ScanSample {
        value: res.value.as_f64(),
        lower: res.lower.as_f64(),
        upper: res.upper.as_f64(),
        purity: pb.purity.as_f64(),
        purity_threshold: pb.threshold.as_f64(),
    })
}

/// All per-sample records of a scan, in sample order.
pub fn scan_samples<T: Real>(d: usize, n_samples: usize, seed: u64, config: &OptimizerConfig) -> Result<Vec<ScanSample>> {
    (0..n_samples as u64).into_par_iter().map(|i| scan_sample::<T>(d, seed, i, config)).collect()
}

/// CHSH statistics over `n_samples` random Bures states on `C² ⊗ C^d`.
pub fn nonlocality_scan<T: Real>(
    d: usize,
    n_samples: usize,
    seed: u64,
    config: &OptimizerConfig,
) -> Result<ScanStatistics> {
    let samples = scan_samples::<T>(d, n_samples, seed, config)?;
    Ok(ScanStatistics::from_samples(d, seed, &samples, T::tolerances().violation_margin))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<f64> = (0..8).map({
            let mut r = RngStream::new(7, 3);
            move |_| r.uniform()
        })
        .collect();
        let mut r = RngStream::new(7, 3);
        let b: Vec<f64> = (0..8).map(|_| r.uniform()).collect();
        assert_eq!(a, b);
        let mut other = RngStream::new(7, 4);
        assert_ne!(other.uniform(), a[0]);
    }

    #[test]
    fn ginibre_moments() {
        let mut rng = RngStream::new(1, 0);
        let n = 100_000;
        let (mut mean, mut second) = (Complex::new(0.0, 0.0), 0.0);
        for _ in 0..n / 4 {
            let g = ginibre::<f64>(2, &mut rng);
            for z in g.as_slice() {
                mean += z;
                second += z.norm_sqr();
            }
        }
        mean /= n as f64;
        second /= n as f64;
        // each part has sd 1/sqrt(n) in the mean; E|z|² = 2 with sd 2/sqrt(n)
        assert!(mean.re.abs() < 5.0 / (n as f64).sqrt() && mean.im.abs() < 5.0 / (n as f64).sqrt());
        assert!((second - 2.0).abs() < 5.0 * 2.0 / (n as f64).sqrt());
    }

    #[test]
    fn haar_unitaries_are_unitary() {
        let mut rng = RngStream::new(2, 0);
        for _ in 0..100 {
            let u = haar_unitary::<f64>(4, &mut rng);
            assert!(u.adjoint().matmul(&u).distance(&ComplexMatrix::identity(4)) < 1e-12);
        }
    }

    #[test]
    fn bures_states_are_density_matrices() {
        let mut rng = RngStream::new(3, 0);
        for dim in [2, 4, 6] {
            for _ in 0..20 {
                let rho = bures_state::<f64>(dim, &mut rng);
                assert!((rho.trace() - 1.0).abs() < 1e-12);
                assert!(crate::linalg::eigvalsh(&rho).unwrap()[0] > -1e-12);
            }
        }
    }

    #[test]
    fn histogram_clamps() {
        let mut h = Histogram::uniform(0.0, 1.0, 4);
        for x in [-1.0, 0.0, 0.3, 1.0, 2.0] {
            h.add(x);
        }
        assert_eq!(h.counts, vec![2, 1, 0, 2]);
    }
}
