//! Cross-validation batteries: each compares the optimizer against an independent route
//! to the same number over seeded random inputs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::case_study::embed;
use crate::chsh::{horodecki_qubit_qubit, lemma_rotation_identity, max_chsh};
use crate::ensembles::{bures_qubit_qudit, RngStream};
use crate::error::Result;
use crate::optimize::OptimizerConfig;
use crate::scalar::Real;
use crate::seesaw::{seesaw_max, DEFAULT_STARTS};

pub const HORODECKI_TOLERANCE: f64 = 1e-6;
pub const SEESAW_TOLERANCE: f64 = 1e-4;
pub const SANDWICH_TOLERANCE: f64 = 1e-8;
pub const EMBEDDING_TOLERANCE: f64 = 1e-6;
pub const LEMMA_TOLERANCE: f64 = 1e-6;

/// Outcome of one battery. `worst` is the largest discrepancy seen (for the sandwich, the
/// largest amount by which a bound was crossed, 0 if none).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub name: String,
    pub checks: usize,
    pub failures: usize,
    pub worst: f64,
    pub tolerance: f64,
}

impl BatteryReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn collect(name: &str, tolerance: f64, discrepancies: Result<Vec<f64>>) -> Result<Self> {
        let discrepancies = discrepancies?;
        Ok(Self {
            name: name.into(),
            checks: discrepancies.len(),
            failures: discrepancies.iter().filter(|&&x| !(x < tolerance)).count(),
            worst: discrepancies.iter().copied().fold(0.0, f64::max),
            tolerance,
        })
    }
}

/// `d = 2`: optimizer against the closed form `2 sqrt(κ₁ + κ₂)`.
///
/// The closed form only ranges over traceless qubit observables on Bob's side, so it can fall
/// short of 𝓑 when `B = ±I` is optimal, which only happens without a violation. The check is
/// therefore equality whenever either value exceeds 2, and `closed form ≤ 𝓑` otherwise.
pub fn horodecki_battery(trials: usize, seed: u64, config: &OptimizerConfig) -> Result<BatteryReport> {
    let margin = 2.0 + <f64 as Real>::tolerances().violation_margin;
    let diffs = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let betas = bures_qubit_qudit::<f64>(2, seed, i)?.decompose();
            let value = max_chsh(&betas, config)?.value;
            let closed = horodecki_qubit_qubit(&betas)?;
            Ok(if value > margin || closed > margin { (value - closed).abs() } else { (closed - value).max(0.0) })
        })
        .collect();
    BatteryReport::collect("horodecki", HORODECKI_TOLERANCE, diffs)
}

/// Optimizer against a 16-start see-saw for each `d` in `dims`.
pub fn seesaw_battery(trials: usize, seed: u64, dims: &[usize], config: &OptimizerConfig) -> Result<BatteryReport> {
    let jobs: Vec<(usize, u64)> = dims.iter().flat_map(|&d| (0..trials as u64).map(move |i| (d, i))).collect();
    let diffs = jobs
        .into_par_iter()
        .map(|(d, i)| {
            let state = bures_qubit_qudit::<f64>(d, seed, i)?;
            let exact = max_chsh(&state.decompose(), config)?.value;
            let start_seed = seed.wrapping_add(i.wrapping_mul(DEFAULT_STARTS as u64));
            Ok((seesaw_max(&state, DEFAULT_STARTS, start_seed)?.value - exact).abs())
        })
        .collect();
    BatteryReport::collect("seesaw", SEESAW_TOLERANCE, diffs)
}

/// `lower − 1e-8 ≤ 𝓑 ≤ upper + 1e-8` for each `d` in `dims`.
pub fn sandwich_battery(trials: usize, seed: u64, dims: &[usize], config: &OptimizerConfig) -> Result<BatteryReport> {
    let jobs: Vec<(usize, u64)> = dims.iter().flat_map(|&d| (0..trials as u64).map(move |i| (d, i))).collect();
    let excess = jobs
        .into_par_iter()
        .map(|(d, i)| {
            let res = max_chsh(&bures_qubit_qudit::<f64>(d, seed, i)?.decompose(), config)?;
            Ok((res.lower - res.value).max(res.value - res.upper).max(0.0))
        })
        .collect();
    BatteryReport::collect("sandwich", SANDWICH_TOLERANCE, excess)
}

/// Random `d = 2` states zero-padded to each dimension in `targets`.
pub fn embedding_battery(trials: usize, seed: u64, targets: &[usize], config: &OptimizerConfig) -> Result<BatteryReport> {
    let diffs: Result<Vec<Vec<f64>>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let betas = bures_qubit_qudit::<f64>(2, seed, i)?.decompose();
            let base = max_chsh(&betas, config)?.value;
            targets
                .iter()
                .map(|&d2| {
                    let embedded = embed(&betas, d2)?;
                    embedded.reconstruct()?;
                    Ok((max_chsh(&embedded, config)?.value - base).abs())
                })
                .collect()
        })
        .collect();
    BatteryReport::collect("embedding", EMBEDDING_TOLERANCE, diffs.map(|v| v.concat()))
}

/// `(‖v+w‖ + ‖v−w‖)² = 4 max_R [(Rv)₁² + (Rw)₂²]` for standard normal `v, w`.
pub fn lemma_battery(trials: usize, seed: u64, config: &OptimizerConfig) -> Result<BatteryReport> {
    let diffs = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(seed, i);
            let v = [rng.normal(), rng.normal(), rng.normal()];
            let w = [rng.normal(), rng.normal(), rng.normal()];
            let (lhs, rhs) = lemma_rotation_identity(v, w, config);
            Ok((lhs - rhs).abs())
        })
        .collect();
    BatteryReport::collect("lemma", LEMMA_TOLERANCE, diffs)
}

/// All batteries with `trials` random inputs each (per dimension where several are used).
pub fn run_all(trials: usize, seed: u64, config: &OptimizerConfig) -> Result<Vec<BatteryReport>> {
    Ok(vec![
        horodecki_battery(trials, seed, config)?,
        seesaw_battery(trials, seed, &[3, 4], config)?,
        sandwich_battery(trials, seed, &[2, 3, 4, 5, 6], config)?,
        embedding_battery(trials, seed, &[3, 4], config)?,
        lemma_battery(trials, seed, config)?,
    ])
}
