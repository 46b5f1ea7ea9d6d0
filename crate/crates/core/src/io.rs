//! JSON state files, analysis reports and CSV emission.

use std::fmt::Write as _;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::case_study::{log_negativity, GridRow};
use crate::chsh::{bell_value, bell_value_from_betas, max_chsh};
use crate::ensembles::ScanStatistics;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix};
use crate::optimize::OptimizerConfig;
use crate::seesaw::seesaw_max;
use crate::state::QubitQuditState;

/// Largest allowed gap between the reported value and the Bell expectation of the
/// returned observables.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-8;
/// Agreement required between the see-saw cross-check and the main optimizer.
pub const SEESAW_TOLERANCE: f64 = 1e-4;

/// On-disk state: `rho` is `2d x 2d`, row-major, entries `[re, im]`, index `a·d + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub d: usize,
    pub rho: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_state(state: &QubitQuditState<f64>) -> Self {
        Self { d: state.d(), rho: matrix_rows(state.rho().as_matrix()) }
    }
}

fn matrix_rows(m: &ComplexMatrix<f64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

/// Parses and validates a state file.
pub fn parse_state(text: &[u8]) -> Result<QubitQuditState<f64>> {
    let value: serde_json::Value = serde_json::from_slice(text).map_err(|e| Error::Parse {
        location: format!("line {} column {}", e.line(), e.column()),
        reason: e.to_string(),
    })?;
    let obj = value.as_object().ok_or_else(|| shape("$", "top level must be an object with fields `d` and `rho`"))?;
    let d = obj.get("d").ok_or_else(|| shape("$", "missing field `d`"))?;
    let d = d.as_u64().ok_or_else(|| shape("d", format!("expected a positive integer, got {d}")))? as usize;
    if d < 2 {
        return Err(shape("d", format!("qudit dimension must be at least 2, got {d}")));
    }
    let n = 2 * d;
    let rho = obj.get("rho").ok_or_else(|| shape("$", "missing field `rho`"))?;
    let rows = rho.as_array().ok_or_else(|| shape("rho", "expected an array of rows"))?;
    if rows.len() != n {
        return Err(shape("rho", format!("expected {n} rows for d = {d}, got {}", rows.len())));
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| shape(format!("rho[{i}]"), "expected an array"))?;
        if row.len() != n {
            return Err(shape(format!("rho[{i}]"), format!("expected {n} entries, got {}", row.len())));
        }
        for (j, entry) in row.iter().enumerate() {
            let pair = entry.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                shape(format!("rho[{i}][{j}]"), format!("expected a [re, im] pair, got {entry}"))
            })?;
            let part = |k: usize| {
                pair[k].as_f64().ok_or_else(|| shape(format!("rho[{i}][{j}][{k}]"), format!("not a number: {}", pair[k])))
            };
            data.push(Complex::new(part(0)?, part(1)?));
        }
    }
    QubitQuditState::new(ComplexMatrix::from_row_major(n, n, data)?, d)
}

fn shape(location: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Shape { location: location.into(), reason: reason.into() }
}

/// Serializes a state in the input format.
pub fn state_to_json(state: &QubitQuditState<f64>) -> String {
    serde_json::to_string(&StateFile::from_state(state)).expect("plain data serializes")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeesawCheck {
    pub value: f64,
    pub starts: usize,
    pub seed: u64,
    pub iterations: usize,
    pub converged: bool,
    pub difference: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub seconds: f64,
}

/// Everything known about one state. Floats are written in shortest round-trip form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub d: usize,
    pub value: f64,
    pub violates: bool,
    pub lower: f64,
    pub upper: f64,
    pub rotation: EulerAngles,
    pub a_axis: [f64; 3],
    pub a_prime_axis: [f64; 3],
    pub b: Vec<Vec<[f64; 2]>>,
    pub b_prime: Vec<Vec<[f64; 2]>>,
    /// `Tr(ρ 𝒪_Bell)` for the returned observables.
    pub certificate: f64,
    pub purity: f64,
    pub purity_threshold: f64,
    pub log_negativity: f64,
    pub evaluations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seesaw: Option<SeesawCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

/// Runs the full analysis of one state; `seesaw` is `(starts, seed)` for the optional
/// cross-check. Fails if the observables do not reproduce the value.
pub fn analyze(
    state: &QubitQuditState<f64>,
    config: &OptimizerConfig,
    seesaw: Option<(usize, u64)>,
) -> Result<AnalysisReport> {
    let betas = state.decompose();
    let res = max_chsh(&betas, config)?;
    let certificate = bell_value(state, &res.observables)?;
    let via_betas = bell_value_from_betas(&betas, &res.observables)?;
    for c in [certificate, via_betas] {
        if (c - res.value).abs() > CERTIFICATE_TOLERANCE {
            return Err(Error::Internal(format!(
                "observables give a Bell value of {c}, but the optimizer reported {}",
                res.value
            )));
        }
    }
    let pb = state.purity_violation_bound();
    let seesaw = match seesaw {
        Some((starts, seed)) => {
            let r = seesaw_max(state, starts, seed)?;
            let difference = (r.value - res.value).abs();
            Some(SeesawCheck {
                value: r.value,
                starts: r.starts,
                seed,
                iterations: r.iterations,
                converged: r.converged,
                difference,
                agrees: difference < SEESAW_TOLERANCE,
            })
        }
        None => None,
    };
    let [alpha, beta, gamma] = res.rotation.angles();
    Ok(AnalysisReport {
        d: state.d(),
        value: res.value,
        violates: res.violates,
        lower: res.lower,
        upper: res.upper,
        rotation: EulerAngles { alpha, beta, gamma },
        a_axis: res.observables.a.axis(),
        a_prime_axis: res.observables.a_prime.axis(),
        b: matrix_rows(res.observables.b.matrix().as_matrix()),
        b_prime: matrix_rows(res.observables.b_prime.matrix().as_matrix()),
        certificate,
        purity: pb.purity,
        purity_threshold: pb.threshold,
        log_negativity: log_negativity(state),
        evaluations: res.evaluations,
        seesaw,
        timing: None,
    })
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("line {} column {}", e.line(), e.column()),
            reason: e.to_string(),
        })
    }

    /// Header plus one row of the scalar fields.
    pub fn to_csv(&self) -> String {
        let mut header = vec![
            "d", "value", "violates", "lower", "upper", "alpha", "beta", "gamma", "a1", "a2", "a3", "ap1", "ap2",
            "ap3", "certificate", "purity", "purity_threshold", "log_negativity", "evaluations",
        ];
        let mut row = vec![
            self.d.to_string(),
            fmt_g(self.value),
            self.violates.to_string(),
            fmt_g(self.lower),
            fmt_g(self.upper),
            fmt_g(self.rotation.alpha),
            fmt_g(self.rotation.beta),
            fmt_g(self.rotation.gamma),
        ];
        row.extend(self.a_axis.iter().chain(&self.a_prime_axis).map(|&x| fmt_g(x)));
        row.extend([
            fmt_g(self.certificate),
            fmt_g(self.purity),
            fmt_g(self.purity_threshold),
            fmt_g(self.log_negativity),
            self.evaluations.to_string(),
        ]);
        if let Some(s) = &self.seesaw {
            header.extend(["seesaw_value", "seesaw_difference", "seesaw_agrees"]);
            row.extend([fmt_g(s.value), fmt_g(s.difference), s.agrees.to_string()]);
        }
        if let Some(t) = &self.timing {
            header.push("timing_seconds");
            row.push(fmt_g(t.seconds));
        }
        format!("{}\n{}\n", header.join(","), row.join(","))
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed.
pub fn fmt_g(x: f64) -> String {
    fmt_sig(x, 12)
}

pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}{:02}", trim_zeros(mantissa), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const GRID_HEADER: &str = "x,y,E,B,lower,upper,entangled,violates,excluded_by_upper";

pub fn grid_csv(rows: &[GridRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 96);
    out.push_str(GRID_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt_g(r.x),
            fmt_g(r.y),
            fmt_g(r.E),
            fmt_g(r.B),
            fmt_g(r.lower),
            fmt_g(r.upper),
            r.entangled,
            r.violates,
            r.excluded_by_upper
        );
    }
    out
}

pub const SCAN_HEADER: &str = "bin_lo,bin_hi,count";
/// Prefix of the summary comment line in scan CSV output.
pub const SUMMARY_PREFIX: &str = "# summary ";
/// Prefix of the timing comment line, omitted with `--no-timing`.
pub const TIMING_PREFIX: &str = "# timing ";

/// Histogram rows, then a `# summary key=value,...` line and an optional timing line.
pub fn scan_csv(stats: &ScanStatistics, timing: Option<Timing>) -> String {
    let mut out = String::new();
    out.push_str(SCAN_HEADER);
    out.push('\n');
    let h = &stats.histogram;
    for (k, c) in h.counts.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", fmt_g(h.edges[k]), fmt_g(h.edges[k + 1]), c);
    }
    let fields = [
        ("d", stats.d.to_string()),
        ("n_samples", stats.n_samples.to_string()),
        ("seed", stats.seed.to_string()),
        ("violations", stats.violations.to_string()),
        ("p_violation", fmt_g(stats.p_violation)),
        ("mean", fmt_g(stats.mean)),
        ("stddev", fmt_g(stats.stddev)),
        ("max", fmt_g(stats.max_value)),
        ("lower_bound_rel_error_mean", fmt_g(stats.lower_bound_rel_error_mean)),
        ("lower_bound_rel_error_max", fmt_g(stats.lower_bound_rel_error_max)),
        ("purity_bound_failures", stats.purity_bound_failures.to_string()),
        ("purity_excluded", stats.purity_excluded.to_string()),
        ("bound_sandwich_failures", stats.bound_sandwich_failures.to_string()),
    ];
    let summary: Vec<String> = fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let _ = writeln!(out, "{SUMMARY_PREFIX}{}", summary.join(","));
    if let Some(t) = timing {
        let _ = writeln!(out, "{TIMING_PREFIX}seconds={}", fmt_g(t.seconds));
    }
    out
}

/// Reads the `key=value` pairs of a summary line produced by [`scan_csv`].
pub fn parse_scan_summary(csv: &str) -> Option<Vec<(String, String)>> {
    let line = csv.lines().find_map(|l| l.strip_prefix(SUMMARY_PREFIX))?;
    line.split(',').map(|kv| kv.split_once('=').map(|(k, v)| (k.to_string(), v.to_string()))).collect()
}

/// Matrix in the state-file entry format.
pub fn hermitian_rows(h: &HermitianMatrix<f64>) -> Vec<Vec<[f64; 2]>> {
    matrix_rows(h.as_matrix())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell_text() -> String {
        state_to_json(&QubitQuditState::bell())
    }

    #[test]
    fn parses_maximally_mixed() {
        let q = [0.25, 0.0];
        let z = [0.0, 0.0];
        let rho: Vec<Vec<[f64; 2]>> = (0..4).map(|i| (0..4).map(|j| if i == j { q } else { z }).collect()).collect();
        let text = serde_json::to_string(&StateFile { d: 2, rho }).unwrap();
        let s = parse_state(text.as_bytes()).unwrap();
        assert_eq!(s, QubitQuditState::maximally_mixed(2));
    }

    #[test]
    fn bell_file_round_trip_matches_decomposition() {
        let s = parse_state(bell_text().as_bytes()).unwrap();
        let b = s.decompose();
        let p = crate::linalg::pauli::<f64>();
        assert!(b.beta(1).distance(&p[0].scale(0.5)) < 1e-15);
        assert!(b.beta(2).distance(&p[1].scale(-0.5)) < 1e-15);
        assert!(b.beta(3).distance(&p[2].scale(0.5)) < 1e-15);
    }

    #[test]
    fn trace_defect_is_reported() {
        let mut f = StateFile::from_state(&QubitQuditState::maximally_mixed(2));
        f.rho[0][0] = [0.23, 0.0];
        let err = parse_state(serde_json::to_string(&f).unwrap().as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Trace { .. }));
        assert!(err.to_string().contains("0.98"), "{err}");
    }

    #[test]
    fn structured_errors() {
        let err = parse_state(b"{\"d\": 2, \"rho\": [").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        let err = parse_state(b"{\"d\": 2, \"rho\": [[[1,0]]]}").unwrap_err();
        assert!(matches!(err, Error::Shape { ref location, .. } if location == "rho"), "{err}");
        let mut f = StateFile::from_state(&QubitQuditState::maximally_mixed(2));
        f.rho[0][1] = [0.1, 0.0];
        let err = parse_state(serde_json::to_string(&f).unwrap().as_bytes()).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { row: 0, col: 1, .. } | Error::NotHermitian { row: 1, col: 0, .. }), "{err}");
        let mut f = StateFile::from_state(&QubitQuditState::maximally_mixed(2));
        f.rho[0][0] = [0.75, 0.0];
        f.rho[1][1] = [-0.25, 0.0];
        let err = parse_state(serde_json::to_string(&f).unwrap().as_bytes()).unwrap_err();
        assert!(matches!(err, Error::NotPositive { .. }), "{err}");
        f.rho[1][1] = [-0.25, 0.0];
        f.rho[2] = vec![[0.0, 0.0]; 3];
        assert!(matches!(parse_state(serde_json::to_string(&f).unwrap().as_bytes()), Err(Error::Shape { .. })));
    }

    #[test]
    fn report_round_trips_exactly() {
        let s = crate::ensembles::bures_qubit_qudit::<f64>(3, 9, 2).unwrap();
        let mut r = analyze(&s, &OptimizerConfig::default(), Some((4, 1))).unwrap();
        r.timing = Some(Timing { seconds: 0.123 });
        let back = AnalysisReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.seesaw.unwrap().agrees);
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(1.0), "1");
        assert_eq!(fmt_g(0.5), "0.5");
        assert_eq!(fmt_g(2.0 * 2f64.sqrt()), "2.82842712475");
        assert_eq!(fmt_g(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_g(-1.25e-7), "-1.25e-07");
        assert_eq!(fmt_g(123456789012345.0), "1.23456789012e+14");
        assert_eq!(fmt_g(0.0001), "0.0001");
    }

    #[test]
    fn grid_and_scan_layout() {
        let row = GridRow {
            x: 0.5,
            y: 0.25,
            E: 0.1,
            B: 2.1,
            lower: 2.0,
            upper: 3.0,
            entangled: true,
            violates: true,
            excluded_by_upper: false,
        };
        assert_eq!(grid_csv(&[row]), format!("{GRID_HEADER}\n0.5,0.25,0.1,2.1,2,3,true,true,false\n"));
        let samples = [crate::ensembles::ScanSample { value: 2.5, lower: 2.4, upper: 3.0, purity: 0.9, purity_threshold: 0.3 }];
        let stats = ScanStatistics::from_samples(2, 1, &samples, 1e-9);
        let csv = scan_csv(&stats, Some(Timing { seconds: 1.5 }));
        assert_eq!(csv.lines().count(), 1 + 60 + 2);
        let summary = parse_scan_summary(&csv).unwrap();
        assert!(summary.contains(&("violations".to_string(), "1".to_string())));
        assert!(!scan_csv(&stats, None).contains(TIMING_PREFIX));
    }
}
