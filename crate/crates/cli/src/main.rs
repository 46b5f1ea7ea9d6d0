//! `chsh`: maximal CHSH violation of qubit-qudit states from the command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use chsh_core::case_study::grid_scan;
use chsh_core::ensembles::nonlocality_scan;
use chsh_core::io::{analyze, grid_csv, parse_state, scan_csv, Timing, TIMING_PREFIX};
use chsh_core::seesaw::DEFAULT_STARTS;
use chsh_core::validation::run_all;
use chsh_core::{Error, OptimizerConfig};

const EXIT_NUMERIC: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "chsh", version, about = "Maximal CHSH violation for qubit-qudit states")]
struct Cli {
    /// Leave out wall-clock timing so repeated runs produce identical output.
    #[arg(long, global = true)]
    no_timing: bool,

    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long, global = true, env = "CHSH_MAX_THREADS", value_name = "K")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Maximal CHSH value, optimal observables and diagnostics of a state file.
    Analyze(AnalyzeArgs),
    /// CHSH statistics over random Bures states.
    RandomScan(ScanArgs),
    /// Entanglement and CHSH value over the qubit-qutrit family grid.
    CaseStudy(CaseStudyArgs),
    /// Cross-check the optimizer against independent methods.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
struct OptimizerArgs {
    /// Grid points per Euler angle.
    #[arg(long, value_name = "N", default_value_t = 30)]
    grid: usize,
    /// Grid points refined by Nelder-Mead.
    #[arg(long, value_name = "K", default_value_t = 10)]
    refine_starts: usize,
    /// Simplex diameter at which refinement stops.
    #[arg(long, value_name = "TOL", default_value_t = 1e-9)]
    simplex_tolerance: f64,
    /// Iteration cap per refinement.
    #[arg(long, value_name = "N", default_value_t = 500)]
    max_iterations: usize,
}

impl OptimizerArgs {
    fn config(&self) -> Result<OptimizerConfig, Error> {
        if self.grid < 2 || self.refine_starts == 0 || !(self.simplex_tolerance > 0.0) {
            return Err(Error::Domain("grid must be at least 2, refine-starts at least 1, tolerance positive".into()));
        }
        Ok(OptimizerConfig {
            grid: self.grid,
            starts: self.refine_starts,
            simplex_tolerance: self.simplex_tolerance,
            max_iterations: self.max_iterations,
            ..OptimizerConfig::default()
        })
    }
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// JSON state file: {"d": d, "rho": [[[re, im], ...], ...]}.
    file: PathBuf,
    /// Also run the see-saw search and report its value.
    #[arg(long)]
    seesaw_check: bool,
    /// Random starts for the see-saw check.
    #[arg(long, value_name = "N", default_value_t = DEFAULT_STARTS)]
    seesaw_starts: usize,
    /// Seed for the see-saw starts.
    #[arg(long, value_name = "S", default_value_t = 0)]
    seed: u64,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
    #[command(flatten)]
    optimizer: OptimizerArgs,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Qudit dimension.
    #[arg(long, value_name = "D")]
    d: usize,
    #[arg(long, value_name = "N")]
    samples: usize,
    #[arg(long, value_name = "S", default_value_t = 0)]
    seed: u64,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(flatten)]
    optimizer: OptimizerArgs,
}

#[derive(Args, Debug)]
struct CaseStudyArgs {
    /// Grid points per axis.
    #[arg(long, value_name = "R", default_value_t = 101)]
    resolution: usize,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(flatten)]
    optimizer: OptimizerArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Random inputs per battery (per dimension where several are checked).
    #[arg(long, value_name = "T", default_value_t = 100)]
    trials: usize,
    #[arg(long, value_name = "S", default_value_t = 7)]
    seed: u64,
    #[command(flatten)]
    optimizer: OptimizerArgs,
}

/// A failure together with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_validation() { EXIT_VALIDATION } else { EXIT_NUMERIC };
        Self { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Some(k) = cli.threads {
        if k == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: could not start the thread pool: {e}");
            return ExitCode::from(EXIT_NUMERIC);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let started = Instant::now();
    let timing = || (!cli.no_timing).then(|| Timing { seconds: started.elapsed().as_secs_f64() });
    match &cli.command {
        Command::Analyze(args) => {
            let config = args.optimizer.config()?;
            let text = fs::read(&args.file).map_err(|e| Failure {
                code: EXIT_VALIDATION,
                message: format!("cannot read {}: {e}", args.file.display()),
            })?;
            let state = parse_state(&text)?;
            let seesaw = args.seesaw_check.then_some((args.seesaw_starts.max(1), args.seed));
            let mut report = analyze(&state, &config, seesaw)?;
            report.timing = timing();
            let out = if args.csv { report.to_csv() } else { report.to_json() };
            emit(None, &out)?;
            Ok(0)
        }
        Command::RandomScan(args) => {
            let config = args.optimizer.config()?;
            if args.d < 2 || args.samples == 0 {
                return Err(Error::Domain("random-scan needs --d >= 2 and --samples >= 1".into()).into());
            }
            let stats = nonlocality_scan::<f64>(args.d, args.samples, args.seed, &config)?;
            let csv = scan_csv(&stats, timing());
            emit(args.out.as_deref(), &csv)?;
            if args.out.is_some() {
                let summary = csv.lines().filter(|l| l.starts_with('#')).collect::<Vec<_>>().join("\n");
                emit(None, &format!("{summary}\n"))?;
            }
            Ok(0)
        }
        Command::CaseStudy(args) => {
            let config = args.optimizer.config()?;
            let rows = grid_scan::<f64>(args.resolution, &config)?;
            let mut csv = grid_csv(&rows);
            if let Some(t) = timing() {
                csv.push_str(&format!("{TIMING_PREFIX}seconds={}\n", t.seconds));
            }
            emit(args.out.as_deref(), &csv)?;
            if let Some(path) = &args.out {
                emit(None, &format!("wrote {} rows to {}\n", rows.len(), path.display()))?;
            }
            Ok(0)
        }
        Command::Verify(args) => {
            let config = args.optimizer.config()?;
            let reports = run_all(args.trials, args.seed, &config)?;
            let mut out = String::new();
            for r in &reports {
                out.push_str(&format!(
                    "{} {} checks={} failures={} worst={:e} tolerance={:e}\n",
                    if r.passed() { "PASS" } else { "FAIL" },
                    r.name,
                    r.checks,
                    r.failures,
                    r.worst,
                    r.tolerance
                ));
            }
            let all = reports.iter().all(|r| r.passed());
            out.push_str(if all { "all batteries passed\n" } else { "some batteries failed\n" });
            if let Some(t) = timing() {
                out.push_str(&format!("{TIMING_PREFIX}seconds={}\n", t.seconds));
            }
            emit(None, &out)?;
            Ok(if all { 0 } else { EXIT_NUMERIC })
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let io_failure = |e: std::io::Error| Failure { code: EXIT_NUMERIC, message: format!("write failed: {e}") };
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure {
            code: EXIT_NUMERIC,
            message: format!("cannot write {}: {e}", p.display()),
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(io_failure)?;
            stdout.flush().map_err(io_failure)
        }
    }
}
