//! Command-line front end for the `rcu-age` model: parameter sweeps,
//! analytic-versus-simulated cross-checks, the age/footprint trade-off and
//! the oracle validation suite.
//!
//! Every command computes its whole output in memory first, so a failure
//! never leaves a partial file or a truncated stdout.

pub mod grid;
pub mod sweep;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rcu_age::simulator::SimConfig;
use rcu_age::validation::suite::{self, SuiteOptions};
use rcu_age::{ModelParams, SeriesControl};

use crate::grid::parse_axis;
use crate::sweep::{
    analytic_rows, render_csv, render_histogram_csv, simulated_rows, Reference, SweepRow,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "rcu-age",
    version,
    about = "Memory footprint and age of information in the memoryless RCU model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-form footprint, bounds and age over a parameter grid.
    Analytic(AnalyticArgs),
    /// Simulate every grid point and compare with the closed forms.
    Simulate(SimulateArgs),
    /// Age versus footprint as the write rate varies.
    Tradeoff(TradeoffArgs),
    /// Run the Monte Carlo, quadrature and integral-identity oracles.
    Validate(ValidateArgs),
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Write rates: `start:stop:count:lin|log`, a comma list, or one value.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    /// Read arrival rates, same syntax.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: String,
    /// Read completion rates, same syntax.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub mu: String,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Series truncation tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Base seed; point `i` uses a seed derived from it and `i`.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output file (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct AnalyticArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceArg {
    /// The `en_exact` column.
    Exact,
    /// The shared-horizon quadrature of the footprint.
    Renewal,
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Expected publications in each measurement window.
    #[arg(long, default_value_t = 100_000)]
    pub publications: u64,
    /// Warmup time; defaults to 100 mean times of the slowest process.
    #[arg(long)]
    pub warmup: Option<f64>,
    /// Batches for the batch-means confidence intervals.
    #[arg(long, default_value_t = 20)]
    pub batches: usize,
    /// Exit 1 unless every row is within max(3 CI half-widths, 2 %).
    #[arg(long)]
    pub check: bool,
    /// Footprint the summary line and `--check` compare against.
    #[arg(long, value_enum, default_value_t = ReferenceArg::Exact)]
    pub reference: ReferenceArg,
    /// Also write the time-weighted distribution of N to this CSV file.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct TradeoffArgs {
    /// Write rates, same syntax as the grid flags. Rows come out sorted.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ValidateArgs {
    /// Monte Carlo samples per check.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Allowed gap between the series and quadrature grace-period probabilities.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Monte Carlo acceptance, in standard errors.
    #[arg(long, default_value_t = 3.5)]
    pub sigmas: f64,
}

/// What a command produced: bytes for the primary output, diagnostics for
/// stderr, and the exit code.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
    /// Files to write, in order, only once everything has been computed.
    pub files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outcome {
    fn usage(message: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_USAGE,
            stderr: format!("error: {message}\n"),
            ..Self::default()
        }
    }

    fn emit(&mut self, out: &Option<PathBuf>, bytes: Vec<u8>) {
        match out {
            Some(path) => self.files.push((path.clone(), bytes)),
            None => self.stdout = bytes,
        }
    }
}

fn control(tol: f64) -> Result<SeriesControl, String> {
    let ctrl = SeriesControl::with_tol(tol);
    ctrl.check().map_err(|e| format!("--tol: {e}"))?;
    Ok(ctrl)
}

fn points(grid: &GridArgs) -> Result<Vec<ModelParams>, String> {
    let alphas = parse_axis(&grid.alpha).map_err(|e| format!("--alpha: {e}"))?;
    let lambdas = parse_axis(&grid.lambda).map_err(|e| format!("--lambda: {e}"))?;
    let mus = parse_axis(&grid.mu).map_err(|e| format!("--mu: {e}"))?;
    let points = sweep::grid(&alphas, &lambdas, &mus);
    for p in &points {
        rcu_age::validate(p)
            .map_err(|e| format!("alpha={} lambda={} mu={}: {e}", p.alpha, p.lambda, p.mu))?;
    }
    Ok(points)
}

fn analytic(args: &AnalyticArgs) -> Outcome {
    let prepared = points(&args.grid).and_then(|p| Ok((p, control(args.output.tol)?)));
    let (points, ctrl) = match prepared {
        Ok(v) => v,
        Err(e) => return Outcome::usage(e),
    };
    match analytic_rows(&points, &ctrl, args.output.seed) {
        Ok(rows) => {
            let mut out = Outcome::default();
            out.emit(&args.output.out, render_csv(&rows));
            out
        }
        Err(e) => Outcome::usage(e),
    }
}

fn simulate(args: &SimulateArgs) -> Outcome {
    let prepared = points(&args.grid).and_then(|p| Ok((p, control(args.output.tol)?)));
    let (points, ctrl) = match prepared {
        Ok(v) => v,
        Err(e) => return Outcome::usage(e),
    };
    let config = SimConfig {
        seed: args.output.seed,
        warmup_time: args.warmup,
        horizon_publications: args.publications,
        batch_count: args.batches,
        sample_n_distribution: args.histogram.is_some(),
    };
    let reference = match args.reference {
        ReferenceArg::Exact => Reference::Exact,
        ReferenceArg::Renewal => Reference::Renewal,
    };
    let sims = match simulated_rows(&points, &ctrl, &config, reference) {
        Ok(s) => s,
        Err(e) => return Outcome::usage(e),
    };

    let mut out = Outcome::default();
    let rows: Vec<SweepRow> = sims.iter().map(|s| s.row.clone()).collect();
    out.emit(&args.output.out, render_csv(&rows));
    if let Some(path) = &args.histogram {
        out.files.push((path.clone(), render_histogram_csv(&rows)));
    }

    let reference_name = match reference {
        Reference::Exact => "en_exact",
        Reference::Renewal => "en_renewal",
    };
    let (worst, at) =
        sims.iter()
            .map(|s| (s.ci_units(), s.row.params))
            .fold((0.0, None), |acc, (u, p)| {
                if u > acc.0 || acc.1.is_none() {
                    (u, Some(p))
                } else {
                    acc
                }
            });
    let failures: Vec<&sweep::Simulated> = sims.iter().filter(|s| !s.within_tolerance()).collect();
    if let Some(p) = at {
        out.stderr.push_str(&format!(
            "max |sim - analytic| = {worst:.3} CI half-widths (reference {reference_name}, at alpha={} lambda={} mu={}); {} of {} rows outside max(3 CI, 2%)\n",
            p.alpha,
            p.lambda,
            p.mu,
            failures.len(),
            sims.len()
        ));
    }
    if args.check && !failures.is_empty() {
        for s in &failures {
            let p = s.row.params;
            let sim = s.row.sim.as_ref().expect("simulated row");
            out.stderr.push_str(&format!(
                "check failed: alpha={} lambda={} mu={}: sim_en={} +- {} vs {}; sim_age={} +- {} vs {}\n",
                p.alpha, p.lambda, p.mu, sim.en, sim.en_ci, s.reference_en, sim.age, sim.age_ci, s.row.avg_age
            ));
        }
        out.code = EXIT_CHECK;
    }
    out
}

fn tradeoff(args: &TradeoffArgs) -> Outcome {
    let mut alphas = match parse_axis(&args.alpha) {
        Ok(a) => a,
        Err(e) => return Outcome::usage(format!("--alpha: {e}")),
    };
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    let points = sweep::grid(&alphas, &[args.lambda], &[args.mu]);
    for p in &points {
        if let Err(e) = rcu_age::validate(p) {
            return Outcome::usage(format!(
                "alpha={} lambda={} mu={}: {e}",
                p.alpha, p.lambda, p.mu
            ));
        }
    }
    let ctrl = match control(args.output.tol) {
        Ok(c) => c,
        Err(e) => return Outcome::usage(e),
    };
    match analytic_rows(&points, &ctrl, args.output.seed) {
        Ok(rows) => {
            let mut out = Outcome::default();
            out.emit(&args.output.out, render_csv(&rows));
            out
        }
        Err(e) => Outcome::usage(e),
    }
}

fn validate(args: &ValidateArgs) -> Outcome {
    if args.samples < rcu_age::validation::MIN_SAMPLES {
        return Outcome::usage(format!(
            "--samples must be at least {}",
            rcu_age::validation::MIN_SAMPLES
        ));
    }
    if !(args.tol > 0.0 && args.sigmas > 0.0) {
        return Outcome::usage("--tol and --sigmas must be positive");
    }
    let opts = SuiteOptions {
        samples: args.samples,
        seed: args.seed,
        sigmas: args.sigmas,
        series_quadrature_tol: args.tol,
        ..SuiteOptions::default()
    };
    let outcomes = suite::run(&opts);
    let mut text = String::new();
    for o in &outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        text.push_str(&format!("{tag} {} {}: {}\n", o.group, o.name, o.detail));
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    text.push_str(&format!("{passed}/{} checks passed\n", outcomes.len()));
    Outcome {
        code: if passed == outcomes.len() {
            EXIT_OK
        } else {
            EXIT_CHECK
        },
        stdout: text.into_bytes(),
        ..Outcome::default()
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Analytic(a) => analytic(a),
        Command::Simulate(a) => simulate(a),
        Command::Tradeoff(a) => tradeoff(a),
        Command::Validate(a) => validate(a),
    }
}

/// Writes the outcome's files and streams, returning the process exit code.
pub fn finish(outcome: Outcome) -> i32 {
    for (path, bytes) in &outcome.files {
        if let Err(e) = std::fs::write(path, bytes) {
            eprintln!("error: writing {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    let mut stdout = std::io::stdout().lock();
    if stdout
        .write_all(&outcome.stdout)
        .and_then(|_| stdout.flush())
        .is_err()
    {
        return EXIT_USAGE;
    }
    eprint!("{}", outcome.stderr);
    outcome.code
}
