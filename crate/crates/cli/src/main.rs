mod evaluate;
mod output;
mod request;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qsl_core::selftest::{run_selftest, SelftestOptions};
use qsl_core::QslError;

use crate::request::Request;

/// Exit status for invalid requests and configuration.
const EXIT_CONFIG: u8 = 2;
/// Exit status for numerical failures (unresolved quadrature, integrator cap, non-finite values).
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "qsl", version, about = "Quantum speed limit bounds for preset open and closed systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate bounds for one scenario at a single parameter point.
    Run(EvalArgs),
    /// Evaluate bounds along one scenario parameter.
    Sweep(SweepArgs),
    /// Maximize the bound over exponent, weights and basis (defaults to `--bounds opt_int`).
    Optimize(EvalArgs),
    /// Run the built-in invariant and reference checks.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct EvalArgs {
    /// Scenario id: qubit_ti, qudit4, spont_emission, nv_center, dephasing, coherence_gen.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Scenario parameter as KEY=VALUE (repeatable).
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Evolution time; shorthand for `--param tau=...`.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Comma-separated subset of int, sup, opt_int, opt_sup, mt, dl, tq, tc.
    #[arg(long, value_delimiter = ',')]
    pub bounds: Option<Vec<String>>,
    /// Norm exponent (a number >= 1 or `inf`).
    #[arg(long)]
    pub p: Option<String>,
    /// Weight index j selecting w = 1_j.
    #[arg(long)]
    pub w_index: Option<usize>,
    /// canonical | energy | delta_diag | haar:SEED | file:PATH
    #[arg(long)]
    pub basis: Option<String>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: available cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write records here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Plain-text `key = value` file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Leave the wall-time column empty so output is byte-reproducible.
    #[arg(long)]
    pub no_timing: bool,
    /// Haar bases sampled by the optimizer.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Hill-climb iterations per start.
    #[arg(long)]
    pub iters: Option<usize>,
    /// Number of best sampled bases refined by hill climbing.
    #[arg(long)]
    pub starts: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct SweepArgs {
    #[command(flatten)]
    eval: EvalArgs,
    /// Scenario parameter to vary.
    #[arg(long)]
    axis: Option<String>,
    /// Comma-separated list or START:STOP:COUNT.
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct SelftestArgs {
    /// Random systems drawn for the validity check.
    #[arg(long, default_value_t = 100)]
    systems: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scale every tolerance; a negative value forces all checks to fail.
    #[arg(long, hide = true, allow_negative_numbers = true)]
    corrupt_tolerance: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
    Io(String),
}

impl From<QslError> for Failure {
    fn from(e: QslError) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => Request::resolve(&args, None, request::Mode::Run).and_then(|r| evaluate::execute(&r)),
        Command::Sweep(args) => Request::resolve(&args.eval, Some((args.axis, args.values)), request::Mode::Sweep)
            .and_then(|r| evaluate::execute(&r)),
        Command::Optimize(args) => Request::resolve(&args, None, request::Mode::Optimize).and_then(|r| evaluate::execute(&r)),
        Command::Selftest(args) => return selftest(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("io error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn selftest(args: &SelftestArgs) -> ExitCode {
    let opts = SelftestOptions {
        tolerance_factor: args.corrupt_tolerance.unwrap_or(1.0),
        random_systems: args.systems,
        seed: args.seed,
    };
    let outcomes = run_selftest(&opts);
    let mut failed = 0;
    for o in &outcomes {
        if !o.passed {
            failed += 1;
        }
        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
    }
    println!("{} of {} checks passed", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
