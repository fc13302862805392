//! `qspline`: fit, evaluate and inspect quantum cubic-spline simulations.
//!
//! Every subcommand prints one JSON document (floats to 17 significant
//! digits). Exit status: 0 on success, 1 when a checked property fails,
//! 2 on bad input.

mod commands;
mod input;
mod json;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qspline",
    version,
    about = "Statevector simulation of quantum cubic spline interpolation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit the knot moments with state preparation and HHL.
    Fit(FitArgs),
    /// Evaluate S, S' and S'' of a stored fit by inner-product estimation.
    Eval(EvalArgs),
    /// Phase-estimation outcome table for diag(1, e^{2 pi i theta}).
    QpeDemo(QpeDemoArgs),
    /// Prepare the state of a vector and report its cost.
    Prep(PrepArgs),
    /// Singular-value bounds of moment systems: a seeded sweep or one dataset.
    Conditioning(ConditioningArgs),
    /// Solve A x = b with HHL and compare against a direct solve.
    HhlSolve(HhlSolveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryKind {
    /// First derivatives at both ends (type1).
    Clamped,
    /// Zero second derivatives (type2 with zero values).
    Natural,
    Type1,
    Type2,
    Periodic,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[arg(long, value_enum)]
    pub boundary: BoundaryKind,
    /// S'(x_0) for clamped/type1.
    #[arg(long, allow_hyphen_values = true)]
    pub f0p: Option<f64>,
    /// S'(x_n) for clamped/type1.
    #[arg(long, allow_hyphen_values = true)]
    pub fnp: Option<f64>,
    /// S''(x_0) for type2.
    #[arg(long, allow_hyphen_values = true)]
    pub f0pp: Option<f64>,
    /// S''(x_n) for type2.
    #[arg(long, allow_hyphen_values = true)]
    pub fnpp: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RunMode {
    /// Exact distributions and branch masses.
    Exact,
    /// Seeded measurement samples.
    Shots,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with header `x,y` and strictly increasing x.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub boundary: BoundaryArgs,
    #[arg(long, default_value_t = 10)]
    pub phase_bits: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = RunMode::Exact)]
    pub mode: RunMode,
    /// Samples per estimate in shots mode.
    #[arg(long, default_value_t = 2000)]
    pub shots: usize,
    /// Inner-product tolerance used for scale recovery and by `eval`.
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    /// Where to write the fit; stdout gets a summary either way.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub fit: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub at: f64,
    /// Defaults to the tolerance stored in the fit.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct QpeDemoArgs {
    #[arg(long)]
    pub theta: f64,
    #[arg(long)]
    pub bits: usize,
    #[arg(long, value_enum, default_value_t = TableFormat::Json)]
    pub format: TableFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrepMethod {
    Flat,
    Binned,
}

#[derive(Debug, Args)]
pub struct PrepArgs {
    /// One value per row, `re,im` per row, or a single row of values.
    #[arg(long)]
    pub vector: PathBuf,
    #[arg(long, value_enum, default_value_t = PrepMethod::Binned)]
    pub method: PrepMethod,
}

#[derive(Debug, Args)]
pub struct ConditioningArgs {
    /// Run the seeded sweep instead of analysing `--input`.
    #[arg(long, conflicts_with = "input")]
    pub sweep: bool,
    /// Inclusive system-size range, `LO..HI`.
    #[arg(long, default_value = "8..256", value_parser = input::parse_range)]
    pub sizes: (usize, usize),
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    pub h_min: f64,
    #[arg(long, default_value_t = 1e3)]
    pub h_max: f64,
    #[arg(long, required_unless_present = "sweep", requires = "boundary")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub boundary: Option<BoundaryKind>,
    #[arg(long, allow_hyphen_values = true)]
    pub f0p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub fnp: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub f0pp: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub fnpp: Option<f64>,
}

#[derive(Debug, Args)]
pub struct HhlSolveArgs {
    /// Square real matrix, one row per line.
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub rhs: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub phase_bits: usize,
    /// Configured condition number; defaults to the Gershgorin bound over
    /// the smallest singular value.
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Estimate the success mass from this many ancilla samples.
    #[arg(long)]
    pub shots: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fail (exit 1) when the fidelity against the direct solve is lower.
    #[arg(long)]
    pub min_fidelity: Option<f64>,
}

/// Rendered output and the checked properties that failed.
pub struct Report {
    pub body: String,
    pub failures: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Fit(a) => commands::fit(&a),
        Command::Eval(a) => commands::eval(&a),
        Command::QpeDemo(a) => commands::qpe_demo(&a),
        Command::Prep(a) => commands::prep(&a),
        Command::Conditioning(a) => commands::conditioning(&a),
        Command::HhlSolve(a) => commands::hhl_solve(&a),
    };
    match outcome {
        Ok(report) => {
            // A closed pipe (`| head`) is not an error of the command.
            let _ = writeln!(std::io::stdout().lock(), "{}", report.body);
            for f in &report.failures {
                eprintln!("check failed: {f}");
            }
            if report.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
