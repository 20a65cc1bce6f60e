//! `snowflake`: validate metrics, test negative type, embed snowflakes and
//! quotient configurations, and check the Gaussian integral identity.
//!
//! Exit codes: 0 when the checked property holds, 2 when it fails, 3 on I/O
//! or parse errors, 4 on usage errors.

mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

pub const EXIT_FAIL: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_USAGE: u8 = 4;

/// Failures that prevent a report from being produced.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("input error: {0}")]
    Input(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Input(_) => EXIT_INPUT,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "snowflake", version, about = "Isometric embeddings of snowflaked finite metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the metric axioms of a distance matrix.
    Validate(ValidateArgs),
    /// Test (strict) negative type of a metric or one of its snowflakes.
    Negtype(NegtypeArgs),
    /// Embed a metric or its snowflake isometrically into Euclidean space.
    Embed(EmbedArgs),
    /// Check t^(2a) = c(a)·∫(1 − exp(−λ²t²))λ^(−1−2a) dλ on a grid of t.
    Schoenberg(SchoenbergArgs),
    /// Embed the snowflake of a finite subset of E^m/G into Q(n, G).
    QuotientEmbed(QuotientArgs),
}

#[derive(Debug, Args)]
struct Output {
    /// Write the machine-readable report to this file.
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MetricInput {
    /// Metric file: JSON {"n", "distances"} or {"points"}, or CSV.
    metric: PathBuf,
    /// Read a CSV file as one point per row instead of a distance matrix.
    #[arg(long)]
    points: bool,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    input: MetricInput,
    /// Triangle-inequality slack, relative to the largest distance.
    #[arg(long, default_value_t = snowflake_embed::metric::DEFAULT_TRIANGLE_TOL, value_parser = nonnegative)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct NegtypeArgs {
    #[command(flatten)]
    input: MetricInput,
    /// Test the snowflake with this exponent in [0, 1] instead of the metric.
    #[arg(long, value_parser = unit_interval)]
    alpha: Option<f64>,
    /// Require strict negative type (exponent defaults to 1).
    #[arg(long)]
    strict: bool,
    /// Eigenvalue tolerance, relative to the spectral radius.
    #[arg(long, default_value_t = snowflake_embed::negative_type::DEFAULT_TOL, value_parser = positive)]
    tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct EmbedArgs {
    #[command(flatten)]
    input: MetricInput,
    /// Snowflake exponent in [0, 1]; the rank certificate needs (0, 1).
    #[arg(long, default_value_t = 1.0, value_parser = unit_interval)]
    alpha: f64,
    /// Eigenvalue cutoff, relative to the largest eigenvalue.
    #[arg(long, default_value_t = snowflake_embed::negative_type::DEFAULT_TOL, value_parser = positive)]
    tol: f64,
    /// Write the embedded coordinates to this JSON file.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SchoenbergArgs {
    /// Exponent a in (0, 1) of t^(2a).
    #[arg(long, value_parser = open_unit_interval)]
    alpha: f64,
    /// Comma-separated positive values of t.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1,2,10", value_parser = positive)]
    t_grid: Vec<f64>,
    /// Largest acceptable relative error.
    #[arg(long, default_value_t = 1e-6, value_parser = positive)]
    quad_tol: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct QuotientArgs {
    /// Group file: JSON {"dim", "generators", "tolerance"} or {"matrices"}.
    group: PathBuf,
    /// Orbit representatives: JSON {"representatives"} or CSV.
    representatives: PathBuf,
    /// Snowflake exponent in [0, 1).
    #[arg(long, value_parser = unit_interval)]
    alpha: f64,
    /// Verification tolerance.
    #[arg(long, default_value_t = snowflake_embed::quotient::DEFAULT_QUOTIENT_TOL, value_parser = positive)]
    tol: f64,
    /// Minimum separation of lifted points, relative to the largest
    /// representative norm (at least 1).
    #[arg(long, default_value_t = snowflake_embed::quotient::DEFAULT_SEPARATION_TOL, value_parser = positive)]
    separation_tol: f64,
    /// Write the embedded points to this JSON file.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s} is not finite"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    number(s).and_then(|v| if v > 0.0 { Ok(v) } else { Err(format!("{v} is not positive")) })
}

fn nonnegative(s: &str) -> Result<f64, String> {
    number(s).and_then(|v| if v >= 0.0 { Ok(v) } else { Err(format!("{v} is negative")) })
}

fn unit_interval(s: &str) -> Result<f64, String> {
    number(s).and_then(|v| {
        if (0.0..=1.0).contains(&v) {
            Ok(v)
        } else {
            Err(format!("{v} is outside [0, 1]"))
        }
    })
}

fn open_unit_interval(s: &str) -> Result<f64, String> {
    number(s).and_then(|v| {
        if v > 0.0 && v < 1.0 {
            Ok(v)
        } else {
            Err(format!("{v} is outside (0, 1)"))
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let (result, json) = match &cli.command {
        Command::Validate(a) => (commands::validate(a), &a.output.json),
        Command::Negtype(a) => (commands::negtype(a), &a.output.json),
        Command::Embed(a) => (commands::embed(a), &a.output.json),
        Command::Schoenberg(a) => (commands::schoenberg(a), &a.output.json),
        Command::QuotientEmbed(a) => (commands::quotient_embed(a), &a.output.json),
    };
    let report = match result {
        Ok(report) => report,
        Err(e) => {
            eprintln!("snowflake: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    match json {
        Some(path) => {
            if let Err(e) = report::write_json(path, &report) {
                eprintln!("snowflake: {e}");
                return ExitCode::from(e.exit_code());
            }
        }
        None => report.print_summary(),
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
