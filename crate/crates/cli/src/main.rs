//! `fhw`: command-line front end for the fhw-core numerical toolkit.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 blow-up,
//! 4 Picard nonconvergence.

mod config;
mod ml_eval;
mod norms;
mod params;
mod solve;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fhw_core::FhwError;

#[derive(Debug, Parser)]
#[command(name = "fhw", version, about = "Time-fractional heat-wave equation laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate Mittag-Leffler functions on (alpha, x) grids; CSV on stdout
    MlEval(ml_eval::MlEvalArgs),
    /// Admissibility report and derived exponents of a parameter tuple
    Params(params::ParamsArgs),
    /// Solve the integral equation; writes FHWG snapshots and a norm manifest
    Solve(solve::SolveArgs),
    /// Morrey, Sobolev-Morrey and Besov-Morrey norms of a field
    Norms(norms::NormsArgs),
    /// Run verification suites; writes a verdict CSV
    Verify(verify::VerifyArgs),
}

/// Terminal error with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub const VERIFY: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const BLOW_UP: u8 = 3;
    pub const NONCONVERGENCE: u8 = 4;

    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: Self::USAGE,
            message: message.into(),
        }
    }
}

impl From<FhwError> for Failure {
    fn from(e: FhwError) -> Self {
        let code = match &e {
            FhwError::Domain(_) | FhwError::Precondition(_) | FhwError::Unsupported(_) | FhwError::Format(_) => {
                Self::USAGE
            }
            FhwError::BlowUp { .. } => Self::BLOW_UP,
            FhwError::NonConvergence { .. } => Self::NONCONVERGENCE,
            _ => 1,
        };
        let message = match &e {
            FhwError::NonConvergence { report, .. } => format!(
                "{e}\n{}",
                serde_json::to_string_pretty(report).expect("report serializes")
            ),
            _ => e.to_string(),
        };
        Self { code, message }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: 1,
            message: format!("i/o error: {e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::MlEval(a) => ml_eval::run(&a),
        Command::Params(a) => params::run(&a),
        Command::Solve(a) => solve::run(&a),
        Command::Norms(a) => norms::run(&a),
        Command::Verify(a) => verify::run(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("fhw: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
