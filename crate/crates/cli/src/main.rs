//! `theta-quartic`: bitangents of a plane quartic from its period matrix.
//!
//! Exit codes: 0 success, 1 input error, 2 special-locus refusal,
//! 3 invariant failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use theta_quartic::Error;

#[derive(Debug, Parser)]
#[command(
    name = "theta-quartic",
    version,
    about = "Bitangents of plane quartics from genus-3 period matrices",
    allow_negative_numbers = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Period matrix file, {"tau": [[{"re": .., "im": ..} x3] x3]}
    #[arg(long, global = true)]
    pub tau: Option<PathBuf>,

    /// Relative size of the largest omitted lattice term
    #[arg(long, global = true, default_value_t = 1e-15)]
    pub tail: f64,

    /// Bitangency residual tolerance
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol: f64,

    /// Seed for random-tau and selftest
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Row signs, e.g. +1,+1,-1
    #[arg(long, global = true, default_value = "+1,+1,+1", allow_hyphen_values = true)]
    pub eps: String,

    /// Index into the canonical list of 288 Aronhold systems
    #[arg(long, global = true)]
    pub system_index: Option<usize>,

    /// Write machine-readable JSON to stdout
    #[arg(long, global = true)]
    pub json: bool,

    /// Number of random period matrices used by selftest
    #[arg(long, global = true, default_value_t = 5)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// List the 64 characteristics with parity and Arf invariant
    Classify,
    /// Show the selected Aronhold system and its derived forms
    Aronhold,
    /// Compute and certify the 28 bitangents
    Bitangents,
    /// Reconstruct the quartic through the Riemann model
    Quartic,
    /// Bitangency report for every line
    Verify,
    /// Run the invariant suite
    Selftest,
    /// Emit a seeded admissible period matrix
    RandomTau,
}

/// Failure carrying the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    pub fn invariant(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::SpecialLocus(_) | Error::Degenerate(_) => 2,
            Error::Asymmetric(_)
            | Error::NotPositiveDefinite(_)
            | Error::NonFinite
            | Error::Json(_)
            | Error::InvalidPolicy(_)
            | Error::TruncationCap { .. }
            | Error::IndexOutOfRange { .. } => 1,
            _ => 3,
        };
        let mut message = e.to_string();
        if let Error::SpecialLocus(chars) = &e {
            let list: Vec<String> = chars.iter().map(|c| c.to_string()).collect();
            message.push_str(&format!(": {}", list.join(" ")));
        }
        Failure { code, message }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("THETA_QUARTIC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::input(format!("THETA_QUARTIC_THREADS must be a positive integer, got {raw:?}")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::input(format!("cannot size thread pool: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors share the input-error code; help and version succeed
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = configure_threads().and_then(|_| commands::run(&cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
