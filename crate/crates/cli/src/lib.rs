//! Command-line front end: reads guests and hosts, dispatches to the
//! solvers, verifies, generates instances and benchmarks.
//!
//! Exit codes: 0 embedding found (or verification passed), 1 infeasible
//! (or a violation), 2 input error, 3 budget exceeded.

mod args;
mod commands;
pub mod dispatch;
pub mod input;
pub mod pipeline;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use dispatch::{auto_solver, solve, Limits, SolverKind, Verdict};
pub use input::{Distortion, Guest, Host, HostKind};
pub use pipeline::{run_pipeline, solve_instance, PipelineOutcome};

pub const EXIT_FOUND: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("search budget exceeded")]
    Budget,
    /// A solver produced a witness that failed the final check.
    #[error("witness failed verification: {0}")]
    Unverified(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Budget => EXIT_BUDGET,
            CliError::Input(_) | CliError::Unverified(_) => EXIT_INPUT,
        }
    }
}

/// Runs the command line `argv` (program name first), writing results to
/// `out` and diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_INPUT,
            };
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(err, "error: {e}");
        return e.exit_code();
    }
    match commands::execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Caps the worker pool at `EMBED_THREADS` when set.
fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("EMBED_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Input(format!("EMBED_THREADS: expected a positive integer, got `{v}`")))?;
    // A pool can only be installed once per process; later calls keep it.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
