//! Command-line front end of btwist-core.
//!
//! Exit status: 0 on success, 1 on usage and input errors, 2 when a
//! structural invariant is violated. Errors print as `error: Name: detail`.

mod cli;
mod commands;
mod io;

use std::fmt;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};

use cli::Cli;

/// Errors raised by the front end itself.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    ProfileFormat(String),
    ToleranceExceeded { what: &'static str, value: f64, tol: f64 },
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "Usage: {m}"),
            CliError::Io(m) => write!(f, "Io: {m}"),
            CliError::ProfileFormat(m) => write!(f, "ProfileFormat: {m}"),
            CliError::ToleranceExceeded { what, value, tol } => {
                write!(f, "ToleranceExceeded: {what} {value:?} > {tol:?}")
            }
        }
    }
}

impl std::error::Error for CliError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<btwist_core::Error>() {
        return if e.is_invariant_violation() { 2 } else { 1 };
    }
    match err.downcast_ref::<CliError>() {
        Some(CliError::ToleranceExceeded { .. }) => 2,
        _ => 1,
    }
}

/// Prints a clap error followed by the flags of the subcommand it concerns.
fn usage_error(err: clap::Error) -> ExitCode {
    if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
        let _ = err.print();
        return ExitCode::SUCCESS;
    }
    let _ = err.print();
    let mut cmd = Cli::command();
    cmd.build();
    let name = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let help = match name.as_deref().and_then(|n| cmd.find_subcommand_mut(n)) {
        Some(sub) => sub.render_help(),
        None => cmd.render_help(),
    };
    eprintln!("\n{help}");
    ExitCode::from(1)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("BTWIST_THREADS") else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Usage(format!("BTWIST_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => return usage_error(e),
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
