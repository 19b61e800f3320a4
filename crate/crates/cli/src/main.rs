//! `freeze-rmt`: tables for zeros, frozen covariances, soft-edge constants,
//! edge profiles, Monte Carlo checks and Airy values.
//!
//! Exit codes: 0 success, 1 I/O, 2 domain or usage error, 3 numeric failure
//! or failed check.

mod checks;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{Options, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "freeze-rmt", version, about = "Frozen beta-ensemble covariances and soft-edge limits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Zeros with Christoffel and dual Christoffel numbers.
    Zeros(Options),
    /// Inverse covariance, covariance, eigenvectors and spectra.
    Covariance(Options),
    /// Edge variance constants and trend tables.
    Softedge(Options),
    /// Finite-N edge profile against its Airy limit.
    Profile(Options),
    /// Metropolis samples and moment comparison with the Gaussian limit.
    Sample(Options),
    /// Airy values on a grid, or Airy zeros with `--zeros`.
    Airy(Options),
    /// Every verification with its tolerance.
    CheckAll(Options),
}

/// Bad flags or configuration.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// A tolerance failed; carries the summary line.
#[derive(Debug)]
pub struct CheckFailed(pub String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    if err.downcast_ref::<CheckFailed>().is_some() {
        return 3;
    }
    match err.downcast_ref::<freeze_rmt::Error>() {
        Some(e) if e.is_domain() => 2,
        Some(_) => 3,
        None => 1,
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("FREEZE_RMT_THREADS") {
        let n: usize = v.parse().map_err(|_| UsageError(format!("FREEZE_RMT_THREADS = '{v}' is not a positive integer")))?;
        if n == 0 {
            return Err(UsageError("FREEZE_RMT_THREADS must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<String> {
    configure_threads()?;
    let (options, handler): (Options, fn(&RunConfig) -> anyhow::Result<String>) = match cli.command {
        Command::Zeros(o) => (o, commands::zeros),
        Command::Covariance(o) => (o, commands::covariance),
        Command::Softedge(o) => (o, commands::softedge),
        Command::Profile(o) => (o, commands::profile),
        Command::Sample(o) => (o, commands::sample_cmd),
        Command::Airy(o) => (o, commands::airy_cmd),
        Command::CheckAll(o) => (o, checks::check_all),
    };
    let cfg = RunConfig::resolve(options)?;
    handler(&cfg)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
