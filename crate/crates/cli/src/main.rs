//! `blockade`: data generation for the driven Jaynes-Cummings blockade breakdown.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use config::{Overrides, RunConfig};
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<blockade_core::Error> for CliError {
    fn from(e: blockade_core::Error) -> Self {
        use blockade_core::Error as E;
        match e {
            E::ThresholdViolation { .. } | E::InvalidArgument(_) | E::ParameterMismatch { .. } | E::OrderedWithoutDamping => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "blockade", version, about = "Photon-blockade breakdown in the driven Jaynes-Cummings model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Overrides,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quasienergies and displacements over an eps grid.
    Spectrum,
    /// Exact vs asymptotic matrix elements and the interbranch table.
    MatelCheck,
    /// Steady-state distributions over a p grid.
    Steady,
    /// Steady-state observables over an eps grid and their exponents.
    Observables,
    /// Semiclassical fixed points, stability and optional trajectories.
    Meanfield,
    /// Biased hopping model and Kolmogorov cycles.
    Toy,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::MatelCheck => "matel-check",
            Command::Steady => "steady",
            Command::Observables => "observables",
            Command::Meanfield => "meanfield",
            Command::Toy => "toy",
        }
    }
}

fn run(cli: &Cli) -> Result<Vec<std::path::PathBuf>, CliError> {
    let cfg = RunConfig::resolve(cli.command.name(), &cli.flags)?;
    if let Some(jobs) = cfg.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().map_err(|e| CliError::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Spectrum => commands::spectrum(&cfg),
        Command::MatelCheck => commands::matel_check(&cfg),
        Command::Steady => commands::steady(&cfg),
        Command::Observables => commands::observables(&cfg),
        Command::Meanfield => commands::meanfield(&cfg),
        Command::Toy => commands::toy(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BLOCKADE_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("blockade: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
