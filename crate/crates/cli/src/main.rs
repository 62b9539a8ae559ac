//! `explab`: structure, rates and simulations for agnostic PAC learning with
//! threshold classes.

mod commands;
mod output;
mod scenario_file;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use commands::Ell;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] explab_core::Error),
    #[error("{0}")]
    Io(String),
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use explab_core::Error as E;
        match self {
            Self::Input(_) => 2,
            Self::Core(E::Domain(_) | E::Argument(_) | E::Unsupported(_)) => 2,
            Self::Core(E::Assumption(_)) => 3,
            Self::Core(E::Resource(_)) => 4,
            Self::Core(E::Numerical(_) | E::Internal(_)) | Self::Io(_) | Self::Check(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Pac,
    Conditional,
    Decomposition,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Self::Pac => "pac",
            Self::Conditional => "conditional",
            Self::Decomposition => "decomposition",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "explab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// GLPs, dominating regions, alphabet and error exponents as JSON.
    Analyze {
        scenario: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Monte Carlo estimates over a grid of sample sizes as CSV.
    Simulate {
        scenario: PathBuf,
        #[arg(long, default_value = "20:200:20")]
        n_grid: String,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Mode::Conditional)]
        mode: Mode,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Exact union probabilities and shifted lower bounds for n = 1..N as CSV.
    Oracle {
        scenario: PathBuf,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value = "auto")]
        ell: Ell,
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Analyze { scenario, out } => commands::analyze(&scenario, &out),
        Command::Simulate {
            scenario,
            n_grid,
            trials,
            seed,
            mode,
            out,
        } => {
            let grid = commands::parse_grid(&n_grid)?;
            commands::simulate(&scenario, &grid, trials, seed, mode, &out)
        }
        Command::Oracle {
            scenario,
            n_max,
            ell,
            out,
        } => commands::oracle(&scenario, n_max, ell, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
