//! `voromod` - lattice constellation labeling and BER measurement CLI.

mod commands;
mod matrix_io;
mod plot;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

/// Usage problems exit 1, invalid matrix input exits 2.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Matrix(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Matrix(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

pub type CliResult = Result<(), CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Parser)]
#[command(
    name = "voromod",
    version,
    about = "Voronoi constellation labeling toolkit for the A2/D4/E8 lattices",
    after_help = "Relative output paths are resolved under $VOROMOD_OUT_DIR when it is set."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hamming density of a labeling, its neighbor offsets and the bound
    Hd(commands::HdArgs),
    /// Search the labeling group by Hamming descent (or ascent)
    Descent(commands::DescentArgs),
    /// Sweep Eb/N0 and write a BER/LER curve as CSV (optionally SVG)
    Ber(commands::BerArgs),
    /// Order of the labeling group G_n(r)
    Order(commands::OrderArgs),
    /// Greedy lower bound on Hamming density for a lattice
    Bound(commands::BoundArgs),
    /// Exhaustively enumerate G_n(r) (small cases)
    Enumerate(commands::EnumerateArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{err}");
                    return ExitCode::SUCCESS;
                }
                _ => 1,
            };
            eprint!("{err}");
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Hd(args) => commands::run_hd(args),
        Command::Descent(args) => commands::run_descent(args),
        Command::Ber(args) => commands::run_ber(args),
        Command::Order(args) => commands::run_order(args),
        Command::Bound(args) => commands::run_bound(args),
        Command::Enumerate(args) => commands::run_enumerate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Matrix(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
