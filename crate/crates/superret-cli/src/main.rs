//! `superret` — figure grids, sweeps, greedy placement, and validation for
//! superradiant resonance energy transfer in vacuum.
//!
//! Exit codes: 0 success, 2 validation failure, 3 configuration error,
//! 4 I/O error.

mod commands;
mod config;
mod output;

use clap::Parser;
use std::process::ExitCode;

use commands::{Fig1Args, Fig2Args, Fig3Args, Fig4Args, GreedyArgs, ValidateArgs};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config file, or inconsistent parameters.
    Config(String),
    /// Filesystem trouble.
    Io(String),
}

impl From<superret::Error> for CliError {
    fn from(e: superret::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "superret",
    version,
    about = "Superradiant resonance-energy-transfer maps, sweeps, and checks",
    after_help = "All geometry is dimensionless (X = 2 pi distance / wavelength).\n\
                  CSV grids carry a fixed header row and use `nan` for masked cells."
)]
enum Cli {
    /// Two-donor fidelity map: donor 1 fixed, donor 2 swept over a square grid
    Fig1(Fig1Args),
    /// Ring of donors, acceptor swept over a square grid; one file per donor count
    Fig2(Fig2Args),
    /// Two spheres vs one volume-matched sphere over a separation sweep
    Fig3(Fig3Args),
    /// Hollow-shell fidelity over the (alpha, beta) radius plane
    Fig4(Fig4Args),
    /// Place donors one by one at the point of maximum fidelity
    Greedy(GreedyArgs),
    /// Run the validation suite and emit a JSON report (exit 2 on failure)
    Validate(ValidateArgs),
}

fn run() -> Result<i32, CliError> {
    let cli = Cli::try_parse().map_err(|e| {
        // clap already formats help/version nicely; pass those through.
        if e.kind() == clap::error::ErrorKind::DisplayHelp
            || e.kind() == clap::error::ErrorKind::DisplayVersion
        {
            let _ = e.print();
            std::process::exit(0);
        }
        CliError::Config(e.to_string())
    })?;
    match &cli {
        Cli::Fig1(args) => commands::cmd_fig1(args),
        Cli::Fig2(args) => commands::cmd_fig2(args),
        Cli::Fig3(args) => commands::cmd_fig3(args),
        Cli::Fig4(args) => commands::cmd_fig4(args),
        Cli::Greedy(args) => commands::cmd_greedy(args),
        Cli::Validate(args) => commands::cmd_validate(args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(0) => ExitCode::SUCCESS,
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("superret: {e}");
            match e {
                CliError::Config(_) => ExitCode::from(3),
                CliError::Io(_) => ExitCode::from(4),
            }
        }
    }
}
