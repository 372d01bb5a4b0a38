//! `chansim` scenario runner.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use output::Status;

#[derive(Parser, Debug)]
#[command(name = "chansim", version, about = "Classical simulation of qubit channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a measurement protocol analytically and by sampling, against the Born rule.
    Simulate(Common),
    /// Decompose the receiver's effective measurement into extremal measurements.
    Decompose(Common),
    /// Estimate the depolarizing parameter reached with m-bit codebooks.
    Depolarize(Common),
    /// Collapse an interactive protocol to one round and compare distributions.
    Collapse(Common),
    /// Sweep the best finite-message error for families of target states.
    Nogo(Common),
    /// Random access code comparison between classical, quantum and simulated channels.
    Rac(Common),
}

/// Flags shared by every command.
#[derive(Args, Clone, Debug, Default)]
pub struct Common {
    /// TOML config file; omitted keys take their defaults.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Overrides the config sample count.
    #[arg(long, value_name = "N")]
    pub samples: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(output::EXIT_MALFORMED),
            };
        }
    };
    let result = match &cli.command {
        Command::Simulate(c) => commands::simulate::run(c),
        Command::Decompose(c) => commands::decompose::run(c),
        Command::Depolarize(c) => commands::depolarize::run(c),
        Command::Collapse(c) => commands::collapse::run(c),
        Command::Nogo(c) => commands::nogo::run(c),
        Command::Rac(c) => commands::rac::run(c),
    };
    match result {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::Floor) => ExitCode::from(output::EXIT_FLOOR),
        Ok(Status::Violation(msg)) => {
            eprintln!("invariant violation: {msg}");
            ExitCode::from(output::EXIT_VIOLATION)
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
