//! `logson` — batch front-end for the logarithmic Schrödinger laboratory.
//!
//! One command per invocation; results land in a CSV or JSON table with a
//! JSON metadata sidecar, and a one-line summary goes to standard output.
//! Exit codes: 0 success, 1 validation error, 2 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

mod config;
mod error;
mod output;
mod run;

use config::{Command, OutputFormat};

#[derive(Debug, Parser)]
#[command(
    name = "logson",
    version,
    about = "Numerical laboratory for a logarithmic Schrödinger equation in a harmonic trap"
)]
struct Cli {
    /// Experiment to run; must match the `command` field of the config file.
    #[arg(value_enum)]
    command: Command,
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output table path (overrides `output_path` from the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Table format (overrides `output_format` from the config).
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Seed override for commands that draw random fields.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let invocation = run::Invocation {
        command: cli.command,
        config: cli.config,
        out: cli.out,
        format: cli.format,
        seed: cli.seed,
    };
    match run::run(&invocation) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}
