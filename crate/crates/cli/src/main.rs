//! `nhspec`: disc-area spectra of twisted acceleration-enlarged
//! Newton-Hooke space-times.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use clap::error::ErrorKind;

use nhspec_core::Execution;

use config::{RunConfig, CONFIG_ENV};
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "nhspec", version, about = "Disc-area spectra of twisted Newton-Hooke space-times")]
struct Cli {
    /// JSON config file; defaults to $NHSPEC_CONFIG
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Run the numerical core on one thread
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate f(t) and the area quantum at one time or on a grid
    #[command(allow_negative_numbers = true)]
    Eval(RunConfig),
    /// Area eigenvalues s_n for n = 0..=n_max
    #[command(allow_negative_numbers = true)]
    Spectrum(RunConfig),
    /// Check closed-form matching times against a numerical root scan
    #[command(allow_negative_numbers = true)]
    Match(RunConfig),
    /// Run a verification suite
    #[command(allow_negative_numbers = true)]
    Verify(RunConfig),
    /// Convergence of f towards its large-tau monomial
    #[command(allow_negative_numbers = true)]
    Limit(RunConfig),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let path = cli.config.or_else(|| std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
    let base = match path {
        Some(p) => RunConfig::load(&p)?,
        None => RunConfig::default(),
    };
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    match cli.command {
        Command::Eval(flags) => commands::eval(&base.overlay(flags)),
        Command::Spectrum(flags) => commands::spectrum_cmd(&base.overlay(flags)),
        Command::Match(flags) => commands::match_cmd(&base.overlay(flags), exec),
        Command::Verify(flags) => commands::verify(&base.overlay(flags), exec),
        Command::Limit(flags) => commands::limit(&base.overlay(flags)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nhspec: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
