//! `fscore`: command line front end for the forecast-scoring library.
//!
//! Exit codes: 0 on success, 2 for usage or input problems, 1 for
//! runtime failures.

pub mod args;
pub mod commands;
pub mod manifest;

use args::{Cli, Command};
use clap::Parser;
use commands::CliError;
use std::ffi::OsString;
use std::process::ExitCode;

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Score(a) => commands::cmd_score(a),
        Command::Regions(a) => commands::cmd_regions(a),
        Command::Exp1(a) => commands::cmd_exp1(a),
        Command::Exp2(a) => commands::cmd_exp2(a),
        Command::OddsConvert(a) => commands::cmd_odds_convert(a),
    }
}

/// Parse an explicit argv (first element is the program name) and run.
/// This is the entry point the reproducibility tests drive.
pub fn run_from<I, S>(argv: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    run(cli)
}

pub fn main_impl() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap prints help/version to stdout with code 0 and usage
        // errors to stderr with code 2.
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
