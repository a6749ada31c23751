//! `lrcone`: bound evaluation, exact-dynamics sweeps and the verification
//! harness from the command line.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Outcome;

/// Exit status contract.
const EXIT_DOMAIN: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_CHECKS_FAILED: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    let result = match &cli.command {
        Command::Bound(a) => commands::bound(a, &cli.out),
        Command::Fixpoint(a) => commands::fixpoint(a, &cli.out),
        Command::Simulate(a) => commands::simulate(a, &cli.out),
        Command::Verify(a) => commands::verify(a, &cli.out),
        Command::Compare(a) => commands::compare(a),
    };
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed(names)) => {
            eprintln!("error: checks failed: {}", names.join(", "));
            ExitCode::from(EXIT_CHECKS_FAILED)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_domain() { EXIT_DOMAIN } else { EXIT_CONFIG })
        }
    }
}
