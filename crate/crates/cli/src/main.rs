use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod error;
mod output;

use args::{Cli, Command, EstimateCommand};
use error::CliError;

const THREADS_ENV: &str = "EXTREMALDEP_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| CliError::Threads(format!("expected a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Threads(e.to_string()))
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Report(a) => commands::report(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Estimate(EstimateCommand::Blocks(a)) => commands::blocks(a),
        Command::Estimate(EstimateCommand::Runs(a)) => commands::runs(a),
        Command::Estimate(EstimateCommand::Gamma(a)) => commands::gamma(a),
        Command::Verify(a) => commands::verify(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
