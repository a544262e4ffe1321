mod args;
mod commands;
mod config;
mod error;
mod expr;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn run() -> Result<(), CliError> {
    let argv = config::inject(std::env::args_os().collect()).map_err(|e| CliError::Usage(format!("{e:#}")))?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.print().map_err(anyhow::Error::from)?;
            return Ok(());
        }
        Err(e) => {
            let _ = e.print();
            return Err(CliError::Usage(String::new()));
        }
    };
    match &cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::LambdaScan(a) => commands::lambda_scan(a),
        Command::TableVerify(a) => commands::table_verify(a),
        Command::Integrate(a) => commands::integrate_cmd(a),
        Command::Propagate(a) => commands::propagate(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = match &e {
                CliError::Runtime(inner) => format!("{inner:#}"),
                other => other.to_string(),
            };
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            e.exit_code()
        }
    }
}
