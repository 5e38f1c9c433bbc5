use std::io;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use magd::cli::{execute, Cli, Command};

const EXIT_USAGE: u8 = 1;
const EXIT_DIVERGED: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let Command::Run(args) = cli.command;
    let inv = match args.resolve() {
        Ok(inv) => inv,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match execute(&inv, io::stdout().lock()) {
        Ok(outcome) if outcome.diverged() => ExitCode::from(EXIT_DIVERGED),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_divergence() {
                ExitCode::from(EXIT_DIVERGED)
            } else {
                ExitCode::from(EXIT_USAGE)
            }
        }
    }
}
