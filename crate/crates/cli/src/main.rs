use std::process::ExitCode;

use clap::Parser;
use fockbound_cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(fockbound_cli::run(&cli))
}
