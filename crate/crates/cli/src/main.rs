use std::process::ExitCode;

use circsync_cli::{run_cli, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_cli(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("circsync: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
