use std::process::ExitCode;

use clap::Parser;
use mova_cli::commands::{self, DeviceArgs};

/// Fetches the server's public key and prints a summary for cross-checking.
#[derive(Parser)]
#[command(name = "mova-key", version)]
struct Cli {
    #[command(flatten)]
    device: DeviceArgs,
}

fn main() -> ExitCode {
    match commands::key(&Cli::parse().device) {
        Ok(summary) => {
            print!("{}", summary.render());
            ExitCode::SUCCESS
        }
        Err(e) => commands::fail("mova-key", &e),
    }
}
