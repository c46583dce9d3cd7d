use std::process::ExitCode;

use clap::Parser;
use mova_cli::commands::{self, IssueArgs};

/// Requests a signed ticket and prints it as SMS text.
#[derive(Parser)]
#[command(name = "mova-issue", version)]
struct Cli {
    #[command(flatten)]
    args: IssueArgs,
}

fn main() -> ExitCode {
    match commands::issue(&Cli::parse().args) {
        Ok(ticket) => {
            println!("{ticket}");
            ExitCode::SUCCESS
        }
        Err(e) => commands::fail("mova-issue", &e),
    }
}
