use std::process::ExitCode;

use clap::Parser;
use mova_cli::commands::{self, VerifyArgs};
use mova_cli::Verdict;

/// Verifies a ticket with the server. Exit status: 0 valid, 1 invalid, 2 error.
#[derive(Parser)]
#[command(name = "mova-verify", version)]
struct Cli {
    #[command(flatten)]
    args: VerifyArgs,
}

fn main() -> ExitCode {
    match commands::verify(&Cli::parse().args) {
        Ok(v) => {
            println!("{}", if v == Verdict::Valid { "Valid" } else { "Invalid" });
            commands::verdict_exit(v)
        }
        Err(e) => commands::fail("mova-verify", &e),
    }
}
