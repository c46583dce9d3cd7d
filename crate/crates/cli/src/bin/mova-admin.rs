use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mova_cli::commands;
use mova_cli::AdminClient;

/// Headless client for the server's admin API.
#[derive(Parser)]
#[command(name = "mova-admin", version)]
struct Cli {
    /// Admin API base URL.
    #[arg(long, default_value = "http://127.0.0.1:5001")]
    admin: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    Health,
    /// List all devices.
    Devices,
    Approve {
        id: i64,
    },
    Ban {
        id: i64,
    },
    Rehabilitate {
        id: i64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let admin = AdminClient::new(cli.admin);
    let result = match cli.command {
        Command::Health => admin.health(),
        Command::Devices => admin.devices().map(|devices| {
            for d in &devices {
                println!(
                    "{:>6}  {:<8} sign={} verify={} fail={}",
                    d.id, d.status, d.sign_count, d.verify_count, d.fail_count
                );
            }
            serde_json::Value::Null
        }),
        Command::Approve { id } => admin.approve(id),
        Command::Ban { id } => admin.ban(id),
        Command::Rehabilitate { id } => admin.rehabilitate(id),
    };
    match result {
        Ok(serde_json::Value::Null) => ExitCode::SUCCESS,
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("json"));
            ExitCode::SUCCESS
        }
        Err(e) => commands::fail("mova-admin", &e),
    }
}
