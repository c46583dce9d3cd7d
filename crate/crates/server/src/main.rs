use std::net::IpAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use mova_core::DomainParams;
use mova_server::config::{DEFAULT_ADMIN_PORT, DEFAULT_BAN_THRESHOLD, DEFAULT_PORT};
use mova_server::ServerConfig;

/// MOVA ticket signing server.
#[derive(Debug, Parser)]
#[command(name = "mova-server", version)]
struct Args {
    /// TCP port for device connections.
    #[arg(long, default_value_t = DEFAULT_PORT)]
    port: u16,
    /// Port for the admin HTTP API (bound to 127.0.0.1).
    #[arg(long, default_value_t = DEFAULT_ADMIN_PORT)]
    admin_port: u16,
    /// Address the device listener binds to.
    #[arg(long, default_value = "0.0.0.0")]
    host: IpAddr,
    /// Accept new devices without waiting for an administrator.
    #[arg(long)]
    auto_approve: bool,
    /// Directory for key files and the device registry.
    #[arg(long, default_value = ".")]
    data_dir: PathBuf,
    /// Failures after which a device is banned.
    #[arg(long, default_value_t = DEFAULT_BAN_THRESHOLD)]
    ban_threshold: u32,
    /// Seconds a new registration waits for approval.
    #[arg(long, default_value_t = 60)]
    approval_timeout: u64,
    /// Prime size in bits when a new MOVA key has to be generated.
    #[arg(long, default_value_t = 512)]
    prime_bits: u64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    let config = ServerConfig {
        host: args.host,
        port: args.port,
        admin_port: args.admin_port,
        ban_threshold: args.ban_threshold,
        auto_approve: args.auto_approve,
        data_dir: args.data_dir,
        approval_timeout: Duration::from_secs(args.approval_timeout),
        params: DomainParams { modulus_bits: args.prime_bits, ..DomainParams::default() },
        ..ServerConfig::default()
    };
    match mova_server::start(config) {
        Ok(handle) => {
            eprintln!("mova-server: devices on {}, admin API on {}", handle.device_addr(), handle.admin_url());
            handle.wait();
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("mova-server: {e}");
            ExitCode::FAILURE
        }
    }
}
