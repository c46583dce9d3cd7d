use std::net::{IpAddr, Ipv4Addr};
use std::path::PathBuf;
use std::time::Duration;

use mova_core::DomainParams;

use crate::error::ServerError;

pub const DEFAULT_PORT: u16 = 5000;
pub const DEFAULT_ADMIN_PORT: u16 = 5001;
pub const DEFAULT_BAN_THRESHOLD: u32 = 10;
pub const DEFAULT_APPROVAL_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone)]
pub struct ServerConfig {
    /// Address the device listener binds to.
    pub host: IpAddr,
    pub port: u16,
    /// The admin API always binds to loopback.
    pub admin_port: u16,
    pub ban_threshold: u32,
    pub auto_approve: bool,
    /// Directory holding key files and the device registry.
    pub data_dir: PathBuf,
    pub approval_timeout: Duration,
    /// Read timeout for a connected device between messages.
    pub idle_timeout: Duration,
    /// Parameters used when generating a fresh MOVA key.
    pub params: DomainParams,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            host: IpAddr::V4(Ipv4Addr::UNSPECIFIED),
            port: DEFAULT_PORT,
            admin_port: DEFAULT_ADMIN_PORT,
            ban_threshold: DEFAULT_BAN_THRESHOLD,
            auto_approve: false,
            data_dir: PathBuf::from("."),
            approval_timeout: DEFAULT_APPROVAL_TIMEOUT,
            idle_timeout: Duration::from_secs(120),
            params: DomainParams::default(),
        }
    }
}

impl ServerConfig {
    /// Loopback, ephemeral ports, auto-approval: the shape every test wants.
    pub fn for_tests(data_dir: impl Into<PathBuf>) -> Self {
        Self {
            host: IpAddr::V4(Ipv4Addr::LOCALHOST),
            port: 0,
            admin_port: 0,
            auto_approve: true,
            data_dir: data_dir.into(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ServerError> {
        if self.port != 0 && self.port == self.admin_port {
            return Err(ServerError::Config(format!("device and admin ports are both {}", self.port)));
        }
        if self.ban_threshold == 0 {
            return Err(ServerError::Config("ban threshold must be positive".into()));
        }
        self.params.validate()?;
        Ok(())
    }
}
