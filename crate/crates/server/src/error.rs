use std::io;
use std::path::PathBuf;

use mova_channel::ChannelError;
use mova_core::MovaError;
use thiserror::Error;

use crate::registry::DeviceStatus;

#[derive(Debug, Error)]
pub enum ServerError {
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: String, source: io::Error },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("key store {path}: {reason}")]
    KeyStore { path: PathBuf, reason: String },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Mova(#[from] MovaError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("unknown device {0}")]
    NotFound(i64),
    #[error("device {id} is {from}; cannot {action}")]
    IllegalTransition { id: i64, from: DeviceStatus, action: &'static str },
    #[error("registry i/o: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt registry: {0}")]
    Corrupt(String),
}

/// Why a device session ended early.
#[derive(Debug, Error)]
pub(crate) enum SessionError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error("protocol violation: {0}")]
    Violation(String),
}
