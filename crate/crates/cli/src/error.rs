use std::io;

use mova_channel::ChannelError;
use mova_core::MovaError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Mova(#[from] MovaError),
    #[error("device state {path}: {reason}")]
    State { path: String, reason: String },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("server error: {0}")]
    Server(String),
    #[error("protocol failure: {0}")]
    Protocol(String),
    #[error("admin API: {0}")]
    Http(String),
}

pub type Result<T, E = ClientError> = std::result::Result<T, E>;
