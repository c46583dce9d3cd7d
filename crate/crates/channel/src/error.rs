use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("connection refused by server")]
    Refused,
    #[error("malformed frame: {0}")]
    BadFrame(String),
    #[error("decryption failed (bad padding)")]
    Decrypt,
    #[error("frame integrity check failed")]
    Integrity,
    #[error("malformed message: {0}")]
    Wire(String),
    #[error("degenerate Diffie-Hellman public value")]
    DegeneratePublic,
    #[error("key file: {0}")]
    KeyFile(String),
    #[error("unexpected message: expected {expected}, got {got}")]
    Unexpected { expected: &'static str, got: String },
}

impl From<mova_core::MovaError> for ChannelError {
    fn from(e: mova_core::MovaError) -> Self {
        ChannelError::KeyFile(e.to_string())
    }
}

pub type Result<T, E = ChannelError> = std::result::Result<T, E>;
