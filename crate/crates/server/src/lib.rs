//! The MOVA signer daemon.
//!
//! Devices connect over TCP, pass the handshake gate (registration, approval,
//! ban check) and then issue `k` (public key), `s` (sign) and `v` (verify)
//! commands over a sealed channel. Verification runs the confirmation proof
//! and falls back to the denial proof. An admin HTTP API exposes the device
//! registry and a live event stream.

pub mod admin;
pub mod config;
pub mod context;
mod daemon;
mod error;
pub mod events;
pub mod keystore;
pub mod registry;
mod session;

pub use config::ServerConfig;
pub use daemon::{start, ServerHandle};
pub use error::{RegistryError, ServerError};
pub use events::{Event, EventKind};
pub use registry::{DeviceRecord, DeviceStatus};
