//! Device-side MOVA clients.
//!
//! [`DeviceClient`] holds a device's persisted state and opens one sealed
//! session per operation: fetching the public key, having a ticket signed and
//! verifying a presented ticket through the confirmation and denial proofs.

pub mod admin;
pub mod client;
pub mod commands;
mod error;
pub mod state;
pub mod stations;
pub mod ticket;

pub use admin::AdminClient;
pub use client::{DeviceClient, Session, Verdict};
pub use error::{ClientError, Result};
pub use state::DeviceState;
pub use ticket::{TicketRequest, TravelClass};
