//! Transport for MOVA devices: semi-static Diffie-Hellman, AES-128-CBC sealed
//! frames and the message codec used inside them.

pub mod cipher;
pub mod dh;
mod error;
pub mod framing;
pub mod handshake;
pub mod wire;

pub use cipher::{Frame, Role, SessionKeys};
pub use dh::{dh_agree, DhEphemeral, DhGroup, DhServerPublic, DhStaticKeyPair, DH_PRIVATE_FILE, DH_PUBLIC_FILE};
pub use error::{ChannelError, Result};
pub use framing::{read_frame, write_frame, SecureChannel, MAX_FRAME_LEN};
pub use handshake::{
    client_handshake, read_ack, read_hello, server_session, write_ack, write_hello, write_refusal, UNREGISTERED_ID,
};
pub use wire::Message;
