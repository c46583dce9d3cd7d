//! Cleartext connection opening followed by the DH exchange.
//!
//! 1. device → server: hello, the device ID as 8-byte big-endian signed (−1 when unregistered)
//! 2. server → device: ack, `port (u32 BE) ‖ 128 zero bytes`; port 0 means refused
//! 3. device → server: the device's ephemeral DH public value (128 bytes)
//! 4. server → device: sealed [`Message::Welcome`] carrying the device ID

use std::io::{Read, Write};

use rand::RngCore;

use crate::dh::{DhEphemeral, DhServerPublic, DhStaticKeyPair};
use crate::framing::SecureChannel;
use crate::wire::Message;
use crate::{ChannelError, Result};

/// ID sent by a device that has not been registered yet.
pub const UNREGISTERED_ID: i64 = -1;
pub const HELLO_LEN: usize = 8;
/// Width of the DH slot in the ack, always zero with a static server key.
pub const ACK_DH_LEN: usize = 128;

pub fn write_hello<W: Write>(w: &mut W, device_id: i64) -> Result<()> {
    w.write_all(&device_id.to_be_bytes())?;
    w.flush()?;
    Ok(())
}

pub fn read_hello<R: Read>(r: &mut R) -> Result<i64> {
    let mut buf = [0u8; HELLO_LEN];
    r.read_exact(&mut buf)?;
    Ok(i64::from_be_bytes(buf))
}

/// Sends the ack; `port` must be nonzero.
pub fn write_ack<W: Write>(w: &mut W, port: u16) -> Result<()> {
    assert_ne!(port, 0, "port 0 is reserved for refusal");
    send_ack(w, u32::from(port))
}

pub fn write_refusal<W: Write>(w: &mut W) -> Result<()> {
    send_ack(w, 0)
}

fn send_ack<W: Write>(w: &mut W, port: u32) -> Result<()> {
    let mut buf = port.to_be_bytes().to_vec();
    buf.extend_from_slice(&[0u8; ACK_DH_LEN]);
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

/// Reads the ack and returns the announced port, or [`ChannelError::Refused`].
pub fn read_ack<R: Read>(r: &mut R) -> Result<u16> {
    let mut buf = [0u8; 4 + ACK_DH_LEN];
    r.read_exact(&mut buf)?;
    let port = u32::from_be_bytes(buf[..4].try_into().expect("4 bytes"));
    match port {
        0 => Err(ChannelError::Refused),
        p => u16::try_from(p).map_err(|_| ChannelError::BadFrame(format!("ack port {p} out of range"))),
    }
}

/// Device side: hello, ack, DH, welcome. Returns the session and the ID the
/// server assigned (equal to `device_id` unless registering).
pub fn client_handshake<S: Read + Write, R: RngCore + ?Sized>(
    mut stream: S,
    device_id: i64,
    server: &DhServerPublic,
    rng: &mut R,
) -> Result<(SecureChannel<S>, i64)> {
    write_hello(&mut stream, device_id)?;
    read_ack(&mut stream)?;
    let eph = DhEphemeral::generate(&server.group, rng);
    stream.write_all(&server.group.encode(eph.public()))?;
    stream.flush()?;
    let keys = eph.agree(server)?;
    let mut channel = SecureChannel::new(stream, keys);
    match channel.recv()? {
        Message::Welcome { device_id: assigned } => {
            if device_id != UNREGISTERED_ID && assigned != device_id {
                return Err(ChannelError::Wire(format!("server welcomed ID {assigned}, expected {device_id}")));
            }
            if assigned < 0 {
                return Err(ChannelError::Wire(format!("server assigned invalid ID {assigned}")));
            }
            Ok((channel, assigned))
        }
        other => Err(ChannelError::Unexpected { expected: "welcome", got: other.name().into() }),
    }
}

/// Server side after the ack: reads the device's DH value, derives the
/// session and sends the welcome.
pub fn server_session<S: Read + Write>(
    mut stream: S,
    static_key: &DhStaticKeyPair,
    device_id: i64,
) -> Result<SecureChannel<S>> {
    let group = static_key.group();
    let mut buf = vec![0u8; group.element_len()];
    stream.read_exact(&mut buf)?;
    let device_public = group.decode(&buf)?;
    let keys = static_key.agree(&device_public)?;
    let mut channel = SecureChannel::new(stream, keys);
    channel.send(&Message::Welcome { device_id })?;
    Ok(channel)
}
