//! Length-prefixed frames on a byte stream and the sealed channel built on them.
//!
//! Wire form: `len (u32 BE) ‖ iv (16) ‖ ciphertext (len - 16)`.

use std::io::{Read, Write};

use rand::rngs::OsRng;

use crate::cipher::{Frame, SessionKeys, BLOCK_LEN, IV_LEN};
use crate::wire::Message;
use crate::{ChannelError, Result};

/// Largest accepted frame length (the `len` field).
pub const MAX_FRAME_LEN: usize = 1 << 20;

pub fn write_frame<W: Write>(w: &mut W, frame: &Frame) -> Result<()> {
    let len = IV_LEN + frame.ciphertext.len();
    if len > MAX_FRAME_LEN {
        return Err(ChannelError::BadFrame(format!("frame of {len} bytes exceeds limit")));
    }
    let mut buf = Vec::with_capacity(4 + len);
    buf.extend_from_slice(&(len as u32).to_be_bytes());
    buf.extend_from_slice(&frame.iv);
    buf.extend_from_slice(&frame.ciphertext);
    w.write_all(&buf)?;
    w.flush()?;
    Ok(())
}

/// Reads one frame, validating the length before allocating.
pub fn read_frame<R: Read>(r: &mut R) -> Result<Frame> {
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let len = u32::from_be_bytes(len) as usize;
    if len > MAX_FRAME_LEN || len < IV_LEN + BLOCK_LEN || (len - IV_LEN) % BLOCK_LEN != 0 {
        return Err(ChannelError::BadFrame(format!("invalid frame length {len}")));
    }
    let mut iv = [0u8; IV_LEN];
    r.read_exact(&mut iv)?;
    let mut ciphertext = vec![0u8; len - IV_LEN];
    r.read_exact(&mut ciphertext)?;
    Ok(Frame { iv, ciphertext })
}

/// An established session over a stream: every message is sealed.
pub struct SecureChannel<S> {
    stream: S,
    keys: SessionKeys,
}

impl<S> std::fmt::Debug for SecureChannel<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SecureChannel").field("keys", &self.keys).finish_non_exhaustive()
    }
}

impl<S: Read + Write> SecureChannel<S> {
    pub fn new(stream: S, keys: SessionKeys) -> Self {
        Self { stream, keys }
    }

    pub fn send(&mut self, message: &Message) -> Result<()> {
        let frame = self.keys.seal(&message.encode(), &mut OsRng);
        write_frame(&mut self.stream, &frame)
    }

    pub fn recv(&mut self) -> Result<Message> {
        let frame = read_frame(&mut self.stream)?;
        Message::decode(&self.keys.unseal(&frame)?)
    }

    pub fn keys(&self) -> &SessionKeys {
        &self.keys
    }

    pub fn get_ref(&self) -> &S {
        &self.stream
    }

    pub fn into_inner(self) -> S {
        self.stream
    }
}
