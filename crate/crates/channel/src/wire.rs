//! Application messages exchanged inside sealed frames.
//!
//! A message body is a one-byte tag followed by length-prefixed fields
//! (`u32 BE length ‖ bytes`). Lists carry a `u32 BE` count before their
//! items; bit vectors use the core bit packing.

use mova_core::bits::{pack_bits, unpack_bits};
use mova_core::commitment::{Digest32, DECOMMIT_LEN, DIGEST_LEN};
use mova_core::proofs::{CoGhiOpening, GhiOpening};
use mova_core::{BigUint, CoGhiChallenge, CoGhiReveal, GhiChallenge, GhiReveal};

use crate::{ChannelError, Result};

/// Upper bound on any list length read from the wire.
const MAX_ITEMS: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Message {
    /// Session established; carries the identifier assigned to the device.
    Welcome {
        device_id: i64,
    },
    GetKey,
    /// Public key in key-file text form.
    PublicKey {
        key_file: String,
    },
    Sign {
        message: String,
    },
    Signature {
        bits: Vec<bool>,
    },
    Verify {
        message: String,
        bits: Vec<bool>,
    },
    GhiChallenge(GhiChallenge),
    GhiCommit {
        c: Digest32,
    },
    GhiReveal(GhiReveal),
    GhiOpen(GhiOpening),
    CoGhiChallenge(CoGhiChallenge),
    CoGhiCommit {
        c: Digest32,
    },
    CoGhiReveal(CoGhiReveal),
    CoGhiOpen(CoGhiOpening),
    /// The sender stops the current proof.
    Abort {
        reason: String,
    },
    Error {
        reason: String,
    },
}

mod tag {
    pub const WELCOME: u8 = b'W';
    pub const GET_KEY: u8 = b'k';
    pub const PUBLIC_KEY: u8 = b'K';
    pub const SIGN: u8 = b's';
    pub const SIGNATURE: u8 = b'S';
    pub const VERIFY: u8 = b'v';
    pub const GHI_CHALLENGE: u8 = 0x11;
    pub const GHI_COMMIT: u8 = 0x12;
    pub const GHI_REVEAL: u8 = 0x13;
    pub const GHI_OPEN: u8 = 0x14;
    pub const COGHI_CHALLENGE: u8 = 0x21;
    pub const COGHI_COMMIT: u8 = 0x22;
    pub const COGHI_REVEAL: u8 = 0x23;
    pub const COGHI_OPEN: u8 = 0x24;
    pub const ABORT: u8 = 0x00;
    pub const ERROR: u8 = b'E';
}

impl Message {
    pub fn name(&self) -> &'static str {
        match self {
            Message::Welcome { .. } => "welcome",
            Message::GetKey => "get-key",
            Message::PublicKey { .. } => "public-key",
            Message::Sign { .. } => "sign",
            Message::Signature { .. } => "signature",
            Message::Verify { .. } => "verify",
            Message::GhiChallenge(_) => "confirm-challenge",
            Message::GhiCommit { .. } => "confirm-commit",
            Message::GhiReveal(_) => "confirm-reveal",
            Message::GhiOpen(_) => "confirm-open",
            Message::CoGhiChallenge(_) => "deny-challenge",
            Message::CoGhiCommit { .. } => "deny-commit",
            Message::CoGhiReveal(_) => "deny-reveal",
            Message::CoGhiOpen(_) => "deny-open",
            Message::Abort { .. } => "abort",
            Message::Error { .. } => "error",
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut w = Writer::default();
        match self {
            Message::Welcome { device_id } => {
                w.tag(tag::WELCOME);
                w.field(&device_id.to_be_bytes());
            }
            Message::GetKey => w.tag(tag::GET_KEY),
            Message::PublicKey { key_file } => {
                w.tag(tag::PUBLIC_KEY);
                w.field(key_file.as_bytes());
            }
            Message::Sign { message } => {
                w.tag(tag::SIGN);
                w.field(message.as_bytes());
            }
            Message::Signature { bits } => {
                w.tag(tag::SIGNATURE);
                w.bits(bits);
            }
            Message::Verify { message, bits } => {
                w.tag(tag::VERIFY);
                w.field(message.as_bytes());
                w.bits(bits);
            }
            Message::GhiChallenge(ch) => {
                w.tag(tag::GHI_CHALLENGE);
                w.uints(&ch.u);
            }
            Message::GhiCommit { c } => {
                w.tag(tag::GHI_COMMIT);
                w.field(c);
            }
            Message::GhiReveal(rv) => {
                w.tag(tag::GHI_REVEAL);
                w.uints(&rv.r);
                w.count(rv.a.len());
                rv.a.iter().for_each(|row| w.bits(row));
            }
            Message::GhiOpen(op) => {
                w.tag(tag::GHI_OPEN);
                w.bits(&op.answers);
                w.field(&op.decommit);
            }
            Message::CoGhiChallenge(ch) => {
                w.tag(tag::COGHI_CHALLENGE);
                w.count(ch.u.len());
                ch.u.iter().for_each(|row| w.uints(row));
                w.count(ch.w.len());
                ch.w.iter().for_each(|row| w.bits(row));
            }
            Message::CoGhiCommit { c } => {
                w.tag(tag::COGHI_COMMIT);
                w.field(c);
            }
            Message::CoGhiReveal(rv) => {
                w.tag(tag::COGHI_REVEAL);
                w.count(rv.r.len());
                rv.r.iter().for_each(|row| w.uints(row));
                w.count(rv.a.len());
                for plane in &rv.a {
                    w.count(plane.len());
                    plane.iter().for_each(|row| w.bits(row));
                }
            }
            Message::CoGhiOpen(op) => {
                w.tag(tag::COGHI_OPEN);
                w.bits(&op.lambda);
                w.field(&op.decommit);
            }
            Message::Abort { reason } => {
                w.tag(tag::ABORT);
                w.field(reason.as_bytes());
            }
            Message::Error { reason } => {
                w.tag(tag::ERROR);
                w.field(reason.as_bytes());
            }
        }
        w.0
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let (&t, rest) = bytes.split_first().ok_or_else(|| wire("empty message"))?;
        let mut r = Reader(rest);
        let msg = match t {
            tag::WELCOME => Message::Welcome { device_id: i64::from_be_bytes(r.array::<8>()?) },
            tag::GET_KEY => Message::GetKey,
            tag::PUBLIC_KEY => Message::PublicKey { key_file: r.string()? },
            tag::SIGN => Message::Sign { message: r.string()? },
            tag::SIGNATURE => Message::Signature { bits: r.bits()? },
            tag::VERIFY => Message::Verify { message: r.string()?, bits: r.bits()? },
            tag::GHI_CHALLENGE => Message::GhiChallenge(GhiChallenge { u: r.uints()? }),
            tag::GHI_COMMIT => Message::GhiCommit { c: r.array::<DIGEST_LEN>()? },
            tag::GHI_REVEAL => {
                let rr = r.uints()?;
                let a = r.list(|r| r.bits())?;
                Message::GhiReveal(GhiReveal { r: rr, a })
            }
            tag::GHI_OPEN => Message::GhiOpen(GhiOpening { answers: r.bits()?, decommit: r.array::<DECOMMIT_LEN>()? }),
            tag::COGHI_CHALLENGE => {
                let u = r.list(|r| r.uints())?;
                let w = r.list(|r| r.bits())?;
                Message::CoGhiChallenge(CoGhiChallenge { u, w })
            }
            tag::COGHI_COMMIT => Message::CoGhiCommit { c: r.array::<DIGEST_LEN>()? },
            tag::COGHI_REVEAL => {
                let rr = r.list(|r| r.uints())?;
                let a = r.list(|r| r.list(|r| r.bits()))?;
                Message::CoGhiReveal(CoGhiReveal { r: rr, a })
            }
            tag::COGHI_OPEN => {
                Message::CoGhiOpen(CoGhiOpening { lambda: r.bits()?, decommit: r.array::<DECOMMIT_LEN>()? })
            }
            tag::ABORT => Message::Abort { reason: r.string()? },
            tag::ERROR => Message::Error { reason: r.string()? },
            other => return Err(wire(format!("unknown tag 0x{other:02x}"))),
        };
        if !r.0.is_empty() {
            return Err(wire("trailing bytes"));
        }
        Ok(msg)
    }
}

fn wire(msg: impl Into<String>) -> ChannelError {
    ChannelError::Wire(msg.into())
}

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn tag(&mut self, t: u8) {
        self.0.push(t);
    }

    fn count(&mut self, n: usize) {
        self.0.extend_from_slice(&(n as u32).to_be_bytes());
    }

    fn field(&mut self, bytes: &[u8]) {
        self.count(bytes.len());
        self.0.extend_from_slice(bytes);
    }

    fn bits(&mut self, bits: &[bool]) {
        self.field(&pack_bits(bits));
    }

    fn uints(&mut self, xs: &[BigUint]) {
        self.count(xs.len());
        xs.iter().for_each(|x| self.field(&x.to_bytes_be()));
    }
}

struct Reader<'a>(&'a [u8]);

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.0.len() < n {
            return Err(wire("truncated message"));
        }
        let (head, tail) = self.0.split_at(n);
        self.0 = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn field(&mut self) -> Result<&'a [u8]> {
        let len = self.u32()? as usize;
        self.take(len)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        self.field()?.try_into().map_err(|_| wire(format!("expected a {N}-byte field")))
    }

    fn string(&mut self) -> Result<String> {
        String::from_utf8(self.field()?.to_vec()).map_err(|_| wire("text field is not UTF-8"))
    }

    fn bits(&mut self) -> Result<Vec<bool>> {
        unpack_bits(self.field()?).ok_or_else(|| wire("malformed bit vector"))
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        let n = self.u32()?;
        if n > MAX_ITEMS {
            return Err(wire("list too long"));
        }
        // Every item occupies at least four bytes, which bounds the allocation.
        if n as usize > self.0.len() / 4 {
            return Err(wire("truncated message"));
        }
        (0..n).map(|_| item(self)).collect()
    }

    fn uints(&mut self) -> Result<Vec<BigUint>> {
        self.list(|r| Ok(BigUint::from_bytes_be(r.field()?)))
    }
}
