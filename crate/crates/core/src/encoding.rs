//! SMS form of signatures and tickets.

use crate::params::Alphabet;
use crate::sign::Signature;
use crate::{MovaError, Result};

/// Longest ticket that fits one SMS.
pub const MAX_TICKET_LEN: usize = 160;

/// Encodes the signature 5 bits per character, most significant bit first.
pub fn encode_signature(sig: &Signature, alphabet: &Alphabet) -> Result<String> {
    let bits = sig.bits();
    if bits.is_empty() || bits.len() % 5 != 0 {
        return Err(MovaError::SignatureLength { got: bits.len(), expected: bits.len().div_ceil(5).max(1) * 5 });
    }
    Ok(bits
        .chunks(5)
        .map(|chunk| {
            let index = chunk.iter().fold(0u8, |acc, &b| (acc << 1) | u8::from(b));
            alphabet.char_at(index)
        })
        .collect())
}

/// Inverse of [`encode_signature`]; every character must belong to `alphabet`.
pub fn decode_signature(text: &str, alphabet: &Alphabet) -> Result<Signature> {
    let mut bits = Vec::with_capacity(text.len() * 5);
    for c in text.chars() {
        let index = alphabet.index_of(c).ok_or(MovaError::BadCharacter(c))?;
        bits.extend((0..5).rev().map(|shift| index >> shift & 1 == 1));
    }
    if bits.is_empty() {
        return Err(MovaError::SignatureLength { got: 0, expected: 5 });
    }
    Ok(Signature::new(bits))
}

/// A journey message with its encoded signature, rendered as `<message> <signature>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ticket {
    message: String,
    signature_text: String,
}

impl Ticket {
    pub fn new(message: impl Into<String>, signature_text: impl Into<String>, alphabet: &Alphabet) -> Result<Self> {
        let message = message.into();
        let signature_text = signature_text.into();
        if message.is_empty() || !message.is_ascii() || message.chars().any(|c| c.is_ascii_control()) {
            return Err(MovaError::Ticket("message must be printable ASCII".into()));
        }
        if message.starts_with(' ') || message.ends_with(' ') {
            return Err(MovaError::Ticket("message must not start or end with a space".into()));
        }
        if signature_text.is_empty() {
            return Err(MovaError::Ticket("empty signature".into()));
        }
        if let Some(c) = signature_text.chars().find(|&c| !alphabet.contains(c)) {
            return Err(MovaError::BadCharacter(c));
        }
        let len = message.len() + 1 + signature_text.len();
        if len > MAX_TICKET_LEN {
            return Err(MovaError::Ticket(format!("ticket is {len} characters, limit {MAX_TICKET_LEN}")));
        }
        Ok(Self { message, signature_text })
    }

    pub fn from_signature(message: impl Into<String>, sig: &Signature, alphabet: &Alphabet) -> Result<Self> {
        Self::new(message, encode_signature(sig, alphabet)?, alphabet)
    }

    /// Splits on the last space: the message may itself contain spaces.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self> {
        let (message, sig) = text
            .trim_end_matches(['\r', '\n'])
            .rsplit_once(' ')
            .ok_or_else(|| MovaError::Ticket("missing signature separator".into()))?;
        Self::new(message, sig, alphabet)
    }

    pub fn message(&self) -> &str {
        &self.message
    }

    pub fn signature_text(&self) -> &str {
        &self.signature_text
    }

    pub fn signature(&self, alphabet: &Alphabet) -> Result<Signature> {
        decode_signature(&self.signature_text, alphabet)
    }

    pub fn render(&self) -> String {
        format!("{} {}", self.message, self.signature_text)
    }
}

impl std::fmt::Display for Ticket {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}", self.message, self.signature_text)
    }
}
