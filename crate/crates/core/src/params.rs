//! Domain parameters shared by signer and verifier.

use std::fmt;

use crate::{MovaError, Result};

/// The 32 signature characters: digits 2-9 and upper-case letters without `I` and `O`.
pub const DEFAULT_ALPHABET: &[u8; 32] = b"23456789ABCDEFGHJKLMNPQRSTUVWXYZ";

const CONFUSABLE: &[u8] = b"0Oo1Il";

/// Ordered set of 32 distinct ASCII characters; index `i` encodes the 5-bit value `i`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet([u8; 32]);

impl Alphabet {
    pub fn new(chars: &[u8]) -> Result<Self> {
        let table: [u8; 32] = chars
            .try_into()
            .map_err(|_| MovaError::InvalidParams(format!("alphabet needs 32 characters, got {}", chars.len())))?;
        for (i, c) in table.iter().enumerate() {
            if !c.is_ascii_graphic() {
                return Err(MovaError::InvalidParams(format!("non-printable alphabet byte {c:#04x}")));
            }
            if CONFUSABLE.contains(c) {
                return Err(MovaError::InvalidParams(format!("confusable character {:?}", *c as char)));
            }
            if table[..i].contains(c) {
                return Err(MovaError::InvalidParams(format!("duplicate character {:?}", *c as char)));
            }
        }
        Ok(Self(table))
    }

    pub fn char_at(&self, index: u8) -> char {
        self.0[usize::from(index)] as char
    }

    pub fn index_of(&self, c: char) -> Option<u8> {
        u8::try_from(c).ok().and_then(|b| self.0.iter().position(|&x| x == b)).map(|i| i as u8)
    }

    pub fn contains(&self, c: char) -> bool {
        self.index_of(c).is_some()
    }

    pub fn as_str(&self) -> &str {
        // Validated ASCII on construction.
        std::str::from_utf8(&self.0).expect("alphabet is ASCII")
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Self(*DEFAULT_ALPHABET)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet({:?})", self.as_str())
    }
}

/// Sizes and iteration counts of a MOVA instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainParams {
    /// Number of key-generator points.
    pub l_key: usize,
    /// Number of signature points (signature bits).
    pub l_sig: usize,
    /// Confirmation challenge batch size.
    pub i_con: usize,
    /// Denial challenge batch size.
    pub i_den: usize,
    /// Bit length of each secret prime.
    pub modulus_bits: u64,
    pub alphabet: Alphabet,
}

impl Default for DomainParams {
    fn default() -> Self {
        Self { l_key: 64, l_sig: 20, i_con: 20, i_den: 20, modulus_bits: 512, alphabet: Alphabet::default() }
    }
}

impl DomainParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [("l_key", self.l_key), ("l_sig", self.l_sig), ("i_con", self.i_con), ("i_den", self.i_den)];
        for (name, v) in positive {
            if v == 0 {
                return Err(MovaError::InvalidParams(format!("{name} must be positive")));
            }
        }
        if self.modulus_bits < 16 {
            return Err(MovaError::InvalidParams(format!(
                "modulus_bits must be at least 16, got {}",
                self.modulus_bits
            )));
        }
        Ok(())
    }

    /// Number of alphabet characters in an encoded signature.
    pub fn signature_chars(&self) -> usize {
        self.l_sig.div_ceil(5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let p = DomainParams::default();
        assert_eq!((p.l_sig, p.i_con, p.i_den, p.l_key), (20, 20, 20, 64));
        assert_eq!(p.modulus_bits, 512);
        assert_eq!(p.signature_chars(), 4);
        p.validate().unwrap();
    }

    #[test]
    fn default_alphabet_is_valid_and_unambiguous() {
        let a = Alphabet::new(DEFAULT_ALPHABET).unwrap();
        assert_eq!(a, Alphabet::default());
        for c in ['0', 'O', 'o', '1', 'I', 'l'] {
            assert!(!a.contains(c));
        }
        assert_eq!(a.char_at(0), '2');
        assert_eq!(a.char_at(31), 'Z');
    }

    #[test]
    fn alphabet_rejects_bad_tables() {
        assert!(Alphabet::new(b"ABC").is_err());
        let mut dup = *DEFAULT_ALPHABET;
        dup[1] = dup[0];
        assert!(Alphabet::new(&dup).is_err());
        let mut conf = *DEFAULT_ALPHABET;
        conf[5] = b'O';
        assert!(Alphabet::new(&conf).is_err());
    }

    #[test]
    fn rejects_small_modulus_and_zero_counts() {
        let mut p = DomainParams { modulus_bits: 15, ..Default::default() };
        assert!(p.validate().is_err());
        p.modulus_bits = 16;
        p.validate().unwrap();
        p.i_den = 0;
        assert!(p.validate().is_err());
    }
}
