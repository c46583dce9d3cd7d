//! Message mapping and signing.

use sha2::{Digest, Sha256};

use crate::derive::{derive_elements, SIG_LABEL};
use crate::keys::{PrivateKey, PublicKey};
use crate::scalar::ModScalar;
use crate::{MovaError, Result};

/// Longest message accepted for signing.
pub const MAX_MESSAGE_LEN: usize = 156;

/// SHA-256 of the message bytes; the seed for the message points.
pub fn map_message(message: &str) -> Result<[u8; 32]> {
    if message.is_empty() || message.len() > MAX_MESSAGE_LEN || !message.is_ascii() {
        return Err(MovaError::InvalidMessage { len: message.len(), max: MAX_MESSAGE_LEN });
    }
    Ok(Sha256::digest(message.as_bytes()).into())
}

/// `l_sig` homomorphism images of a message; bit set means `-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    bits: Vec<bool>,
}

impl Signature {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Copy with bit `index` inverted.
    pub fn with_flipped(&self, index: usize) -> Self {
        let mut bits = self.bits.clone();
        bits[index] = !bits[index];
        Self { bits }
    }
}

impl<T: ModScalar> PublicKey<T> {
    /// `X_mess`: the points a message's signature is evaluated on.
    pub fn message_points(&self, message: &str) -> Result<Vec<T>> {
        let seed = map_message(message)?;
        derive_elements(&seed, SIG_LABEL, self.params.l_sig, &self.n)
    }
}

/// Signs `message`: the secret homomorphism applied to the message points.
pub fn sign<T: ModScalar>(message: &str, sk: &PrivateKey<T>, pk: &PublicKey<T>) -> Result<Signature> {
    if !sk.matches(pk) {
        return Err(MovaError::InvalidParams("private key does not match public key".into()));
    }
    let points = pk.message_points(message)?;
    Ok(Signature::new(sk.image_bits(&points)?))
}

/// Signature check with the secret key; this is what the interactive proofs attest to.
pub fn is_valid_signature<T: ModScalar>(
    message: &str,
    signature: &Signature,
    sk: &PrivateKey<T>,
    pk: &PublicKey<T>,
) -> Result<bool> {
    Ok(sign(message, sk, pk)? == *signature)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keys::keypair_from_primes;
    use crate::params::DomainParams;

    #[test]
    fn map_message_contract() {
        assert_eq!(map_message("A").unwrap(), map_message("A").unwrap());
        assert_ne!(map_message("A").unwrap(), map_message("B").unwrap());
        assert_eq!(map_message("A").unwrap().len(), 32);
        assert!(map_message("").is_err());
        assert!(map_message(&"x".repeat(157)).is_err());
        assert!(map_message(&"x".repeat(156)).is_ok());
        assert!(map_message("caf\u{e9}").is_err());
    }

    #[test]
    fn tiny_signature_matches_euler_oracle() {
        let params = DomainParams { modulus_bits: 16, ..Default::default() };
        let (pk, sk) = keypair_from_primes(7u64, 11, b"k".to_vec(), params).unwrap();
        let sig = sign("MOVA|Lausanne|Geneve", &sk, &pk).unwrap();
        assert_eq!(sig.len(), 20);
        assert_eq!(sig, sign("MOVA|Lausanne|Geneve", &sk, &pk).unwrap());
        // Independent oracle: enumerate squares mod 7.
        let squares: Vec<u64> = (1..7u64).map(|i| i * i % 7).collect();
        for (x, bit) in pk.message_points("MOVA|Lausanne|Geneve").unwrap().iter().zip(sig.bits()) {
            assert_eq!(*bit, !squares.contains(&(x % 7)));
        }
    }

    #[test]
    fn mismatched_keys_are_rejected() {
        let params = DomainParams { modulus_bits: 16, ..Default::default() };
        let (pk, _) = keypair_from_primes(7u64, 11, b"k".to_vec(), params.clone()).unwrap();
        let (_, sk2) = keypair_from_primes(7u64, 13, b"k".to_vec(), params).unwrap();
        assert!(sign("m", &sk2, &pk).is_err());
    }
}
