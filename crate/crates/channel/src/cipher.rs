//! AES-128-CBC sealing with a per-frame random IV.
//!
//! The sealed plaintext is `body ‖ SHA-256(body)` so that corrupted frames are
//! rejected even when the CBC padding happens to survive.

use aes::cipher::{block_padding::Pkcs7, BlockDecryptMut, BlockEncryptMut, KeyIvInit};
use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::{ChannelError, Result};

pub const AES_KEY_LEN: usize = 16;
pub const IV_LEN: usize = 16;
pub const BLOCK_LEN: usize = 16;
const CHECK_LEN: usize = 32;

type Encryptor = cbc::Encryptor<aes::Aes128>;
type Decryptor = cbc::Decryptor<aes::Aes128>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// The device, which opens the connection.
    Initiator,
    /// The server.
    Responder,
}

/// Symmetric key shared by both ends of one connection.
#[derive(Clone)]
pub struct SessionKeys {
    aes_key: [u8; AES_KEY_LEN],
    role: Role,
}

impl std::fmt::Debug for SessionKeys {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SessionKeys").field("role", &self.role).finish_non_exhaustive()
    }
}

/// One sealed message: IV and ciphertext.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub iv: [u8; IV_LEN],
    pub ciphertext: Vec<u8>,
}

impl SessionKeys {
    pub fn new(aes_key: [u8; AES_KEY_LEN], role: Role) -> Self {
        Self { aes_key, role }
    }

    pub fn aes_key(&self) -> &[u8; AES_KEY_LEN] {
        &self.aes_key
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn seal<R: RngCore + ?Sized>(&self, plaintext: &[u8], rng: &mut R) -> Frame {
        let mut iv = [0u8; IV_LEN];
        rng.fill_bytes(&mut iv);
        let mut body = Vec::with_capacity(plaintext.len() + CHECK_LEN);
        body.extend_from_slice(plaintext);
        body.extend_from_slice(&Sha256::digest(plaintext));
        let ciphertext = Encryptor::new(&self.aes_key.into(), &iv.into()).encrypt_padded_vec_mut::<Pkcs7>(&body);
        Frame { iv, ciphertext }
    }

    pub fn unseal(&self, frame: &Frame) -> Result<Vec<u8>> {
        if frame.ciphertext.is_empty() || frame.ciphertext.len() % BLOCK_LEN != 0 {
            return Err(ChannelError::BadFrame("ciphertext is not a whole number of blocks".into()));
        }
        let mut body = Decryptor::new(&self.aes_key.into(), &frame.iv.into())
            .decrypt_padded_vec_mut::<Pkcs7>(&frame.ciphertext)
            .map_err(|_| ChannelError::Decrypt)?;
        if body.len() < CHECK_LEN {
            return Err(ChannelError::Integrity);
        }
        let check = body.split_off(body.len() - CHECK_LEN);
        if Sha256::digest(&body).as_slice() != check.as_slice() {
            return Err(ChannelError::Integrity);
        }
        Ok(body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn keys() -> SessionKeys {
        SessionKeys::new([7u8; 16], Role::Initiator)
    }

    #[test]
    fn round_trip_various_sizes() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let k = keys();
        for len in [0usize, 1, 15, 16, 17, 1000, 64 * 1024] {
            let m: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
            let f = k.seal(&m, &mut rng);
            assert_eq!(f.ciphertext.len() % 16, 0);
            assert_eq!(k.unseal(&f).unwrap(), m);
        }
    }

    #[test]
    fn fresh_iv_per_frame() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let k = keys();
        let a = k.seal(b"same", &mut rng);
        let b = k.seal(b"same", &mut rng);
        assert_ne!(a.iv, b.iv);
        assert_ne!(a.ciphertext, b.ciphertext);
    }

    #[test]
    fn any_byte_flip_is_detected() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let k = keys();
        let f = k.seal(b"MOVA|Lausanne|Geneve|2010-06-01|2|Alice", &mut rng);
        for i in 0..f.ciphertext.len() {
            let mut bad = f.clone();
            bad.ciphertext[i] ^= 0x01;
            assert!(k.unseal(&bad).is_err(), "byte {i}");
        }
        for i in 0..IV_LEN {
            let mut bad = f.clone();
            bad.iv[i] ^= 0x40;
            assert!(k.unseal(&bad).is_err(), "iv byte {i}");
        }
    }

    #[test]
    fn wrong_key_fails() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let f = keys().seal(b"hello", &mut rng);
        assert!(SessionKeys::new([8u8; 16], Role::Responder).unseal(&f).is_err());
    }
}
