//! The server's MOVA key pair on disk (`keyPub.key`, `keyPriv.key`).

use std::fs;
use std::path::Path;

use mova_core::keyfile::{PRIVATE_KEY_FILE, PUBLIC_KEY_FILE};
use mova_core::proofs::ProofPoints;
use mova_core::{keygen, BigUint, DomainParams, PrivateKey, PublicKey};
use rand::RngCore;

use crate::error::ServerError;
use crate::registry::write_atomic;

/// Immutable key material shared by all sessions.
#[derive(Debug)]
pub struct ServerKeys {
    pub public: PublicKey,
    pub private: PrivateKey,
    /// `keyPub.key` text as sent to devices.
    pub public_file: String,
    /// Key points with their images, reused by every proof.
    pub key_points: ProofPoints<BigUint>,
}

impl ServerKeys {
    pub fn new(public: PublicKey, private: PrivateKey) -> Result<Self, ServerError> {
        let x = public.key_points()?;
        let key_points = ProofPoints::new(x, public.y_gen().to_vec())
            .map_err(|e| ServerError::Config(format!("inconsistent public key: {e}")))?;
        let public_file = public.to_key_file();
        Ok(Self { public, private, public_file, key_points })
    }

    /// Loads both key files from `dir`, or generates and writes a fresh pair
    /// when neither exists. Anything else is reported as corruption.
    pub fn load_or_create<R: RngCore + ?Sized>(
        dir: &Path,
        params: &DomainParams,
        rng: &mut R,
    ) -> Result<Self, ServerError> {
        let pub_path = dir.join(PUBLIC_KEY_FILE);
        let priv_path = dir.join(PRIVATE_KEY_FILE);
        let corrupt = |reason: String| ServerError::KeyStore { path: dir.to_path_buf(), reason };
        match (pub_path.exists(), priv_path.exists()) {
            (false, false) => {
                fs::create_dir_all(dir)?;
                let (public, private) = keygen::<BigUint, _>(params.clone(), rng)?;
                write_atomic(&priv_path, private.to_key_file().as_bytes())?;
                write_atomic(&pub_path, public.to_key_file().as_bytes())?;
                Self::new(public, private)
            }
            (true, true) => {
                let public = PublicKey::from_key_file(&fs::read_to_string(&pub_path)?)
                    .map_err(|e| corrupt(format!("{PUBLIC_KEY_FILE}: {e}")))?;
                let private = PrivateKey::from_key_file(&fs::read_to_string(&priv_path)?)
                    .map_err(|e| corrupt(format!("{PRIVATE_KEY_FILE}: {e}")))?;
                if !private.matches(&public) {
                    return Err(corrupt(format!("{PUBLIC_KEY_FILE} and {PRIVATE_KEY_FILE} belong to different keys")));
                }
                let x = public.key_points()?;
                if private.image_bits(&x)? != public.y_gen() {
                    return Err(corrupt(format!("{PUBLIC_KEY_FILE}: ygen does not match the private key")));
                }
                Self::new(public, private)
            }
            _ => Err(corrupt(format!("only one of {PUBLIC_KEY_FILE} and {PRIVATE_KEY_FILE} exists"))),
        }
    }
}
