//! Semi-static Diffie-Hellman over the 1024-bit MODP group (RFC 2409, group 2).
//!
//! The server's static pair is generated once and persisted; devices carry
//! its public half and contribute a fresh ephemeral per session.

use std::fs;
use std::path::Path;

use mova_core::keyfile::KeyValueFile;
use mova_core::scalar::ModScalar;
use num_bigint::BigUint;
use num_traits::One;
use rand::RngCore;
use sha2::{Digest, Sha256};

use crate::cipher::{Role, SessionKeys, AES_KEY_LEN};
use crate::{ChannelError, Result};

pub const DH_PUBLIC_FILE: &str = "dhKpPub.key";
pub const DH_PRIVATE_FILE: &str = "dhKpPriv.key";

const MODP_1024_HEX: &str = concat!(
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD1",
    "29024E088A67CC74020BBEA63B139B22514A08798E3404DD",
    "EF9519B3CD3A431B302B0A6DF25F14374FE1356D6D51C245",
    "E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED",
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE65381",
    "FFFFFFFFFFFFFFFF",
);

/// Prime modulus and generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DhGroup {
    pub p: BigUint,
    pub g: BigUint,
}

impl DhGroup {
    /// The fixed 1024-bit safe-prime group with generator 2.
    pub fn modp1024() -> Self {
        Self { p: BigUint::parse_bytes(MODP_1024_HEX.as_bytes(), 16).expect("valid constant"), g: BigUint::from(2u32) }
    }

    /// Width of an encoded public value.
    pub fn element_len(&self) -> usize {
        self.p.bits().div_ceil(8) as usize
    }

    /// Fixed-width big-endian encoding of `x < p`.
    pub fn encode(&self, x: &BigUint) -> Vec<u8> {
        let raw = x.to_bytes_be();
        let mut out = vec![0u8; self.element_len().saturating_sub(raw.len())];
        out.extend(raw);
        out
    }

    pub fn decode(&self, bytes: &[u8]) -> Result<BigUint> {
        if bytes.len() != self.element_len() {
            return Err(ChannelError::BadFrame(format!("public value must be {} bytes", self.element_len())));
        }
        Ok(BigUint::from_bytes_be(bytes))
    }

    /// Uniform private exponent in `[2, p-2]`.
    fn random_exponent<R: RngCore + ?Sized>(&self, rng: &mut R) -> BigUint {
        let span = &self.p - 3u32;
        BigUint::random_below(rng, &span) + 2u32
    }

    /// Rejects 0, 1, p-1 and anything outside the group.
    pub fn check_public(&self, y: &BigUint) -> Result<()> {
        if *y <= BigUint::one() || *y >= &self.p - 1u32 {
            return Err(ChannelError::DegeneratePublic);
        }
        Ok(())
    }
}

/// The server's persisted key pair.
#[derive(Clone)]
pub struct DhStaticKeyPair {
    group: DhGroup,
    private: BigUint,
    public: BigUint,
}

impl std::fmt::Debug for DhStaticKeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DhStaticKeyPair").field("public", &self.public).finish_non_exhaustive()
    }
}

impl DhStaticKeyPair {
    pub fn generate<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let group = DhGroup::modp1024();
        loop {
            let private = group.random_exponent(rng);
            let public = group.g.modpow(&private, &group.p);
            if group.check_public(&public).is_ok() {
                return Self { group, private, public };
            }
        }
    }

    pub fn group(&self) -> &DhGroup {
        &self.group
    }

    pub fn public(&self) -> &BigUint {
        &self.public
    }

    pub fn public_key(&self) -> DhServerPublic {
        DhServerPublic { group: self.group.clone(), public: self.public.clone() }
    }

    /// Server side of the agreement with a device's ephemeral value.
    pub fn agree(&self, device_public: &BigUint) -> Result<SessionKeys> {
        dh_agree(&self.private, device_public, &self.group, Role::Responder)
    }

    pub fn to_private_file(&self) -> String {
        let mut f = KeyValueFile::new();
        f.push_uint("p", &self.group.p).push_uint("g", &self.group.g).push_uint("a", &self.private);
        f.to_string()
    }

    pub fn from_private_file(text: &str) -> Result<Self> {
        let f = KeyValueFile::parse(text)?;
        f.expect_fields(&["p", "g", "a"])?;
        let group = DhGroup { p: f.uint("p")?, g: f.uint("g")? };
        let private: BigUint = f.uint("a")?;
        if private < BigUint::from(2u32) || private > &group.p - 2u32 {
            return Err(ChannelError::KeyFile("private exponent out of range".into()));
        }
        let public = group.g.modpow(&private, &group.p);
        group.check_public(&public).map_err(|_| ChannelError::KeyFile("degenerate public value".into()))?;
        Ok(Self { group, private, public })
    }

    /// Loads both files from `dir`, or generates and writes them when neither exists.
    ///
    /// A lone file, unparsable contents or a public file that does not match the
    /// private exponent is reported as corruption.
    pub fn load_or_create<R: RngCore + ?Sized>(dir: &Path, rng: &mut R) -> Result<Self> {
        let pub_path = dir.join(DH_PUBLIC_FILE);
        let priv_path = dir.join(DH_PRIVATE_FILE);
        match (pub_path.exists(), priv_path.exists()) {
            (false, false) => {
                let pair = Self::generate(rng);
                fs::write(&priv_path, pair.to_private_file())?;
                fs::write(&pub_path, pair.public_key().to_key_file())?;
                Ok(pair)
            }
            (true, true) => {
                let corrupt =
                    |e: ChannelError| ChannelError::KeyFile(format!("corrupt DH key files in {}: {e}", dir.display()));
                let pair = Self::from_private_file(&fs::read_to_string(&priv_path)?).map_err(corrupt)?;
                let public = DhServerPublic::from_key_file(&fs::read_to_string(&pub_path)?).map_err(corrupt)?;
                if public != pair.public_key() {
                    return Err(ChannelError::KeyFile(format!(
                        "{DH_PUBLIC_FILE} does not match {DH_PRIVATE_FILE} in {}",
                        dir.display()
                    )));
                }
                Ok(pair)
            }
            _ => Err(ChannelError::KeyFile(format!(
                "only one of {DH_PUBLIC_FILE} and {DH_PRIVATE_FILE} exists in {}",
                dir.display()
            ))),
        }
    }
}

/// Server public value as distributed to devices (`dhKpPub.key`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DhServerPublic {
    pub group: DhGroup,
    pub public: BigUint,
}

impl DhServerPublic {
    pub fn to_key_file(&self) -> String {
        let mut f = KeyValueFile::new();
        f.push_uint("p", &self.group.p).push_uint("g", &self.group.g).push_uint("A", &self.public);
        f.to_string()
    }

    pub fn from_key_file(text: &str) -> Result<Self> {
        let f = KeyValueFile::parse(text)?;
        f.expect_fields(&["p", "g", "A"])?;
        let group = DhGroup { p: f.uint("p")?, g: f.uint("g")? };
        let public = f.uint("A")?;
        group.check_public(&public)?;
        Ok(Self { group, public })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_key_file(&fs::read_to_string(path)?)
    }
}

/// A device's per-session key pair.
pub struct DhEphemeral {
    private: BigUint,
    public: BigUint,
}

impl DhEphemeral {
    pub fn generate<R: RngCore + ?Sized>(group: &DhGroup, rng: &mut R) -> Self {
        loop {
            let private = group.random_exponent(rng);
            let public = group.g.modpow(&private, &group.p);
            if group.check_public(&public).is_ok() {
                return Self { private, public };
            }
        }
    }

    pub fn public(&self) -> &BigUint {
        &self.public
    }

    pub fn agree(&self, server: &DhServerPublic) -> Result<SessionKeys> {
        dh_agree(&self.private, &server.public, &server.group, Role::Initiator)
    }
}

/// `their_public^my_private mod p`, hashed with SHA-256; the first 16 bytes key AES-128.
pub fn dh_agree(my_private: &BigUint, their_public: &BigUint, group: &DhGroup, role: Role) -> Result<SessionKeys> {
    group.check_public(their_public)?;
    let shared = their_public.modpow(my_private, &group.p);
    let digest = Sha256::digest(shared.to_bytes_be());
    let mut aes_key = [0u8; AES_KEY_LEN];
    aes_key.copy_from_slice(&digest[..AES_KEY_LEN]);
    Ok(SessionKeys::new(aes_key, role))
}

#[cfg(test)]
mod tests {
    use super::*;
    use mova_core::scalar::is_probable_prime;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn group_is_a_1024_bit_safe_prime() {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let g = DhGroup::modp1024();
        assert_eq!(g.p.bits(), 1024);
        assert!(is_probable_prime(&g.p, &mut rng));
        let q: BigUint = (&g.p - 1u32) >> 1;
        assert!(is_probable_prime(&q, &mut rng));
        assert_eq!(g.element_len(), 128);
    }

    #[test]
    fn both_roles_derive_the_same_key() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let server = DhStaticKeyPair::generate(&mut rng);
        let device = DhEphemeral::generate(server.group(), &mut rng);
        let a = device.agree(&server.public_key()).unwrap();
        let b = server.agree(device.public()).unwrap();
        assert_eq!(a.aes_key(), b.aes_key());
        assert_eq!(a.role(), Role::Initiator);
        let other = DhEphemeral::generate(server.group(), &mut rng);
        assert_ne!(other.agree(&server.public_key()).unwrap().aes_key(), a.aes_key());
    }

    #[test]
    fn degenerate_publics_are_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let server = DhStaticKeyPair::generate(&mut rng);
        let p = &server.group().p;
        for bad in [BigUint::from(0u32), BigUint::from(1u32), p - 1u32, p.clone()] {
            assert!(matches!(server.agree(&bad), Err(ChannelError::DegeneratePublic)));
        }
    }

    #[test]
    fn key_files_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let pair = DhStaticKeyPair::generate(&mut rng);
        let back = DhStaticKeyPair::from_private_file(&pair.to_private_file()).unwrap();
        assert_eq!(back.public(), pair.public());
        let public = DhServerPublic::from_key_file(&pair.public_key().to_key_file()).unwrap();
        assert_eq!(public, pair.public_key());
        assert!(DhServerPublic::from_key_file("p=17\ng=2").is_err());
    }

    #[test]
    fn fixed_width_encoding() {
        let g = DhGroup::modp1024();
        let e = g.encode(&BigUint::from(5u32));
        assert_eq!(e.len(), 128);
        assert_eq!(g.decode(&e).unwrap(), BigUint::from(5u32));
        assert!(g.decode(&e[1..]).is_err());
    }
}
