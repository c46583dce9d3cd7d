//! MOVA key material and key generation.

use num_bigint::BigUint;
use rand::RngCore;

use crate::derive::{derive_elements, KEY_LABEL};
use crate::legendre::{legendre, Symbol};
use crate::params::DomainParams;
use crate::scalar::{is_probable_prime, random_prime, ModScalar};
use crate::{MovaError, Result};

/// Length of the public generator seed `k`.
pub const SEED_LEN: usize = 32;

/// Order of the image group {+1, -1}.
pub const Y_GROUP_ORDER: u32 = 2;

/// Public half of a MOVA key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey<T = BigUint> {
    pub(crate) n: T,
    pub(crate) k: Vec<u8>,
    pub(crate) y_gen: Vec<bool>,
    pub(crate) params: DomainParams,
}

impl<T: ModScalar> PublicKey<T> {
    pub fn new(n: T, k: Vec<u8>, y_gen: Vec<bool>, params: DomainParams) -> Result<Self> {
        params.validate()?;
        if n < T::from_u64(15) || n.is_even() {
            return Err(MovaError::InvalidParams("modulus must be an odd composite".into()));
        }
        if y_gen.len() != params.l_key {
            return Err(MovaError::InvalidParams(format!(
                "y_gen has {} entries, l_key is {}",
                y_gen.len(),
                params.l_key
            )));
        }
        if k.is_empty() {
            return Err(MovaError::InvalidParams("empty generator seed".into()));
        }
        Ok(Self { n, k, y_gen, params })
    }

    pub fn n(&self) -> &T {
        &self.n
    }

    pub fn d(&self) -> u32 {
        Y_GROUP_ORDER
    }

    pub fn seed(&self) -> &[u8] {
        &self.k
    }

    /// Images of the key-generator points; bit set means `-1`.
    pub fn y_gen(&self) -> &[bool] {
        &self.y_gen
    }

    pub fn params(&self) -> &DomainParams {
        &self.params
    }

    /// Regenerates `X_gen` from the public seed.
    pub fn key_points(&self) -> Result<Vec<T>> {
        derive_elements(&self.k, KEY_LABEL, self.params.l_key, &self.n)
    }
}

/// Secret factorization `n = p·q`; the homomorphism is the Legendre symbol modulo `p`.
#[derive(Clone, PartialEq, Eq)]
pub struct PrivateKey<T = BigUint> {
    p: T,
    q: T,
    n: T,
}

impl<T: ModScalar> std::fmt::Debug for PrivateKey<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrivateKey").finish_non_exhaustive()
    }
}

impl<T: ModScalar> PrivateKey<T> {
    /// Builds a private key from two distinct odd primes (primality is not re-checked
    /// here, see [`PrivateKey::check_primes`]).
    pub fn new(p: T, q: T) -> Result<Self> {
        let three = T::from_u64(3);
        if p == q || p < three || q < three || p.is_even() || q.is_even() {
            return Err(MovaError::InvalidParams("p and q must be distinct odd primes".into()));
        }
        if let Some(cap) = T::CAPACITY_BITS {
            if p.bits() + q.bits() > cap - 1 {
                return Err(MovaError::InvalidParams("modulus does not fit the scalar type".into()));
            }
        }
        let n = p.clone() * q.clone();
        Ok(Self { p, q, n })
    }

    pub fn p(&self) -> &T {
        &self.p
    }

    pub fn q(&self) -> &T {
        &self.q
    }

    pub fn n(&self) -> &T {
        &self.n
    }

    /// Miller-Rabin on both factors (error below 2^-80 each).
    pub fn check_primes<R: RngCore + ?Sized>(&self, rng: &mut R) -> bool {
        is_probable_prime(&self.p, rng) && is_probable_prime(&self.q, rng)
    }

    /// The secret homomorphism `Z_n^* → {±1}`: `x ↦ (x mod p / p)`.
    ///
    /// Elements sharing a factor with `n` are rejected with a detail-free error.
    pub fn homomorphism(&self, x: &T) -> Result<Symbol> {
        let x = x.clone() % self.n.clone();
        if !x.gcd(&self.n).is_one() {
            return Err(MovaError::InvalidElement);
        }
        legendre(&x, &self.p).map_err(|_| MovaError::InvalidElement)
    }

    /// Homomorphism images as bits (`true` for `-1`).
    pub fn image_bits(&self, xs: &[T]) -> Result<Vec<bool>> {
        xs.iter().map(|x| self.homomorphism(x).map(Symbol::bit)).collect()
    }

    pub fn matches(&self, pk: &PublicKey<T>) -> bool {
        self.n == pk.n
    }
}

/// Builds the public key for given primes and seed.
pub fn keypair_from_primes<T: ModScalar>(
    p: T,
    q: T,
    k: Vec<u8>,
    params: DomainParams,
) -> Result<(PublicKey<T>, PrivateKey<T>)> {
    let sk = PrivateKey::new(p, q)?;
    let x_gen = derive_elements(&k, KEY_LABEL, params.l_key, sk.n())?;
    let y_gen = sk.image_bits(&x_gen)?;
    let pk = PublicKey::new(sk.n().clone(), k, y_gen, params)?;
    Ok((pk, sk))
}

/// Generates a fresh key pair: two random `modulus_bits`-bit primes and a random seed.
pub fn keygen<T: ModScalar, R: RngCore + ?Sized>(
    params: DomainParams,
    rng: &mut R,
) -> Result<(PublicKey<T>, PrivateKey<T>)> {
    params.validate()?;
    if let Some(cap) = T::CAPACITY_BITS {
        if 2 * params.modulus_bits > cap - 1 {
            return Err(MovaError::InvalidParams(format!(
                "{}-bit primes overflow the scalar type",
                params.modulus_bits
            )));
        }
    }
    let p: T = random_prime(rng, params.modulus_bits)?;
    let q = loop {
        let q: T = random_prime(rng, params.modulus_bits)?;
        if q != p {
            break q;
        }
    };
    let mut k = vec![0u8; SEED_LEN];
    rng.fill_bytes(&mut k);
    keypair_from_primes(p, q, k, params)
}
