//! Integer types the MOVA arithmetic is generic over.
//!
//! Production keys use [`BigUint`]; `u64` covers the toy moduli used by the
//! brute-force oracles in tests (any modulus below 2^63).

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use rand::{Rng, RngCore};

/// Unsigned integer supporting the modular operations MOVA needs.
pub trait ModScalar: Integer + Clone + Debug + Display + Hash + Send + Sync + 'static {
    /// Largest bit length a value of this type can hold, `None` if unbounded.
    const CAPACITY_BITS: Option<u64>;

    fn from_u64(v: u64) -> Self;

    fn bits(&self) -> u64;

    fn mul_mod(&self, rhs: &Self, modulus: &Self) -> Self;

    fn pow_mod(&self, exp: &Self, modulus: &Self) -> Self;

    /// Interprets `bytes` as a big-endian integer and reduces it modulo `modulus`.
    fn from_be_bytes_mod(bytes: &[u8], modulus: &Self) -> Self {
        let radix = Self::from_u64(256);
        bytes.iter().fold(Self::zero(), |acc, &b| {
            (acc.mul_mod(&radix, modulus) + Self::from_u64(u64::from(b))) % modulus.clone()
        })
    }

    /// Minimal big-endian encoding (zero encodes as a single `0x00`).
    fn to_be_bytes(&self) -> Vec<u8>;

    /// Big-endian decoding; `None` when the value exceeds the type's capacity.
    fn from_be_bytes(bytes: &[u8]) -> Option<Self>;

    /// Uniform value in `[0, bound)`.
    fn random_below<R: RngCore + ?Sized>(rng: &mut R, bound: &Self) -> Self;

    /// Uniform odd value with exactly `bits` bits (top bit set).
    fn random_odd_with_bits<R: RngCore + ?Sized>(rng: &mut R, bits: u64) -> Self;
}

impl ModScalar for u64 {
    const CAPACITY_BITS: Option<u64> = Some(64);

    fn from_u64(v: u64) -> Self {
        v
    }

    fn bits(&self) -> u64 {
        u64::from(64 - self.leading_zeros())
    }

    fn mul_mod(&self, rhs: &Self, modulus: &Self) -> Self {
        ((u128::from(*self) * u128::from(*rhs)) % u128::from(*modulus)) as u64
    }

    fn pow_mod(&self, exp: &Self, modulus: &Self) -> Self {
        if *modulus == 1 {
            return 0;
        }
        let mut base = self % modulus;
        let mut e = *exp;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, modulus);
            }
            base = base.mul_mod(&base, modulus);
            e >>= 1;
        }
        acc
    }

    fn to_be_bytes(&self) -> Vec<u8> {
        let raw = u64::to_be_bytes(*self);
        let start = raw.iter().position(|&b| b != 0).unwrap_or(7);
        raw[start..].to_vec()
    }

    fn from_be_bytes(bytes: &[u8]) -> Option<Self> {
        let trimmed = match bytes.iter().position(|&b| b != 0) {
            Some(i) => &bytes[i..],
            None => return Some(0),
        };
        if trimmed.len() > 8 {
            return None;
        }
        Some(trimmed.iter().fold(0u64, |acc, &b| (acc << 8) | u64::from(b)))
    }

    fn random_below<R: RngCore + ?Sized>(rng: &mut R, bound: &Self) -> Self {
        rng.gen_range(0..*bound)
    }

    fn random_odd_with_bits<R: RngCore + ?Sized>(rng: &mut R, bits: u64) -> Self {
        assert!((2..=64).contains(&bits), "u64 supports 2..=64 bit values");
        let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
        (rng.next_u64() & mask) | (1u64 << (bits - 1)) | 1
    }
}

impl ModScalar for BigUint {
    const CAPACITY_BITS: Option<u64> = None;

    fn from_u64(v: u64) -> Self {
        BigUint::from(v)
    }

    fn bits(&self) -> u64 {
        BigUint::bits(self)
    }

    fn mul_mod(&self, rhs: &Self, modulus: &Self) -> Self {
        (self * rhs) % modulus
    }

    fn pow_mod(&self, exp: &Self, modulus: &Self) -> Self {
        self.modpow(exp, modulus)
    }

    fn from_be_bytes_mod(bytes: &[u8], modulus: &Self) -> Self {
        BigUint::from_bytes_be(bytes) % modulus
    }

    fn to_be_bytes(&self) -> Vec<u8> {
        self.to_bytes_be()
    }

    fn from_be_bytes(bytes: &[u8]) -> Option<Self> {
        Some(BigUint::from_bytes_be(bytes))
    }

    fn random_below<R: RngCore + ?Sized>(rng: &mut R, bound: &Self) -> Self {
        let mut adapter = DynRng(rng);
        adapter.gen_biguint_below(bound)
    }

    fn random_odd_with_bits<R: RngCore + ?Sized>(rng: &mut R, bits: u64) -> Self {
        assert!(bits >= 2);
        let mut adapter = DynRng(rng);
        let mut v = adapter.gen_biguint(bits);
        v.set_bit(bits - 1, true);
        v.set_bit(0, true);
        v
    }
}

/// Lets `?Sized` generators feed `RandBigInt`, which needs a sized `Rng`.
struct DynRng<'a, R: RngCore + ?Sized>(&'a mut R);

impl<R: RngCore + ?Sized> RngCore for DynRng<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

const SMALL_PRIMES: [u64; 24] =
    [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];

/// Miller-Rabin rounds; each round errs with probability at most 1/4.
pub const MILLER_RABIN_ROUNDS: usize = 40;

/// Probabilistic primality test with error below 2^-80.
pub fn is_probable_prime<T: ModScalar, R: RngCore + ?Sized>(n: &T, rng: &mut R) -> bool {
    let two = T::from_u64(2);
    if *n < two {
        return false;
    }
    if *n == two {
        return true;
    }
    if n.is_even() {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = T::from_u64(p);
        if *n == p {
            return true;
        }
        if (n.clone() % p).is_zero() {
            return false;
        }
    }

    let one = T::one();
    let n_minus_one = n.clone() - one.clone();
    let mut d = n_minus_one.clone();
    let mut s = 0u32;
    while d.is_even() {
        d = d / two.clone();
        s += 1;
    }

    // n > 97 here, so [2, n-2] is non-empty.
    let span = n.clone() - T::from_u64(3);
    'witness: for _ in 0..MILLER_RABIN_ROUNDS {
        let a = T::random_below(rng, &span) + two.clone();
        let mut x = a.pow_mod(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = x.mul_mod(&x, n);
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Random prime with exactly `bits` bits.
pub fn random_prime<T: ModScalar, R: RngCore + ?Sized>(rng: &mut R, bits: u64) -> crate::Result<T> {
    let attempts = 200 * bits as usize;
    for _ in 0..attempts {
        let candidate = T::random_odd_with_bits(rng, bits);
        if is_probable_prime(&candidate, rng) {
            return Ok(candidate);
        }
    }
    Err(crate::MovaError::PrimeGeneration(attempts))
}

/// Uniform element of Z_n^* (non-zero and coprime to `n`).
pub fn random_unit<T: ModScalar, R: RngCore + ?Sized>(rng: &mut R, n: &T) -> T {
    loop {
        let r = T::random_below(rng, n);
        if !r.is_zero() && r.gcd(n).is_one() {
            return r;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn brute_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for n in 0u64..5000 {
            assert_eq!(is_probable_prime(&n, &mut rng), brute_is_prime(n), "n = {n}");
        }
        // Carmichael numbers.
        for n in [561u64, 1105, 1729, 2465, 2821, 6601, 8911, 41041, 825265] {
            assert!(!is_probable_prime(&n, &mut rng));
            assert!(!is_probable_prime(&BigUint::from(n), &mut rng));
        }
    }

    #[test]
    fn random_prime_has_requested_size() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let p: u64 = random_prime(&mut rng, 20).unwrap();
        assert_eq!(ModScalar::bits(&p), 20);
        assert!(brute_is_prime(p));
        let big: BigUint = random_prime(&mut rng, 128).unwrap();
        assert_eq!(big.bits(), 128);
    }

    #[test]
    fn u64_and_biguint_agree() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..200 {
            let m = rng.gen_range(3u64..u64::MAX >> 1);
            let a = rng.gen_range(0..m);
            let e = rng.gen::<u32>() as u64;
            let big = |v: u64| BigUint::from(v);
            assert_eq!(BigUint::from(a.pow_mod(&e, &m)), big(a).pow_mod(&big(e), &big(m)));
            let bytes: Vec<u8> = (0..20).map(|_| rng.gen()).collect();
            assert_eq!(BigUint::from(u64::from_be_bytes_mod(&bytes, &m)), BigUint::from_be_bytes_mod(&bytes, &big(m)));
        }
    }

    #[test]
    fn byte_codec_round_trips() {
        for v in [0u64, 1, 255, 256, u64::MAX] {
            assert_eq!(<u64 as ModScalar>::from_be_bytes(&ModScalar::to_be_bytes(&v)), Some(v));
        }
        assert_eq!(<u64 as ModScalar>::from_be_bytes(&[1, 0, 0, 0, 0, 0, 0, 0, 0]), None);
        assert_eq!(<u64 as ModScalar>::from_be_bytes(&[0, 0, 0, 0, 0, 0, 0, 0, 0, 5]), Some(5));
    }
}
