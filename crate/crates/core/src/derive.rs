//! Deterministic expansion of a seed into elements of Z_n^*.

use sha2::{Digest, Sha256};

use crate::scalar::ModScalar;
use crate::{MovaError, Result};

/// Domain-separation label for key-generator points.
pub const KEY_LABEL: &str = "key";
/// Domain-separation label for message (signature) points.
pub const SIG_LABEL: &str = "sig";

/// Candidates per element before giving up.
pub const MAX_RETRIES: u32 = 10_000;

/// Expands `seed` into `count` pseudorandom units modulo `n`.
///
/// Candidate `(i, retry)` is the concatenation of
/// `SHA-256(len(seed) ‖ seed ‖ len(label) ‖ label ‖ i ‖ retry ‖ j)` for
/// `j = 0, 1, …` (all integers 4-byte big-endian) until `bits(n) + 64` bits
/// are gathered, reduced modulo `n`. Candidates `≤ 1` or sharing a factor
/// with `n` are rejected and the next `retry` is tried.
pub fn derive_elements<T: ModScalar>(seed: &[u8], label: &str, count: usize, n: &T) -> Result<Vec<T>> {
    if count == 0 {
        return Err(MovaError::InvalidParams("element count must be positive".into()));
    }
    if *n < T::from_u64(3) {
        return Err(MovaError::InvalidParams("modulus must be at least 3".into()));
    }
    let wanted_bytes = (n.bits() + 64).div_ceil(8) as usize;
    let prefix = Sha256::new()
        .chain_update((seed.len() as u32).to_be_bytes())
        .chain_update(seed)
        .chain_update((label.len() as u32).to_be_bytes())
        .chain_update(label.as_bytes());

    (0..count)
        .map(|i| {
            let i = u32::try_from(i).map_err(|_| MovaError::InvalidParams("count too large".into()))?;
            for retry in 0..MAX_RETRIES {
                let mut bytes = Vec::with_capacity(wanted_bytes + 32);
                let mut block = 0u32;
                while bytes.len() < wanted_bytes {
                    let digest = prefix
                        .clone()
                        .chain_update(i.to_be_bytes())
                        .chain_update(retry.to_be_bytes())
                        .chain_update(block.to_be_bytes())
                        .finalize();
                    bytes.extend_from_slice(&digest);
                    block += 1;
                }
                bytes.truncate(wanted_bytes);
                let candidate = T::from_be_bytes_mod(&bytes, n);
                if candidate > T::one() && candidate.gcd(n).is_one() {
                    return Ok(candidate);
                }
            }
            Err(MovaError::DerivationExhausted)
        })
        .collect()
}
