//! Hash commitments: `c = SHA-256(payload ‖ decommit)` with a 128-byte random decommitment.

use rand::RngCore;
use sha2::{Digest, Sha256};

pub const DIGEST_LEN: usize = 32;
pub const DECOMMIT_LEN: usize = 128;

pub type Digest32 = [u8; DIGEST_LEN];

#[derive(Clone, PartialEq, Eq)]
pub struct Commitment {
    pub c: Digest32,
    pub decommit: [u8; DECOMMIT_LEN],
}

impl std::fmt::Debug for Commitment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Commitment").field("c", &hex::encode(self.c)).finish_non_exhaustive()
    }
}

fn digest(payload: &[u8], decommit: &[u8]) -> Digest32 {
    Sha256::new().chain_update(payload).chain_update(decommit).finalize().into()
}

/// Commits to a non-empty payload.
pub fn commit<R: RngCore + ?Sized>(payload: &[u8], rng: &mut R) -> Commitment {
    debug_assert!(!payload.is_empty(), "commitment payload must be non-empty");
    let mut decommit = [0u8; DECOMMIT_LEN];
    rng.fill_bytes(&mut decommit);
    Commitment { c: digest(payload, &decommit), decommit }
}

/// True iff `c` commits to `payload` under `decommit`. Wrong lengths simply fail.
pub fn open(payload: &[u8], c: &[u8], decommit: &[u8]) -> bool {
    c.len() == DIGEST_LEN && decommit.len() == DECOMMIT_LEN && digest(payload, decommit) == c
}
