//! MOVA undeniable signatures with the Legendre symbol as secret homomorphism.
//!
//! A signature is the image of a handful of message-derived points of
//! `Z_n^*` under `x ↦ (x / p)`, where `n = p·q` is public and `p` is secret.
//! Nobody can check it from the public key alone: the signer proves validity
//! with the confirmation protocol or invalidity with the denial protocol
//! (see [`proofs`]).
//!
//! Arithmetic is generic over [`ModScalar`]; [`BigUint`] is the production
//! scalar and `u64` serves toy moduli. The aliases below fix the scalar.

pub mod bits;
pub mod commitment;
pub mod derive;
pub mod encoding;
mod error;
pub mod keyfile;
pub mod keys;
pub mod legendre;
pub mod params;
pub mod proofs;
pub mod scalar;
pub mod sign;

pub use num_bigint::BigUint;

pub use commitment::{commit, open, Commitment};
pub use derive::derive_elements;
pub use encoding::{decode_signature, encode_signature, Ticket, MAX_TICKET_LEN};
pub use error::{MovaError, Result};
pub use keys::{keygen, keypair_from_primes};
pub use legendre::{legendre, Symbol};
pub use params::{Alphabet, DomainParams};
pub use scalar::ModScalar;
pub use sign::{is_valid_signature, map_message, sign, Signature, MAX_MESSAGE_LEN};

/// Production public key.
pub type PublicKey = keys::PublicKey<BigUint>;
/// Production private key.
pub type PrivateKey = keys::PrivateKey<BigUint>;
pub type ProofPoints = proofs::ProofPoints<BigUint>;
pub type GhiChallenge = proofs::GhiChallenge<BigUint>;
pub type GhiReveal = proofs::GhiReveal<BigUint>;
pub type CoGhiChallenge = proofs::CoGhiChallenge<BigUint>;
pub type CoGhiReveal = proofs::CoGhiReveal<BigUint>;

/// Toy-modulus keys for exhaustive checks.
pub type SmallPublicKey = keys::PublicKey<u64>;
pub type SmallPrivateKey = keys::PrivateKey<u64>;
