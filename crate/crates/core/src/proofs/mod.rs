//! Interactive confirmation (GHI) and denial (co-GHI) proofs.
//!
//! Group operations are written multiplicatively in Z_n^*: a blinded
//! challenge is `r² · Π x_j^{a_j}` with exponents in Z_2, and the matching
//! expected answer is the XOR of the selected image bits.
//!
//! Every step is a plain function on messages so that a transport can carry
//! them; the prover's state is consumed by its opening step, so its answers
//! and decommitment cannot be released before the verifier's randomness
//! arrives. [`GhiVerifier`] and [`CoGhiVerifier`] give the verifier the same
//! ordering guarantee.

mod coghi;
mod ghi;

pub use coghi::{
    coghi_challenge_from, coghi_prover_answer, coghi_prover_open, coghi_verifier_challenge, coghi_verifier_check,
    CoGhiChallenge, CoGhiOpening, CoGhiProverState, CoGhiReveal, CoGhiVerifier, CoGhiVerifierAwaitingOpening,
    CoGhiVerifierSecret,
};
pub use ghi::{
    ghi_challenge_from, ghi_prover_answer, ghi_prover_open, ghi_verifier_challenge, ghi_verifier_check, GhiChallenge,
    GhiOpening, GhiProverState, GhiReveal, GhiVerifier, GhiVerifierAwaitingOpening, GhiVerifierSecret,
};

use rand::{Rng, RngCore};
use thiserror::Error;

use crate::scalar::ModScalar;

/// Why a prover refused to continue. Carries no protocol secrets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ProofAbort {
    /// Confirmation asked for points that the secret homomorphism does not interpolate.
    #[error("points do not interpolate the homomorphism")]
    PointsDoNotInterpolate,
    /// Denial asked for a signature that is actually valid.
    #[error("claimed signature is valid; denial impossible")]
    SignatureValid,
    /// The verifier's revealed randomness does not reproduce its challenge.
    #[error("revealed randomness does not reproduce the challenge")]
    RevealMismatch,
    #[error("malformed message: {0}")]
    Malformed(&'static str),
    #[error("invalid element")]
    InvalidElement,
}

/// Interpolation points `(x_j, y_j)`; bit set means `y_j = -1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofPoints<T> {
    x_points: Vec<T>,
    y_bits: Vec<bool>,
}

impl<T: ModScalar> ProofPoints<T> {
    pub fn new(x_points: Vec<T>, y_bits: Vec<bool>) -> Result<Self, ProofAbort> {
        if x_points.len() != y_bits.len() {
            return Err(ProofAbort::Malformed("point and image counts differ"));
        }
        if x_points.is_empty() {
            return Err(ProofAbort::Malformed("no points"));
        }
        Ok(Self { x_points, y_bits })
    }

    /// `self ‖ other`, e.g. `(X_gen, Y_gen) ‖ (X_mess, Y_mess)`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut x_points = self.x_points.clone();
        x_points.extend_from_slice(&other.x_points);
        let mut y_bits = self.y_bits.clone();
        y_bits.extend_from_slice(&other.y_bits);
        Self { x_points, y_bits }
    }

    pub fn x_points(&self) -> &[T] {
        &self.x_points
    }

    pub fn y_bits(&self) -> &[bool] {
        &self.y_bits
    }

    pub fn len(&self) -> usize {
        self.x_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_points.is_empty()
    }
}

/// `r² · Π_j x_j^{a_j} · extra_point^{extra_exp} mod n`.
pub(crate) fn blind<T: ModScalar>(n: &T, r: &T, xs: &[T], a: &[bool], extra: Option<(&T, bool)>) -> T {
    let mut acc = r.mul_mod(r, n);
    for (x, _) in xs.iter().zip(a).filter(|(_, &bit)| bit) {
        acc = acc.mul_mod(x, n);
    }
    if let Some((x, true)) = extra {
        acc = acc.mul_mod(x, n);
    }
    acc
}

/// `XOR_j (a_j ∧ y_j) ⊕ (extra_exp ∧ extra_bit)`, the image-side twin of [`blind`].
pub(crate) fn combine(ys: &[bool], a: &[bool], extra: Option<(bool, bool)>) -> bool {
    let base = ys.iter().zip(a).fold(false, |acc, (&y, &bit)| acc ^ (y & bit));
    match extra {
        Some((exp, y)) => base ^ (exp & y),
        None => base,
    }
}

pub(crate) fn random_bits<R: RngCore + ?Sized>(rng: &mut R, len: usize) -> Vec<bool> {
    (0..len).map(|_| rng.gen::<bool>()).collect()
}

pub(crate) fn is_unit<T: ModScalar>(x: &T, n: &T) -> bool {
    !x.is_zero() && x < n && x.gcd(n).is_one()
}
