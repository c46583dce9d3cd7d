//! Confirmation: the signer proves that a set of points interpolates its homomorphism.

use rand::RngCore;

use super::{blind, combine, is_unit, random_bits, ProofAbort, ProofPoints};
use crate::bits::pack_bits;
use crate::commitment::{self, Commitment, Digest32, DECOMMIT_LEN};
use crate::keys::{PrivateKey, PublicKey};
use crate::scalar::{random_unit, ModScalar};

/// Step 1 message: the blinded points `u_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhiChallenge<T> {
    pub u: Vec<T>,
}

/// Step 3 message: the verifier's randomness, `r` (length `l`) and `a` (`l × s`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhiReveal<T> {
    pub r: Vec<T>,
    pub a: Vec<Vec<bool>>,
}

/// Verifier randomness plus the answers an honest prover must produce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhiVerifierSecret<T> {
    reveal: GhiReveal<T>,
    w: Vec<bool>,
}

impl<T: Clone> GhiVerifierSecret<T> {
    pub fn reveal(&self) -> GhiReveal<T> {
        self.reveal.clone()
    }

    pub fn expected_answers(&self) -> &[bool] {
        &self.w
    }
}

/// Step 4 message: the committed answers and their decommitment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhiOpening {
    pub answers: Vec<bool>,
    pub decommit: [u8; DECOMMIT_LEN],
}

/// Builds the challenge from explicit randomness.
pub fn ghi_challenge_from<T: ModScalar>(
    n: &T,
    points: &ProofPoints<T>,
    r: Vec<T>,
    a: Vec<Vec<bool>>,
) -> Result<(GhiChallenge<T>, GhiVerifierSecret<T>), ProofAbort> {
    if r.len() != a.len() || r.is_empty() {
        return Err(ProofAbort::Malformed("r and a row counts differ"));
    }
    if a.iter().any(|row| row.len() != points.len()) {
        return Err(ProofAbort::Malformed("a row length differs from point count"));
    }
    if r.iter().any(|ri| !is_unit(ri, n)) {
        return Err(ProofAbort::InvalidElement);
    }
    let u = r.iter().zip(&a).map(|(ri, row)| blind(n, ri, points.x_points(), row, None)).collect();
    let w = a.iter().map(|row| combine(points.y_bits(), row, None)).collect();
    Ok((GhiChallenge { u }, GhiVerifierSecret { reveal: GhiReveal { r, a }, w }))
}

/// Step 1: draws `r_i ∈ Z_n^*` and `a_{i,j} ∈ Z_2` for a batch of `l` challenges.
pub fn ghi_verifier_challenge<T: ModScalar, R: RngCore + ?Sized>(
    pk: &PublicKey<T>,
    points: &ProofPoints<T>,
    l: usize,
    rng: &mut R,
) -> (GhiChallenge<T>, GhiVerifierSecret<T>) {
    let n = pk.n();
    let r = (0..l).map(|_| random_unit(rng, n)).collect();
    let a = (0..l).map(|_| random_bits(rng, points.len())).collect();
    ghi_challenge_from(n, points, r, a).expect("freshly drawn randomness is well formed")
}

/// Prover state between its commitment (step 2) and its opening (step 4).
pub struct GhiProverState<T> {
    n: T,
    points: ProofPoints<T>,
    challenge: GhiChallenge<T>,
    answers: Vec<bool>,
    commitment: Commitment,
}

/// Step 2: checks the points, answers `h(u_i)` and commits to the answers.
pub fn ghi_prover_answer<T: ModScalar, R: RngCore + ?Sized>(
    sk: &PrivateKey<T>,
    pk: &PublicKey<T>,
    points: &ProofPoints<T>,
    challenge: &GhiChallenge<T>,
    rng: &mut R,
) -> Result<(GhiProverState<T>, Digest32), ProofAbort> {
    if !sk.matches(pk) {
        return Err(ProofAbort::Malformed("key mismatch"));
    }
    let images = sk.image_bits(points.x_points()).map_err(|_| ProofAbort::InvalidElement)?;
    if images != points.y_bits() {
        return Err(ProofAbort::PointsDoNotInterpolate);
    }
    if challenge.u.is_empty() {
        return Err(ProofAbort::Malformed("empty challenge"));
    }
    if challenge.u.iter().any(|u| !is_unit(u, pk.n())) {
        return Err(ProofAbort::InvalidElement);
    }
    let answers = sk.image_bits(&challenge.u).map_err(|_| ProofAbort::InvalidElement)?;
    let commitment = commitment::commit(&pack_bits(&answers), rng);
    let c = commitment.c;
    let state =
        GhiProverState { n: pk.n().clone(), points: points.clone(), challenge: challenge.clone(), answers, commitment };
    Ok((state, c))
}

/// Step 4: releases the answers only if the revealed randomness rebuilds every `u_i`.
pub fn ghi_prover_open<T: ModScalar>(
    state: GhiProverState<T>,
    reveal: &GhiReveal<T>,
) -> Result<GhiOpening, ProofAbort> {
    if reveal.r.len() != state.challenge.u.len() {
        return Err(ProofAbort::RevealMismatch);
    }
    let (rebuilt, _) = ghi_challenge_from(&state.n, &state.points, reveal.r.clone(), reveal.a.clone())
        .map_err(|_| ProofAbort::RevealMismatch)?;
    if rebuilt != state.challenge {
        return Err(ProofAbort::RevealMismatch);
    }
    Ok(GhiOpening { answers: state.answers, decommit: state.commitment.decommit })
}

/// Step 5: accepts iff the commitment opens and every answer matches.
pub fn ghi_verifier_check<T>(secret: &GhiVerifierSecret<T>, answers: &[bool], c: &[u8], decommit: &[u8]) -> bool {
    commitment::open(&pack_bits(answers), c, decommit) && answers == secret.w.as_slice()
}

/// Verifier waiting for the prover's commitment.
pub struct GhiVerifier<T> {
    secret: GhiVerifierSecret<T>,
}

/// Verifier that has revealed its randomness and waits for the opening.
pub struct GhiVerifierAwaitingOpening<T> {
    secret: GhiVerifierSecret<T>,
    c: Digest32,
}

impl<T: ModScalar> GhiVerifier<T> {
    pub fn start<R: RngCore + ?Sized>(
        pk: &PublicKey<T>,
        points: &ProofPoints<T>,
        l: usize,
        rng: &mut R,
    ) -> (Self, GhiChallenge<T>) {
        let (challenge, secret) = ghi_verifier_challenge(pk, points, l, rng);
        (Self { secret }, challenge)
    }

    pub fn receive_commitment(self, c: Digest32) -> (GhiVerifierAwaitingOpening<T>, GhiReveal<T>) {
        let reveal = self.secret.reveal();
        (GhiVerifierAwaitingOpening { secret: self.secret, c }, reveal)
    }
}

impl<T> GhiVerifierAwaitingOpening<T> {
    pub fn finish(self, opening: &GhiOpening) -> bool {
        ghi_verifier_check(&self.secret, &opening.answers, &self.c, &opening.decommit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keys::keypair_from_primes;
    use crate::params::DomainParams;
    use crate::sign::sign;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    type Fixture = (PublicKey<u64>, PrivateKey<u64>, ProofPoints<u64>);

    fn tiny(message: &str) -> Fixture {
        let params = DomainParams { modulus_bits: 16, l_key: 6, ..Default::default() };
        let (pk, sk) = keypair_from_primes(7u64, 11, b"ghi".to_vec(), params).unwrap();
        let key = ProofPoints::new(pk.key_points().unwrap(), pk.y_gen().to_vec()).unwrap();
        let sig = sign(message, &sk, &pk).unwrap();
        let mess = ProofPoints::new(pk.message_points(message).unwrap(), sig.bits().to_vec()).unwrap();
        let points = key.concat(&mess);
        (pk, sk, points)
    }

    #[test]
    fn zero_exponents_give_plain_squares() {
        let (pk, _, points) = tiny("m");
        let r = vec![3u64, 5, 8];
        let a = vec![vec![false; points.len()]; 3];
        let (ch, secret) = ghi_challenge_from(pk.n(), &points, r, a).unwrap();
        assert_eq!(ch.u, vec![9, 25, 64]);
        assert_eq!(secret.expected_answers(), &[false, false, false]);
    }

    #[test]
    fn reconstruction_matches_challenge() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let (pk, _, points) = tiny("m");
        let (ch, secret) = ghi_verifier_challenge(&pk, &points, 20, &mut rng);
        for ((u, r), a) in ch.u.iter().zip(&secret.reveal.r).zip(&secret.reveal.a) {
            let mut expect = r * r % 77;
            for (x, &bit) in points.x_points().iter().zip(a) {
                if bit {
                    expect = expect * x % 77;
                }
            }
            assert_eq!(*u, expect);
        }
    }

    #[test]
    fn honest_run_accepts_and_answers_match() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let (pk, sk, points) = tiny("MOVA|Bern|Thun");
        for _ in 0..200 {
            let (ch, secret) = ghi_verifier_challenge(&pk, &points, 20, &mut rng);
            let (state, c) = ghi_prover_answer(&sk, &pk, &points, &ch, &mut rng).unwrap();
            assert_eq!(state.answers, secret.expected_answers());
            let opening = ghi_prover_open(state, &secret.reveal()).unwrap();
            assert!(ghi_verifier_check(&secret, &opening.answers, &c, &opening.decommit));
        }
    }

    #[test]
    fn flipped_image_aborts() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let (pk, sk, points) = tiny("m");
        let mut y = points.y_bits().to_vec();
        let last = y.len() - 1;
        y[last] = !y[last];
        let bad = ProofPoints::new(points.x_points().to_vec(), y).unwrap();
        let (ch, _) = ghi_verifier_challenge(&pk, &bad, 20, &mut rng);
        assert_eq!(ghi_prover_answer(&sk, &pk, &bad, &ch, &mut rng).err(), Some(ProofAbort::PointsDoNotInterpolate));
    }

    #[test]
    fn wrong_reveal_aborts() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let (pk, sk, points) = tiny("m");
        let (ch, secret) = ghi_verifier_challenge(&pk, &points, 20, &mut rng);
        let (state, _) = ghi_prover_answer(&sk, &pk, &points, &ch, &mut rng).unwrap();
        let mut reveal = secret.reveal();
        reveal.r[0] = if reveal.r[0] == 2 { 3 } else { 2 };
        assert_eq!(ghi_prover_open(state, &reveal), Err(ProofAbort::RevealMismatch));
    }

    #[test]
    fn typestate_flow() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let (pk, sk, points) = tiny("m");
        let (verifier, ch) = GhiVerifier::start(&pk, &points, 20, &mut rng);
        let (state, c) = ghi_prover_answer(&sk, &pk, &points, &ch, &mut rng).unwrap();
        let (verifier, reveal) = verifier.receive_commitment(c);
        let opening = ghi_prover_open(state, &reveal).unwrap();
        assert!(verifier.finish(&opening));
        let (v2, ch2) = GhiVerifier::start(&pk, &points, 20, &mut rng);
        let (state2, c2) = ghi_prover_answer(&sk, &pk, &points, &ch2, &mut rng).unwrap();
        let (v2, reveal2) = v2.receive_commitment(c2);
        let mut opening2 = ghi_prover_open(state2, &reveal2).unwrap();
        opening2.answers[0] = !opening2.answers[0];
        assert!(!v2.finish(&opening2));
    }
}
