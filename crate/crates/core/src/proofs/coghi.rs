//! Denial: the signer proves that claimed signature points do not interpolate its homomorphism.
//!
//! Randomness layout: `r` is `l × t`, `a` is indexed `a[i][k][j]` (`l × t × s`),
//! `lambda` has length `l`. Here `s` counts the key points and `t` the
//! claimed signature points.

use rand::{Rng, RngCore};

use super::{blind, combine, is_unit, random_bits, ProofAbort, ProofPoints};
use crate::bits::pack_bits;
use crate::commitment::{self, Commitment, Digest32, DECOMMIT_LEN};
use crate::keys::{PrivateKey, PublicKey};
use crate::scalar::{random_unit, ModScalar};

/// Step 1 message: `u_{i,k}` and `w_{i,k}`, both `l × t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoGhiChallenge<T> {
    pub u: Vec<Vec<T>>,
    pub w: Vec<Vec<bool>>,
}

/// Step 3 message. `lambda` stays secret: it is what the prover must find.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoGhiReveal<T> {
    pub r: Vec<Vec<T>>,
    pub a: Vec<Vec<Vec<bool>>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoGhiVerifierSecret<T> {
    reveal: CoGhiReveal<T>,
    lambda: Vec<bool>,
}

impl<T: Clone> CoGhiVerifierSecret<T> {
    pub fn reveal(&self) -> CoGhiReveal<T> {
        self.reveal.clone()
    }

    pub fn lambda(&self) -> &[bool] {
        &self.lambda
    }
}

/// Step 4 message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoGhiOpening {
    pub lambda: Vec<bool>,
    pub decommit: [u8; DECOMMIT_LEN],
}

fn build<T: ModScalar>(
    n: &T,
    key_points: &ProofPoints<T>,
    sig_points: &ProofPoints<T>,
    r: &[Vec<T>],
    a: &[Vec<Vec<bool>>],
    lambda: &[bool],
) -> Result<CoGhiChallenge<T>, ProofAbort> {
    let (s, t) = (key_points.len(), sig_points.len());
    if r.is_empty() || r.len() != a.len() || r.len() != lambda.len() {
        return Err(ProofAbort::Malformed("batch sizes differ"));
    }
    if r.iter().any(|row| row.len() != t) || a.iter().any(|row| row.len() != t || row.iter().any(|c| c.len() != s)) {
        return Err(ProofAbort::Malformed("randomness dimensions do not match the points"));
    }
    if r.iter().flatten().any(|x| !is_unit(x, n)) {
        return Err(ProofAbort::InvalidElement);
    }
    let mut u = Vec::with_capacity(r.len());
    let mut w = Vec::with_capacity(r.len());
    for ((r_row, a_row), &lam) in r.iter().zip(a).zip(lambda) {
        let mut u_row = Vec::with_capacity(t);
        let mut w_row = Vec::with_capacity(t);
        for (k, (r_ik, a_ik)) in r_row.iter().zip(a_row).enumerate() {
            let x_hat = &sig_points.x_points()[k];
            let y_claimed = sig_points.y_bits()[k];
            u_row.push(blind(n, r_ik, key_points.x_points(), a_ik, Some((x_hat, lam))));
            w_row.push(combine(key_points.y_bits(), a_ik, Some((lam, y_claimed))));
        }
        u.push(u_row);
        w.push(w_row);
    }
    Ok(CoGhiChallenge { u, w })
}

/// Builds the challenge from explicit randomness.
pub fn coghi_challenge_from<T: ModScalar>(
    n: &T,
    key_points: &ProofPoints<T>,
    sig_points: &ProofPoints<T>,
    r: Vec<Vec<T>>,
    a: Vec<Vec<Vec<bool>>>,
    lambda: Vec<bool>,
) -> Result<(CoGhiChallenge<T>, CoGhiVerifierSecret<T>), ProofAbort> {
    let challenge = build(n, key_points, sig_points, &r, &a, &lambda)?;
    Ok((challenge, CoGhiVerifierSecret { reveal: CoGhiReveal { r, a }, lambda }))
}

/// Step 1: draws `r_{i,k}`, `a_{i,j,k}` and `λ_i` for a batch of `l` challenges.
pub fn coghi_verifier_challenge<T: ModScalar, R: RngCore + ?Sized>(
    pk: &PublicKey<T>,
    key_points: &ProofPoints<T>,
    sig_points: &ProofPoints<T>,
    l: usize,
    rng: &mut R,
) -> (CoGhiChallenge<T>, CoGhiVerifierSecret<T>) {
    let n = pk.n();
    let (s, t) = (key_points.len(), sig_points.len());
    let r = (0..l).map(|_| (0..t).map(|_| random_unit(rng, n)).collect()).collect();
    let a = (0..l).map(|_| (0..t).map(|_| random_bits(rng, s)).collect()).collect();
    let lambda = random_bits(rng, l);
    coghi_challenge_from(n, key_points, sig_points, r, a, lambda).expect("freshly drawn randomness is well formed")
}

pub struct CoGhiProverState<T> {
    n: T,
    key_points: ProofPoints<T>,
    sig_points: ProofPoints<T>,
    challenge: CoGhiChallenge<T>,
    lambda: Vec<bool>,
    commitment: Commitment,
}

/// Step 2: recovers each `λ_i` from `w_{i,k} ⊕ h(u_{i,k})` at an index where the
/// claimed image differs from the true one, and commits to `λ`.
///
/// `λ_i` is read at the first differing index and must agree at every other
/// differing index; otherwise the verifier was dishonest and a random `λ_i`
/// is committed instead.
pub fn coghi_prover_answer<T: ModScalar, R: RngCore + ?Sized>(
    sk: &PrivateKey<T>,
    pk: &PublicKey<T>,
    key_points: &ProofPoints<T>,
    sig_points: &ProofPoints<T>,
    challenge: &CoGhiChallenge<T>,
    rng: &mut R,
) -> Result<(CoGhiProverState<T>, Digest32), ProofAbort> {
    if !sk.matches(pk) {
        return Err(ProofAbort::Malformed("key mismatch"));
    }
    let t = sig_points.len();
    let true_images = sk.image_bits(sig_points.x_points()).map_err(|_| ProofAbort::InvalidElement)?;
    let differing: Vec<usize> = (0..t).filter(|&k| true_images[k] != sig_points.y_bits()[k]).collect();
    if differing.is_empty() {
        return Err(ProofAbort::SignatureValid);
    }
    if challenge.u.is_empty()
        || challenge.u.len() != challenge.w.len()
        || challenge.u.iter().zip(&challenge.w).any(|(u, w)| u.len() != t || w.len() != t)
    {
        return Err(ProofAbort::Malformed("challenge dimensions do not match the points"));
    }
    if challenge.u.iter().flatten().any(|u| !is_unit(u, pk.n())) {
        return Err(ProofAbort::InvalidElement);
    }

    let mut lambda = Vec::with_capacity(challenge.u.len());
    for (u_row, w_row) in challenge.u.iter().zip(&challenge.w) {
        let mut recovered = None;
        let mut consistent = true;
        for &k in &differing {
            let v = sk.homomorphism(&u_row[k]).map_err(|_| ProofAbort::InvalidElement)?.bit();
            let candidate = w_row[k] ^ v;
            match recovered {
                None => recovered = Some(candidate),
                Some(prev) if prev != candidate => {
                    consistent = false;
                    break;
                }
                Some(_) => {}
            }
        }
        lambda.push(match (consistent, recovered) {
            (true, Some(l)) => l,
            _ => rng.gen(),
        });
    }

    let commitment = commitment::commit(&pack_bits(&lambda), rng);
    let c = commitment.c;
    let state = CoGhiProverState {
        n: pk.n().clone(),
        key_points: key_points.clone(),
        sig_points: sig_points.clone(),
        challenge: challenge.clone(),
        lambda,
        commitment,
    };
    Ok((state, c))
}

/// Step 4: rebuilds `(u, w)` from the revealed randomness and the recovered `λ`;
/// releases `λ` only on an exact match.
pub fn coghi_prover_open<T: ModScalar>(
    state: CoGhiProverState<T>,
    reveal: &CoGhiReveal<T>,
) -> Result<CoGhiOpening, ProofAbort> {
    let rebuilt = build(&state.n, &state.key_points, &state.sig_points, &reveal.r, &reveal.a, &state.lambda)
        .map_err(|_| ProofAbort::RevealMismatch)?;
    if rebuilt != state.challenge {
        return Err(ProofAbort::RevealMismatch);
    }
    Ok(CoGhiOpening { lambda: state.lambda, decommit: state.commitment.decommit })
}

/// Step 5: accepts (the signature is invalid) iff the commitment opens to the verifier's `λ`.
pub fn coghi_verifier_check<T>(secret: &CoGhiVerifierSecret<T>, lambda: &[bool], c: &[u8], decommit: &[u8]) -> bool {
    commitment::open(&pack_bits(lambda), c, decommit) && lambda == secret.lambda.as_slice()
}

pub struct CoGhiVerifier<T> {
    secret: CoGhiVerifierSecret<T>,
}

pub struct CoGhiVerifierAwaitingOpening<T> {
    secret: CoGhiVerifierSecret<T>,
    c: Digest32,
}

impl<T: ModScalar> CoGhiVerifier<T> {
    pub fn start<R: RngCore + ?Sized>(
        pk: &PublicKey<T>,
        key_points: &ProofPoints<T>,
        sig_points: &ProofPoints<T>,
        l: usize,
        rng: &mut R,
    ) -> (Self, CoGhiChallenge<T>) {
        let (challenge, secret) = coghi_verifier_challenge(pk, key_points, sig_points, l, rng);
        (Self { secret }, challenge)
    }

    pub fn receive_commitment(self, c: Digest32) -> (CoGhiVerifierAwaitingOpening<T>, CoGhiReveal<T>) {
        let reveal = self.secret.reveal();
        (CoGhiVerifierAwaitingOpening { secret: self.secret, c }, reveal)
    }
}

impl<T> CoGhiVerifierAwaitingOpening<T> {
    pub fn finish(self, opening: &CoGhiOpening) -> bool {
        coghi_verifier_check(&self.secret, &opening.lambda, &self.c, &opening.decommit)
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

    struct Fixture {
        pk: PublicKey<u64>,
        sk: PrivateKey<u64>,
        key: ProofPoints<u64>,
        xs: Vec<u64>,
        sig: Vec<bool>,
    }

    fn tiny() -> Fixture {
        let params = DomainParams { modulus_bits: 16, l_key: 6, ..Default::default() };
        let (pk, sk) = keypair_from_primes(7u64, 11, b"coghi".to_vec(), params).unwrap();
        let key = ProofPoints::new(pk.key_points().unwrap(), pk.y_gen().to_vec()).unwrap();
        let xs = pk.message_points("MOVA|Sion|Brig").unwrap();
        let sig = sign("MOVA|Sion|Brig", &sk, &pk).unwrap().bits().to_vec();
        Fixture { pk, sk, key, xs, sig }
    }

    fn claimed(f: &Fixture, flips: &[usize]) -> ProofPoints<u64> {
        let mut y = f.sig.clone();
        for &k in flips {
            y[k] = !y[k];
        }
        ProofPoints::new(f.xs.clone(), y).unwrap()
    }

    #[test]
    fn zero_lambda_ignores_claimed_bits() {
        let f = tiny();
        let t = f.xs.len();
        let r = vec![vec![2u64; t]];
        let a = vec![vec![vec![true, false, true, false, false, false]; t]];
        let (c1, _) =
            coghi_challenge_from(f.pk.n(), &f.key, &claimed(&f, &[]), r.clone(), a.clone(), vec![false]).unwrap();
        let (c2, _) = coghi_challenge_from(f.pk.n(), &f.key, &claimed(&f, &[0, 3]), r, a, vec![false]).unwrap();
        assert_eq!(c1.w, c2.w);
    }

    #[test]
    fn single_flip_recovers_lambda() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let f = tiny();
        for flip in 0..f.xs.len() {
            let bad = claimed(&f, &[flip]);
            let (ch, secret) = coghi_verifier_challenge(&f.pk, &f.key, &bad, 20, &mut rng);
            let (state, c) = coghi_prover_answer(&f.sk, &f.pk, &f.key, &bad, &ch, &mut rng).unwrap();
            assert_eq!(state.lambda, secret.lambda());
            let opening = coghi_prover_open(state, &secret.reveal()).unwrap();
            assert!(coghi_verifier_check(&secret, &opening.lambda, &c, &opening.decommit));
        }
    }

    #[test]
    fn valid_signature_cannot_be_denied() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let f = tiny();
        let good = claimed(&f, &[]);
        let (ch, _) = coghi_verifier_challenge(&f.pk, &f.key, &good, 20, &mut rng);
        assert_eq!(
            coghi_prover_answer(&f.sk, &f.pk, &f.key, &good, &ch, &mut rng).err(),
            Some(ProofAbort::SignatureValid)
        );
    }

    #[test]
    fn tampered_w_leads_to_rejection() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let f = tiny();
        let bad = claimed(&f, &[0, 1, 2, 3]);
        let mut rejected = 0;
        for _ in 0..50 {
            let (mut ch, secret) = coghi_verifier_challenge(&f.pk, &f.key, &bad, 20, &mut rng);
            // Inconsistent w at two differing indices forces the random-λ fallback.
            for row in &mut ch.w {
                row[0] = !row[0];
            }
            let (state, c) = coghi_prover_answer(&f.sk, &f.pk, &f.key, &bad, &ch, &mut rng).unwrap();
            match coghi_prover_open(state, &secret.reveal()) {
                Err(ProofAbort::RevealMismatch) => rejected += 1,
                Ok(o) => assert!(!coghi_verifier_check(&secret, &o.lambda, &c, &o.decommit)),
                Err(e) => panic!("unexpected {e}"),
            }
        }
        assert_eq!(rejected, 50);
    }

    #[test]
    fn altered_reveal_aborts() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let f = tiny();
        let bad = claimed(&f, &[5]);
        let (ch, secret) = coghi_verifier_challenge(&f.pk, &f.key, &bad, 20, &mut rng);
        let (state, _) = coghi_prover_answer(&f.sk, &f.pk, &f.key, &bad, &ch, &mut rng).unwrap();
        let mut reveal = secret.reveal();
        reveal.a[0][0][0] = !reveal.a[0][0][0];
        assert_eq!(coghi_prover_open(state, &reveal), Err(ProofAbort::RevealMismatch));
    }

    #[test]
    fn typestate_flow_and_lambda_hidden_from_challenge() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let f = tiny();
        let bad = claimed(&f, &[7]);
        let (verifier, ch) = CoGhiVerifier::start(&f.pk, &f.key, &bad, 20, &mut rng);
        let (state, c) = coghi_prover_answer(&f.sk, &f.pk, &f.key, &bad, &ch, &mut rng).unwrap();
        let (verifier, reveal) = verifier.receive_commitment(c);
        let opening = coghi_prover_open(state, &reveal).unwrap();
        assert!(verifier.finish(&opening));
    }
}
