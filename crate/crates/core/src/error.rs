use thiserror::Error;

/// Errors produced by the MOVA primitives.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MovaError {
    #[error("legendre symbol undefined: argument is divisible by the modulus")]
    ZeroResidue,
    #[error("legendre modulus must be an odd prime")]
    InvalidPrime,
    /// Deliberately carries no detail: a non-invertible element exposes a factor of `n`.
    #[error("invalid element")]
    InvalidElement,
    #[error("invalid domain parameters: {0}")]
    InvalidParams(String),
    #[error("message must be 1..={max} ASCII characters, got {len}")]
    InvalidMessage { len: usize, max: usize },
    #[error("element derivation exhausted its retry budget")]
    DerivationExhausted,
    #[error("prime generation failed after {0} attempts")]
    PrimeGeneration(usize),
    #[error("signature has {got} bits, expected {expected}")]
    SignatureLength { got: usize, expected: usize },
    #[error("character {0:?} is not in the signature alphabet")]
    BadCharacter(char),
    #[error("ticket: {0}")]
    Ticket(String),
    #[error("key file: {0}")]
    KeyFile(String),
}

pub type Result<T, E = MovaError> = std::result::Result<T, E>;
