//! Legendre symbol by Euler's criterion and its {+1, -1} group.

use crate::scalar::ModScalar;
use crate::{MovaError, Result};

/// Element of the two-element group {+1, -1}.
///
/// Bit encoding: `+1` is `false` (0) and `-1` is `true` (1), so the group
/// product becomes XOR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Plus,
    Minus,
}

impl Symbol {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Symbol::Minus
        } else {
            Symbol::Plus
        }
    }

    pub fn bit(self) -> bool {
        self == Symbol::Minus
    }

    pub fn value(self) -> i8 {
        match self {
            Symbol::Plus => 1,
            Symbol::Minus => -1,
        }
    }
}

impl std::ops::Mul for Symbol {
    type Output = Symbol;

    fn mul(self, rhs: Symbol) -> Symbol {
        Symbol::from_bit(self.bit() ^ rhs.bit())
    }
}

/// Legendre symbol `(a/p)` computed as `a^((p-1)/2) mod p`.
///
/// `a` is reduced modulo `p` first. Fails when `a ≡ 0 (mod p)`, when `p` is
/// even or below 3, and when the exponentiation lands outside `{1, p-1}`
/// (which proves `p` composite).
pub fn legendre<T: ModScalar>(a: &T, p: &T) -> Result<Symbol> {
    if *p < T::from_u64(3) || p.is_even() {
        return Err(MovaError::InvalidPrime);
    }
    let a = a.clone() % p.clone();
    if a.is_zero() {
        return Err(MovaError::ZeroResidue);
    }
    let p_minus_one = p.clone() - T::one();
    let half = p_minus_one.clone() / T::from_u64(2);
    let x = a.pow_mod(&half, p);
    if x.is_one() {
        Ok(Symbol::Plus)
    } else if x == p_minus_one {
        Ok(Symbol::Minus)
    } else {
        Err(MovaError::InvalidPrime)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    #[test]
    fn small_cases() {
        assert_eq!(legendre(&1u64, &7), Ok(Symbol::Plus));
        // Squares mod 7 are {1, 2, 4}.
        assert_eq!(legendre(&2u64, &7), Ok(Symbol::Plus));
        assert_eq!(legendre(&3u64, &7), Ok(Symbol::Minus));
        assert_eq!(legendre(&BigUint::from(3u32), &BigUint::from(7u32)), Ok(Symbol::Minus));
    }

    #[test]
    fn errors() {
        assert_eq!(legendre(&0u64, &7), Err(MovaError::ZeroResidue));
        assert_eq!(legendre(&14u64, &7), Err(MovaError::ZeroResidue));
        assert_eq!(legendre(&3u64, &8), Err(MovaError::InvalidPrime));
        assert_eq!(legendre(&1u64, &2), Err(MovaError::InvalidPrime));
        // 3^((15-1)/2) = 3^7 mod 15 = 12, neither 1 nor 14.
        assert_eq!(legendre(&3u64, &15), Err(MovaError::InvalidPrime));
    }

    #[test]
    fn symbol_group_is_xor() {
        use Symbol::*;
        assert_eq!(Plus * Plus, Plus);
        assert_eq!(Plus * Minus, Minus);
        assert_eq!(Minus * Minus, Plus);
        assert_eq!(Minus.value(), -1);
        assert!(Symbol::from_bit(true).bit());
    }
}
