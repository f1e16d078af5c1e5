//! Exact arithmetic substrate: residues modulo `d`, rationals, symbol
//! matrices, and finite probability distributions with entropy functionals.

mod distribution;
mod matrix;
mod rational;

pub use distribution::{entropy, ExactDistribution, Outcome};
pub use matrix::SymbolMatrix;
pub use rational::Rational;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A symbol is a canonical residue in `0..d`.
pub type Symbol = usize;

/// Largest alphabet any code in this crate is allowed to use. Matrices are
/// `d * d` and joint distributions grow with `d^2`, so this keeps every
/// table comfortably in memory.
pub const MAX_ALPHABET: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("alphabet size must be at least 2 (got {0})")]
    InvalidAlphabet(usize),
    #[error("alphabet size {0} exceeds the supported maximum {MAX_ALPHABET}")]
    AlphabetTooLarge(usize),
    #[error("symbol {symbol} is outside Z_{d}")]
    InvalidSymbol { symbol: Symbol, d: usize },
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(Rational),
    #[error("negative probability {0}")]
    NegativeMass(Rational),
    #[error("outcome arity {found} does not match distribution arity {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("variable index {index} out of range for arity {arity}")]
    VariableOutOfRange { index: usize, arity: usize },
    #[error("conditioning event has probability zero")]
    EmptyCondition,
    #[error("logarithm base must be finite and greater than 1 (got {0})")]
    InvalidBase(f64),
    #[error("distribution has no outcomes")]
    EmptyDistribution,
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NonSquare { row: usize, len: usize, expected: usize },
}

/// The symbol set `Z_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Alphabet {
    d: usize,
    is_prime: bool,
}

impl Alphabet {
    pub fn new(d: usize) -> Result<Self, AlgebraError> {
        if d < 2 {
            return Err(AlgebraError::InvalidAlphabet(d));
        }
        if d > MAX_ALPHABET {
            return Err(AlgebraError::AlphabetTooLarge(d));
        }
        Ok(Alphabet { d, is_prime: is_prime(d) })
    }

    pub fn binary() -> Self {
        Alphabet { d: 2, is_prime: true }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.d
    }

    /// True when `Z_d` is a prime field.
    pub fn is_prime(&self) -> bool {
        self.is_prime
    }

    pub fn symbols(&self) -> std::ops::Range<Symbol> {
        0..self.d
    }

    pub fn check(&self, symbol: Symbol) -> Result<Symbol, AlgebraError> {
        if symbol < self.d {
            Ok(symbol)
        } else {
            Err(AlgebraError::InvalidSymbol { symbol, d: self.d })
        }
    }

    /// Addition on already-validated symbols.
    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        (a + b) % self.d
    }

    #[inline]
    pub fn sub(&self, a: Symbol, b: Symbol) -> Symbol {
        (a + self.d - b % self.d) % self.d
    }

    #[inline]
    pub fn neg(&self, a: Symbol) -> Symbol {
        (self.d - a % self.d) % self.d
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        (a * b) % self.d
    }

    /// Reduces an arbitrary signed integer to its canonical residue.
    pub fn reduce(&self, x: i64) -> Symbol {
        x.rem_euclid(self.d as i64) as Symbol
    }
}

impl TryFrom<usize> for Alphabet {
    type Error = AlgebraError;
    fn try_from(d: usize) -> Result<Self, Self::Error> {
        Alphabet::new(d)
    }
}

impl From<Alphabet> for usize {
    fn from(a: Alphabet) -> usize {
        a.d
    }
}

/// `(a + b) mod d`, rejecting symbols outside the alphabet.
pub fn mod_add(a: Symbol, b: Symbol, alphabet: &Alphabet) -> Result<Symbol, AlgebraError> {
    Ok(alphabet.add(alphabet.check(a)?, alphabet.check(b)?))
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod_add_examples() {
        let z3 = Alphabet::new(3).unwrap();
        assert_eq!(mod_add(1, 2, &z3).unwrap(), 0);
        for d in 2..9 {
            let a = Alphabet::new(d).unwrap();
            for x in a.symbols() {
                assert_eq!(mod_add(0, x, &a).unwrap(), x);
            }
        }
        assert_eq!(mod_add(1, 1, &Alphabet::binary()).unwrap(), 0);
    }

    #[test]
    fn mod_add_rejects_out_of_range() {
        let z3 = Alphabet::new(3).unwrap();
        assert_eq!(
            mod_add(3, 0, &z3),
            Err(AlgebraError::InvalidSymbol { symbol: 3, d: 3 })
        );
        assert!(mod_add(0, 7, &z3).is_err());
    }

    #[test]
    fn alphabet_bounds_and_primality() {
        assert!(Alphabet::new(0).is_err());
        assert!(Alphabet::new(1).is_err());
        assert!(Alphabet::new(MAX_ALPHABET + 1).is_err());
        let primes: Vec<usize> = (2..30).filter(|&d| Alphabet::new(d).unwrap().is_prime()).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        // brute-force divisor count
        for d in 2..200 {
            let divisors = (1..=d).filter(|k| d % k == 0).count();
            assert_eq!(Alphabet::new(d).unwrap().is_prime(), divisors == 2, "d = {d}");
        }
    }

    #[test]
    fn residue_helpers() {
        let z5 = Alphabet::new(5).unwrap();
        assert_eq!(z5.sub(1, 3), 3);
        assert_eq!(z5.neg(0), 0);
        assert_eq!(z5.neg(2), 3);
        assert_eq!(z5.reduce(-7), 3);
        assert_eq!(z5.mul(3, 4), 2);
    }
}
