//! Anti-Latin squares and decodable relay pairs.
//!
//! With the additive encoder `Y1 = M + L`, `Y2 = L`, a deterministic relay is
//! a pair of `d x d` matrices `(phi3, phi4)` indexed `[Y1][Y2]`. The sink can
//! decode iff the value pair at a cell pins down the cell's difference
//! `j - i` ([`is_decodable_pair`]); Eve cannot recover `M` even by choosing
//! the row or column she feeds the relay iff both matrices are anti-Latin
//! ([`is_anti_latin`]).

mod construct;
mod search;
mod tables;

pub use construct::{construct, construct_even, construct_odd};
pub use tables::reference_pair;
pub use search::{
    canonical_form, search_2x2_decodable_anti_latin, search_decodable_pairs, CanonicalPair,
    PairSearchOutcome, Search2x2Report,
};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Alphabet, Symbol, SymbolMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AntiLatinError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("pair is not decodable")]
    NotDecodable,
    #[error("construction for d = {d} left cell ({row}, {col}) {problem}")]
    IncompleteConstruction { d: usize, row: usize, col: usize, problem: &'static str },
}

/// The two relay matrices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatrixPair {
    pub phi3: SymbolMatrix,
    pub phi4: SymbolMatrix,
}

impl MatrixPair {
    pub fn new(phi3: SymbolMatrix, phi4: SymbolMatrix) -> Result<Self, AntiLatinError> {
        let alphabet = Alphabet::new(phi3.size())?;
        phi3.validate(&alphabet)?;
        phi4.validate(&alphabet)?;
        Ok(MatrixPair { phi3, phi4 })
    }

    pub fn from_rows(phi3: &[Vec<Symbol>], phi4: &[Vec<Symbol>]) -> Result<Self, AntiLatinError> {
        MatrixPair::new(SymbolMatrix::from_rows(phi3)?, SymbolMatrix::from_rows(phi4)?)
    }

    pub fn order(&self) -> usize {
        self.phi3.size()
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::new(self.order()).expect("validated at construction")
    }

    /// Decoder for the additive encoder: the cell `(i, j)` carries
    /// `M = i - j`, so each attained value pair maps to `-(j - i)`.
    /// Unattained value pairs decode to 0.
    pub fn difference_decoder(&self) -> Result<SymbolMatrix, AntiLatinError> {
        let d = self.order();
        let alphabet = self.alphabet();
        let mut psi: Vec<Option<Symbol>> = vec![None; d * d];
        for i in 0..d {
            for j in 0..d {
                let slot = &mut psi[self.phi3.get(i, j) * d + self.phi4.get(i, j)];
                let m = alphabet.sub(i, j);
                match *slot {
                    None => *slot = Some(m),
                    Some(prev) if prev != m => return Err(AntiLatinError::NotDecodable),
                    Some(_) => {}
                }
            }
        }
        Ok(SymbolMatrix::from_fn(d, |a, b| psi[a * d + b].unwrap_or(0)))
    }
}

/// True iff every row and every column of `matrix` repeats some value.
pub fn is_anti_latin(matrix: &SymbolMatrix) -> bool {
    let n = matrix.size();
    let max = matrix.cells().iter().copied().max().unwrap_or(0);
    let mut seen = vec![0usize; max + 1];
    let mut stamp = 0usize;
    let mut has_repeat = |values: &mut dyn Iterator<Item = Symbol>| {
        stamp += 1;
        for v in values {
            if seen[v] == stamp {
                return true;
            }
            seen[v] = stamp;
        }
        false
    };
    (0..n).all(|r| has_repeat(&mut matrix.row(r).iter().copied()))
        && (0..n).all(|c| has_repeat(&mut matrix.column(c)))
}

/// [`is_anti_latin`] on raw rows, rejecting non-square input.
pub fn is_anti_latin_rows(rows: &[Vec<Symbol>]) -> Result<bool, AntiLatinError> {
    Ok(is_anti_latin(&SymbolMatrix::from_rows(rows)?))
}

/// True iff equal value pairs `(phi3, phi4)` only occur on cells with the
/// same difference `j - i (mod d)`.
pub fn is_decodable_pair(pair: &MatrixPair) -> bool {
    let d = pair.order();
    let mut owner: HashMap<(Symbol, Symbol), Symbol> = HashMap::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let diff = (j + d - i) % d;
            let key = (pair.phi3.get(i, j), pair.phi4.get(i, j));
            if *owner.entry(key).or_insert(diff) != diff {
                return false;
            }
        }
    }
    true
}
