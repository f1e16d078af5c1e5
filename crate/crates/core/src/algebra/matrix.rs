use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{AlgebraError, Alphabet, Symbol};

/// Square `d x d` matrix of symbols, row-major. Row index is the first
/// argument of the map it tabulates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolMatrix {
    n: usize,
    cells: Vec<Symbol>,
}

impl SymbolMatrix {
    pub fn from_rows(rows: &[Vec<Symbol>]) -> Result<Self, AlgebraError> {
        let n = rows.len();
        let mut cells = Vec::with_capacity(n * n);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(AlgebraError::NonSquare { row, len: r.len(), expected: n });
            }
            cells.extend_from_slice(r);
        }
        Ok(SymbolMatrix { n, cells })
    }

    /// Tabulates `f(i, j)` for `i, j` in `0..n`.
    pub fn from_fn(n: usize, mut f: impl FnMut(Symbol, Symbol) -> Symbol) -> Self {
        let mut cells = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                cells.push(f(i, j));
            }
        }
        SymbolMatrix { n, cells }
    }

    pub fn constant(n: usize, value: Symbol) -> Self {
        SymbolMatrix { n, cells: vec![value; n * n] }
    }

    pub(crate) fn from_cells(n: usize, cells: Vec<Symbol>) -> Self {
        debug_assert_eq!(cells.len(), n * n);
        SymbolMatrix { n, cells }
    }

    /// Checks that every entry lies in the alphabet and the side matches it.
    pub fn validate(&self, alphabet: &Alphabet) -> Result<(), AlgebraError> {
        if self.n != alphabet.size() {
            return Err(AlgebraError::NonSquare { row: 0, len: self.n, expected: alphabet.size() });
        }
        for &c in &self.cells {
            alphabet.check(c)?;
        }
        Ok(())
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Symbol {
        self.cells[row * self.n + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Symbol) {
        self.cells[row * self.n + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Symbol] {
        &self.cells[row * self.n..(row + 1) * self.n]
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.n).map(move |r| self.get(r, col))
    }

    pub fn cells(&self) -> &[Symbol] {
        &self.cells
    }

    pub fn to_rows(&self) -> Vec<Vec<Symbol>> {
        self.cells.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Applies `f` to every entry.
    pub fn map_values(&self, f: impl Fn(Symbol) -> Symbol) -> Self {
        SymbolMatrix { n: self.n, cells: self.cells.iter().map(|&c| f(c)).collect() }
    }
}

impl fmt::Debug for SymbolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

/// Aligned plain-text rendering, one matrix row per line.
impl fmt::Display for SymbolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.cells.iter().map(|c| c.to_string().len()).max().unwrap_or(1);
        for r in 0..self.n {
            let line: Vec<String> = self.row(r).iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl Serialize for SymbolMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymbolMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<Symbol>>::deserialize(deserializer)?;
        SymbolMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_round_trip_and_orientation() {
        let m = SymbolMatrix::from_rows(&[vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(m.get(1, 0), 2);
        assert_eq!(m.column(1).collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(m.to_rows(), vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(serde_json::to_string(&m).unwrap(), "[[0,1],[2,3]]");
    }

    #[test]
    fn rejects_ragged_rows() {
        assert!(SymbolMatrix::from_rows(&[vec![0, 1], vec![2]]).is_err());
        assert!(serde_json::from_str::<SymbolMatrix>("[[0,1,2],[0,1,2]]").is_err());
    }

    #[test]
    fn validate_checks_range() {
        let z2 = Alphabet::binary();
        assert!(SymbolMatrix::constant(2, 1).validate(&z2).is_ok());
        assert!(SymbolMatrix::constant(2, 2).validate(&z2).is_err());
        assert!(SymbolMatrix::constant(3, 0).validate(&z2).is_err());
    }
}
