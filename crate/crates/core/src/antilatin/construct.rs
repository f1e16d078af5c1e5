use super::{AntiLatinError, MatrixPair};
use crate::algebra::{Alphabet, Symbol, SymbolMatrix, MAX_ALPHABET};

/// Fills a matrix from inverse images, insisting every cell is hit once.
struct Filler {
    d: usize,
    cells: Vec<Option<Symbol>>,
}

impl Filler {
    fn new(d: usize) -> Self {
        Filler { d, cells: vec![None; d * d] }
    }

    fn assign(&mut self, row: i64, col: i64, value: Symbol) -> Result<(), AntiLatinError> {
        let n = self.d as i64;
        let (row, col) = (row.rem_euclid(n) as usize, col.rem_euclid(n) as usize);
        let slot = &mut self.cells[row * self.d + col];
        if slot.is_some() {
            return Err(AntiLatinError::IncompleteConstruction { d: self.d, row, col, problem: "assigned twice" });
        }
        *slot = Some(value);
        Ok(())
    }

    fn finish(self) -> Result<SymbolMatrix, AntiLatinError> {
        let d = self.d;
        if let Some(idx) = self.cells.iter().position(Option::is_none) {
            return Err(AntiLatinError::IncompleteConstruction { d, row: idx / d, col: idx % d, problem: "unassigned" });
        }
        let cells = self.cells;
        Ok(SymbolMatrix::from_fn(d, |i, j| cells[i * d + j].expect("checked above")))
    }
}

fn check_order(d: usize, parity: usize, min: usize) -> Result<i64, AntiLatinError> {
    if d < min || d % 2 != parity {
        let kind = if parity == 1 { "odd" } else { "even" };
        return Err(AntiLatinError::InvalidOrder(format!("the {kind} construction needs an {kind} d >= {min}, got {d}")));
    }
    Alphabet::new(d)?;
    if d > MAX_ALPHABET {
        return Err(AntiLatinError::InvalidOrder(format!("d = {d} exceeds {MAX_ALPHABET}")));
    }
    Ok(d as i64)
}

/// Decodable anti-Latin pair for odd `d = 2l + 1 >= 3`.
///
/// `phi3` takes the value `k` on the hook `(k, k-l..=k)` plus `(k-l..k, k)`;
/// `phi4` is the same hook pattern with its corner moved to `(k+l, k)`.
pub fn construct_odd(d: usize) -> Result<MatrixPair, AntiLatinError> {
    let n = check_order(d, 1, 3)?;
    let l = (n - 1) / 2;
    let (mut p3, mut p4) = (Filler::new(d), Filler::new(d));
    for k in 0..n {
        let v = k as Symbol;
        for t in 0..=l {
            p3.assign(k, k - l + t, v)?;
            p4.assign(k + l, k - l + t, v)?;
        }
        for t in 1..=l {
            p3.assign(k - t, k, v)?;
            p4.assign(k + l - t, k, v)?;
        }
    }
    MatrixPair::new(p3.finish()?, p4.finish()?)
}

/// Decodable anti-Latin pair for even `d = 2l >= 4`.
///
/// The inverse images of `phi4` are listed as `(column, row)`; reading them
/// as `(row, column)` would reproduce `phi3`'s shape and collide.
pub fn construct_even(d: usize) -> Result<MatrixPair, AntiLatinError> {
    let n = check_order(d, 0, 4)?;
    let l = n / 2;
    let (mut p3, mut p4) = (Filler::new(d), Filler::new(d));
    for k in 0..n {
        let v = k as Symbol;
        for t in 0..l {
            p3.assign(k + 1, k - l + 1 + t, v)?;
            p3.assign(k - t, k, v)?;
        }
        for t in 0..=l {
            p4.assign(k - l + 2, k - l + 1 + t, v)?;
        }
        for t in 0..l - 1 {
            p4.assign(k - l + 1 - t, k + 1, v)?;
        }
    }
    MatrixPair::new(p3.finish()?, p4.finish()?)
}

/// [`construct_odd`] or [`construct_even`] by parity; `d <= 2` has no
/// decodable anti-Latin pair.
pub fn construct(d: usize) -> Result<MatrixPair, AntiLatinError> {
    if d <= 2 {
        return Err(AntiLatinError::InvalidOrder(format!(
            "no decodable pair of anti-Latin squares exists for d = {d}"
        )));
    }
    if d % 2 == 1 {
        construct_odd(d)
    } else {
        construct_even(d)
    }
}
