use std::collections::BTreeSet;

use serde::Serialize;

use super::{is_anti_latin, is_decodable_pair, AntiLatinError, MatrixPair};
use crate::algebra::{Symbol, SymbolMatrix};

/// Outcome of the exhaustive 2x2 search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Search2x2Report {
    pub pairs_enumerated: usize,
    pub anti_latin_matrices: usize,
    pub found: Vec<MatrixPair>,
}

/// Enumerates all 256 pairs of 2x2 matrices over `F_2` and keeps the
/// decodable anti-Latin ones. There are none.
pub fn search_2x2_decodable_anti_latin() -> Search2x2Report {
    let matrices: Vec<SymbolMatrix> =
        (0..16usize).map(|bits| SymbolMatrix::from_fn(2, |i, j| (bits >> (2 * i + j)) & 1)).collect();
    let anti_latin_matrices = matrices.iter().filter(|m| is_anti_latin(m)).count();
    let mut pairs_enumerated = 0;
    let mut found = Vec::new();
    for phi3 in &matrices {
        for phi4 in &matrices {
            pairs_enumerated += 1;
            let pair = MatrixPair { phi3: phi3.clone(), phi4: phi4.clone() };
            if is_anti_latin(phi3) && is_anti_latin(phi4) && is_decodable_pair(&pair) {
                found.push(pair);
            }
        }
    }
    Search2x2Report { pairs_enumerated, anti_latin_matrices, found }
}

/// Row-major cells of both matrices, values renumbered by first appearance.
pub type CanonicalPair = (Vec<Symbol>, Vec<Symbol>);

fn first_appearance(cells: impl Iterator<Item = Symbol>, d: usize) -> Vec<Symbol> {
    let mut map = vec![usize::MAX; d];
    let mut next = 0;
    cells
        .map(|v| {
            if map[v] == usize::MAX {
                map[v] = next;
                next += 1;
            }
            map[v]
        })
        .collect()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Lexicographically least relabeling of `pair`.
///
/// The orbit uses independent value bijections on each matrix together with
/// the coordinate maps `(i, j) -> (u i + s, u j + t)` for units `u`; these are
/// exactly the consistent row/column relabelings that keep the cell
/// differences `j - i` in classes, so decodability and anti-Latinness are
/// invariant.
pub fn canonical_form(pair: &MatrixPair) -> CanonicalPair {
    let d = pair.order();
    let mut best: Option<CanonicalPair> = None;
    for u in (1..d).filter(|&u| gcd(u, d) == 1) {
        for s in 0..d {
            for t in 0..d {
                let cell = |m: &SymbolMatrix, k: usize| m.get((u * (k / d) + s) % d, (u * (k % d) + t) % d);
                let a = first_appearance((0..d * d).map(|k| cell(&pair.phi3, k)), d);
                let b = first_appearance((0..d * d).map(|k| cell(&pair.phi4, k)), d);
                let cand = (a, b);
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
        }
    }
    best.expect("d >= 2 has at least one unit")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairSearchOutcome {
    pub d: usize,
    /// Canonical representatives in canonical order.
    pub pairs: Vec<MatrixPair>,
    pub nodes: u64,
    /// False when the node budget ran out before the tree was exhausted.
    pub complete: bool,
}

struct Backtrack {
    d: usize,
    p3: Vec<Symbol>,
    p4: Vec<Symbol>,
    // owner[a * d + b] = difference + 1 for value pairs in use
    owner: Vec<usize>,
    owner_count: Vec<u32>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
    found: BTreeSet<CanonicalPair>,
}

fn has_repeat(values: impl Iterator<Item = Symbol>, seen: &mut [bool]) -> bool {
    seen.iter_mut().for_each(|s| *s = false);
    for v in values {
        if std::mem::replace(&mut seen[v], true) {
            return true;
        }
    }
    false
}

impl Backtrack {
    fn lines_ok(&self, cell: usize) -> bool {
        let d = self.d;
        let (i, j) = (cell / d, cell % d);
        let mut seen = vec![false; d];
        for m in [&self.p3, &self.p4] {
            if j == d - 1 && !has_repeat((0..d).map(|c| m[i * d + c]), &mut seen) {
                return false;
            }
            if i == d - 1 && !has_repeat((0..d).map(|r| m[r * d + j]), &mut seen) {
                return false;
            }
        }
        true
    }

    fn run(&mut self, cell: usize, max3: usize, max4: usize) {
        let d = self.d;
        if cell == d * d {
            let pair = MatrixPair {
                phi3: SymbolMatrix::from_fn(d, |i, j| self.p3[i * d + j]),
                phi4: SymbolMatrix::from_fn(d, |i, j| self.p4[i * d + j]),
            };
            self.found.insert(canonical_form(&pair));
            return;
        }
        let diff = (cell % d + d - cell / d) % d + 1;
        for a in 0..=max3.min(d - 1) {
            for b in 0..=max4.min(d - 1) {
                if self.nodes >= self.budget {
                    self.exhausted = true;
                    return;
                }
                self.nodes += 1;
                let key = a * d + b;
                if self.owner[key] != 0 && self.owner[key] != diff {
                    continue;
                }
                self.p3[cell] = a;
                self.p4[cell] = b;
                if !self.lines_ok(cell) {
                    continue;
                }
                self.owner[key] = diff;
                self.owner_count[key] += 1;
                self.run(cell + 1, max3.max(a + 1), max4.max(b + 1));
                self.owner_count[key] -= 1;
                if self.owner_count[key] == 0 {
                    self.owner[key] = 0;
                }
                if self.exhausted {
                    return;
                }
            }
        }
    }
}

/// Backtracking search for decodable anti-Latin pairs of order `d`, visiting
/// at most `budget` nodes. Cells are filled row-major; values are introduced
/// in first-appearance order, and a branch is cut as soon as a finished row
/// or column has no repeat or a value pair would serve two differences.
pub fn search_decodable_pairs(d: usize, budget: u64) -> Result<PairSearchOutcome, AntiLatinError> {
    if d < 2 {
        return Err(AntiLatinError::InvalidOrder(format!("search needs d >= 2, got {d}")));
    }
    if d > 16 {
        return Err(AntiLatinError::InvalidOrder(format!("search is limited to d <= 16, got {d}")));
    }
    let mut bt = Backtrack {
        d,
        p3: vec![0; d * d],
        p4: vec![0; d * d],
        owner: vec![0; d * d],
        owner_count: vec![0; d * d],
        nodes: 0,
        budget,
        exhausted: false,
        found: BTreeSet::new(),
    };
    bt.run(0, 0, 0);
    let pairs = bt
        .found
        .iter()
        .map(|(a, b)| MatrixPair {
            phi3: SymbolMatrix::from_fn(d, |i, j| a[i * d + j]),
            phi4: SymbolMatrix::from_fn(d, |i, j| b[i * d + j]),
        })
        .collect();
    Ok(PairSearchOutcome { d, pairs, nodes: bt.nodes, complete: !bt.exhausted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antilatin::construct;

    #[test]
    fn two_by_two_is_empty() {
        let r = search_2x2_decodable_anti_latin();
        assert_eq!(r.pairs_enumerated, 256);
        assert_eq!(r.anti_latin_matrices, 2);
        assert!(r.found.is_empty());
    }

    #[test]
    fn d2_search_is_empty_for_any_budget() {
        for budget in [0, 10, 1_000_000] {
            assert!(search_decodable_pairs(2, budget).unwrap().pairs.is_empty());
        }
        assert!(search_decodable_pairs(2, 1_000_000).unwrap().complete);
    }

    #[test]
    fn d3_search_finds_known_pairs() {
        let out = search_decodable_pairs(3, u64::MAX).unwrap();
        assert!(out.complete);
        let forms: BTreeSet<_> = out.pairs.iter().map(canonical_form).collect();
        assert_eq!(forms.len(), out.pairs.len(), "representatives are canonical");
        assert!(forms.contains(&canonical_form(&construct(3).unwrap())));
        let ex1 = MatrixPair::from_rows(
            &[vec![1, 0, 0], vec![0, 0, 2], vec![1, 2, 2]],
            &[vec![1, 0, 1], vec![1, 2, 1], vec![0, 2, 0]],
        )
        .unwrap();
        assert!(forms.contains(&canonical_form(&ex1)));
        for p in &out.pairs {
            assert!(is_decodable_pair(p) && is_anti_latin(&p.phi3) && is_anti_latin(&p.phi4));
        }
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let out = search_decodable_pairs(4, 1000).unwrap();
        assert!(!out.complete);
        assert_eq!(out.nodes, 1000);
    }

    #[test]
    fn canonical_form_ignores_relabeling() {
        let p = construct(5).unwrap();
        let (perm3, perm4) = ([3, 0, 4, 1, 2], [1, 2, 3, 4, 0]);
        let relabeled = MatrixPair { phi3: p.phi3.map_values(|v| perm3[v]), phi4: p.phi4.map_values(|v| perm4[v]) };
        assert_eq!(canonical_form(&relabeled), canonical_form(&p));
        let affine = |m: &SymbolMatrix| SymbolMatrix::from_fn(5, |i, j| m.get((2 * i + 1) % 5, (2 * j + 3) % 5));
        let moved = MatrixPair { phi3: affine(&relabeled.phi3), phi4: affine(&relabeled.phi4) };
        assert_eq!(canonical_form(&moved), canonical_form(&p));
        assert!(is_decodable_pair(&moved));
    }
}
