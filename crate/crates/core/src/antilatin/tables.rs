//! Hand-tabulated decodable anti-Latin pairs for `d = 3..=8`, kept as an
//! independent reference for the systematic constructions.

use super::MatrixPair;
use crate::algebra::Symbol;

const PHI3_3: &[&[Symbol]] = &[
    &[0, 1, 0],
    &[1, 1, 2],
    &[0, 2, 2],
];

const PHI4_3: &[&[Symbol]] = &[
    &[0, 2, 2],
    &[0, 1, 0],
    &[1, 1, 2],
];

const PHI3_4: &[&[Symbol]] = &[
    &[0, 1, 3, 3],
    &[0, 1, 2, 0],
    &[1, 1, 2, 3],
    &[0, 2, 2, 3],
];

const PHI4_4: &[&[Symbol]] = &[
    &[0, 0, 1, 0],
    &[1, 1, 1, 2],
    &[3, 2, 2, 2],
    &[3, 0, 3, 3],
];

const PHI3_5: &[&[Symbol]] = &[
    &[0, 1, 2, 0, 0],
    &[1, 1, 2, 3, 1],
    &[2, 2, 2, 3, 4],
    &[0, 3, 3, 3, 4],
    &[0, 1, 4, 4, 4],
];

const PHI4_5: &[&[Symbol]] = &[
    &[0, 3, 3, 3, 4],
    &[0, 1, 4, 4, 4],
    &[0, 1, 2, 0, 0],
    &[1, 1, 2, 3, 1],
    &[2, 2, 2, 3, 4],
];

const PHI3_6: &[&[Symbol]] = &[
    &[0, 1, 2, 5, 5, 5],
    &[0, 1, 2, 3, 0, 0],
    &[1, 1, 2, 3, 4, 1],
    &[2, 2, 2, 3, 4, 5],
    &[0, 3, 3, 3, 4, 5],
    &[0, 1, 4, 4, 4, 5],
];

const PHI4_6: &[&[Symbol]] = &[
    &[1, 1, 1, 2, 3, 1],
    &[2, 2, 2, 2, 3, 4],
    &[5, 3, 3, 3, 3, 4],
    &[5, 0, 4, 4, 4, 4],
    &[5, 0, 1, 5, 5, 5],
    &[0, 0, 1, 2, 0, 0],
];

const PHI3_7: &[&[Symbol]] = &[
    &[0, 1, 2, 3, 0, 0, 0],
    &[1, 1, 2, 3, 4, 1, 1],
    &[2, 2, 2, 3, 4, 5, 2],
    &[3, 3, 3, 3, 4, 5, 6],
    &[0, 4, 4, 4, 4, 5, 6],
    &[0, 1, 5, 5, 5, 5, 6],
    &[0, 1, 2, 6, 6, 6, 6],
];

const PHI4_7: &[&[Symbol]] = &[
    &[0, 4, 4, 4, 4, 5, 6],
    &[0, 1, 5, 5, 5, 5, 6],
    &[0, 1, 2, 6, 6, 6, 6],
    &[0, 1, 2, 3, 0, 0, 0],
    &[1, 1, 2, 3, 4, 1, 1],
    &[2, 2, 2, 3, 4, 5, 2],
    &[3, 3, 3, 3, 4, 5, 6],
];

const PHI3_8: &[&[Symbol]] = &[
    &[0, 1, 2, 3, 7, 7, 7, 7],
    &[0, 1, 2, 3, 4, 0, 0, 0],
    &[1, 1, 2, 3, 4, 5, 1, 1],
    &[2, 2, 2, 3, 4, 5, 6, 2],
    &[3, 3, 3, 3, 4, 5, 6, 7],
    &[0, 4, 4, 4, 4, 5, 6, 7],
    &[0, 1, 5, 5, 5, 5, 6, 7],
    &[0, 1, 2, 6, 6, 6, 6, 7],
];

const PHI4_8: &[&[Symbol]] = &[
    &[2, 2, 2, 2, 3, 4, 5, 2],
    &[3, 3, 3, 3, 3, 4, 5, 6],
    &[7, 4, 4, 4, 4, 4, 5, 6],
    &[7, 0, 5, 5, 5, 5, 5, 6],
    &[7, 0, 1, 6, 6, 6, 6, 6],
    &[7, 0, 1, 2, 7, 7, 7, 7],
    &[0, 0, 1, 2, 3, 0, 0, 0],
    &[1, 1, 1, 2, 3, 4, 1, 1],
];

/// The tabulated pair of order `d`, if there is one.
pub fn reference_pair(d: usize) -> Option<MatrixPair> {
    let (phi3, phi4) = match d {
        3 => (PHI3_3, PHI4_3),
        4 => (PHI3_4, PHI4_4),
        5 => (PHI3_5, PHI4_5),
        6 => (PHI3_6, PHI4_6),
        7 => (PHI3_7, PHI4_7),
        8 => (PHI3_8, PHI4_8),
        _ => return None,
    };
    let rows = |m: &[&[Symbol]]| m.iter().map(|r| r.to_vec()).collect::<Vec<_>>();
    Some(MatrixPair::from_rows(&rows(phi3), &rows(phi4)).expect("tabulated pairs are well formed"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antilatin::{construct, is_anti_latin, is_decodable_pair};

    #[test]
    fn tables_match_constructions() {
        for d in 3..=8 {
            let table = reference_pair(d).unwrap();
            assert!(is_decodable_pair(&table) && is_anti_latin(&table.phi3) && is_anti_latin(&table.phi4));
            assert_eq!(construct(d).unwrap(), table, "d = {d}");
        }
        assert!(reference_pair(2).is_none() && reference_pair(9).is_none());
    }
}
