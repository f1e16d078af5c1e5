use std::fmt;

use super::{Code, Decoder, Encoder, IntermediateMap, NetError};
use crate::algebra::Alphabet;
#[cfg(test)]
use crate::algebra::SymbolMatrix;
use crate::antilatin::{construct_even, construct_odd, AntiLatinError, MatrixPair};

/// Names accepted by [`builtin_code`].
pub const BUILTIN_NAMES: [&str; 6] =
    ["Eq1Eq2-binary", "con1-odd-d", "con1-even-d", "ex1", "ex2", "randomized-relay-binary"];

/// A named code, with the alphabet size for the parameterized families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuiltinCode {
    pub name: &'static str,
    pub d: Option<usize>,
}

impl BuiltinCode {
    /// The default catalog: every fixed code plus the constructions for
    /// `d = 3..=8`.
    pub const CATALOG: [BuiltinCode; 10] = [
        BuiltinCode { name: "Eq1Eq2-binary", d: None },
        BuiltinCode { name: "con1-odd-d", d: Some(3) },
        BuiltinCode { name: "con1-odd-d", d: Some(5) },
        BuiltinCode { name: "con1-odd-d", d: Some(7) },
        BuiltinCode { name: "con1-even-d", d: Some(4) },
        BuiltinCode { name: "con1-even-d", d: Some(6) },
        BuiltinCode { name: "con1-even-d", d: Some(8) },
        BuiltinCode { name: "ex1", d: None },
        BuiltinCode { name: "ex2", d: None },
        BuiltinCode { name: "randomized-relay-binary", d: None },
    ];

    pub fn build(&self) -> Result<Code, NetError> {
        builtin_code(self.name, self.d)
    }
}

impl fmt::Display for BuiltinCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.d {
            Some(d) if self.name.ends_with("-d") => write!(f, "{}{}", self.name.trim_end_matches('d'), d),
            _ => f.write_str(self.name),
        }
    }
}

fn antilatin_err(e: AntiLatinError) -> NetError {
    match e {
        AntiLatinError::Algebra(a) => NetError::Algebra(a),
        other => NetError::InvalidParameter(other.to_string()),
    }
}

/// Additive encoder `Y1 = M + L`, `Y2 = L` in front of a matrix-pair relay,
/// decoded through the pair.
fn additive_code(pair: MatrixPair) -> Result<Code, NetError> {
    let alphabet = pair.alphabet();
    let psi = pair.difference_decoder().map_err(antilatin_err)?;
    let relay = IntermediateMap::deterministic(alphabet, pair.phi3, pair.phi4)?;
    Code::new(Encoder::canonical_additive(alphabet), relay, Decoder::new(alphabet, psi)?)
}

fn printed_pair(phi3: &[&[usize]], phi4: &[&[usize]]) -> MatrixPair {
    let rows = |m: &[&[usize]]| m.iter().map(|r| r.to_vec()).collect::<Vec<_>>();
    MatrixPair::from_rows(&rows(phi3), &rows(phi4)).expect("printed pair is well formed")
}

/// The 3x3 decodable anti-Latin pair found by hand.
pub(crate) fn ex1_pair() -> MatrixPair {
    printed_pair(&[&[1, 0, 0], &[0, 0, 2], &[1, 2, 2]], &[&[1, 0, 1], &[1, 2, 1], &[0, 2, 0]])
}

/// The 4x4 decodable anti-Latin pair found by hand.
pub(crate) fn ex2_pair() -> MatrixPair {
    printed_pair(
        &[&[1, 0, 3, 3], &[0, 0, 2, 3], &[1, 1, 3, 2], &[0, 2, 2, 1]],
        &[&[2, 2, 1, 0], &[0, 3, 3, 1], &[0, 3, 3, 0], &[1, 1, 2, 2]],
    )
}

fn eq1_eq2_binary() -> Result<Code, NetError> {
    let a = Alphabet::binary();
    // Y3 = (Y2 + 1) Y1, Y4 = (Y1 + 1) Y2
    let relay = IntermediateMap::from_fn(a, |y1, y2| (((y2 + 1) * y1) % 2, ((y1 + 1) * y2) % 2))?;
    Code::new(Encoder::binary_eq3(a)?, relay, Decoder::from_fn(a, |y3, y4| (y3 + y4) % 2))
}

fn randomized_relay_binary() -> Result<Code, NetError> {
    let a = Alphabet::binary();
    // Y3 = Y1 + Y2 + L' = M + L', Y4 = L'
    let relay = IntermediateMap::stochastic(a, 2, |y1, y2, lp| ((y1 + y2 + lp) % 2, lp))?;
    Code::new(Encoder::binary_eq3(a)?, relay, Decoder::from_fn(a, |y3, y4| (y3 + y4) % 2))
}

fn no_parameter(name: &str, d: Option<usize>) -> Result<(), NetError> {
    match d {
        None => Ok(()),
        Some(d) => Err(NetError::InvalidParameter(format!("{name} has a fixed alphabet; got d = {d}"))),
    }
}

fn needs_parameter(name: &str, d: Option<usize>) -> Result<usize, NetError> {
    d.ok_or_else(|| NetError::InvalidParameter(format!("{name} needs an alphabet size d")))
}

/// Builds a named code. `con1-odd-d` and `con1-even-d` need `d`; the rest
/// have a fixed alphabet and reject it.
pub fn builtin_code(name: &str, d: Option<usize>) -> Result<Code, NetError> {
    match name {
        "Eq1Eq2-binary" => no_parameter(name, d).and_then(|_| eq1_eq2_binary()),
        "randomized-relay-binary" => no_parameter(name, d).and_then(|_| randomized_relay_binary()),
        "ex1" => no_parameter(name, d).and_then(|_| additive_code(ex1_pair())),
        "ex2" => no_parameter(name, d).and_then(|_| additive_code(ex2_pair())),
        "con1-odd-d" => additive_code(construct_odd(needs_parameter(name, d)?).map_err(antilatin_err)?),
        "con1-even-d" => additive_code(construct_even(needs_parameter(name, d)?).map_err(antilatin_err)?),
        _ => Err(NetError::UnknownCode(format!("{name} (known: {})", BUILTIN_NAMES.join(", ")))),
    }
}

/// Every code in [`BuiltinCode::CATALOG`].
pub fn catalog() -> Vec<Code> {
    BuiltinCode::CATALOG.iter().map(|b| b.build().expect("catalog codes are well formed")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::decode_correctly;

    fn rows(m: &SymbolMatrix) -> Vec<Vec<usize>> {
        m.to_rows()
    }

    #[test]
    fn eq1_eq2_relay_tables() {
        let code = builtin_code("Eq1Eq2-binary", None).unwrap();
        assert_eq!(rows(code.intermediate().phi3()), vec![vec![0, 0], vec![1, 0]]);
        assert_eq!(rows(code.intermediate().phi4()), vec![vec![0, 1], vec![0, 0]]);
    }

    #[test]
    fn odd_construction_d3() {
        let code = builtin_code("con1-odd-d", Some(3)).unwrap();
        assert_eq!(rows(code.intermediate().phi3()), vec![vec![0, 1, 0], vec![1, 1, 2], vec![0, 2, 2]]);
    }

    #[test]
    fn randomized_relay_is_stochastic() {
        let code = builtin_code("randomized-relay-binary", None).unwrap();
        let s = code.intermediate().scramble().unwrap();
        assert_eq!(s.size(), 2);
        for y1 in 0..2 {
            for y2 in 0..2 {
                for lp in 0..2 {
                    assert_eq!(s.outputs(2, y1, y2)[lp], ((y1 + y2 + lp) % 2, lp));
                }
            }
        }
    }

    #[test]
    fn every_catalog_code_decodes() {
        for entry in BuiltinCode::CATALOG {
            assert!(decode_correctly(&entry.build().unwrap()), "{entry}");
        }
        for d in 3..12 {
            let name = if d % 2 == 1 { "con1-odd-d" } else { "con1-even-d" };
            assert!(decode_correctly(&builtin_code(name, Some(d)).unwrap()));
        }
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(builtin_code("con1-even-d", Some(2)), Err(NetError::InvalidParameter(_))));
        assert!(builtin_code("con1-even-d", Some(5)).is_err());
        assert!(builtin_code("con1-odd-d", None).is_err());
        assert!(builtin_code("ex1", Some(3)).is_err());
        assert!(matches!(builtin_code("nope", None), Err(NetError::UnknownCode(_))));
    }

    #[test]
    fn display_names() {
        assert_eq!(BuiltinCode::CATALOG[1].to_string(), "con1-odd-3");
        assert_eq!(BuiltinCode::CATALOG[0].to_string(), "Eq1Eq2-binary");
    }
}
