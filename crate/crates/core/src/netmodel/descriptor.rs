//! JSON form of a [`Code`].
//!
//! ```json
//! {
//!   "d": 2,
//!   "encoder": {"kind": "binary-eq3"},
//!   "intermediate": {"phi3": [[0,0],[1,0]], "phi4": [[0,1],[0,0]]},
//!   "decoder": {"psi": [[0,1],[1,0]]}
//! }
//! ```
//!
//! Table encoders list, per message, the `(y1, y2)` outcomes with exact
//! probabilities: `{"kind": "table", "rows": [[{"y": [0,1], "p": "1/2"}, ...], ...]}`.
//! A stochastic relay adds `"scramble": {"r": 2, "table": ...}` where
//! `table[y1][y2][l']` is the output pair `[y3, y4]`; `phi3`/`phi4` may then
//! be omitted. `"decoder": {"kind": "synthesized"}` derives the decoder from
//! the encoder and relay. `"prior"` optionally lists `P(M = m)` for each `m`.

use serde::{Deserialize, Serialize};

use super::{Code, Decoder, Encoder, EncoderKind, IntermediateMap, NetError};
use crate::algebra::{Alphabet, ExactDistribution, Rational, Symbol, SymbolMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeDescriptor {
    pub d: usize,
    pub encoder: EncoderDescriptor,
    pub intermediate: IntermediateDescriptor,
    pub decoder: DecoderDescriptor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<Vec<Rational>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EncoderDescriptor {
    CanonicalAdditive,
    BinaryEq3,
    Table {
        rows: Vec<Vec<TableEntry>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scramble_size: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub y: [Symbol; 2],
    pub p: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntermediateDescriptor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi3: Option<SymbolMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi4: Option<SymbolMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scramble: Option<ScrambleDescriptor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScrambleDescriptor {
    pub r: usize,
    pub table: Vec<Vec<Vec<[Symbol; 2]>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthesizedKind {
    Synthesized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DecoderDescriptor {
    Table { psi: SymbolMatrix },
    Synthesized { kind: SynthesizedKind },
}

fn check_size(what: &str, m: &SymbolMatrix, d: usize) -> Result<(), NetError> {
    if m.size() != d {
        return Err(NetError::Descriptor(format!("{what} is {0}x{0}, expected {d}x{d}", m.size())));
    }
    Ok(())
}

impl CodeDescriptor {
    pub fn from_json(text: &str) -> Result<Self, NetError> {
        serde_json::from_str(text).map_err(|e| NetError::Descriptor(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }

    pub fn into_code(self) -> Result<Code, NetError> {
        let d = self.d;
        let alphabet = Alphabet::new(d)?;

        let encoder = match self.encoder {
            EncoderDescriptor::CanonicalAdditive => Encoder::canonical_additive(alphabet),
            EncoderDescriptor::BinaryEq3 => Encoder::binary_eq3(alphabet)?,
            EncoderDescriptor::Table { rows, scramble_size } => {
                let rows = rows
                    .into_iter()
                    .map(|row| ExactDistribution::new(2, row.into_iter().map(|e| (e.y.to_vec(), e.p))))
                    .collect::<Result<Vec<_>, _>>()?;
                Encoder::from_rows(alphabet, rows, scramble_size.unwrap_or(d))?
            }
        };

        let inter = self.intermediate;
        for (name, m) in [("phi3", &inter.phi3), ("phi4", &inter.phi4)] {
            if let Some(m) = m {
                check_size(name, m, d)?;
            }
        }
        let intermediate = match inter.scramble {
            Some(s) => {
                if s.table.len() != d || s.table.iter().any(|row| row.len() != d) {
                    return Err(NetError::Descriptor(format!("scramble table must be {d} x {d} x r")));
                }
                let table = s
                    .table
                    .into_iter()
                    .flatten()
                    .map(|outs| outs.into_iter().map(|[a, b]| (a, b)).collect())
                    .collect();
                let map = IntermediateMap::from_scramble_table(alphabet, s.r, table)?;
                let consistent = inter.phi3.as_ref().is_none_or(|m| m == map.phi3())
                    && inter.phi4.as_ref().is_none_or(|m| m == map.phi4());
                if !consistent {
                    return Err(NetError::Descriptor(
                        "phi3/phi4 must match the l' = 0 branch of the scramble table".into(),
                    ));
                }
                map
            }
            None => match (inter.phi3, inter.phi4) {
                (Some(phi3), Some(phi4)) => IntermediateMap::deterministic(alphabet, phi3, phi4)?,
                _ => return Err(NetError::Descriptor("intermediate needs phi3 and phi4".into())),
            },
        };

        let prior = match self.prior {
            None => ExactDistribution::uniform_symbols(d)?,
            Some(p) => {
                if p.len() != d {
                    return Err(NetError::Descriptor(format!("prior has {} entries, expected {d}", p.len())));
                }
                ExactDistribution::new(1, p.into_iter().enumerate().map(|(m, q)| (vec![m], q)))?
            }
        };

        let decoder = match self.decoder {
            DecoderDescriptor::Table { psi } => {
                check_size("psi", &psi, d)?;
                Decoder::new(alphabet, psi)?
            }
            DecoderDescriptor::Synthesized { .. } => Decoder::synthesize(&encoder, &intermediate, &prior)?,
        };
        Code::new(encoder, intermediate, decoder)?.with_prior(prior)
    }
}

impl Code {
    pub fn to_descriptor(&self) -> CodeDescriptor {
        let d = self.alphabet().size();
        let enc = self.encoder();
        let encoder = match enc.kind() {
            EncoderKind::CanonicalAdditive => EncoderDescriptor::CanonicalAdditive,
            EncoderKind::BinaryEq3 => EncoderDescriptor::BinaryEq3,
            EncoderKind::Table => EncoderDescriptor::Table {
                rows: enc
                    .rows()
                    .iter()
                    .map(|row| row.iter().map(|(o, p)| TableEntry { y: [o[0], o[1]], p: *p }).collect())
                    .collect(),
                scramble_size: Some(enc.scramble_size()),
            },
        };
        let relay = self.intermediate();
        let intermediate = IntermediateDescriptor {
            phi3: Some(relay.phi3().clone()),
            phi4: Some(relay.phi4().clone()),
            scramble: relay.scramble().map(|s| ScrambleDescriptor {
                r: s.size(),
                table: (0..d)
                    .map(|y1| (0..d).map(|y2| s.outputs(d, y1, y2).iter().map(|&(a, b)| [a, b]).collect()).collect())
                    .collect(),
            }),
        };
        let uniform = ExactDistribution::uniform_symbols(d).expect("d >= 2");
        let prior = (self.prior() != &uniform).then(|| (0..d).map(|m| self.prior().probability(&[m])).collect());
        CodeDescriptor {
            d,
            encoder,
            intermediate,
            decoder: DecoderDescriptor::Table { psi: self.decoder().psi().clone() },
            prior,
        }
    }

    pub fn from_json(text: &str) -> Result<Code, NetError> {
        CodeDescriptor::from_json(text)?.into_code()
    }

    pub fn to_json(&self) -> String {
        self.to_descriptor().to_json()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{builtin_code, catalog, decode_correctly, evaluate, product_code};

    #[test]
    fn catalog_round_trips() {
        let mut codes = catalog();
        codes.push(product_code(&builtin_code("Eq1Eq2-binary", None).unwrap(), 2).unwrap());
        for code in codes {
            let back = Code::from_json(&code.to_json()).unwrap();
            assert_eq!(back, code);
        }
    }

    #[test]
    fn minimal_binary_descriptor() {
        let text = r#"{
            "d": 2,
            "encoder": {"kind": "binary-eq3"},
            "intermediate": {"phi3": [[0,0],[1,0]], "phi4": [[0,1],[0,0]]},
            "decoder": {"psi": [[0,1],[1,0]]}
        }"#;
        let code = Code::from_json(text).unwrap();
        assert_eq!(code, builtin_code("Eq1Eq2-binary", None).unwrap());
    }

    #[test]
    fn synthesized_decoder_and_prior() {
        let text = r#"{
            "d": 3,
            "encoder": {"kind": "canonical-additive"},
            "intermediate": {"phi3": [[0,1,0],[1,1,2],[0,2,2]], "phi4": [[0,2,2],[0,1,0],[1,1,2]]},
            "decoder": {"kind": "synthesized"},
            "prior": ["1/2", "1/4", "1/4"]
        }"#;
        let code = Code::from_json(text).unwrap();
        assert!(decode_correctly(&code));
        assert_eq!(code.prior().probability(&[0]), Rational::new(1, 2).unwrap());
        let joint = evaluate(&code, None).unwrap();
        assert!(joint.total().is_one());
    }

    #[test]
    fn table_encoder_and_scramble() {
        let text = r#"{
            "d": 2,
            "encoder": {"kind": "table", "rows": [
                [{"y": [0,0], "p": "1/2"}, {"y": [1,1], "p": "1/2"}],
                [{"y": [0,1], "p": "1/2"}, {"y": [1,0], "p": "1/2"}]
            ], "scramble_size": 2},
            "intermediate": {"scramble": {"r": 2, "table": [
                [[[0,0],[1,1]], [[1,0],[0,1]]],
                [[[1,0],[0,1]], [[0,0],[1,1]]]
            ]}},
            "decoder": {"psi": [[0,1],[1,0]]}
        }"#;
        let code = Code::from_json(text).unwrap();
        let builtin = builtin_code("randomized-relay-binary", None).unwrap();
        assert_eq!(code.encoder().kind(), EncoderKind::Table);
        assert_eq!(code.intermediate(), builtin.intermediate());
        assert_eq!(evaluate(&code, None).unwrap(), evaluate(&builtin, None).unwrap());
        assert!(decode_correctly(&code));
    }

    #[test]
    fn malformed_descriptors_are_rejected() {
        let bad = [
            r#"{"d": 2, "encoder": {"kind": "binary-eq3"}, "intermediate": {"phi3": [[0,0],[1,0]]}, "decoder": {"psi": [[0,1],[1,0]]}}"#,
            r#"{"d": 3, "encoder": {"kind": "binary-eq3"}, "intermediate": {"phi3": [[0,0,0],[0,0,0],[0,0,0]], "phi4": [[0,0,0],[0,0,0],[0,0,0]]}, "decoder": {"kind": "synthesized"}}"#,
            r#"{"d": 2, "encoder": {"kind": "binary-eq3"}, "intermediate": {"phi3": [[0,0],[1,0]], "phi4": [[0,1],[0,0]]}, "decoder": {"psi": [[0,1,0],[1,0,0],[0,0,0]]}}"#,
            r#"{"d": 2, "encoder": {"kind": "binary-eq3"}, "intermediate": {"phi3": [[0,0],[1,0]], "phi4": [[0,2],[0,0]]}, "decoder": {"psi": [[0,1],[1,0]]}}"#,
            r#"{"d": 2, "encoder": {"kind": "table", "rows": [[{"y": [0,0], "p": "1/2"}], [{"y": [0,1], "p": "1"}]]}, "intermediate": {"phi3": [[0,0],[1,0]], "phi4": [[0,1],[0,0]]}, "decoder": {"psi": [[0,1],[1,0]]}}"#,
            r#"{"d": 2, "encoder": {"kind": "canonical-additive"}, "intermediate": {"phi3": [[0,0],[0,0]], "phi4": [[0,0],[0,0]]}, "decoder": {"kind": "synthesized"}}"#,
            r#"{"d": 2, "encoder": {"kind": "binary-eq3"}, "intermediate": {"phi3": [[0,0],[1,0]], "phi4": [[0,1],[0,0]]}, "decoder": {"psi": [[0,1],[1,0]]}, "prior": ["1/2"]}"#,
            r#"not json"#,
        ];
        for text in bad {
            assert!(Code::from_json(text).is_err(), "{text}");
        }
    }
}
