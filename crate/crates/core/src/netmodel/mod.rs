//! Executable model of the one-hop relay network.
//!
//! The source encodes a message `M` (with private scramble `L`) into the
//! symbols `Y1`, `Y2` on edges `e1`, `e2`. The relay maps `(Y1, Y2)` to
//! `(Y3, Y4)` on edges `e3`, `e4`, and the sink decodes `M` from `(Y3, Y4)`.
//! [`evaluate`] produces the exact joint law of
//! `(M, Y1, Y2, Ytampered, Y3, Y4)`, optionally under an attack.
//!
//! Relay and decoder tables are [`SymbolMatrix`] values indexed
//! `[first input][second input]`: row = `Y1`, column = `Y2` for the relay,
//! row = `Y3`, column = `Y4` for the decoder.

mod attack;
mod catalog;
mod descriptor;
mod product;
pub mod random;

pub use attack::{AttackSpec, EdgePair, FirstEdge, Replacement, SecondEdge};
pub use catalog::{builtin_code, catalog, BuiltinCode, BUILTIN_NAMES};
pub use descriptor::{
    CodeDescriptor, DecoderDescriptor, EncoderDescriptor, IntermediateDescriptor,
    ScrambleDescriptor, SynthesizedKind, TableEntry,
};
pub use product::product_code;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Alphabet, ExactDistribution, Outcome, Rational, Symbol, SymbolMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("invalid attack: {0}")]
    InvalidAttack(String),
    #[error("edge pair ({0},{1}) is not allowed; Eve reads one edge in each layer")]
    DisallowedPair(u8, u8),
    #[error("code is not decodable: (Y3, Y4) = ({y3}, {y4}) occurs with messages {m1} and {m2}")]
    Undecodable { y3: Symbol, y4: Symbol, m1: Symbol, m2: Symbol },
    #[error("unknown builtin code {0:?}")]
    UnknownCode(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("size limit: {0}")]
    SizeLimit(String),
    #[error("invalid code descriptor: {0}")]
    Descriptor(String),
}

/// Positions in the joint outcome tuple returned by [`evaluate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    M = 0,
    Y1 = 1,
    Y2 = 2,
    /// The symbol the relay actually receives on the attacked edge.
    Tampered = 3,
    Y3 = 4,
    Y4 = 5,
}

impl Var {
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Arity of the joint distribution returned by [`evaluate`].
pub const JOINT_ARITY: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncoderKind {
    Table,
    CanonicalAdditive,
    BinaryEq3,
}

/// Stochastic map from a message to the pair `(Y1, Y2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoder {
    alphabet: Alphabet,
    kind: EncoderKind,
    rows: Vec<ExactDistribution>,
    scramble_size: usize,
}

impl Encoder {
    /// `Y1 = M + L`, `Y2 = L` with `L` uniform on `Z_d`.
    pub fn canonical_additive(alphabet: Alphabet) -> Self {
        let d = alphabet.size();
        let mut enc = Encoder::deterministic(alphabet, d, |m, l| (alphabet.add(m, l), l))
            .expect("canonical encoder is well formed");
        enc.kind = EncoderKind::CanonicalAdditive;
        enc
    }

    /// The binary encoder `Y1 = L`, `Y2 = M + L`.
    pub fn binary_eq3(alphabet: Alphabet) -> Result<Self, NetError> {
        if alphabet.size() != 2 {
            return Err(NetError::AlphabetMismatch(format!(
                "binary-eq3 encoder needs d = 2, got {}",
                alphabet.size()
            )));
        }
        let mut enc = Encoder::deterministic(alphabet, 2, |m, l| (l, alphabet.add(m, l)))?;
        enc.kind = EncoderKind::BinaryEq3;
        Ok(enc)
    }

    /// Table encoder given by a deterministic map `(m, l) -> (y1, y2)` with
    /// `L` uniform over `0..scramble_size`.
    pub fn deterministic(
        alphabet: Alphabet,
        scramble_size: usize,
        f: impl Fn(Symbol, Symbol) -> (Symbol, Symbol),
    ) -> Result<Self, NetError> {
        if scramble_size == 0 {
            return Err(NetError::InvalidParameter("scramble size must be positive".into()));
        }
        let rows = alphabet
            .symbols()
            .map(|m| {
                let outcomes = (0..scramble_size).map(|l| {
                    let (y1, y2) = f(m, l);
                    vec![y1, y2]
                });
                ExactDistribution::uniform(outcomes)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Encoder::from_rows(alphabet, rows, scramble_size)
    }

    /// Table encoder from one `(y1, y2)` distribution per message.
    pub fn from_rows(
        alphabet: Alphabet,
        rows: Vec<ExactDistribution>,
        scramble_size: usize,
    ) -> Result<Self, NetError> {
        if rows.len() != alphabet.size() {
            return Err(NetError::AlphabetMismatch(format!(
                "encoder has {} rows, alphabet has {} messages",
                rows.len(),
                alphabet.size()
            )));
        }
        for row in &rows {
            if row.arity() != 2 {
                return Err(NetError::Descriptor("encoder rows must be over (y1, y2)".into()));
            }
            for o in row.support() {
                for &s in o {
                    alphabet.check(s)?;
                }
            }
        }
        Ok(Encoder { alphabet, kind: EncoderKind::Table, rows, scramble_size: scramble_size.max(1) })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn kind(&self) -> EncoderKind {
        self.kind
    }

    pub fn scramble_size(&self) -> usize {
        self.scramble_size
    }

    /// Law of `(Y1, Y2)` given `M = m`.
    pub fn row(&self, m: Symbol) -> &ExactDistribution {
        &self.rows[m]
    }

    pub fn rows(&self) -> &[ExactDistribution] {
        &self.rows
    }
}

/// Private randomness at the relay: `L'` uniform on `0..r`, and for every
/// input `(y1, y2)` the output `(y3, y4)` for each value of `L'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelayScramble {
    r: usize,
    table: Vec<Vec<(Symbol, Symbol)>>,
}

impl RelayScramble {
    pub fn size(&self) -> usize {
        self.r
    }

    /// Outputs for input cell `(y1, y2)`, one per value of `L'`.
    pub fn outputs(&self, d: usize, y1: Symbol, y2: Symbol) -> &[(Symbol, Symbol)] {
        &self.table[y1 * d + y2]
    }
}

/// The map applied at the relay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntermediateMap {
    alphabet: Alphabet,
    phi3: SymbolMatrix,
    phi4: SymbolMatrix,
    scramble: Option<RelayScramble>,
}

impl IntermediateMap {
    /// Deterministic relay `(y1, y2) -> (phi3[y1][y2], phi4[y1][y2])`.
    pub fn deterministic(
        alphabet: Alphabet,
        phi3: SymbolMatrix,
        phi4: SymbolMatrix,
    ) -> Result<Self, NetError> {
        phi3.validate(&alphabet)?;
        phi4.validate(&alphabet)?;
        Ok(IntermediateMap { alphabet, phi3, phi4, scramble: None })
    }

    pub fn from_fn(alphabet: Alphabet, f: impl Fn(Symbol, Symbol) -> (Symbol, Symbol)) -> Result<Self, NetError> {
        let d = alphabet.size();
        let phi3 = SymbolMatrix::from_fn(d, |i, j| f(i, j).0);
        let phi4 = SymbolMatrix::from_fn(d, |i, j| f(i, j).1);
        IntermediateMap::deterministic(alphabet, phi3, phi4)
    }

    /// Stochastic relay with its own scramble `L'` uniform on `0..r`;
    /// `f(y1, y2, l')` gives the output pair. The stored `phi3`/`phi4` are
    /// the `L' = 0` branch.
    pub fn stochastic(
        alphabet: Alphabet,
        r: usize,
        f: impl Fn(Symbol, Symbol, Symbol) -> (Symbol, Symbol),
    ) -> Result<Self, NetError> {
        let d = alphabet.size();
        let mut table = Vec::with_capacity(d * d);
        for y1 in 0..d {
            for y2 in 0..d {
                table.push((0..r).map(|l| f(y1, y2, l)).collect());
            }
        }
        IntermediateMap::from_scramble_table(alphabet, r, table)
    }

    /// `table[y1 * d + y2][l']` is the output pair.
    pub fn from_scramble_table(
        alphabet: Alphabet,
        r: usize,
        table: Vec<Vec<(Symbol, Symbol)>>,
    ) -> Result<Self, NetError> {
        let d = alphabet.size();
        if r == 0 {
            return Err(NetError::InvalidParameter("relay scramble size must be positive".into()));
        }
        if table.len() != d * d || table.iter().any(|row| row.len() != r) {
            return Err(NetError::Descriptor(format!("relay scramble table must be {d} x {d} x {r}")));
        }
        for &(a, b) in table.iter().flatten() {
            alphabet.check(a)?;
            alphabet.check(b)?;
        }
        let phi3 = SymbolMatrix::from_fn(d, |i, j| table[i * d + j][0].0);
        let phi4 = SymbolMatrix::from_fn(d, |i, j| table[i * d + j][0].1);
        Ok(IntermediateMap { alphabet, phi3, phi4, scramble: Some(RelayScramble { r, table }) })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn phi3(&self) -> &SymbolMatrix {
        &self.phi3
    }

    pub fn phi4(&self) -> &SymbolMatrix {
        &self.phi4
    }

    pub fn scramble(&self) -> Option<&RelayScramble> {
        self.scramble.as_ref()
    }

    pub fn is_deterministic(&self) -> bool {
        self.scramble.is_none()
    }

    /// Output of a deterministic relay.
    #[inline]
    pub fn apply(&self, y1: Symbol, y2: Symbol) -> (Symbol, Symbol) {
        (self.phi3.get(y1, y2), self.phi4.get(y1, y2))
    }

    /// Output law of the relay on input `(y1, y2)`.
    pub fn outputs(&self, y1: Symbol, y2: Symbol) -> Vec<((Symbol, Symbol), Rational)> {
        match &self.scramble {
            None => vec![(self.apply(y1, y2), Rational::one())],
            Some(s) => {
                let w = Rational::reciprocal_of(s.r);
                s.outputs(self.alphabet.size(), y1, y2).iter().map(|&o| (o, w)).collect()
            }
        }
    }
}

/// Deterministic decoder `psi[y3][y4]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoder {
    alphabet: Alphabet,
    psi: SymbolMatrix,
}

impl Decoder {
    pub fn new(alphabet: Alphabet, psi: SymbolMatrix) -> Result<Self, NetError> {
        psi.validate(&alphabet)?;
        Ok(Decoder { alphabet, psi })
    }

    pub fn from_fn(alphabet: Alphabet, f: impl Fn(Symbol, Symbol) -> Symbol) -> Self {
        Decoder { alphabet, psi: SymbolMatrix::from_fn(alphabet.size(), f) }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn psi(&self) -> &SymbolMatrix {
        &self.psi
    }

    #[inline]
    pub fn decode(&self, y3: Symbol, y4: Symbol) -> Symbol {
        self.psi.get(y3, y4)
    }

    /// The decoder implied by the encoder and relay: each reachable
    /// `(y3, y4)` maps to its unique message; unreachable pairs map to 0.
    pub fn synthesize(
        encoder: &Encoder,
        intermediate: &IntermediateMap,
        prior: &ExactDistribution,
    ) -> Result<Self, NetError> {
        let alphabet = encoder.alphabet();
        let d = alphabet.size();
        let mut table: Vec<Option<Symbol>> = vec![None; d * d];
        for m in prior.support().map(|o| o[0]) {
            for o in encoder.row(m).support() {
                for ((y3, y4), _) in intermediate.outputs(o[0], o[1]) {
                    let slot = &mut table[y3 * d + y4];
                    match *slot {
                        None => *slot = Some(m),
                        Some(m1) if m1 != m => {
                            return Err(NetError::Undecodable { y3, y4, m1, m2: m });
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        let cells = table.into_iter().map(|s| s.unwrap_or(0)).collect();
        Ok(Decoder { alphabet, psi: SymbolMatrix::from_cells(d, cells) })
    }
}

/// A code on the one-hop relay network together with the message prior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Code {
    alphabet: Alphabet,
    encoder: Encoder,
    intermediate: IntermediateMap,
    decoder: Decoder,
    prior: ExactDistribution,
}

impl Code {
    /// Assembles a code with a uniform message prior.
    pub fn new(encoder: Encoder, intermediate: IntermediateMap, decoder: Decoder) -> Result<Self, NetError> {
        let alphabet = encoder.alphabet();
        if intermediate.alphabet() != alphabet || decoder.alphabet() != alphabet {
            return Err(NetError::AlphabetMismatch(format!(
                "encoder d = {}, relay d = {}, decoder d = {}",
                alphabet.size(),
                intermediate.alphabet().size(),
                decoder.alphabet().size()
            )));
        }
        let prior = ExactDistribution::uniform_symbols(alphabet.size())?;
        Ok(Code { alphabet, encoder, intermediate, decoder, prior })
    }

    /// Assembles a code whose decoder is synthesized from the encoder and
    /// relay; fails if no decoder can recover `M`.
    pub fn with_synthesized_decoder(encoder: Encoder, intermediate: IntermediateMap) -> Result<Self, NetError> {
        let alphabet = encoder.alphabet();
        let prior = ExactDistribution::uniform_symbols(alphabet.size())?;
        let decoder = Decoder::synthesize(&encoder, &intermediate, &prior)?;
        Code::new(encoder, intermediate, decoder)
    }

    /// Replaces the message prior (a distribution over single symbols).
    pub fn with_prior(mut self, prior: ExactDistribution) -> Result<Self, NetError> {
        if prior.arity() != 1 {
            return Err(NetError::InvalidParameter("message prior must be over single symbols".into()));
        }
        for o in prior.support() {
            self.alphabet.check(o[0])?;
        }
        self.prior = prior;
        Ok(self)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    pub fn intermediate(&self) -> &IntermediateMap {
        &self.intermediate
    }

    pub fn decoder(&self) -> &Decoder {
        &self.decoder
    }

    pub fn prior(&self) -> &ExactDistribution {
        &self.prior
    }
}

/// Exact joint law of `(M, Y1, Y2, Ytampered, Y3, Y4)`.
///
/// Under an active attack the relay receives `r(Y_i)` on the tampered edge
/// and `Ytampered` records it. Without an attack (or under a passive one)
/// nothing is changed and `Ytampered` equals `Y1` (the first edge of the
/// pair for a passive attack).
pub fn evaluate(code: &Code, attack: Option<&AttackSpec>) -> Result<ExactDistribution, NetError> {
    if let Some(a) = attack {
        a.validate(&code.alphabet)?;
    }
    let mut masses: BTreeMap<Outcome, Rational> = BTreeMap::new();
    for (mo, pm) in code.prior.iter() {
        let m = mo[0];
        for (yo, py) in code.encoder.row(m).iter() {
            let (y1, y2) = (yo[0], yo[1]);
            let (tampered, in1, in2) = match attack {
                None => (y1, y1, y2),
                Some(AttackSpec::Passive { pair }) => match pair.first {
                    FirstEdge::E1 => (y1, y1, y2),
                    FirstEdge::E2 => (y2, y1, y2),
                },
                Some(AttackSpec::Active { tamper_edge, replacement, .. }) => match tamper_edge {
                    FirstEdge::E1 => {
                        let t = replacement.apply(y1);
                        (t, t, y2)
                    }
                    FirstEdge::E2 => {
                        let t = replacement.apply(y2);
                        (t, y1, t)
                    }
                },
            };
            for ((y3, y4), pr) in code.intermediate.outputs(in1, in2) {
                let p = *pm * *py * pr;
                *masses.entry(vec![m, y1, y2, tampered, y3, y4]).or_insert_with(Rational::zero) += p;
            }
        }
    }
    Ok(ExactDistribution::new(JOINT_ARITY, masses)?)
}

/// True iff `psi(Y3, Y4) = M` with probability one when nobody attacks.
pub fn decode_correctly(code: &Code) -> bool {
    match evaluate(code, None) {
        Ok(joint) => joint.support().all(|o| {
            code.decoder.decode(o[Var::Y3.index()], o[Var::Y4.index()]) == o[Var::M.index()]
        }),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn binary_code_outputs() {
        let code = builtin_code("Eq1Eq2-binary", None).unwrap();
        let joint = evaluate(&code, None).unwrap();
        // Y3 = LM, Y4 = LM + M
        let m_y3_y4 = joint.marginal(&[0, 4, 5]).unwrap();
        assert_eq!(
            m_y3_y4.condition(&[(0, 1)]).unwrap(),
            ExactDistribution::new(2, vec![(vec![1, 0], r(1, 2)), (vec![0, 1], r(1, 2))]).unwrap()
        );
        assert_eq!(m_y3_y4.condition(&[(0, 0)]).unwrap(), ExactDistribution::point(vec![0, 0]));
        assert!(decode_correctly(&code));
    }

    #[test]
    fn message_marginal_is_prior() {
        for code in catalog() {
            let joint = evaluate(&code, None).unwrap();
            assert_eq!(&joint.marginal(&[0]).unwrap(), code.prior());
        }
        let skewed = ExactDistribution::new(1, vec![(vec![0], r(1, 3)), (vec![1], r(2, 3))]).unwrap();
        let code = builtin_code("Eq1Eq2-binary", None).unwrap().with_prior(skewed.clone()).unwrap();
        assert_eq!(evaluate(&code, None).unwrap().marginal(&[0]).unwrap(), skewed);
    }

    #[test]
    fn active_constant_one_on_e1_reveals_message() {
        let code = builtin_code("Eq1Eq2-binary", None).unwrap();
        let attack = AttackSpec::active(FirstEdge::E1, Replacement::constant(&code.alphabet(), 1), SecondEdge::E3);
        let joint = evaluate(&code, Some(&attack)).unwrap();
        // Y3 + Y1 + 1 = M
        let p = joint.probability_where(|o| (o[4] + o[1] + 1) % 2 == o[0]);
        assert!(p.is_one());
        assert!(joint.support().all(|o| o[3] == 1));
    }

    #[test]
    fn constant_decoder_fails() {
        for d in 2..6 {
            let a = Alphabet::new(d).unwrap();
            let code = Code::new(
                Encoder::canonical_additive(a),
                IntermediateMap::from_fn(a, |i, j| (i, j)).unwrap(),
                Decoder::from_fn(a, |_, _| 0),
            )
            .unwrap();
            assert!(!decode_correctly(&code));
        }
    }

    #[test]
    fn synthesized_decoder_for_identity_relay() {
        let a = Alphabet::new(5).unwrap();
        let code = Code::with_synthesized_decoder(
            Encoder::canonical_additive(a),
            IntermediateMap::from_fn(a, |i, j| (i, j)).unwrap(),
        )
        .unwrap();
        assert!(decode_correctly(&code));
        for y3 in 0..5 {
            for y4 in 0..5 {
                assert_eq!(code.decoder().decode(y3, y4), a.sub(y3, y4));
            }
        }
        let collapse = Code::with_synthesized_decoder(
            Encoder::canonical_additive(a),
            IntermediateMap::from_fn(a, |i, _| (i, 0)).unwrap(),
        );
        assert!(matches!(collapse, Err(NetError::Undecodable { .. })));
    }

    #[test]
    fn component_alphabets_must_agree() {
        let a2 = Alphabet::binary();
        let a3 = Alphabet::new(3).unwrap();
        let err = Code::new(
            Encoder::canonical_additive(a3),
            IntermediateMap::from_fn(a2, |i, j| (i, j)).unwrap(),
            Decoder::from_fn(a3, |_, _| 0),
        );
        assert!(matches!(err, Err(NetError::AlphabetMismatch(_))));
        assert!(Encoder::binary_eq3(a3).is_err());
    }

    #[test]
    fn attack_alphabet_is_checked() {
        let code = builtin_code("Eq1Eq2-binary", None).unwrap();
        let bad = AttackSpec::active(FirstEdge::E2, Replacement::new(vec![0, 1, 2]), SecondEdge::E4);
        assert!(matches!(evaluate(&code, Some(&bad)), Err(NetError::InvalidAttack(_))));
    }

    #[test]
    fn identity_replacement_matches_no_attack() {
        for code in catalog() {
            let plain = evaluate(&code, None).unwrap();
            let id = Replacement::identity(&code.alphabet());
            let on_e1 = evaluate(&code, Some(&AttackSpec::active(FirstEdge::E1, id.clone(), SecondEdge::E3))).unwrap();
            assert_eq!(plain, on_e1);
            let on_e2 = evaluate(&code, Some(&AttackSpec::active(FirstEdge::E2, id, SecondEdge::E4))).unwrap();
            let keep = [0, 1, 2, 4, 5];
            assert_eq!(plain.marginal(&keep).unwrap(), on_e2.marginal(&keep).unwrap());
        }
    }

    #[test]
    fn additive_encoders_hide_message_on_each_edge() {
        for code in catalog() {
            if code.encoder().kind() == EncoderKind::Table {
                continue;
            }
            let joint = evaluate(&code, None).unwrap();
            for y in [1, 2] {
                let mj = joint.marginal(&[0, y]).unwrap();
                let prod = joint.marginal(&[0]).unwrap().product(&joint.marginal(&[y]).unwrap());
                assert_eq!(mj, prod);
            }
        }
    }
}
