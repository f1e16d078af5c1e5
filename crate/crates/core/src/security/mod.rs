//! Security verdicts for codes on the one-hop relay network.
//!
//! A code is (imperfectly) secure when Eve, reading one edge in each layer,
//! can never recover `M` with probability one. Recovery is decided exactly on
//! the support of the joint law: `M` must be constant on every observation
//! fiber of positive probability. Every insecure verdict carries a witness
//! that [`replay_witness`] confirms through [`evaluate`].

mod linear;
mod uniqueness;

pub use linear::{scan_linear_codes, LinearCode, LinearScanReport};
pub use uniqueness::{
    binary_uniqueness_search, equivalent_up_to_relabeling, BinaryCandidate, equivalent_up_to_relabeling_with_message,
    matches_reference_relay, UniquenessReport,
};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{AlgebraError, ExactDistribution, Rational, Symbol};
use crate::netmodel::{
    decode_correctly, evaluate, AttackSpec, Code, EdgePair, FirstEdge, NetError, Replacement, SecondEdge, Var,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SecurityError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("the sink cannot decode this code, so its security is vacuous")]
    Undecodable,
    #[error("size limit: {0}")]
    SizeLimit(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Secure,
    Insecure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackMode {
    Passive,
    Active,
}

/// Eve's deterministic guess of `M` from the pair of symbols she reads,
/// keyed `(first-layer symbol, second-layer symbol)`. The first-layer symbol
/// is the value she read before any tampering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuessTable(pub BTreeMap<(Symbol, Symbol), Symbol>);

impl GuessTable {
    pub fn guess(&self, first: Symbol, second: Symbol) -> Option<Symbol> {
        self.0.get(&(first, second)).copied()
    }

    /// `M = b*Yj + a*Yi + c` if the table is affine in the observations.
    pub fn affine_formula(&self, pair: EdgePair, d: usize) -> Option<String> {
        if d > 16 {
            return None;
        }
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    if self.0.iter().all(|(&(x, y), &m)| (a * x + b * y + c) % d == m) {
                        return Some(render_affine(
                            &[(b, pair.second.number()), (a, pair.first.number())],
                            c,
                            d,
                        ));
                    }
                }
            }
        }
        None
    }
}

fn render_affine(terms: &[(usize, u8)], c: usize, d: usize) -> String {
    let mut out = String::new();
    for &(coef, edge) in terms.iter().filter(|t| t.0 != 0) {
        let (neg, mag) = if coef == d - 1 && d > 2 { (true, 1) } else { (false, coef) };
        let body = if mag == 1 { format!("Y{edge}") } else { format!("{mag}·Y{edge}") };
        match (out.is_empty(), neg) {
            (true, false) => out.push_str(&body),
            (true, true) => out.push_str(&format!("−{body}")),
            (false, false) => out.push_str(&format!(" + {body}")),
            (false, true) => out.push_str(&format!(" − {body}")),
        }
    }
    if out.is_empty() {
        out = c.to_string();
    } else if c != 0 {
        out.push_str(&format!(" + {c}"));
    }
    format!("M = {out}")
}

impl Serialize for GuessTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            observed: [Symbol; 2],
            m: Symbol,
        }
        s.collect_seq(self.0.iter().map(|(&(a, b), &m)| Entry { observed: [a, b], m }))
    }
}

/// A concrete attack and guess that recover `M` with probability one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub attack: AttackSpec,
    pub guess: GuessTable,
    /// Closed form of the guess when it is affine, e.g. `M = Y3 + Y1 + 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
}

impl Witness {
    fn new(attack: AttackSpec, guess: GuessTable, d: usize) -> Self {
        let formula = guess.affine_formula(attack.observed_pair(), d);
        Witness { attack, guess, formula }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.attack)?;
        match &self.formula {
            Some(formula) => write!(f, "; guess {formula}"),
            None => write!(f, "; guess by table"),
        }
    }
}

/// Outcome for one pair of edges Eve may read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairCheck {
    pub pair: EdgePair,
    pub recoverable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SecurityReport {
    pub mode: AttackMode,
    pub verdict: Verdict,
    /// The first successful attack, in pair order.
    pub witness: Option<Witness>,
    pub pairs_checked: Vec<PairCheck>,
}

impl SecurityReport {
    fn from_checks(mode: AttackMode, pairs_checked: Vec<PairCheck>) -> Self {
        let witness = pairs_checked.iter().find_map(|c| c.witness.clone());
        let verdict = if witness.is_some() { Verdict::Insecure } else { Verdict::Secure };
        SecurityReport { mode, verdict, witness, pairs_checked }
    }

    pub fn is_secure(&self) -> bool {
        self.verdict == Verdict::Secure
    }

    /// Witnesses for every recoverable pair.
    pub fn witnesses(&self) -> impl Iterator<Item = &Witness> {
        self.pairs_checked.iter().filter_map(|c| c.witness.as_ref())
    }
}

fn require_decodable(code: &Code) -> Result<(), SecurityError> {
    if decode_correctly(code) {
        Ok(())
    } else {
        Err(SecurityError::Undecodable)
    }
}

fn guess_from(table: BTreeMap<Vec<Symbol>, Symbol>) -> GuessTable {
    GuessTable(table.into_iter().map(|(k, m)| ((k[0], k[1]), m)).collect())
}

/// Passive security: for every allowed pair `(Yi, Yj)`, `M` is not a
/// function of `(Yi, Yj)` on the support.
pub fn is_passive_secure(code: &Code) -> Result<SecurityReport, SecurityError> {
    require_decodable(code)?;
    let joint = evaluate(code, None)?;
    let d = code.alphabet().size();
    let checks = EdgePair::ALL
        .iter()
        .map(|&pair| {
            let table = joint.functional_table(Var::M.index(), &pair.vars())?;
            let witness = table.map(|t| Witness::new(AttackSpec::passive(pair), guess_from(t), d));
            Ok(PairCheck { pair, recoverable: witness.is_some(), witness })
        })
        .collect::<Result<Vec<_>, SecurityError>>()?;
    Ok(SecurityReport::from_checks(AttackMode::Passive, checks))
}

/// For tamper edge `i` and observed edge `j`: Eve knows `Yi = y` before
/// choosing what to write, so she may pick the written value `v` per `y`.
/// `M` is recoverable iff for every `y` on the support some `v` makes `M`
/// a function of `Yj` within the fiber `Yi = y`.
fn active_pair_reduction(
    code: &Code,
    base: &ExactDistribution,
    pair: EdgePair,
) -> Option<(Replacement, GuessTable)> {
    let d = code.alphabet().size();
    let relay = code.intermediate();
    let ti = match pair.first {
        FirstEdge::E1 => 1,
        FirstEdge::E2 => 2,
    };
    let mut choice: Vec<Option<Symbol>> = vec![None; d];
    let mut guess = BTreeMap::new();
    let observed: BTreeSet<Symbol> = base.support().map(|o| o[ti]).collect();
    for y in observed {
        let found = (0..d).find_map(|v| {
            let mut table: BTreeMap<Symbol, Symbol> = BTreeMap::new();
            for o in base.support().filter(|o| o[ti] == y) {
                let (m, y1, y2) = (o[0], o[1], o[2]);
                let (in1, in2) = if ti == 1 { (v, y2) } else { (y1, v) };
                for ((y3, y4), _) in relay.outputs(in1, in2) {
                    let yj = match pair.second {
                        SecondEdge::E3 => y3,
                        SecondEdge::E4 => y4,
                    };
                    if *table.entry(yj).or_insert(m) != m {
                        return None;
                    }
                }
            }
            Some((v, table))
        });
        let (v, table) = found?;
        choice[y] = Some(v);
        guess.extend(table.into_iter().map(|(yj, m)| ((y, yj), m)));
    }
    // unobserved inputs get the first chosen value, so uniform choices
    // read as a constant replacement
    let fill = choice.iter().flatten().next().copied().unwrap_or(0);
    let map = choice.into_iter().map(|c| c.unwrap_or(fill)).collect();
    Some((Replacement::new(map), GuessTable(guess)))
}

/// Active security by the per-observed-value reduction.
pub fn is_active_secure(code: &Code) -> Result<SecurityReport, SecurityError> {
    require_decodable(code)?;
    let d = code.alphabet().size();
    let base = evaluate(code, None)?.marginal(&[Var::M.index(), Var::Y1.index(), Var::Y2.index()])?;
    let checks = EdgePair::ALL
        .iter()
        .map(|&pair| {
            let witness = active_pair_reduction(code, &base, pair).map(|(r, g)| {
                Witness::new(AttackSpec::active(pair.first, r, pair.second), g, d)
            });
            PairCheck { pair, recoverable: witness.is_some(), witness }
        })
        .collect();
    Ok(SecurityReport::from_checks(AttackMode::Active, checks))
}

/// Largest alphabet the brute-force oracle accepts.
pub const ORACLE_MAX_D: usize = 4;

/// Active security by evaluating every one of the `d^d` replacement maps on
/// each tamper edge and testing the resulting joint directly.
pub fn active_check_bruteforce_oracle(code: &Code) -> Result<SecurityReport, SecurityError> {
    let d = code.alphabet().size();
    if d > ORACLE_MAX_D {
        return Err(SecurityError::SizeLimit(format!(
            "brute-force oracle enumerates d^d maps and is limited to d <= {ORACLE_MAX_D} (got {d})"
        )));
    }
    require_decodable(code)?;
    let maps: Vec<Replacement> = (0..d.pow(d as u32))
        .map(|k| Replacement::new((0..d).map(|x| (k / d.pow(x as u32)) % d).collect()))
        .collect();
    let mut checks = Vec::new();
    for pair in EdgePair::ALL {
        let mut witness = None;
        for r in &maps {
            let attack = AttackSpec::active(pair.first, r.clone(), pair.second);
            let joint = evaluate(code, Some(&attack))?;
            if let Some(t) = joint.functional_table(Var::M.index(), &pair.vars())? {
                witness = Some(Witness::new(attack, guess_from(t), d));
                break;
            }
        }
        checks.push(PairCheck { pair, recoverable: witness.is_some(), witness });
    }
    Ok(SecurityReport::from_checks(AttackMode::Active, checks))
}

/// Probability that the witness's guess equals `M` when its attack is run.
pub fn replay_witness(code: &Code, witness: &Witness) -> Result<Rational, SecurityError> {
    let joint = evaluate(code, Some(&witness.attack))?;
    let [vi, vj] = witness.attack.observed_pair().vars();
    Ok(joint.probability_where(|o| witness.guess.guess(o[vi], o[vj]) == Some(o[Var::M.index()])))
}
