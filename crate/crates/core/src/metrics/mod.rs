//! Exact leakage of a code to a passive eavesdropper.
//!
//! Mutual information is computed in floating point from exact joint laws;
//! the l1 measure `d1` stays an exact rational throughout.

mod appendix;

pub use appendix::{appendix_tables, AppendixPair, AppendixTables, ConditionalEntry, JointEntry};

use std::fmt::{self, Write as _};

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{AlgebraError, Rational};
use crate::netmodel::{evaluate, Code, EdgePair, NetError, Var};

/// Slack allowed when comparing the two sides of a bound.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Serializes a float rounded to 12 decimal places so reports are
/// byte-stable across platforms.
pub fn serialize_f64_12<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round12(*x))
}

/// `x` rounded to 12 decimal places, with `-0` folded into `0`.
pub fn round12(x: f64) -> f64 {
    let r: f64 = format!("{x:.12}").parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn pair_vars(pair: EdgePair) -> Vec<usize> {
    pair.vars().to_vec()
}

/// `I(M; Yi, Yj)` under no attack.
pub fn mutual_information(code: &Code, pair: EdgePair, base: f64) -> Result<f64, MetricsError> {
    let joint = evaluate(code, None)?;
    Ok(joint.mutual_information(&[Var::M.index()], &pair_vars(pair), base)?)
}

/// `d1(M | Yi, Yj) = sum_y sum_m |P_Y(y)/d - P_MY(m, y)|`, exactly.
pub fn d1_measure(code: &Code, pair: EdgePair) -> Result<Rational, MetricsError> {
    let joint = evaluate(code, None)?;
    let vars = pair_vars(pair);
    let observed = joint.marginal(&vars)?;
    let with_m = joint.marginal(&[Var::M.index(), vars[0], vars[1]])?;
    let d = code.alphabet().size();
    let inv_d = Rational::reciprocal_of(d);
    let mut total = Rational::zero();
    for (y, py) in observed.iter() {
        for m in 0..d {
            let pmy = with_m.probability(&[m, y[0], y[1]]);
            total += (*py * inv_d - pmy).abs();
        }
    }
    Ok(total)
}

/// The four conditional entropies `H(Yj | Yi)` of the additive encoder with
/// the systematic anti-Latin relay of order `d`. For that encoder
/// `I(M; Yi, Yj) = H(Yj | Yi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormLeakage {
    pub d: usize,
    #[serde(serialize_with = "serialize_f64_12")]
    pub h31: f64,
    #[serde(serialize_with = "serialize_f64_12")]
    pub h32: f64,
    #[serde(serialize_with = "serialize_f64_12")]
    pub h41: f64,
    #[serde(serialize_with = "serialize_f64_12")]
    pub h42: f64,
}

impl ClosedFormLeakage {
    /// The value that equals `I(M; Yi, Yj)` for `pair = (i, j)`.
    pub fn for_pair(&self, pair: EdgePair) -> f64 {
        match pair.vars() {
            [1, 4] => self.h31,
            [1, 5] => self.h41,
            [2, 4] => self.h32,
            _ => self.h42,
        }
    }

    pub fn values(&self) -> [f64; 4] {
        [self.h31, self.h32, self.h41, self.h42]
    }
}

/// Closed-form leakage of the construction of order `d`; the parity of `d`
/// selects the odd or even family.
pub fn closed_form_leakage(d: usize, base: f64) -> Result<ClosedFormLeakage, MetricsError> {
    if d < 3 {
        return Err(MetricsError::InvalidParameter(format!("closed forms need d >= 3, got {d}")));
    }
    if !(base.is_finite() && base > 1.0) {
        return Err(AlgebraError::InvalidBase(base).into());
    }
    let log = |x: f64| x.ln() / base.ln();
    let df = d as f64;
    // (k/2d) log(2d/k) + ((2d-k)/2d) log d
    let mixed = |k: f64| k / 2.0 / df * log(2.0 * df / k) + (2.0 * df - k) / 2.0 / df * log(df);
    if d % 2 == 1 {
        let h = mixed(df + 1.0);
        Ok(ClosedFormLeakage { d, h31: h, h32: h, h41: h, h42: h })
    } else {
        let small = mixed(df + 2.0);
        let big = 0.5 * log(2.0) + 0.5 * log(df);
        Ok(ClosedFormLeakage { d, h31: big, h32: small, h41: small, h42: big })
    }
}

/// One instance of the two-cut lower bound for a fixed first-layer edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Td1Check {
    pub i: u8,
    #[serde(serialize_with = "serialize_f64_12")]
    pub lhs: f64,
    #[serde(serialize_with = "serialize_f64_12")]
    pub rhs: f64,
    pub holds: bool,
    pub tight: bool,
}

/// `max I(M; Yi, Yj) >= H(M) - (1/2) log d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NhtCheck {
    #[serde(serialize_with = "serialize_f64_12")]
    pub lhs: f64,
    #[serde(serialize_with = "serialize_f64_12")]
    pub rhs: f64,
    pub holds: bool,
    pub tight: bool,
}

/// Both sides of `I(M; Yi Y3) + I(M; Yi Y4) >= 2 H(M) - log d` for
/// `i = 1, 2`, and of the max-leakage bound it implies.
///
/// The bounds are derived for relays that are deterministic functions of
/// `(Y1, Y2)`; `applicable` is false for a stochastic relay, which can beat
/// them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub applicable: bool,
    #[serde(serialize_with = "serialize_f64_12")]
    pub message_entropy: f64,
    pub td1: Vec<Td1Check>,
    pub nht: NhtCheck,
}

impl BoundReport {
    /// True iff every inequality holds within [`BOUND_SLACK`].
    pub fn holds(&self) -> bool {
        self.td1.iter().all(|c| c.holds) && self.nht.holds
    }
}

fn compare(lhs: f64, rhs: f64) -> (bool, bool) {
    (lhs >= rhs - BOUND_SLACK, (lhs - rhs).abs() <= BOUND_SLACK)
}

/// Evaluates both lower bounds on `code` under no attack.
pub fn check_lower_bound(code: &Code, base: f64) -> Result<BoundReport, MetricsError> {
    let joint = evaluate(code, None)?;
    let m = [Var::M.index()];
    let h_m = joint.joint_entropy(&m, base)?;
    let log_d = (code.alphabet().size() as f64).ln() / base.ln();
    let mut mi = [0.0f64; 4];
    for (slot, pair) in mi.iter_mut().zip(EdgePair::ALL) {
        *slot = joint.mutual_information(&m, &pair_vars(pair), base)?;
    }
    let td1 = [(1u8, mi[0] + mi[1]), (2u8, mi[2] + mi[3])]
        .into_iter()
        .map(|(i, lhs)| {
            let rhs = 2.0 * h_m - log_d;
            let (holds, tight) = compare(lhs, rhs);
            Td1Check { i, lhs, rhs, holds, tight }
        })
        .collect();
    let lhs = mi.iter().copied().fold(0.0, f64::max);
    let rhs = h_m - 0.5 * log_d;
    let (holds, tight) = compare(lhs, rhs);
    Ok(BoundReport {
        applicable: code.intermediate().is_deterministic(),
        message_entropy: h_m,
        td1,
        nht: NhtCheck { lhs, rhs, holds, tight },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakageEntry {
    pub pair: EdgePair,
    #[serde(serialize_with = "serialize_f64_12")]
    pub mutual_information: f64,
    pub d1: Rational,
}

/// Passive leakage of a code on each allowed pair, plus the lower bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakageProfile {
    pub d: usize,
    pub base: f64,
    pub entries: Vec<LeakageEntry>,
    pub bound_check: BoundReport,
}

/// Leakage on `pairs` (all four when empty).
pub fn leakage_profile(code: &Code, pairs: &[EdgePair], base: f64) -> Result<LeakageProfile, MetricsError> {
    let pairs = if pairs.is_empty() { &EdgePair::ALL[..] } else { pairs };
    let entries = pairs
        .iter()
        .map(|&pair| {
            Ok(LeakageEntry {
                pair,
                mutual_information: mutual_information(code, pair, base)?,
                d1: d1_measure(code, pair)?,
            })
        })
        .collect::<Result<Vec<_>, MetricsError>>()?;
    Ok(LeakageProfile {
        d: code.alphabet().size(),
        base,
        entries,
        bound_check: check_lower_bound(code, base)?,
    })
}

impl LeakageProfile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }

    /// Aligned plain-text rendering.
    pub fn to_text_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "d = {}, log base {}", self.d, self.base);
        let _ = writeln!(out, "{:<6}  {:>16}  {:>12}", "pair", "I(M;Yi,Yj)", "d1");
        for e in &self.entries {
            let _ = writeln!(out, "{:<6}  {:>16.12}  {:>12}", e.pair.to_string(), e.mutual_information, e.d1);
        }
        let b = &self.bound_check;
        let scope = if b.applicable { "" } else { "  (stochastic relay: bound not applicable)" };
        for c in &b.td1 {
            let _ = writeln!(
                out,
                "two-cut bound i={}: {:.12} >= {:.12}  {}{scope}",
                c.i,
                c.lhs,
                c.rhs,
                verdict(c.holds, c.tight)
            );
        }
        let _ = writeln!(
            out,
            "max-leakage bound: {:.12} >= {:.12}  {}{scope}",
            b.nht.lhs,
            b.nht.rhs,
            verdict(b.nht.holds, b.nht.tight)
        );
        out
    }
}

fn verdict(holds: bool, tight: bool) -> &'static str {
    match (holds, tight) {
        (true, true) => "holds (equality)",
        (true, false) => "holds",
        _ => "VIOLATED",
    }
}

impl fmt::Display for LeakageProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text_table())
    }
}
