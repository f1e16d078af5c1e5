use serde::Serialize;

use super::{d1_measure, serialize_f64_12, MetricsError};
use crate::algebra::{Rational, Symbol};
use crate::netmodel::{evaluate, Code, EdgePair, Var};

/// `P(m | yi, yj)` or `P(yi, yj | m)`, depending on the table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionalEntry {
    pub m: Symbol,
    pub yi: Symbol,
    pub yj: Symbol,
    pub p: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JointEntry {
    pub yi: Symbol,
    pub yj: Symbol,
    pub p: Rational,
}

/// Every table needed to derive the leakage of one observed pair by hand.
/// Only nonzero entries are listed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixPair {
    pub pair: EdgePair,
    /// `P_{Yi,Yj|M}`.
    pub given_message: Vec<ConditionalEntry>,
    /// `P_{Yi,Yj}`.
    pub observed: Vec<JointEntry>,
    /// `P_{M|Yi,Yj}`.
    pub posterior: Vec<ConditionalEntry>,
    #[serde(serialize_with = "serialize_f64_12")]
    pub entropy_given_message: f64,
    #[serde(serialize_with = "serialize_f64_12")]
    pub entropy: f64,
    #[serde(serialize_with = "serialize_f64_12")]
    pub mutual_information: f64,
    pub d1: Rational,
}

fn lookup(entries: &[ConditionalEntry], m: Symbol, yi: Symbol, yj: Symbol) -> Rational {
    entries
        .iter()
        .find(|e| (e.m, e.yi, e.yj) == (m, yi, yj))
        .map_or_else(Rational::zero, |e| e.p)
}

impl AppendixPair {
    /// `P_{Yi,Yj|M}(yi, yj | m)`.
    pub fn given_message(&self, yi: Symbol, yj: Symbol, m: Symbol) -> Rational {
        lookup(&self.given_message, m, yi, yj)
    }

    /// `P_{Yi,Yj}(yi, yj)`.
    pub fn observed(&self, yi: Symbol, yj: Symbol) -> Rational {
        self.observed
            .iter()
            .find(|e| (e.yi, e.yj) == (yi, yj))
            .map_or_else(Rational::zero, |e| e.p)
    }

    /// `P_{M|Yi,Yj}(m | yi, yj)`.
    pub fn posterior(&self, m: Symbol, yi: Symbol, yj: Symbol) -> Rational {
        lookup(&self.posterior, m, yi, yj)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixTables {
    pub pairs: Vec<AppendixPair>,
}

impl AppendixTables {
    pub fn pair(&self, pair: EdgePair) -> &AppendixPair {
        self.pairs.iter().find(|p| p.pair == pair).expect("all four pairs are tabulated")
    }
}

/// Conditional-probability and entropy tables (entropies in bits) for all
/// four allowed pairs of `code`.
pub fn appendix_tables(code: &Code) -> Result<AppendixTables, MetricsError> {
    let joint = evaluate(code, None)?;
    let m = Var::M.index();
    let pairs = EdgePair::ALL
        .iter()
        .map(|&pair| {
            let [a, b] = pair.vars();
            let prior = joint.marginal(&[m])?;
            let observed_dist = joint.marginal(&[a, b])?;
            let triple = joint.marginal(&[m, a, b])?;
            let mut given_message = Vec::new();
            let mut posterior = Vec::new();
            for (o, p) in triple.iter() {
                let (mv, yi, yj) = (o[0], o[1], o[2]);
                given_message.push(ConditionalEntry { m: mv, yi, yj, p: *p / prior.probability(&[mv]) });
                posterior.push(ConditionalEntry { m: mv, yi, yj, p: *p / observed_dist.probability(&[yi, yj]) });
            }
            let observed = observed_dist.iter().map(|(o, p)| JointEntry { yi: o[0], yj: o[1], p: *p }).collect();
            Ok(AppendixPair {
                pair,
                given_message,
                observed,
                posterior,
                entropy_given_message: joint.conditional_entropy(&[a, b], &[m], 2.0)?,
                entropy: joint.joint_entropy(&[a, b], 2.0)?,
                mutual_information: joint.mutual_information(&[m], &[a, b], 2.0)?,
                d1: d1_measure(code, pair)?,
            })
        })
        .collect::<Result<Vec<_>, MetricsError>>()?;
    Ok(AppendixTables { pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::builtin_code;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn tables() -> AppendixTables {
        appendix_tables(&builtin_code("Eq1Eq2-binary", None).unwrap()).unwrap()
    }

    #[test]
    fn pair_one_three() {
        let t = tables();
        let p = t.pair(EdgePair::new(1, 3).unwrap());
        for (yi, yj, m) in [(0, 0, 0), (1, 0, 0), (0, 0, 1), (1, 1, 1)] {
            assert_eq!(p.given_message(yi, yj, m), r(1, 2));
        }
        assert_eq!(p.given_message.len(), 4);
        assert!((p.entropy_given_message - 1.0).abs() < 1e-12);
        assert!((p.entropy - 1.5).abs() < 1e-12);
        assert!((p.mutual_information - 0.5).abs() < 1e-12);
        assert_eq!(p.observed(0, 0), r(1, 2));
        assert_eq!(p.observed(1, 0), r(1, 4));
        assert_eq!(p.observed(1, 1), r(1, 4));
        assert_eq!(p.observed(0, 1), r(0, 1));
        assert_eq!(p.posterior(0, 0, 0), r(1, 2));
        assert_eq!(p.posterior(1, 0, 0), r(1, 2));
        assert_eq!(p.posterior(0, 1, 0), r(1, 1));
        assert_eq!(p.posterior(1, 1, 1), r(1, 1));
        assert_eq!(p.posterior(1, 1, 0), r(0, 1));
        assert_eq!(p.d1, r(1, 2));
    }

    #[test]
    fn pair_two_three() {
        let t = tables();
        let p = t.pair(EdgePair::new(2, 3).unwrap());
        for (yi, yj, m) in [(0, 0, 0), (1, 0, 0), (0, 1, 1), (1, 0, 1)] {
            assert_eq!(p.given_message(yi, yj, m), r(1, 2));
        }
        assert_eq!(p.given_message.len(), 4);
        assert!((p.mutual_information - 0.5).abs() < 1e-12);
        assert_eq!(p.d1, r(1, 2));
    }

    #[test]
    fn remaining_pairs_follow_by_relabeling() {
        let t = tables();
        for pair in [EdgePair::new(1, 4).unwrap(), EdgePair::new(2, 4).unwrap()] {
            let p = t.pair(pair);
            assert!((p.entropy - 1.5).abs() < 1e-12);
            assert!((p.mutual_information - 0.5).abs() < 1e-12);
            assert_eq!(p.d1, r(1, 2));
        }
    }
}
