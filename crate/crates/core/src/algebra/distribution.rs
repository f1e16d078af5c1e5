use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AlgebraError, Rational, Symbol};

/// A joint outcome: one symbol per variable.
pub type Outcome = Vec<Symbol>;

/// Finite distribution over fixed-arity outcome tuples with exact rational
/// masses. Every stored mass is positive and the masses sum to exactly one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "DistributionRepr", into = "DistributionRepr")]
pub struct ExactDistribution {
    arity: usize,
    masses: BTreeMap<Outcome, Rational>,
}

#[derive(Serialize, Deserialize)]
struct DistributionRepr {
    arity: usize,
    support: Vec<(Outcome, Rational)>,
}

impl TryFrom<DistributionRepr> for ExactDistribution {
    type Error = AlgebraError;
    fn try_from(r: DistributionRepr) -> Result<Self, Self::Error> {
        ExactDistribution::new(r.arity, r.support)
    }
}

impl From<ExactDistribution> for DistributionRepr {
    fn from(d: ExactDistribution) -> Self {
        DistributionRepr { arity: d.arity, support: d.masses.into_iter().collect() }
    }
}

impl ExactDistribution {
    /// Builds a distribution from weighted outcomes. Repeated outcomes are
    /// merged and zero masses dropped; the total must be exactly one.
    pub fn new(
        arity: usize,
        weighted: impl IntoIterator<Item = (Outcome, Rational)>,
    ) -> Result<Self, AlgebraError> {
        let mut masses = BTreeMap::new();
        for (outcome, p) in weighted {
            if outcome.len() != arity {
                return Err(AlgebraError::ArityMismatch { expected: arity, found: outcome.len() });
            }
            if p < 0 {
                return Err(AlgebraError::NegativeMass(p));
            }
            *masses.entry(outcome).or_insert_with(Rational::zero) += p;
        }
        masses.retain(|_, p| !p.is_zero());
        if masses.is_empty() {
            return Err(AlgebraError::EmptyDistribution);
        }
        let total: Rational = masses.values().sum();
        if !total.is_one() {
            return Err(AlgebraError::NotNormalized(total));
        }
        Ok(ExactDistribution { arity, masses })
    }

    /// Point mass on a single outcome.
    pub fn point(outcome: Outcome) -> Self {
        let arity = outcome.len();
        ExactDistribution { arity, masses: BTreeMap::from([(outcome, Rational::one())]) }
    }

    /// Equal weight on each listed outcome (duplicates accumulate weight).
    pub fn uniform(outcomes: impl IntoIterator<Item = Outcome>) -> Result<Self, AlgebraError> {
        let outcomes: Vec<Outcome> = outcomes.into_iter().collect();
        if outcomes.is_empty() {
            return Err(AlgebraError::EmptyDistribution);
        }
        let arity = outcomes[0].len();
        let w = Rational::reciprocal_of(outcomes.len());
        ExactDistribution::new(arity, outcomes.into_iter().map(|o| (o, w)))
    }

    /// Uniform distribution on the single-variable outcomes `0..n`.
    pub fn uniform_symbols(n: usize) -> Result<Self, AlgebraError> {
        ExactDistribution::uniform((0..n).map(|s| vec![s]))
    }

    /// Accumulates masses that are known to be normalized (they come from
    /// pushing a normalized distribution through a map).
    pub(crate) fn from_masses(arity: usize, masses: BTreeMap<Outcome, Rational>) -> Self {
        let d = ExactDistribution { arity, masses };
        debug_assert!(d.total().is_one(), "internal distribution not normalized");
        d
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of outcomes with positive probability.
    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Outcome, &Rational)> {
        self.masses.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Outcome> {
        self.masses.keys()
    }

    pub fn probability(&self, outcome: &[Symbol]) -> Rational {
        self.masses.get(outcome).copied().unwrap_or_else(Rational::zero)
    }

    /// Total probability of outcomes satisfying `pred`.
    pub fn probability_where(&self, mut pred: impl FnMut(&[Symbol]) -> bool) -> Rational {
        self.masses.iter().filter(|(o, _)| pred(o)).map(|(_, p)| *p).sum()
    }

    /// Exact sum of all masses; one for every valid distribution.
    pub fn total(&self) -> Rational {
        self.masses.values().sum()
    }

    fn check_vars(&self, vars: &[usize]) -> Result<(), AlgebraError> {
        match vars.iter().find(|&&v| v >= self.arity) {
            Some(&index) => Err(AlgebraError::VariableOutOfRange { index, arity: self.arity }),
            None => Ok(()),
        }
    }

    /// Law of the selected variables, in the order given.
    pub fn marginal(&self, vars: &[usize]) -> Result<Self, AlgebraError> {
        self.check_vars(vars)?;
        let mut masses = BTreeMap::new();
        for (o, p) in &self.masses {
            let key: Outcome = vars.iter().map(|&v| o[v]).collect();
            *masses.entry(key).or_insert_with(Rational::zero) += *p;
        }
        Ok(ExactDistribution::from_masses(vars.len(), masses))
    }

    /// Law of the remaining variables given that each `(var, value)` holds.
    /// The conditioned variables are dropped from the outcome tuple.
    pub fn condition(&self, given: &[(usize, Symbol)]) -> Result<Self, AlgebraError> {
        let vars: Vec<usize> = given.iter().map(|&(v, _)| v).collect();
        self.check_vars(&vars)?;
        let keep: Vec<usize> = (0..self.arity).filter(|v| !vars.contains(v)).collect();
        let mut masses = BTreeMap::new();
        let mut mass = Rational::zero();
        for (o, p) in &self.masses {
            if given.iter().all(|&(v, s)| o[v] == s) {
                mass += *p;
                let key: Outcome = keep.iter().map(|&v| o[v]).collect();
                *masses.entry(key).or_insert_with(Rational::zero) += *p;
            }
        }
        if mass.is_zero() {
            return Err(AlgebraError::EmptyCondition);
        }
        for p in masses.values_mut() {
            *p = *p / mass;
        }
        Ok(ExactDistribution::from_masses(keep.len(), masses))
    }

    /// Pushes the distribution forward through `f`, which must return
    /// outcomes of arity `arity`.
    pub fn map_outcomes(
        &self,
        arity: usize,
        mut f: impl FnMut(&[Symbol]) -> Outcome,
    ) -> Result<Self, AlgebraError> {
        let mut masses = BTreeMap::new();
        for (o, p) in &self.masses {
            let key = f(o);
            if key.len() != arity {
                return Err(AlgebraError::ArityMismatch { expected: arity, found: key.len() });
            }
            *masses.entry(key).or_insert_with(Rational::zero) += *p;
        }
        Ok(ExactDistribution::from_masses(arity, masses))
    }

    /// Independent product; outcomes are concatenated.
    pub fn product(&self, other: &Self) -> Self {
        let mut masses = BTreeMap::new();
        for (a, p) in &self.masses {
            for (b, q) in &other.masses {
                let mut key = a.clone();
                key.extend_from_slice(b);
                masses.insert(key, *p * *q);
            }
        }
        ExactDistribution::from_masses(self.arity + other.arity, masses)
    }

    /// If variable `target` is a deterministic function of the `given`
    /// variables on the support, returns that function as a table.
    pub fn functional_table(
        &self,
        target: usize,
        given: &[usize],
    ) -> Result<Option<BTreeMap<Outcome, Symbol>>, AlgebraError> {
        self.check_vars(&[target])?;
        self.check_vars(given)?;
        let mut table = BTreeMap::new();
        for o in self.masses.keys() {
            let key: Outcome = given.iter().map(|&v| o[v]).collect();
            match table.entry(key) {
                Entry::Vacant(e) => {
                    e.insert(o[target]);
                }
                Entry::Occupied(e) => {
                    if *e.get() != o[target] {
                        return Ok(None);
                    }
                }
            }
        }
        Ok(Some(table))
    }

    /// Shannon entropy `-sum p log_base p`.
    pub fn entropy(&self, base: f64) -> Result<f64, AlgebraError> {
        check_base(base)?;
        let ln_base = base.ln();
        let h: f64 = self
            .masses
            .values()
            .map(|p| {
                let x = p.to_f64();
                -x * x.ln()
            })
            .sum();
        Ok((h / ln_base).max(0.0))
    }

    /// Entropy of the selected variables.
    pub fn joint_entropy(&self, vars: &[usize], base: f64) -> Result<f64, AlgebraError> {
        self.marginal(vars)?.entropy(base)
    }

    /// `H(target | given) = H(target, given) - H(given)`.
    pub fn conditional_entropy(
        &self,
        target: &[usize],
        given: &[usize],
        base: f64,
    ) -> Result<f64, AlgebraError> {
        let both: Vec<usize> = given.iter().chain(target).copied().collect();
        Ok(self.joint_entropy(&both, base)? - self.joint_entropy(given, base)?)
    }

    /// `I(A; B) = H(A) + H(B) - H(A, B)`.
    pub fn mutual_information(
        &self,
        a: &[usize],
        b: &[usize],
        base: f64,
    ) -> Result<f64, AlgebraError> {
        let both: Vec<usize> = a.iter().chain(b).copied().collect();
        let mi = self.joint_entropy(a, base)? + self.joint_entropy(b, base)?
            - self.joint_entropy(&both, base)?;
        Ok(mi.max(0.0))
    }
}

fn check_base(base: f64) -> Result<(), AlgebraError> {
    if base.is_finite() && base > 1.0 {
        Ok(())
    } else {
        Err(AlgebraError::InvalidBase(base))
    }
}

/// `-sum p log_base p` for a distribution.
pub fn entropy(dist: &ExactDistribution, base: f64) -> Result<f64, AlgebraError> {
    dist.entropy(base)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d).unwrap()
    }

    fn fair_bits() -> ExactDistribution {
        ExactDistribution::uniform(vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]).unwrap()
    }

    #[test]
    fn entropy_examples() {
        let coin = ExactDistribution::uniform_symbols(2).unwrap();
        assert_eq!(entropy(&coin, 2.0).unwrap(), 1.0);
        assert_eq!(entropy(&ExactDistribution::point(vec![3]), 2.0).unwrap(), 0.0);
        let skew = ExactDistribution::new(
            1,
            vec![(vec![0], r(1, 2)), (vec![1], r(1, 4)), (vec![2], r(1, 4))],
        )
        .unwrap();
        // 1/2 * 1 + 2 * 1/4 * 2
        assert!((entropy(&skew, 2.0).unwrap() - 1.5).abs() < 1e-15);
        assert!(entropy(&coin, 1.0).is_err());
        assert!(entropy(&coin, f64::NAN).is_err());
    }

    #[test]
    fn uniform_entropy_matches_log() {
        for k in 1..40 {
            let u = ExactDistribution::uniform_symbols(k).unwrap();
            for base in [2.0, std::f64::consts::E, 10.0] {
                let expect = (k as f64).ln() / f64::ln(base);
                assert!((u.entropy(base).unwrap() - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn construction_validates() {
        assert!(matches!(
            ExactDistribution::new(1, vec![(vec![0], r(1, 2))]),
            Err(AlgebraError::NotNormalized(_))
        ));
        assert!(matches!(
            ExactDistribution::new(1, vec![(vec![0], r(3, 2)), (vec![1], r(-1, 2))]),
            Err(AlgebraError::NegativeMass(_))
        ));
        assert!(matches!(
            ExactDistribution::new(2, vec![(vec![0], Rational::one())]),
            Err(AlgebraError::ArityMismatch { .. })
        ));
        let merged = ExactDistribution::new(
            1,
            vec![(vec![0], r(1, 4)), (vec![0], r(1, 4)), (vec![1], r(1, 2)), (vec![2], r(0, 1))],
        )
        .unwrap();
        assert_eq!(merged.len(), 2);
        assert_eq!(merged.probability(&[0]), r(1, 2));
    }

    #[test]
    fn marginal_of_independent_bits() {
        let m = fair_bits().marginal(&[0]).unwrap();
        assert_eq!(m, ExactDistribution::uniform_symbols(2).unwrap());
        let swapped = fair_bits().marginal(&[1, 0]).unwrap();
        assert_eq!(swapped, fair_bits());
        let none = fair_bits().marginal(&[]).unwrap();
        assert_eq!(none, ExactDistribution::point(vec![]));
        assert!(fair_bits().marginal(&[2]).is_err());
    }

    #[test]
    fn conditioning() {
        // (M, Y1, Y3) for the binary relay code of the appendix
        let joint = ExactDistribution::uniform(vec![
            vec![0, 0, 0],
            vec![0, 1, 0],
            vec![1, 0, 0],
            vec![1, 1, 1],
        ])
        .unwrap();
        let given_m0 = joint.condition(&[(0, 0)]).unwrap();
        let expect =
            ExactDistribution::new(2, vec![(vec![0, 0], r(1, 2)), (vec![1, 0], r(1, 2))]).unwrap();
        assert_eq!(given_m0, expect);
        assert_eq!(joint.condition(&[(0, 2)]), Err(AlgebraError::EmptyCondition));
        assert_eq!(joint.condition(&[(1, 1), (2, 1)]).unwrap(), ExactDistribution::point(vec![1]));
    }

    #[test]
    fn functional_table_detects_determinism() {
        let joint = ExactDistribution::uniform(vec![vec![0, 0, 1], vec![1, 1, 1], vec![0, 1, 0]])
            .unwrap();
        let t = joint.functional_table(0, &[1, 2]).unwrap().unwrap();
        assert_eq!(t[&vec![1, 1]], 1);
        assert!(joint.functional_table(0, &[2]).unwrap().is_none());
    }

    #[test]
    fn information_identities() {
        let bits = fair_bits();
        assert!(bits.mutual_information(&[0], &[1], 2.0).unwrap().abs() < 1e-15);
        let copy = ExactDistribution::uniform(vec![vec![0, 0], vec![1, 1]]).unwrap();
        assert!((copy.mutual_information(&[0], &[1], 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(copy.conditional_entropy(&[0], &[1], 2.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn product_and_pushforward_stay_normalized() {
        let p = fair_bits().product(&ExactDistribution::uniform_symbols(3).unwrap());
        assert_eq!(p.arity(), 3);
        assert_eq!(p.len(), 12);
        assert!(p.total().is_one());
        let xor = fair_bits().map_outcomes(1, |o| vec![o[0] ^ o[1]]).unwrap();
        assert_eq!(xor, ExactDistribution::uniform_symbols(2).unwrap());
    }

    #[test]
    fn serde_round_trip() {
        let d = fair_bits();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<ExactDistribution>(&s).unwrap(), d);
        let bad = r#"{"arity":1,"support":[[[0],"1/3"]]}"#;
        assert!(serde_json::from_str::<ExactDistribution>(bad).is_err());
    }
}
