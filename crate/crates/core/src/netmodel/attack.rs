use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{NetError, Var};
use crate::algebra::{Alphabet, Symbol};

/// Edge into the relay (`e1` or `e2`); the only edges Eve may overwrite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum FirstEdge {
    E1,
    E2,
}

/// Edge out of the relay (`e3` or `e4`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum SecondEdge {
    E3,
    E4,
}

impl FirstEdge {
    pub const ALL: [FirstEdge; 2] = [FirstEdge::E1, FirstEdge::E2];

    pub fn number(self) -> u8 {
        match self {
            FirstEdge::E1 => 1,
            FirstEdge::E2 => 2,
        }
    }

    pub fn var(self) -> Var {
        match self {
            FirstEdge::E1 => Var::Y1,
            FirstEdge::E2 => Var::Y2,
        }
    }

    /// The other first-layer edge.
    pub fn other(self) -> FirstEdge {
        match self {
            FirstEdge::E1 => FirstEdge::E2,
            FirstEdge::E2 => FirstEdge::E1,
        }
    }
}

impl SecondEdge {
    pub const ALL: [SecondEdge; 2] = [SecondEdge::E3, SecondEdge::E4];

    pub fn number(self) -> u8 {
        match self {
            SecondEdge::E3 => 3,
            SecondEdge::E4 => 4,
        }
    }

    pub fn var(self) -> Var {
        match self {
            SecondEdge::E3 => Var::Y3,
            SecondEdge::E4 => Var::Y4,
        }
    }
}

impl TryFrom<u8> for FirstEdge {
    type Error = NetError;
    fn try_from(n: u8) -> Result<Self, NetError> {
        match n {
            1 => Ok(FirstEdge::E1),
            2 => Ok(FirstEdge::E2),
            _ => Err(NetError::InvalidAttack(format!("e{n} is not a first-layer edge"))),
        }
    }
}

impl TryFrom<u8> for SecondEdge {
    type Error = NetError;
    fn try_from(n: u8) -> Result<Self, NetError> {
        match n {
            3 => Ok(SecondEdge::E3),
            4 => Ok(SecondEdge::E4),
            _ => Err(NetError::InvalidAttack(format!("e{n} is not a second-layer edge"))),
        }
    }
}

impl From<FirstEdge> for u8 {
    fn from(e: FirstEdge) -> u8 {
        e.number()
    }
}

impl From<SecondEdge> for u8 {
    fn from(e: SecondEdge) -> u8 {
        e.number()
    }
}

impl fmt::Display for FirstEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.number())
    }
}

impl fmt::Display for SecondEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.number())
    }
}

/// One edge from each layer. Pairs inside a single layer form a cut and are
/// not representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[u8; 2]", into = "[u8; 2]")]
pub struct EdgePair {
    pub first: FirstEdge,
    pub second: SecondEdge,
}

impl EdgePair {
    /// `(1,3), (1,4), (2,3), (2,4)`.
    pub const ALL: [EdgePair; 4] = [
        EdgePair { first: FirstEdge::E1, second: SecondEdge::E3 },
        EdgePair { first: FirstEdge::E1, second: SecondEdge::E4 },
        EdgePair { first: FirstEdge::E2, second: SecondEdge::E3 },
        EdgePair { first: FirstEdge::E2, second: SecondEdge::E4 },
    ];

    pub fn new(i: u8, j: u8) -> Result<Self, NetError> {
        let (i, j) = if i > j { (j, i) } else { (i, j) };
        match (FirstEdge::try_from(i), SecondEdge::try_from(j)) {
            (Ok(first), Ok(second)) => Ok(EdgePair { first, second }),
            _ => Err(NetError::DisallowedPair(i, j)),
        }
    }

    pub fn vars(self) -> [usize; 2] {
        [self.first.var() as usize, self.second.var() as usize]
    }
}

impl TryFrom<[u8; 2]> for EdgePair {
    type Error = NetError;
    fn try_from(p: [u8; 2]) -> Result<Self, NetError> {
        EdgePair::new(p[0], p[1])
    }
}

impl From<EdgePair> for [u8; 2] {
    fn from(p: EdgePair) -> [u8; 2] {
        [p.first.number(), p.second.number()]
    }
}

impl fmt::Display for EdgePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.first.number(), self.second.number())
    }
}

impl FromStr for EdgePair {
    type Err = NetError;
    fn from_str(s: &str) -> Result<Self, NetError> {
        let bad = || NetError::InvalidAttack(format!("cannot parse edge pair {s:?}"));
        let (a, b) = s.trim().trim_matches(|c| c == '(' || c == ')').split_once(',').ok_or_else(bad)?;
        let a: u8 = a.trim().trim_start_matches('e').parse().map_err(|_| bad())?;
        let b: u8 = b.trim().trim_start_matches('e').parse().map_err(|_| bad())?;
        EdgePair::new(a, b)
    }
}

/// Total map Eve applies to the symbol she reads on her first-layer edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Replacement(Vec<Symbol>);

impl Replacement {
    pub fn new(map: Vec<Symbol>) -> Self {
        Replacement(map)
    }

    pub fn identity(alphabet: &Alphabet) -> Self {
        Replacement(alphabet.symbols().collect())
    }

    pub fn constant(alphabet: &Alphabet, value: Symbol) -> Self {
        Replacement(vec![value; alphabet.size()])
    }

    pub fn apply(&self, symbol: Symbol) -> Symbol {
        self.0[symbol]
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.0
    }

    /// The constant value, if every input maps to the same symbol.
    pub fn as_constant(&self) -> Option<Symbol> {
        let first = *self.0.first()?;
        self.0.iter().all(|&v| v == first).then_some(first)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn validate(&self, alphabet: &Alphabet) -> Result<(), NetError> {
        if self.0.len() != alphabet.size() {
            return Err(NetError::InvalidAttack(format!(
                "replacement map has {} entries, alphabet has {}",
                self.0.len(),
                alphabet.size()
            )));
        }
        if let Some(&v) = self.0.iter().find(|&&v| v >= alphabet.size()) {
            return Err(NetError::InvalidAttack(format!(
                "replacement value {v} is outside Z_{}",
                alphabet.size()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Replacement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_constant() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "{:?}", self.0),
        }
    }
}

/// What Eve does to the network.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum AttackSpec {
    /// Read both edges of the pair, change nothing.
    Passive { pair: EdgePair },
    /// Read `tamper_edge`, overwrite it with `replacement(read value)`, then
    /// read `observe_edge`.
    Active { tamper_edge: FirstEdge, replacement: Replacement, observe_edge: SecondEdge },
}

impl AttackSpec {
    pub fn passive(pair: EdgePair) -> Self {
        AttackSpec::Passive { pair }
    }

    pub fn active(tamper_edge: FirstEdge, replacement: Replacement, observe_edge: SecondEdge) -> Self {
        AttackSpec::Active { tamper_edge, replacement, observe_edge }
    }

    /// The edges whose symbols Eve reads.
    pub fn observed_pair(&self) -> EdgePair {
        match self {
            AttackSpec::Passive { pair } => *pair,
            AttackSpec::Active { tamper_edge, observe_edge, .. } => {
                EdgePair { first: *tamper_edge, second: *observe_edge }
            }
        }
    }

    pub fn validate(&self, alphabet: &Alphabet) -> Result<(), NetError> {
        match self {
            AttackSpec::Passive { .. } => Ok(()),
            AttackSpec::Active { replacement, .. } => replacement.validate(alphabet),
        }
    }
}

impl fmt::Display for AttackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackSpec::Passive { pair } => {
                write!(f, "eavesdrop {} and {}", pair.first, pair.second)
            }
            AttackSpec::Active { tamper_edge, replacement, observe_edge } => {
                write!(f, "tamper {tamper_edge} ↦ {replacement}, observe {observe_edge}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_exclude_cuts() {
        assert!(EdgePair::new(1, 2).is_err());
        assert!(EdgePair::new(3, 4).is_err());
        assert!(EdgePair::new(1, 5).is_err());
        assert_eq!(EdgePair::new(3, 1).unwrap(), EdgePair::ALL[0]);
        assert_eq!("2,4".parse::<EdgePair>().unwrap(), EdgePair::ALL[3]);
        assert_eq!("(e1, e4)".parse::<EdgePair>().unwrap(), EdgePair::ALL[1]);
        assert!("1,2".parse::<EdgePair>().is_err());
    }

    #[test]
    fn replacement_validation() {
        let z3 = Alphabet::new(3).unwrap();
        assert!(Replacement::identity(&z3).validate(&z3).is_ok());
        assert!(Replacement::new(vec![0, 1]).validate(&z3).is_err());
        assert!(Replacement::new(vec![0, 1, 3]).validate(&z3).is_err());
        assert_eq!(Replacement::constant(&z3, 2).as_constant(), Some(2));
        assert_eq!(Replacement::identity(&z3).as_constant(), None);
    }

    #[test]
    fn attack_json_shape() {
        let a = AttackSpec::active(
            FirstEdge::E1,
            Replacement::constant(&Alphabet::binary(), 1),
            SecondEdge::E3,
        );
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"mode":"active","tamper_edge":1,"replacement":[1,1],"observe_edge":3}"#);
        assert_eq!(serde_json::from_str::<AttackSpec>(&s).unwrap(), a);
        assert_eq!(a.to_string(), "tamper e1 ↦ 1, observe e3");
        let p = AttackSpec::passive(EdgePair::ALL[2]);
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"mode":"passive","pair":[2,3]}"#);
        assert!(serde_json::from_str::<AttackSpec>(r#"{"mode":"passive","pair":[1,2]}"#).is_err());
    }
}
