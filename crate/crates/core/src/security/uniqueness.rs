use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::{is_active_secure, SecurityError};
use crate::algebra::{Alphabet, ExactDistribution, Symbol};
use crate::netmodel::{builtin_code, evaluate, Code, Decoder, Encoder, IntermediateMap, Var};

/// A binary code with a deterministic encoder over a uniform scramble bit,
/// each component packed into bits: the encoder sends `(m, l)` to the cell
/// `(enc >> 2(2m + l)) & 3` read as `(y1, y2)`, the relay sends `(y1, y2)` to
/// `(relay >> 2(2 y1 + y2)) & 3` read as `(y3, y4)`, and the decoder outputs
/// bit `2 y3 + y4` of `decoder`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BinaryCandidate {
    pub encoder: u8,
    pub relay: u8,
    pub decoder: u8,
}

fn cell(word: u8, index: usize) -> (Symbol, Symbol) {
    let c = (word >> (2 * index)) & 3;
    ((c >> 1) as Symbol, (c & 1) as Symbol)
}

fn pack(f: impl Fn(usize) -> (Symbol, Symbol)) -> u8 {
    (0..4).map(|k| {
        let (a, b) = f(k);
        ((2 * a + b) as u8) << (2 * k)
    })
    .fold(0, |x, y| x | y)
}

impl BinaryCandidate {
    pub fn encode(&self, m: Symbol, l: Symbol) -> (Symbol, Symbol) {
        cell(self.encoder, 2 * m + l)
    }

    pub fn relay(&self, y1: Symbol, y2: Symbol) -> (Symbol, Symbol) {
        cell(self.relay, 2 * y1 + y2)
    }

    pub fn decode(&self, y3: Symbol, y4: Symbol) -> Symbol {
        ((self.decoder >> (2 * y3 + y4)) & 1) as Symbol
    }

    /// `[m, y1, y2, y3, y4]` for each of the four equally likely `(m, l)`.
    fn rows(&self) -> [[Symbol; 5]; 4] {
        let mut out = [[0; 5]; 4];
        for (k, row) in out.iter_mut().enumerate() {
            let (m, l) = (k >> 1, k & 1);
            let (y1, y2) = self.encode(m, l);
            let (y3, y4) = self.relay(y1, y2);
            *row = [m, y1, y2, y3, y4];
        }
        out
    }

    /// Decodes correctly (C1) and leaks nothing deterministic on any
    /// allowed pair (C2).
    fn survives(&self) -> bool {
        let rows = self.rows();
        if rows.iter().any(|r| self.decode(r[3], r[4]) != r[0]) {
            return false;
        }
        let determined = |a: usize, b: usize| {
            let mut seen = [None; 4];
            rows.iter().all(|r| *seen[2 * r[a] + r[b]].get_or_insert(r[0]) == r[0])
        };
        ![(1, 3), (1, 4), (2, 3), (2, 4)].iter().any(|&(a, b)| determined(a, b))
    }

    fn encoder_is_bijective(&self) -> bool {
        (0..4).map(|k| cell(self.encoder, k)).collect::<BTreeSet<_>>().len() == 4
    }

    pub fn to_code(&self) -> Code {
        let a = Alphabet::binary();
        let encoder = Encoder::deterministic(a, 2, |m, l| self.encode(m, l)).expect("binary table");
        let relay = IntermediateMap::from_fn(a, |y1, y2| self.relay(y1, y2)).expect("binary relay");
        Code::new(encoder, relay, Decoder::from_fn(a, |y3, y4| self.decode(y3, y4))).expect("same alphabet")
    }

    /// Applies the edge flips `f_k(y) = y + bit k-1 of flips` to the
    /// variables on `e1..e4`, rewriting the tables so the code's behaviour
    /// is unchanged up to the relabeling.
    fn flipped(&self, flips: usize) -> Self {
        let f = |k: usize, y: Symbol| y ^ ((flips >> k) & 1);
        let encoder = pack(|k| {
            let (y1, y2) = cell(self.encoder, k);
            (f(0, y1), f(1, y2))
        });
        let relay = pack(|k| {
            let (y3, y4) = self.relay(f(0, k >> 1), f(1, k & 1));
            (f(2, y3), f(3, y4))
        });
        let decoder = (0..4usize)
            .map(|k| (self.decode(f(2, k >> 1), f(3, k & 1)) as u8) << k)
            .fold(0, |x, y| x | y);
        BinaryCandidate { encoder, relay, decoder }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniquenessReport {
    pub candidates: usize,
    pub survivors: usize,
    pub survivors_with_bijective_encoder: usize,
    pub contains_canonical: bool,
    /// Survivors whose relay becomes the reference relay after per-edge
    /// bijections of `e1..e4`.
    pub relay_matches_reference: usize,
    /// Orbits of survivor tables under the 16 edge-flip relabelings.
    pub edge_flip_orbits: usize,
    /// Distinct no-attack joints of `(M, Y1..Y4)` up to edge relabelings.
    pub joint_classes: usize,
    /// The same, also allowing a relabeling of `M`.
    pub joint_classes_with_message: usize,
    pub active_secure: usize,
    #[serde(skip)]
    pub survivor_list: Vec<BinaryCandidate>,
}

impl UniquenessReport {
    pub fn survivor_codes(&self) -> Vec<Code> {
        self.survivor_list.iter().map(BinaryCandidate::to_code).collect()
    }
}

fn canonical_candidate() -> BinaryCandidate {
    // Y1 = L, Y2 = M + L; Y3 = Y1 (Y2 + 1), Y4 = (Y1 + 1) Y2; psi = Y3 + Y4
    BinaryCandidate {
        encoder: pack(|k| (k & 1, (k >> 1) ^ (k & 1))),
        relay: pack(|k| {
            let (y1, y2) = (k >> 1, k & 1);
            (y1 * (y2 ^ 1), (y1 ^ 1) * y2)
        }),
        decoder: 0b0110,
    }
}

/// Exhaustive search over every binary code with a deterministic encoder of
/// `(M, L)`, deterministic relay and decoder: `256 * 256 * 16` candidates.
pub fn binary_uniqueness_search() -> Result<UniquenessReport, SecurityError> {
    let mut survivors: Vec<BinaryCandidate> = (0..=255u8)
        .into_par_iter()
        .flat_map_iter(|encoder| {
            (0..=255u8).flat_map(move |relay| {
                (0..16u8)
                    .map(move |decoder| BinaryCandidate { encoder, relay, decoder })
                    .filter(BinaryCandidate::survives)
            })
        })
        .collect();
    survivors.sort();

    let reference = builtin_code("Eq1Eq2-binary", None)?;
    let codes: Vec<Code> = survivors.iter().map(BinaryCandidate::to_code).collect();
    let relay_matches_reference = codes.iter().filter(|c| matches_reference_relay(c, &reference)).count();
    let active_secure = codes
        .par_iter()
        .map(|c| is_active_secure(c).map(|r| r.is_secure() as usize))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .sum();

    let orbit_reps: BTreeSet<BinaryCandidate> =
        survivors.iter().map(|s| (0..16).map(|f| s.flipped(f)).min().expect("nonempty group")).collect();

    let joints: Vec<ExactDistribution> = codes.iter().map(observable_joint).collect::<Result<_, _>>()?;
    let classes = |with_message: bool| {
        let mut reps: Vec<&ExactDistribution> = Vec::new();
        for j in &joints {
            if !reps.iter().any(|r| joints_equivalent(r, j, 2, with_message)) {
                reps.push(j);
            }
        }
        reps.len()
    };

    Ok(UniquenessReport {
        candidates: 256 * 256 * 16,
        survivors: survivors.len(),
        survivors_with_bijective_encoder: survivors.iter().filter(|s| s.encoder_is_bijective()).count(),
        contains_canonical: survivors.binary_search(&canonical_candidate()).is_ok(),
        relay_matches_reference,
        edge_flip_orbits: orbit_reps.len(),
        joint_classes: classes(false),
        joint_classes_with_message: classes(true),
        active_secure,
        survivor_list: survivors,
    })
}

fn permutations(d: usize) -> Vec<Vec<Symbol>> {
    fn go(prefix: &mut Vec<Symbol>, used: &mut [bool], out: &mut Vec<Vec<Symbol>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                go(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; d], &mut out);
    out
}

/// No-attack joint of `(M, Y1, Y2, Y3, Y4)`.
fn observable_joint(code: &Code) -> Result<ExactDistribution, SecurityError> {
    let v = [Var::M, Var::Y1, Var::Y2, Var::Y3, Var::Y4].map(Var::index);
    Ok(evaluate(code, None)?.marginal(&v)?)
}

fn relabel(dist: &ExactDistribution, maps: &[&[Symbol]]) -> ExactDistribution {
    dist.map_outcomes(dist.arity(), |o| o.iter().zip(maps).map(|(&s, f)| f[s]).collect())
        .expect("bijective relabeling keeps a valid distribution")
}

fn joints_equivalent(a: &ExactDistribution, b: &ExactDistribution, d: usize, with_message: bool) -> bool {
    let perms = permutations(d);
    let identity: Vec<Symbol> = (0..d).collect();
    let message_maps: Vec<&[Symbol]> =
        if with_message { perms.iter().map(Vec::as_slice).collect() } else { vec![identity.as_slice()] };
    for f0 in message_maps {
        // per-edge candidates from the (M, Yk) marginals
        let mut candidates: Vec<Vec<&[Symbol]>> = Vec::new();
        for k in 1..=4 {
            let (ma, mb) = (a.marginal(&[0, k]).expect("arity 5"), b.marginal(&[0, k]).expect("arity 5"));
            candidates.push(perms.iter().map(Vec::as_slice).filter(|fk| relabel(&ma, &[f0, fk]) == mb).collect());
        }
        if candidates.iter().any(Vec::is_empty) {
            continue;
        }
        for f1 in &candidates[0] {
            for f2 in &candidates[1] {
                for f3 in &candidates[2] {
                    for f4 in &candidates[3] {
                        if relabel(a, &[f0, f1, f2, f3, f4]) == *b {
                            return true;
                        }
                    }
                }
            }
        }
    }
    false
}

const EQUIVALENCE_MAX_D: usize = 4;

fn equivalence(a: &Code, b: &Code, with_message: bool) -> Result<bool, SecurityError> {
    let d = a.alphabet().size();
    if b.alphabet().size() != d {
        return Ok(false);
    }
    if d > EQUIVALENCE_MAX_D {
        return Err(SecurityError::SizeLimit(format!(
            "relabeling search enumerates (d!)^4 maps and is limited to d <= {EQUIVALENCE_MAX_D}"
        )));
    }
    Ok(joints_equivalent(&observable_joint(a)?, &observable_joint(b)?, d, with_message))
}

/// True iff bijections `f1..f4` of the edge alphabets make the no-attack
/// joints of `(M, f1(Y1), f2(Y2), f3(Y3), f4(Y4))` identical.
pub fn equivalent_up_to_relabeling(a: &Code, b: &Code) -> Result<bool, SecurityError> {
    equivalence(a, b, false)
}

/// [`equivalent_up_to_relabeling`], also allowing a bijection of `M`.
pub fn equivalent_up_to_relabeling_with_message(a: &Code, b: &Code) -> Result<bool, SecurityError> {
    equivalence(a, b, true)
}

/// True iff bijections `f1..f4` turn the relay of `code`, on the inputs it
/// actually receives, into the relay of `reference`:
/// `f3(phi3(y1, y2)) = ref3(f1(y1), f2(y2))` and likewise for `phi4`.
pub fn matches_reference_relay(code: &Code, reference: &Code) -> bool {
    let d = code.alphabet().size();
    if reference.alphabet().size() != d
        || !code.intermediate().is_deterministic()
        || !reference.intermediate().is_deterministic()
        || d > 6
    {
        return false;
    }
    let inputs: BTreeSet<(Symbol, Symbol)> = match evaluate(code, None) {
        Ok(j) => j.support().map(|o| (o[Var::Y1.index()], o[Var::Y2.index()])).collect(),
        Err(_) => return false,
    };
    let perms = permutations(d);
    let (relay, target) = (code.intermediate(), reference.intermediate());
    perms.iter().any(|f1| {
        perms.iter().any(|f2| {
            // f3 and f4 are forced pointwise; they must be consistent and injective
            let mut f3 = vec![None; d];
            let mut f4 = vec![None; d];
            let ok = inputs.iter().all(|&(y1, y2)| {
                let (a, b) = relay.apply(y1, y2);
                let (ta, tb) = target.apply(f1[y1], f2[y2]);
                *f3[a].get_or_insert(ta) == ta && *f4[b].get_or_insert(tb) == tb
            });
            let injective = |f: &[Option<Symbol>]| {
                let vals: Vec<Symbol> = f.iter().flatten().copied().collect();
                vals.iter().collect::<BTreeSet<_>>().len() == vals.len()
            };
            ok && injective(&f3) && injective(&f4)
        })
    })
}
