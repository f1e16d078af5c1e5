use std::collections::BTreeMap;

use super::{Code, Decoder, Encoder, IntermediateMap, NetError};
use crate::algebra::{Alphabet, ExactDistribution, Rational, Symbol, SymbolMatrix, MAX_ALPHABET};

/// Packs and unpacks `l`-tuples over `Z_d` as base-`d` digits of a symbol
/// in `Z_{d^l}` (component 0 is the least significant digit).
#[derive(Debug, Clone, Copy)]
struct Packing {
    d: usize,
    l: usize,
}

impl Packing {
    fn digit(&self, x: Symbol, k: usize) -> Symbol {
        (x / self.d.pow(k as u32)) % self.d
    }

    fn pack(&self, digits: impl Iterator<Item = Symbol>) -> Symbol {
        digits.enumerate().map(|(k, s)| s * self.d.pow(k as u32)).sum()
    }

    fn size(&self) -> usize {
        self.d.pow(self.l as u32)
    }
}

/// Runs `l` independent copies of `code` side by side, each with its own
/// scramble, on the alphabet `Z_{d^l}`.
pub fn product_code(code: &Code, l: usize) -> Result<Code, NetError> {
    if l == 0 {
        return Err(NetError::InvalidParameter("repetition count must be at least 1".into()));
    }
    let d = code.alphabet().size();
    let size = (0..l).try_fold(1usize, |acc, _| acc.checked_mul(d));
    let size = match size {
        Some(s) if s <= MAX_ALPHABET => s,
        _ => {
            return Err(NetError::SizeLimit(format!(
                "{d}^{l} exceeds the maximum alphabet size {MAX_ALPHABET}"
            )))
        }
    };
    let pk = Packing { d, l };
    let alphabet = Alphabet::new(size)?;

    let rows = alphabet
        .symbols()
        .map(|m| {
            let mut acc: Vec<((Symbol, Symbol), Rational)> = vec![((0, 0), Rational::one())];
            for k in 0..l {
                let base = code.encoder().row(pk.digit(m, k));
                let scale = d.pow(k as u32);
                let mut next = BTreeMap::new();
                for ((y1, y2), p) in &acc {
                    for (o, q) in base.iter() {
                        let key = (y1 + o[0] * scale, y2 + o[1] * scale);
                        *next.entry(key).or_insert_with(Rational::zero) += *p * *q;
                    }
                }
                acc = next.into_iter().collect();
            }
            ExactDistribution::new(2, acc.into_iter().map(|((a, b), p)| (vec![a, b], p)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let scramble_size = code.encoder().scramble_size().saturating_pow(l as u32);
    let encoder = Encoder::from_rows(alphabet, rows, scramble_size)?;

    let base_relay = code.intermediate();
    let intermediate = match base_relay.scramble() {
        None => {
            let phi3 = SymbolMatrix::from_fn(size, |a, b| {
                pk.pack((0..l).map(|k| base_relay.phi3().get(pk.digit(a, k), pk.digit(b, k))))
            });
            let phi4 = SymbolMatrix::from_fn(size, |a, b| {
                pk.pack((0..l).map(|k| base_relay.phi4().get(pk.digit(a, k), pk.digit(b, k))))
            });
            IntermediateMap::deterministic(alphabet, phi3, phi4)?
        }
        Some(s) => {
            let r = s.size();
            let rl = r.checked_pow(l as u32).filter(|&x| x * size * size <= 1 << 24).ok_or_else(|| {
                NetError::SizeLimit(format!("relay scramble table {r}^{l} over {size}^2 inputs is too large"))
            })?;
            let scr = Packing { d: r, l };
            IntermediateMap::stochastic(alphabet, rl, |a, b, lp| {
                let outs: Vec<(Symbol, Symbol)> = (0..l)
                    .map(|k| s.outputs(d, pk.digit(a, k), pk.digit(b, k))[scr.digit(lp, k)])
                    .collect();
                (pk.pack(outs.iter().map(|o| o.0)), pk.pack(outs.iter().map(|o| o.1)))
            })?
        }
    };

    let psi = code.decoder().psi();
    let decoder = Decoder::new(
        alphabet,
        SymbolMatrix::from_fn(size, |a, b| pk.pack((0..l).map(|k| psi.get(pk.digit(a, k), pk.digit(b, k))))),
    )?;

    let mut prior_masses: Vec<(Symbol, Rational)> = vec![(0, Rational::one())];
    for k in 0..l {
        let scale = d.pow(k as u32);
        prior_masses = prior_masses
            .into_iter()
            .flat_map(|(m, p)| code.prior().iter().map(move |(mk, q)| (m + mk[0] * scale, p * *q)))
            .collect();
    }
    debug_assert_eq!(pk.size(), size);
    let prior = ExactDistribution::new(1, prior_masses.into_iter().map(|(m, p)| (vec![m], p)))?;
    Code::new(encoder, intermediate, decoder)?.with_prior(prior)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{builtin_code, decode_correctly, evaluate};

    #[test]
    fn single_copy_is_isomorphic() {
        for name in ["Eq1Eq2-binary", "randomized-relay-binary", "ex1"] {
            let code = builtin_code(name, None).unwrap();
            let p = product_code(&code, 1).unwrap();
            assert_eq!(evaluate(&p, None).unwrap(), evaluate(&code, None).unwrap(), "{name}");
            assert_eq!(p.decoder().psi(), code.decoder().psi());
        }
    }

    #[test]
    fn binary_square_decodes_on_four_symbols() {
        let code = builtin_code("Eq1Eq2-binary", None).unwrap();
        let p = product_code(&code, 2).unwrap();
        assert_eq!(p.alphabet().size(), 4);
        assert_eq!(p.encoder().scramble_size(), 4);
        assert!(decode_correctly(&p));
        assert_eq!(p.prior(), &ExactDistribution::uniform_symbols(4).unwrap());
    }

    #[test]
    fn product_preserves_decodability_both_ways() {
        let a3 = Alphabet::new(3).unwrap();
        let a2 = Alphabet::binary();
        let bad3 = Code::new(
            Encoder::canonical_additive(a3),
            IntermediateMap::from_fn(a3, |i, j| (i, j)).unwrap(),
            Decoder::from_fn(a3, |_, _| 0),
        )
        .unwrap();
        let bad2 = Code::new(
            Encoder::binary_eq3(a2).unwrap(),
            IntermediateMap::from_fn(a2, |i, j| (i, j)).unwrap(),
            Decoder::from_fn(a2, |i, j| i * j),
        )
        .unwrap();
        let codes = [
            builtin_code("Eq1Eq2-binary", None).unwrap(),
            builtin_code("randomized-relay-binary", None).unwrap(),
            builtin_code("con1-odd-d", Some(3)).unwrap(),
            builtin_code("ex1", None).unwrap(),
            bad2,
            bad3,
        ];
        for code in &codes {
            for l in [1, 2] {
                assert_eq!(decode_correctly(&product_code(code, l).unwrap()), decode_correctly(code));
            }
        }
    }

    #[test]
    fn size_guard() {
        let code = builtin_code("Eq1Eq2-binary", None).unwrap();
        assert!(matches!(product_code(&code, 11), Err(NetError::SizeLimit(_))));
        assert!(matches!(product_code(&code, 0), Err(NetError::InvalidParameter(_))));
        assert!(product_code(&code, 10).is_ok());
    }
}
