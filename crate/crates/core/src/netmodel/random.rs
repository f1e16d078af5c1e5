//! Seeded generator of small decodable codes, used to exercise the checkers
//! beyond the hand-written catalog.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Code, Encoder, IntermediateMap, NetError};
use crate::algebra::{Alphabet, Symbol};

/// A random code on `Z_d` with a deterministic relay that the sink can
/// decode. The encoder is either the additive one or an injective map from
/// `(m, l)` to input cells with a random scramble size; each relay output
/// label is only ever used by one message.
pub fn random_decodable_code<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Code, NetError> {
    let alphabet = Alphabet::new(d)?;
    let cells: Vec<(Symbol, Symbol)> = (0..d).flat_map(|a| (0..d).map(move |b| (a, b))).collect();

    let encoder = if rng.gen_bool(0.5) {
        Encoder::canonical_additive(alphabet)
    } else {
        let s = rng.gen_range(1..=d);
        let mut shuffled = cells.clone();
        shuffled.shuffle(rng);
        Encoder::deterministic(alphabet, s, |m, l| shuffled[m * s + l])?
    };

    // message (if any) reaching each input cell
    let mut cell_owner: Vec<Option<Symbol>> = vec![None; d * d];
    for m in 0..d {
        for o in encoder.row(m).support() {
            cell_owner[o[0] * d + o[1]] = Some(m);
        }
    }
    let mut label_owner: Vec<Option<Symbol>> = vec![None; d * d];
    let mut order: Vec<usize> = (0..d * d).collect();
    order.shuffle(rng);
    let mut labels = vec![0usize; d * d];
    for cell in order {
        let allowed: Vec<usize> = (0..d * d)
            .filter(|&k| match (label_owner[k], cell_owner[cell]) {
                (Some(owner), Some(m)) => owner == m,
                _ => true,
            })
            .collect();
        let k = *allowed.choose(rng).expect("each message owns at most d labels");
        if let Some(m) = cell_owner[cell] {
            label_owner[k] = Some(m);
        }
        labels[cell] = k;
    }
    let relay = IntermediateMap::from_fn(alphabet, |a, b| {
        let k = labels[a * d + b];
        (k / d, k % d)
    })?;
    Code::with_synthesized_decoder(encoder, relay)
}

/// `count` codes from a ChaCha stream seeded with `seed`.
pub fn random_decodable_codes(d: usize, count: usize, seed: u64) -> Result<Vec<Code>, NetError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_decodable_code(d, &mut rng)).collect()
}
