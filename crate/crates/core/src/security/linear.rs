use rayon::prelude::*;
use serde::Serialize;

use super::SecurityError;
use crate::algebra::{Alphabet, Symbol};
use crate::netmodel::{Code, Encoder, IntermediateMap, NetError};

/// Scalar linear code over `F_p`: `(Y1, Y2) = E (M, L)` and
/// `(Y3, Y4) = A (Y1, Y2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LinearCode {
    pub p: usize,
    pub encoder: [[Symbol; 2]; 2],
    pub relay: [[Symbol; 2]; 2],
}

impl LinearCode {
    pub fn encode(&self, m: Symbol, l: Symbol) -> (Symbol, Symbol) {
        let e = &self.encoder;
        ((e[0][0] * m + e[0][1] * l) % self.p, (e[1][0] * m + e[1][1] * l) % self.p)
    }

    pub fn relay(&self, y1: Symbol, y2: Symbol) -> (Symbol, Symbol) {
        let a = &self.relay;
        ((a[0][0] * y1 + a[0][1] * y2) % self.p, (a[1][0] * y1 + a[1][1] * y2) % self.p)
    }

    pub fn encoder_invertible(&self) -> bool {
        let e = &self.encoder;
        !(e[0][0] * e[1][1] + self.p * self.p - e[0][1] * e[1][0] % self.p).is_multiple_of(self.p)
    }

    /// The code with a uniform scramble and a synthesized decoder; fails
    /// when no decoder exists.
    pub fn to_code(&self) -> Result<Code, NetError> {
        let a = Alphabet::new(self.p)?;
        let encoder = Encoder::deterministic(a, self.p, |m, l| self.encode(m, l))?;
        let relay = IntermediateMap::from_fn(a, |y1, y2| self.relay(y1, y2))?;
        Code::with_synthesized_decoder(encoder, relay)
    }

    fn from_index(p: usize, enc: usize, rel: usize) -> Self {
        let digits = |k: usize| [[k % p, (k / p) % p], [(k / (p * p)) % p, (k / (p * p * p)) % p]];
        LinearCode { p, encoder: digits(enc), relay: digits(rel) }
    }

    /// Every `(m, l)` is equally likely, so the support is all of `F_p^2`.
    /// Returns `(decodable, passive_secure)`.
    fn classify(&self, scratch: &mut Vec<usize>) -> (bool, bool) {
        let p = self.p;
        let mut rows = Vec::with_capacity(p * p);
        for m in 0..p {
            for l in 0..p {
                let (y1, y2) = self.encode(m, l);
                let (y3, y4) = self.relay(y1, y2);
                rows.push([m, y1, y2, y3, y4]);
            }
        }
        let mut determined = |a: usize, b: usize| {
            scratch.clear();
            scratch.resize(p * p, usize::MAX);
            rows.iter().all(|r| {
                let slot = &mut scratch[r[a] * p + r[b]];
                if *slot == usize::MAX {
                    *slot = r[0];
                }
                *slot == r[0]
            })
        };
        let decodable = determined(3, 4);
        let leaks = [(1, 3), (1, 4), (2, 3), (2, 4)].iter().any(|&(a, b)| determined(a, b));
        (decodable, decodable && !leaks)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearScanReport {
    pub p: usize,
    pub encoders: usize,
    pub invertible_encoders: usize,
    /// Singular encoders that put `M` in the clear on `e1` or `e2`.
    pub singular_leaking: usize,
    /// Singular encoders from whose outputs `M` cannot be recovered at all.
    pub singular_undecodable: usize,
    pub relays: usize,
    /// Invertible encoder x relay combinations examined.
    pub total: usize,
    pub decodable: usize,
    pub secure: usize,
    pub secure_codes: Vec<LinearCode>,
}

#[derive(Default)]
struct Tally {
    invertible: usize,
    leaking: usize,
    undecodable: usize,
    total: usize,
    decodable: usize,
    secure: Vec<(usize, LinearCode)>,
}

/// Exhaustive scan of scalar linear codes over a prime field `F_p`, `p <= 7`.
pub fn scan_linear_codes(p: usize) -> Result<LinearScanReport, SecurityError> {
    let alphabet = Alphabet::new(p).map_err(|e| SecurityError::InvalidParameter(e.to_string()))?;
    if !alphabet.is_prime() {
        return Err(SecurityError::InvalidParameter(format!("{p} is not prime")));
    }
    if p > 7 {
        return Err(SecurityError::SizeLimit(format!("linear scan is limited to p <= 7 (got {p})")));
    }
    let n = p.pow(4);
    let tally = (0..n)
        .into_par_iter()
        .map(|enc| {
            let mut t = Tally::default();
            let mut scratch = Vec::new();
            let probe = LinearCode::from_index(p, enc, 0);
            if !probe.encoder_invertible() {
                // Y1 alone leaks, or the pair (Y1, Y2) already hides M
                let leak = [(1, 0), (0, 1)].iter().any(|&(a, b)| {
                    LinearCode { relay: [[a, b], [a, b]], ..probe }.classify(&mut scratch).0
                });
                if leak {
                    t.leaking += 1;
                } else {
                    t.undecodable += 1;
                }
                return t;
            }
            t.invertible += 1;
            for rel in 0..n {
                let code = LinearCode::from_index(p, enc, rel);
                let (decodable, secure) = code.classify(&mut scratch);
                t.total += 1;
                t.decodable += decodable as usize;
                if secure {
                    t.secure.push((enc * n + rel, code));
                }
            }
            t
        })
        .reduce(Tally::default, |mut a, b| {
            a.invertible += b.invertible;
            a.leaking += b.leaking;
            a.undecodable += b.undecodable;
            a.total += b.total;
            a.decodable += b.decodable;
            a.secure.extend(b.secure);
            a
        });
    let mut secure = tally.secure;
    secure.sort_by_key(|s| s.0);
    Ok(LinearScanReport {
        p,
        encoders: n,
        invertible_encoders: tally.invertible,
        singular_leaking: tally.leaking,
        singular_undecodable: tally.undecodable,
        relays: n,
        total: tally.total,
        decodable: tally.decodable,
        secure: secure.len(),
        secure_codes: secure.into_iter().map(|s| s.1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::decode_correctly;
    use crate::security::is_passive_secure;

    #[test]
    fn no_secure_linear_code_for_small_primes() {
        for p in [2usize, 3] {
            let r = scan_linear_codes(p).unwrap();
            assert_eq!(r.secure, 0);
            assert!(r.decodable > 0);
            // |GL(2, p)| = (p^2 - 1)(p^2 - p)
            assert_eq!(r.invertible_encoders, (p * p - 1) * (p * p - p));
            assert_eq!(r.invertible_encoders + r.singular_leaking + r.singular_undecodable, p.pow(4));
            assert_eq!(r.total, r.invertible_encoders * p.pow(4));
        }
    }

    #[test]
    fn fast_classifier_matches_exact_checker() {
        for p in [2usize, 3] {
            let n = p.pow(4);
            let mut scratch = Vec::new();
            for enc in 0..n {
                for rel in 0..n {
                    let lc = LinearCode::from_index(p, enc, rel);
                    if !lc.encoder_invertible() {
                        continue;
                    }
                    let (decodable, secure) = lc.classify(&mut scratch);
                    match lc.to_code() {
                        Ok(code) => {
                            assert!(decodable && decode_correctly(&code));
                            assert_eq!(is_passive_secure(&code).unwrap().is_secure(), secure);
                        }
                        Err(_) => assert!(!decodable),
                    }
                }
            }
        }
    }

    #[test]
    fn identity_relay_decodes() {
        let lc = LinearCode { p: 2, encoder: [[1, 1], [0, 1]], relay: [[1, 0], [0, 1]] };
        assert!(lc.encoder_invertible());
        assert_eq!(lc.classify(&mut Vec::new()), (true, false));
    }

    #[test]
    fn parameters_are_checked() {
        assert!(matches!(scan_linear_codes(4), Err(SecurityError::InvalidParameter(_))));
        assert!(matches!(scan_linear_codes(11), Err(SecurityError::SizeLimit(_))));
        assert!(scan_linear_codes(1).is_err());
    }
}
