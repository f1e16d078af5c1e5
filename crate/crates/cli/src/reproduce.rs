//! The reproduction suite: each check recomputes one published fact about
//! the network from scratch and compares it with the expected value.

use std::sync::OnceLock;
use std::time::Instant;

use serde::Serialize;

use relaynet::algebra::{Rational, Symbol};
use relaynet::antilatin::{
    construct, is_anti_latin, is_decodable_pair, reference_pair, search_2x2_decodable_anti_latin,
};
use relaynet::metrics::{appendix_tables, check_lower_bound, closed_form_leakage, d1_measure, mutual_information};
use relaynet::netmodel::{
    builtin_code, evaluate, random::random_decodable_codes, AttackSpec, BuiltinCode, Code, EdgePair, FirstEdge,
    Replacement, SecondEdge, Var,
};
use relaynet::security::{
    active_check_bruteforce_oracle, binary_uniqueness_search, is_active_secure, is_passive_secure, replay_witness,
    scan_linear_codes, SecurityReport, UniquenessReport,
};

type CheckFn = fn() -> Result<Outcome, String>;

pub struct Check {
    pub id: &'static str,
    pub criterion: u8,
    pub claim: &'static str,
    run: CheckFn,
}

pub struct Outcome {
    expected: String,
    computed: String,
    pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: &'static str,
    pub criterion: u8,
    pub claim: &'static str,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
    /// Wall time; kept out of the JSON so reports stay byte-identical.
    #[serde(skip)]
    pub runtime_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproductionReport {
    pub checks: Vec<CheckResult>,
    pub passed: usize,
    pub total: usize,
}

impl ReproductionReport {
    pub fn all_pass(&self) -> bool {
        self.passed == self.total
    }

    pub fn to_text_table(&self) -> String {
        let id_w = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(2).max(2);
        let mut out = format!("{:<id_w$}  {:>4}  {:<4}  {:>10}  {}\n", "id", "crit", "", "ms", "computed");
        for c in &self.checks {
            out.push_str(&format!(
                "{:<id_w$}  {:>4}  {:<4}  {:>10}  {}\n",
                c.id,
                c.criterion,
                if c.pass { "PASS" } else { "FAIL" },
                c.runtime_ms,
                c.computed
            ));
        }
        out.push_str(&format!("{}/{} checks passed\n", self.passed, self.total));
        out
    }
}

macro_rules! check {
    ($id:expr, $crit:expr, $claim:expr, $f:expr) => {
        Check { id: $id, criterion: $crit, claim: $claim, run: $f }
    };
}

/// Every check, in report order.
pub fn checks() -> Vec<Check> {
    vec![
        check!("E9", 1, "binary code leaks exactly half a bit on each allowed pair", check_e9),
        check!("F10", 1, "binary code has l1 distance 1/2 on each allowed pair", check_f10),
        check!("ACTIVE-BREAK", 2, "binary code falls to tampering e1 and reading e3 or e4", check_active_break),
        check!("TT5-p2", 3, "no decodable linear code over F_2 is passive-secure", || check_linear(2)),
        check!("TT5-p3", 3, "no decodable linear code over F_3 is passive-secure", || check_linear(3)),
        check!("TT5-p5", 3, "no decodable linear code over F_5 is passive-secure", || check_linear(5)),
        check!("T6", 4, "every passive-secure binary code is the canonical one up to relabeling", check_t6),
        check!("TT6-active", 4, "no passive-secure binary code survives active attacks", check_tt6_active),
        check!("TT7-d3", 5, "order-3 construction matches the table and is active-secure", || check_tt7(3)),
        check!("TT7-d4", 5, "order-4 construction matches the table and is active-secure", || check_tt7(4)),
        check!("TT7-d5", 5, "order-5 construction matches the table and is active-secure", || check_tt7(5)),
        check!("TT7-d6", 5, "order-6 construction matches the table and is active-secure", || check_tt7(6)),
        check!("TT7-d7", 5, "order-7 construction matches the table and is active-secure", || check_tt7(7)),
        check!("TT7-d8", 5, "order-8 construction matches the table and is active-secure", || check_tt7(8)),
        check!("NO-2X2", 6, "no decodable pair of 2x2 anti-Latin squares exists", check_no_2x2),
        check!("CLOSED-FORM", 7, "exact leakage of the constructions equals the closed forms", check_closed_form),
        check!("F29-6", 7, "leakage at d = 101 is within 0.05 bits of (log d + 1)/2", check_f29_6),
        check!("TD1", 8, "two-cut leakage bound holds, with equality for the binary code", check_td1),
        check!("NHT", 8, "max leakage is at least H(M) - (1/2) log d", check_nht),
        check!("APPENDIX", 9, "hand-derived tables for the binary code are reproduced", check_appendix),
        check!("PROPERTIES", 10, "checker invariants on 1000 random codes", check_properties),
    ]
}

pub fn check_ids() -> Vec<&'static str> {
    checks().iter().map(|c| c.id).collect()
}

/// Runs the checks whose ids are listed (all when `ids` is empty). Unknown
/// ids are returned as an error.
pub fn run(ids: &[String]) -> Result<ReproductionReport, String> {
    let all = checks();
    for id in ids {
        if !all.iter().any(|c| c.id == id) {
            return Err(format!("unknown check id {id:?}; known ids: {}", check_ids().join(", ")));
        }
    }
    let results: Vec<CheckResult> = all
        .into_iter()
        .filter(|c| ids.is_empty() || ids.iter().any(|id| id == c.id))
        .map(|c| {
            let start = Instant::now();
            let outcome = (c.run)().unwrap_or_else(|e| Outcome {
                expected: "check to run".into(),
                computed: format!("error: {e}"),
                pass: false,
            });
            CheckResult {
                id: c.id,
                criterion: c.criterion,
                claim: c.claim,
                expected: outcome.expected,
                computed: outcome.computed,
                pass: outcome.pass,
                runtime_ms: start.elapsed().as_millis(),
            }
        })
        .collect();
    let passed = results.iter().filter(|r| r.pass).count();
    Ok(ReproductionReport { total: results.len(), passed, checks: results })
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn binary() -> Result<Code, String> {
    builtin_code("Eq1Eq2-binary", None).map_err(err)
}

fn construction(d: usize) -> Result<Code, String> {
    builtin_code(if d % 2 == 1 { "con1-odd-d" } else { "con1-even-d" }, Some(d)).map_err(err)
}

fn r(n: i128, d: i128) -> Rational {
    Rational::new(n, d).expect("nonzero denominator")
}

fn check_e9() -> Result<Outcome, String> {
    let code = binary()?;
    let mut values = Vec::new();
    for pair in EdgePair::ALL {
        values.push(mutual_information(&code, pair, 2.0).map_err(err)?);
    }
    Ok(Outcome {
        expected: "0.5 bits on every pair (tol 1e-12)".into(),
        computed: values.iter().map(|v| format!("{v:.12}")).collect::<Vec<_>>().join(", "),
        pass: values.iter().all(|v| (v - 0.5).abs() < 1e-12),
    })
}

fn check_f10() -> Result<Outcome, String> {
    let code = binary()?;
    let mut values = Vec::new();
    for pair in EdgePair::ALL {
        values.push(d1_measure(&code, pair).map_err(err)?);
    }
    Ok(Outcome {
        expected: "1/2 on every pair (exact)".into(),
        computed: values.iter().map(Rational::to_string).collect::<Vec<_>>().join(", "),
        pass: values.iter().all(|v| *v == r(1, 2)),
    })
}

fn check_active_break() -> Result<Outcome, String> {
    let code = binary()?;
    let report = is_active_secure(&code).map_err(err)?;
    let mut found = Vec::new();
    let mut pass = !report.is_secure();
    for (target, formula) in [(1usize, "M = Y3 + Y1 + 1"), (0usize, "M = Y4 + Y1")] {
        let observe = if target == 1 { SecondEdge::E3 } else { SecondEdge::E4 };
        let witness = report.witnesses().find(|w| {
            matches!(&w.attack, AttackSpec::Active { tamper_edge: FirstEdge::E1, observe_edge, .. } if *observe_edge == observe)
        });
        match witness {
            Some(w) => {
                let replay = replay_witness(&code, w).map_err(err)?;
                let expected_attack =
                    AttackSpec::active(FirstEdge::E1, Replacement::new(vec![target, target]), observe);
                pass &= replay.is_one() && w.attack == expected_attack && w.formula.as_deref() == Some(formula);
                found.push(format!("{w} (replay {replay})"));
            }
            None => {
                pass = false;
                found.push(format!("no witness observing {observe}"));
            }
        }
    }
    Ok(Outcome {
        expected: "tamper e1 ↦ 1, observe e3; tamper e1 ↦ 0, observe e4; both recover M with probability 1".into(),
        computed: found.join("; "),
        pass,
    })
}

fn check_linear(p: usize) -> Result<Outcome, String> {
    let report = scan_linear_codes(p).map_err(err)?;
    Ok(Outcome {
        expected: "secure linear codes: 0".into(),
        computed: format!("secure linear codes: {} ({} decodable of {} examined)", report.secure, report.decodable, report.total),
        pass: report.secure == 0 && report.decodable > 0,
    })
}

fn uniqueness() -> Result<&'static UniquenessReport, String> {
    static REPORT: OnceLock<Result<UniquenessReport, String>> = OnceLock::new();
    REPORT.get_or_init(|| binary_uniqueness_search().map_err(err)).as_ref().map_err(Clone::clone)
}

fn check_t6() -> Result<Outcome, String> {
    let u = uniqueness()?;
    Ok(Outcome {
        expected: "nonempty survivor set, every survivor relabels to the canonical code".into(),
        computed: format!(
            "candidates {}, survivors {}, matching canonical relay {}, canonical present {}",
            u.candidates, u.survivors, u.relay_matches_reference, u.contains_canonical
        ),
        pass: u.survivors > 0 && u.relay_matches_reference == u.survivors && u.contains_canonical,
    })
}

fn check_tt6_active() -> Result<Outcome, String> {
    let u = uniqueness()?;
    Ok(Outcome {
        expected: "active-secure survivors: 0".into(),
        computed: format!("active-secure survivors: {} of {}", u.active_secure, u.survivors),
        pass: u.survivors > 0 && u.active_secure == 0,
    })
}

fn verdicts_agree(a: &SecurityReport, b: &SecurityReport) -> bool {
    a.verdict == b.verdict
        && a.pairs_checked.iter().zip(&b.pairs_checked).all(|(x, y)| x.pair == y.pair && x.recoverable == y.recoverable)
}

fn check_tt7(d: usize) -> Result<Outcome, String> {
    let pair = construct(d).map_err(err)?;
    let table = reference_pair(d).ok_or("no tabulated pair")?;
    let matches = pair == table;
    let b1 = is_decodable_pair(&pair);
    let b2 = is_anti_latin(&pair.phi3) && is_anti_latin(&pair.phi4);
    let code = construction(d)?;
    let passive = is_passive_secure(&code).map_err(err)?.is_secure();
    let active = is_active_secure(&code).map_err(err)?;
    let oracle = if d <= 4 {
        let o = active_check_bruteforce_oracle(&code).map_err(err)?;
        Some(verdicts_agree(&active, &o))
    } else {
        None
    };
    Ok(Outcome {
        expected: "matches table; decodable; anti-Latin; passive and active secure".into(),
        computed: format!(
            "matches table {matches}, decodable {b1}, anti-Latin {b2}, passive {}, active {}{}",
            if passive { "secure" } else { "insecure" },
            if active.is_secure() { "secure" } else { "insecure" },
            oracle.map_or(String::new(), |a| format!(", oracle agrees {a}"))
        ),
        pass: matches && b1 && b2 && passive && active.is_secure() && oracle.unwrap_or(true),
    })
}

fn check_no_2x2() -> Result<Outcome, String> {
    let report = search_2x2_decodable_anti_latin();
    Ok(Outcome {
        expected: "found: 0 of 256".into(),
        computed: format!("found: {} of {}", report.found.len(), report.pairs_enumerated),
        pass: report.found.is_empty() && report.pairs_enumerated == 256,
    })
}

fn check_closed_form() -> Result<Outcome, String> {
    let mut worst = 0.0f64;
    let mut worst_at = (0, EdgePair::ALL[0]);
    for d in 3..=21 {
        let code = construction(d)?;
        let closed = closed_form_leakage(d, 2.0).map_err(err)?;
        let joint = evaluate(&code, None).map_err(err)?;
        for pair in EdgePair::ALL {
            let mi = joint.mutual_information(&[Var::M.index()], &pair.vars(), 2.0).map_err(err)?;
            let gap = (mi - closed.for_pair(pair)).abs();
            if gap > worst {
                worst = gap;
                worst_at = (d, pair);
            }
        }
    }
    Ok(Outcome {
        expected: "|exact - closed form| <= 1e-9 for d = 3..21, all pairs".into(),
        computed: format!("max deviation {worst:.3e} (d = {}, pair {})", worst_at.0, worst_at.1),
        pass: worst <= 1e-9,
    })
}

fn check_f29_6() -> Result<Outcome, String> {
    let d = 101;
    let target = 0.5 * (d as f64).log2() + 0.5;
    let closed = closed_form_leakage(d, 2.0).map_err(err)?;
    let code = construction(d)?;
    let joint = evaluate(&code, None).map_err(err)?;
    let mut worst = 0.0f64;
    for pair in EdgePair::ALL {
        let mi = joint.mutual_information(&[Var::M.index()], &pair.vars(), 2.0).map_err(err)?;
        worst = worst.max((mi - target).abs()).max((closed.for_pair(pair) - target).abs());
    }
    Ok(Outcome {
        expected: format!("within 0.05 of {target:.12}"),
        computed: format!("closed form {:.12}, max deviation {worst:.12}", closed.h31),
        pass: worst < 0.05,
    })
}

/// Catalog codes with a deterministic relay, plus every uniqueness survivor;
/// the stochastic catalog entries are returned separately.
type Named = Vec<(String, Code)>;

fn bound_population() -> Result<(Named, Named), String> {
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    for entry in BuiltinCode::CATALOG {
        let code = entry.build().map_err(err)?;
        if code.intermediate().is_deterministic() {
            inside.push((entry.to_string(), code));
        } else {
            outside.push((entry.to_string(), code));
        }
    }
    for (k, code) in uniqueness()?.survivor_codes().into_iter().enumerate() {
        inside.push((format!("survivor-{k}"), code));
    }
    Ok((inside, outside))
}

fn check_td1() -> Result<Outcome, String> {
    let (inside, outside) = bound_population()?;
    let mut violations = Vec::new();
    for (name, code) in &inside {
        let b = check_lower_bound(code, 2.0).map_err(err)?;
        if b.td1.iter().any(|c| !c.holds) {
            violations.push(name.clone());
        }
    }
    let canon = check_lower_bound(&binary()?, 2.0).map_err(err)?;
    let equality = canon.td1.iter().all(|c| c.tight && (c.lhs - 1.0).abs() < 1e-9);
    let mut notes = Vec::new();
    for (name, code) in &outside {
        let b = check_lower_bound(code, 2.0).map_err(err)?;
        notes.push(format!("{name} (stochastic relay, out of scope): {:.12} vs {:.12}", b.td1[0].lhs, b.td1[0].rhs));
    }
    Ok(Outcome {
        expected: "holds for every deterministic-relay catalog code and survivor; binary code LHS = RHS = 1".into(),
        computed: format!(
            "{} codes, {} violations; binary code LHS {:.12} RHS {:.12}; {}",
            inside.len(),
            violations.len(),
            canon.td1[0].lhs,
            canon.td1[0].rhs,
            notes.join("; ")
        ),
        pass: violations.is_empty() && equality,
    })
}

fn check_nht() -> Result<Outcome, String> {
    let (inside, outside) = bound_population()?;
    let mut violations = 0;
    let mut tightest = f64::INFINITY;
    for (_, code) in &inside {
        let b = check_lower_bound(code, 2.0).map_err(err)?;
        if !b.nht.holds {
            violations += 1;
        }
        tightest = tightest.min(b.nht.lhs - b.nht.rhs);
    }
    let mut notes = Vec::new();
    for (name, code) in &outside {
        let b = check_lower_bound(code, 2.0).map_err(err)?;
        notes.push(format!("{name} (stochastic relay, out of scope): {:.12} vs {:.12}", b.nht.lhs, b.nht.rhs));
    }
    Ok(Outcome {
        expected: "max I(M; Yi Yj) >= H(M) - (1/2) log d on every deterministic-relay code".into(),
        computed: format!("{} codes, {violations} violations, min slack {tightest:.12}; {}", inside.len(), notes.join("; ")),
        pass: violations == 0,
    })
}

fn check_appendix() -> Result<Outcome, String> {
    let t = appendix_tables(&binary()?).map_err(err)?;
    let p13 = t.pair(EdgePair::new(1, 3).map_err(err)?);
    let p23 = t.pair(EdgePair::new(2, 3).map_err(err)?);
    let half = r(1, 2);
    let quarter = r(1, 4);
    let one = r(1, 1);
    let cond13: [(Symbol, Symbol, Symbol); 4] = [(0, 0, 0), (1, 0, 0), (0, 0, 1), (1, 1, 1)];
    let cond23: [(Symbol, Symbol, Symbol); 4] = [(0, 0, 0), (1, 0, 0), (0, 1, 1), (1, 0, 1)];
    let mut failures = Vec::new();
    let mut expect = |ok: bool, what: &str| {
        if !ok {
            failures.push(what.to_string());
        }
    };
    expect(cond13.iter().all(|&(a, b, m)| p13.given_message(a, b, m) == half), "P(Y1,Y3|M)");
    expect(p13.given_message.len() == 4, "P(Y1,Y3|M) support");
    expect(cond23.iter().all(|&(a, b, m)| p23.given_message(a, b, m) == half), "P(Y2,Y3|M)");
    expect(p23.given_message.len() == 4, "P(Y2,Y3|M) support");
    expect((p13.entropy_given_message - 1.0).abs() < 1e-12, "H(Y1,Y3|M)");
    expect((p13.entropy - 1.5).abs() < 1e-12, "H(Y1,Y3)");
    expect((p13.mutual_information - 0.5).abs() < 1e-12, "I(M;Y1,Y3)");
    expect(
        p13.observed(0, 0) == half && p13.observed(1, 0) == quarter && p13.observed(1, 1) == quarter,
        "P(Y1,Y3)",
    );
    expect(
        p13.posterior(0, 0, 0) == half
            && p13.posterior(1, 0, 0) == half
            && p13.posterior(0, 1, 0) == one
            && p13.posterior(1, 1, 1) == one,
        "P(M|Y1,Y3)",
    );
    expect(p13.d1 == half && p23.d1 == half, "d1");
    expect((p23.mutual_information - 0.5).abs() < 1e-12, "I(M;Y2,Y3)");
    Ok(Outcome {
        expected: "H(Y1,Y3) = 3/2, H(Y1,Y3|M) = 1, P(M|Y1,Y3)(0|1,0) = 1, ...".into(),
        computed: if failures.is_empty() {
            format!(
                "H(Y1,Y3) = {:.12}, H(Y1,Y3|M) = {:.12}, P(M|Y1,Y3)(0|1,0) = {}, d1 = {}",
                p13.entropy,
                p13.entropy_given_message,
                p13.posterior(0, 1, 0),
                p13.d1
            )
        } else {
            format!("mismatched: {}", failures.join(", "))
        },
        pass: failures.is_empty(),
    })
}

/// Seed of the random property population.
pub const PROPERTY_SEED: u64 = 0x5eed_2024;

/// The 1000 random codes: 334 over `Z_2` and 333 each over `Z_3`, `Z_4`.
pub fn property_population() -> Result<Vec<Code>, String> {
    let mut codes = Vec::new();
    for (d, count) in [(2usize, 334usize), (3, 333), (4, 333)] {
        codes.extend(random_decodable_codes(d, count, PROPERTY_SEED + d as u64).map_err(err)?);
    }
    Ok(codes)
}

fn check_properties() -> Result<Outcome, String> {
    use rayon::prelude::*;
    let codes = property_population()?;
    let tallies = codes
        .par_iter()
        .map(|code| -> Result<[usize; 4], String> {
            let passive = is_passive_secure(code).map_err(err)?;
            let active = is_active_secure(code).map_err(err)?;
            let oracle = active_check_bruteforce_oracle(code).map_err(err)?;
            let implication = !active.is_secure() || passive.is_secure();
            let agree = verdicts_agree(&active, &oracle);
            let mut normalized = evaluate(code, None).map_err(err)?.total().is_one();
            for w in active.witnesses() {
                normalized &= evaluate(code, Some(&w.attack)).map_err(err)?.total().is_one();
                normalized &= replay_witness(code, w).map_err(err)?.is_one();
            }
            Ok([implication as usize, agree as usize, normalized as usize, active.is_secure() as usize])
        })
        .collect::<Result<Vec<_>, String>>()?;
    let sum = |k: usize| tallies.iter().map(|t| t[k]).sum::<usize>();
    let n = codes.len();
    Ok(Outcome {
        expected: format!("{n}/{n} for each property"),
        computed: format!(
            "active => passive {}/{n}, oracle agreement {}/{n}, distributions sum to 1 {}/{n} ({} active-secure)",
            sum(0),
            sum(1),
            sum(2),
            sum(3)
        ),
        pass: n == 1000 && sum(0) == n && sum(1) == n && sum(2) == n,
    })
}
