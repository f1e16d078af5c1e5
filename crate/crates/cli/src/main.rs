//! `relaynet`: certify, construct, search and measure codes on the one-hop
//! relay network.
//!
//! Exit status: 0 = success / secure, 1 = insecure or a failed check,
//! 2 = invalid input.

mod reproduce;

use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use relaynet::algebra::SymbolMatrix;
use relaynet::antilatin::{construct, search_2x2_decodable_anti_latin, search_decodable_pairs, MatrixPair};
use relaynet::metrics::leakage_profile;
use relaynet::netmodel::{
    builtin_code, Code, DecoderDescriptor, EdgePair, Encoder, IntermediateMap, SynthesizedKind, BUILTIN_NAMES,
};
use relaynet::security::{
    binary_uniqueness_search, is_active_secure, is_passive_secure, scan_linear_codes, SecurityError, SecurityReport,
};

/// Environment variable fixing the worker count of parallel searches.
const WORKERS_VAR: &str = "RELAYNET_WORKERS";

#[derive(Parser)]
#[command(name = "relaynet", version, about = "Exact security certification for codes on the one-hop relay network")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide passive and/or active security of a code.
    Verify {
        #[command(flatten)]
        source: CodeSource,
        #[arg(long, value_enum, default_value_t = Mode::Both)]
        mode: Mode,
    },
    /// Emit the systematic secure code of order d as a JSON descriptor.
    Construct {
        #[arg(long)]
        d: usize,
    },
    /// Run an exhaustive search.
    Search {
        #[arg(long, value_enum)]
        space: Space,
        /// Field size for the linear scan.
        #[arg(long)]
        p: Option<usize>,
        /// Order for the anti-Latin pair search.
        #[arg(long)]
        d: Option<usize>,
        /// Node budget for the anti-Latin pair search.
        #[arg(long, default_value_t = 200_000_000)]
        budget: u64,
    },
    /// Mutual information and l1 leakage of a code to a passive eavesdropper.
    Leakage {
        #[command(flatten)]
        source: CodeSource,
        /// Observed pair "i,j" (repeatable); all four allowed pairs by default.
        #[arg(long = "pair")]
        pairs: Vec<String>,
        #[arg(long, default_value_t = 2.0)]
        base: f64,
    },
    /// Recompute the published results and compare.
    Reproduce {
        #[arg(long, conflicts_with = "check")]
        all: bool,
        /// Check id (repeatable).
        #[arg(long)]
        check: Vec<String>,
        /// List the check ids and exit.
        #[arg(long, conflicts_with_all = ["all", "check"])]
        list: bool,
    },
}

#[derive(Args)]
struct CodeSource {
    /// Code descriptor file ("-" reads standard input).
    #[arg(conflicts_with = "builtin")]
    file: Option<PathBuf>,
    /// Built-in code name.
    #[arg(long)]
    builtin: Option<String>,
    /// Alphabet size for the parameterized built-in codes.
    #[arg(long, requires = "builtin")]
    d: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Passive,
    Active,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Space {
    BinaryUniqueness,
    Linear,
    AntiLatin,
}

enum Failure {
    /// Bad input; exit 2.
    Invalid(String),
    /// A negative answer; exit 1.
    Negative,
}

type CliResult = Result<(), Failure>;

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Invalid(e.to_string())
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
}

impl CodeSource {
    fn load(&self) -> Result<Code, Failure> {
        match (&self.file, &self.builtin) {
            (Some(path), None) => {
                let text = if path.as_os_str() == "-" {
                    let mut s = String::new();
                    io::stdin().read_to_string(&mut s).map_err(invalid)?;
                    s
                } else {
                    fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?
                };
                Code::from_json(&text).map_err(invalid)
            }
            (None, Some(name)) => builtin_code(name, self.d).map_err(invalid),
            _ => Err(invalid(format!(
                "give a descriptor file or --builtin NAME (one of {})",
                BUILTIN_NAMES.join(", ")
            ))),
        }
    }
}

fn security_failure(e: SecurityError) -> Failure {
    invalid(e)
}

#[derive(Serialize)]
struct VerifyReport {
    d: usize,
    secure: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    passive: Option<SecurityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    active: Option<SecurityReport>,
}

fn cmd_verify(source: &CodeSource, mode: Mode) -> CliResult {
    let code = source.load()?;
    let passive = match mode {
        Mode::Passive | Mode::Both => Some(is_passive_secure(&code).map_err(security_failure)?),
        Mode::Active => None,
    };
    let active = match mode {
        Mode::Active | Mode::Both => Some(is_active_secure(&code).map_err(security_failure)?),
        Mode::Passive => None,
    };
    let reports: Vec<&SecurityReport> = passive.iter().chain(active.iter()).collect();
    let secure = reports.iter().all(|r| r.is_secure());
    for r in &reports {
        let mode = serde_json::to_value(r.mode).expect("mode serializes");
        match &r.witness {
            None => eprintln!("{}: secure", mode.as_str().unwrap_or("")),
            Some(w) => eprintln!("{}: insecure; witness: {w}", mode.as_str().unwrap_or("")),
        }
    }
    print_json(&VerifyReport { d: code.alphabet().size(), secure, passive, active });
    if secure {
        Ok(())
    } else {
        Err(Failure::Negative)
    }
}

fn render_matrix(m: &SymbolMatrix) -> String {
    let width = m.size().saturating_sub(1).to_string().len();
    m.to_rows()
        .iter()
        .map(|row| row.iter().map(|v| format!("{v:>width$}")).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n")
}

fn render_pair(pair: &MatrixPair) -> String {
    format!("phi3 (rows Y1, columns Y2):\n{}\nphi4:\n{}", render_matrix(&pair.phi3), render_matrix(&pair.phi4))
}

fn cmd_construct(d: usize) -> CliResult {
    if d == 2 {
        return Err(invalid(
            "no decodable pair of 2x2 anti-Latin squares exists (exhaustive search over all 256 pairs); \
             the construction needs d >= 3",
        ));
    }
    let pair = construct(d).map_err(invalid)?;
    let alphabet = pair.alphabet();
    let relay = IntermediateMap::deterministic(alphabet, pair.phi3.clone(), pair.phi4.clone()).map_err(invalid)?;
    let code = Code::with_synthesized_decoder(Encoder::canonical_additive(alphabet), relay).map_err(invalid)?;
    let mut descriptor = code.to_descriptor();
    descriptor.decoder = DecoderDescriptor::Synthesized { kind: SynthesizedKind::Synthesized };
    eprintln!("{}", render_pair(&pair));
    println!("{}", descriptor.to_json());
    Ok(())
}

fn cmd_search(space: Space, p: Option<usize>, d: Option<usize>, budget: u64) -> CliResult {
    match space {
        Space::BinaryUniqueness => {
            let report = binary_uniqueness_search().map_err(invalid)?;
            print_json(&report);
            eprintln!("candidates: {}", report.candidates);
            eprintln!("survivors: {}", report.survivors);
            eprintln!("survivors matching the canonical relay: {}", report.relay_matches_reference);
            eprintln!("active-secure survivors: {}", report.active_secure);
        }
        Space::Linear => {
            let p = p.ok_or_else(|| invalid("--space linear needs --p"))?;
            let report = scan_linear_codes(p).map_err(invalid)?;
            print_json(&report);
            eprintln!("examined: {}", report.total);
            eprintln!("decodable: {}", report.decodable);
            eprintln!("secure: {}", report.secure);
        }
        Space::AntiLatin => {
            let d = d.ok_or_else(|| invalid("--space anti-latin needs --d"))?;
            let (pairs, nodes, complete) = if d == 2 {
                let report = search_2x2_decodable_anti_latin();
                (report.found, report.pairs_enumerated as u64, true)
            } else {
                let outcome = search_decodable_pairs(d, budget).map_err(invalid)?;
                (outcome.pairs, outcome.nodes, outcome.complete)
            };
            #[derive(Serialize)]
            struct Found<'a> {
                d: usize,
                found: usize,
                nodes: u64,
                complete: bool,
                pairs: &'a [MatrixPair],
            }
            print_json(&Found { d, found: pairs.len(), nodes, complete, pairs: &pairs });
            for (k, pair) in pairs.iter().enumerate() {
                eprintln!("pair {k}:\n{}", render_pair(pair));
            }
            eprintln!("found: {}{}", pairs.len(), if complete { "" } else { " (budget exhausted; incomplete)" });
        }
    }
    Ok(())
}

fn cmd_leakage(source: &CodeSource, pairs: &[String], base: f64) -> CliResult {
    let pairs = pairs.iter().map(|s| s.parse::<EdgePair>().map_err(invalid)).collect::<Result<Vec<_>, _>>()?;
    let code = source.load()?;
    let profile = leakage_profile(&code, &pairs, base).map_err(invalid)?;
    eprint!("{}", profile.to_text_table());
    println!("{}", profile.to_json());
    Ok(())
}

fn cmd_reproduce(all: bool, ids: &[String], list: bool) -> CliResult {
    if list {
        for c in reproduce::checks() {
            println!("{:<14} criterion {:>2}  {}", c.id, c.criterion, c.claim);
        }
        return Ok(());
    }
    if !all && ids.is_empty() {
        return Err(invalid("give --all or --check ID"));
    }
    let report = reproduce::run(ids).map_err(Failure::Invalid)?;
    eprint!("{}", report.to_text_table());
    print_json(&report);
    if report.all_pass() {
        Ok(())
    } else {
        Err(Failure::Negative)
    }
}

fn configure_workers() -> CliResult {
    let Ok(value) = std::env::var(WORKERS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| invalid(format!("{WORKERS_VAR} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(invalid)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    let result = configure_workers().and_then(|_| match &cli.command {
        Command::Verify { source, mode } => cmd_verify(source, *mode),
        Command::Construct { d } => cmd_construct(*d),
        Command::Search { space, p, d, budget } => cmd_search(*space, *p, *d, *budget),
        Command::Leakage { source, pairs, base } => cmd_leakage(source, pairs, *base),
        Command::Reproduce { all, check, list } => cmd_reproduce(*all, check, *list),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative) => ExitCode::from(1),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
