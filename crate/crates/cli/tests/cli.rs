use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn relaynet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relaynet")).args(args).output().expect("binary runs")
}

fn relaynet_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_relaynet"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn matrix(v: &Value) -> Vec<Vec<u64>> {
    v.as_array().unwrap().iter().map(|r| r.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect()).collect()
}

#[test]
fn verify_binary_code_passive_is_secure() {
    let out = relaynet(&["verify", "--builtin", "Eq1Eq2-binary", "--mode", "passive"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["secure"], Value::Bool(true));
}

#[test]
fn verify_binary_code_active_prints_witness() {
    let out = relaynet(&["verify", "--builtin", "Eq1Eq2-binary", "--mode", "active"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("tamper e1 ↦ 1, observe e3"), "{}", stderr(&out));
    assert_eq!(json(&out)["active"]["verdict"], "insecure");
}

#[test]
fn verify_rejects_bad_input() {
    let full = stdout(&relaynet(&["construct", "--d", "3"]));
    let truncated = &full[..full.len() / 2];
    assert_eq!(code(&relaynet_stdin(&["verify", "-"], truncated)), 2);
    let undecodable = r#"{"d": 2, "encoder": {"kind": "canonical-additive"},
        "intermediate": {"phi3": [[0,0],[0,0]], "phi4": [[0,0],[0,0]]}, "decoder": {"psi": [[0,0],[0,0]]}}"#;
    assert_eq!(code(&relaynet_stdin(&["verify", "-"], undecodable)), 2);
    assert_eq!(code(&relaynet(&["verify", "/nonexistent/code.json"])), 2);
    assert_eq!(code(&relaynet(&["verify", "--builtin", "no-such-code"])), 2);
    assert_eq!(code(&relaynet(&["verify"])), 2);
    assert_eq!(code(&relaynet(&["verify", "--builtin", "Eq1Eq2-binary", "--mode", "sideways"])), 2);
}

#[test]
fn construct_matches_tabulated_layouts() {
    let d3 = json(&relaynet(&["construct", "--d", "3"]));
    assert_eq!(matrix(&d3["intermediate"]["phi3"]), vec![vec![0, 1, 0], vec![1, 1, 2], vec![0, 2, 2]]);
    assert_eq!(d3["decoder"]["kind"], "synthesized");
    assert_eq!(d3["encoder"]["kind"], "canonical-additive");
    let d8 = json(&relaynet(&["construct", "--d", "8"]));
    assert_eq!(matrix(&d8["intermediate"]["phi3"])[0], vec![0, 1, 2, 3, 7, 7, 7, 7]);
    assert_eq!(matrix(&d8["intermediate"]["phi4"])[7], vec![1, 1, 1, 2, 3, 4, 1, 1]);
}

#[test]
fn construct_rejects_small_orders() {
    let out = relaynet(&["construct", "--d", "2"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("2x2"));
    assert_eq!(code(&relaynet(&["construct", "--d", "1"])), 2);
}

#[test]
fn construct_verify_round_trip() {
    for d in 3..=12 {
        let descriptor = relaynet(&["construct", "--d", &d.to_string()]);
        assert_eq!(code(&descriptor), 0);
        let out = relaynet_stdin(&["verify", "-", "--mode", "both"], &stdout(&descriptor));
        assert_eq!(code(&out), 0, "d = {d}: {}", stderr(&out));
    }
}

#[test]
fn searches_report_empty_sets() {
    let linear = relaynet(&["search", "--space", "linear", "--p", "2"]);
    assert_eq!(code(&linear), 0);
    assert!(stderr(&linear).contains("secure: 0"));
    assert_eq!(json(&linear)["secure"], 0);

    let binary = relaynet(&["search", "--space", "binary-uniqueness"]);
    assert_eq!(code(&binary), 0);
    assert!(stderr(&binary).contains("active-secure survivors: 0"));
    assert_eq!(json(&binary)["survivors"], 256);

    let anti = relaynet(&["search", "--space", "anti-latin", "--d", "2"]);
    assert_eq!(code(&anti), 0);
    assert!(stderr(&anti).contains("found: 0"));
}

#[test]
fn search_finds_order_three_pairs() {
    let out = relaynet(&["search", "--space", "anti-latin", "--d", "3"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert!(report["found"].as_u64().unwrap() > 0);
    assert_eq!(report["complete"], true);
}

#[test]
fn search_rejects_oversized_parameters() {
    assert_eq!(code(&relaynet(&["search", "--space", "linear", "--p", "11"])), 2);
    assert_eq!(code(&relaynet(&["search", "--space", "linear", "--p", "4"])), 2);
    assert_eq!(code(&relaynet(&["search", "--space", "linear"])), 2);
    assert_eq!(code(&relaynet(&["search", "--space", "anti-latin", "--d", "40"])), 2);
}

#[test]
fn leakage_of_binary_code() {
    let out = relaynet(&["leakage", "--builtin", "Eq1Eq2-binary"]);
    assert_eq!(code(&out), 0);
    let profile = json(&out);
    let entries = profile["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 4);
    for e in entries {
        assert_eq!(e["mutual_information"].as_f64().unwrap(), 0.5);
        assert_eq!(e["d1"], "1/2");
    }
}

#[test]
fn leakage_of_order_three_construction() {
    let descriptor = stdout(&relaynet(&["construct", "--d", "3"]));
    let out = relaynet_stdin(&["leakage", "-", "--pair", "1,3"], &descriptor);
    assert_eq!(code(&out), 0);
    let mi = json(&out)["entries"][0]["mutual_information"].as_f64().unwrap();
    assert!((mi - 0.918296).abs() < 1e-6);
}

#[test]
fn leakage_rejects_cut_pairs() {
    let out = relaynet(&["leakage", "--builtin", "Eq1Eq2-binary", "--pair", "1,2"]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&relaynet(&["leakage", "--builtin", "Eq1Eq2-binary", "--base", "1"])), 2);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let args = ["leakage", "--builtin", "con1-even-d", "--d", "6"];
    assert_eq!(relaynet(&args).stdout, relaynet(&args).stdout);
    let args = ["reproduce", "--check", "E9", "--check", "CLOSED-FORM"];
    assert_eq!(relaynet(&args).stdout, relaynet(&args).stdout);
}

#[test]
fn reproduce_single_checks() {
    let out = relaynet(&["reproduce", "--check", "E9"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["checks"][0]["id"], "E9");
    assert!(report["checks"][0]["expected"].as_str().unwrap().contains("0.5"));
    assert!(report["checks"][0]["computed"].as_str().unwrap().contains("0.500000000000"));

    let out = relaynet(&["reproduce", "--check", "TT5-p3"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["checks"][0]["computed"].as_str().unwrap().starts_with("secure linear codes: 0"));

    assert_eq!(code(&relaynet(&["reproduce", "--check", "NOPE"])), 2);
    assert_eq!(code(&relaynet(&["reproduce"])), 2);
}

#[test]
fn reproduce_all_passes() {
    let out = relaynet(&["reproduce", "--all"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = json(&out);
    assert_eq!(report["passed"], report["total"]);
    let ids: Vec<&str> = report["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    for id in ["E9", "F10", "TT5-p2", "TT5-p3", "TT5-p5", "T6", "TT6-active", "TD1", "NHT", "F29-6", "APPENDIX"] {
        assert!(ids.contains(&id), "{id}");
    }
    for d in 3..=8 {
        assert!(ids.contains(&format!("TT7-d{d}").as_str()));
    }
    let criteria: std::collections::BTreeSet<u64> =
        report["checks"].as_array().unwrap().iter().map(|c| c["criterion"].as_u64().unwrap()).collect();
    assert_eq!(criteria, (1..=10).collect());
}

#[test]
fn worker_count_variable() {
    let ok = Command::new(env!("CARGO_BIN_EXE_relaynet"))
        .args(["search", "--space", "linear", "--p", "3"])
        .env("RELAYNET_WORKERS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&ok), 0);
    let bad = Command::new(env!("CARGO_BIN_EXE_relaynet"))
        .args(["search", "--space", "linear", "--p", "3"])
        .env("RELAYNET_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
}
