use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn advice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_advice")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (Value, i32) {
    let out = advice(args);
    let code = out.status.code().expect("exit code");
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (v, code)
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn simulate_built_documents() {
    let fam = scratch("dup-family.json");
    let out = advice(&["build", "dup-family", "-o", fam.to_str().unwrap(), "--lengths", "0..6"]);
    assert!(out.status.success());
    let (v, code) = report(&["simulate", "--machine", fam.to_str().unwrap(), "0101"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["probability"], "1/2");

    let (v, _) = report(&["simulate", "--builder", "coin", ""]);
    assert_eq!(v["results"]["probability"], "1/2");
}

#[test]
fn malformed_document_is_diagnosed() {
    let bad = scratch("bad.json");
    std::fs::write(&bad, "{\n  \"kind\": \"pfa\",\n").unwrap();
    let out = advice(&["simulate", "--machine", bad.to_str().unwrap(), "01"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn verify_passes_and_fails() {
    let (v, code) = report(&["verify", "--builder", "dup-uniform", "--lengths", "2..12"]);
    assert_eq!(code, 0);
    assert_eq!(v["violations"], 0);
    assert_eq!(v["results"]["lengths"].as_array().unwrap().len(), 11);

    let (v, code) = report(&["verify", "--builder", "palhash-amplified", "--lengths", "0..5", "--mode", "bounded", "--epsilon", "1/4"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["lengths"][5]["max_error"], "1/4");

    let (v, code) = report(&["verify", "--builder", "dup-uniform", "--language", "ip*", "--lengths", "2"]);
    assert_eq!(code, 1);
    assert_eq!(v["passed"], false);
    assert_eq!(v["results"]["lengths"][0]["witnesses"][0]["input"], "0 1");
}

#[test]
fn refute_builtin_candidates() {
    for criterion in ["cequal-codup", "plin-ipstar"] {
        let (v, code) = report(&["refute", criterion]);
        assert_eq!(code, 0, "{v}");
        let rows = v["results"]["candidates"].as_array().unwrap();
        assert!(rows.len() >= 10);
        assert!(rows.iter().all(|r| r["refuted"] == true));
    }
}

#[test]
fn refute_candidate_file() {
    let path = scratch("dup-uniform.json");
    assert!(advice(&["build", "dup-uniform", "-o", path.to_str().unwrap(), "--lengths", "0..8"]).status.success());
    let (v, code) = report(&["refute", "cequal-codup", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["candidates"][0]["trace"]["kind"], "basis-misclassified");
}

#[test]
fn game_and_payoff_pipe() {
    let (v, code) = report(&["game", "--builder", "palhash", "-n", "3", "--worst-case", "--show-payoff"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["duality"]["equal"], true);
    assert_eq!(v["results"]["value"], "1");
    assert!(v["results"]["worst_case"]["best_advice"].is_string());

    let saved = scratch("game.json");
    std::fs::write(&saved, serde_json::to_string(&v).unwrap()).unwrap();
    let (again, _) = report(&["game", "--payoff", saved.to_str().unwrap()]);
    assert_eq!(again["results"]["value"], v["results"]["value"]);

    let diagonal = scratch("diagonal.json");
    std::fs::write(&diagonal, r#"{"grid": ["1 0", "0 1"]}"#).unwrap();
    let (v, _) = report(&["game", "--payoff", diagonal.to_str().unwrap()]);
    assert_eq!(v["results"]["value"], "1/2");

    let (v, _) = report(&["game", "--builder", "palhash", "-n", "3", "--subsample", "4"]);
    assert_eq!(v["results"]["heuristic"], true);
    assert_eq!(v["results"]["columns"], 4);
}

#[test]
fn budgets_are_hard_errors() {
    let out = advice(&["--max-strings", "10", "verify", "--builder", "dup-uniform", "--lengths", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget exceeded"));
    let out = advice(&["game", "--builder", "palhash", "-n", "3", "--max-columns", "8"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn density_table_and_formats() {
    let (v, code) = report(&["density", "ip*", "empty", "--lengths", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["table"][0]["ell"], "1/4");
    let (v, _) = report(&["density", "dup", "dup", "--lengths", "1..12"]);
    assert!(v["results"]["table"].as_array().unwrap().iter().all(|r| r["ell"] == "1/2"));

    let (v, _) = report(&["density", "dup", "--builder", "dup-uniform", "--lengths", "1..6"]);
    assert!(v["results"]["table"].as_array().unwrap().iter().all(|r| r["ell"] == "1/2"));

    let tsv = advice(&["--format", "tsv", "density", "ip*", "empty", "--lengths", "2"]);
    let text = String::from_utf8(tsv.stdout).unwrap();
    assert!(text.lines().any(|l| l == "results.table.0.ell\t1/4"));
}

#[test]
fn reports_are_deterministic() {
    let a = advice(&["refute", "plin-ipstar"]);
    let b = advice(&["refute", "plin-ipstar"]);
    assert_eq!(a.stdout, b.stdout);
}
