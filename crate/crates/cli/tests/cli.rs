use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn submax(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_submax"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("SUBMAX_THREADS", t),
        None => cmd.env_remove("SUBMAX_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn gen(dir: &Path, kind: &str, n: &str, seed: &str) -> std::path::PathBuf {
    let path = dir.join(format!("{kind}-{seed}.json"));
    let out = submax(
        &["gen", "--kind", kind, "--n", n, "--seed", seed, "--out", p(&path)],
        None,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn solve(dir: &Path, inst: &Path) -> std::path::PathBuf {
    let path = dir.join("report.json");
    let out = submax(&["solve", "--instance", p(inst), "--out", p(&path)], None);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = gen(dir.path(), "coverage-partition", "9", "11");
    let first = fs::read(&a).unwrap();
    let b = gen(dir.path(), "coverage-partition", "9", "11");
    assert_eq!(first, fs::read(b).unwrap());
    let other = gen(dir.path(), "coverage-partition", "9", "12");
    assert_ne!(first, fs::read(other).unwrap());
}

#[test]
fn gen_refuses_bad_kind_and_large_n() {
    assert_eq!(code(&submax(&["gen", "--kind", "cut-matching", "--n", "5"], None)), 2);
    assert_eq!(code(&submax(&["gen", "--kind", "cut-uniform", "--n", "21"], None)), 2);
    assert_eq!(
        code(&submax(&["gen", "--kind", "table-knapsack", "--n", "17"], None)),
        2
    );
}

#[test]
fn solve_dispatches_on_constraint() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, pipeline) in [("cut-graphic", "matroid"), ("table-knapsack", "knapsack")] {
        let inst = gen(dir.path(), kind, "7", "5");
        let report: Value = serde_json::from_str(&fs::read_to_string(solve(dir.path(), &inst)).unwrap()).unwrap();
        assert_eq!(report["pipeline"], pipeline);
        assert!(!report[pipeline].is_null());
    }
}

#[test]
fn solve_refuses_small_epsilon_at_default_caps() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "cut-uniform", "6", "1");
    let out = submax(&["solve", "--instance", p(&inst), "--epsilon", "0.1"], None);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--frac-cap"));
}

#[test]
fn solve_reports_budget_exhaustion() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "coverage-uniform", "8", "2");
    let out = submax(&["solve", "--instance", p(&inst), "--frac-cap", "1"], None);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_passes_on_honest_report() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "coverage-knapsack", "8", "4");
    let report = solve(dir.path(), &inst);
    let out = submax(&["verify", "--instance", p(&inst), "--report", p(&report)], None);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["violations"], 0);
}

#[test]
fn verify_rejects_digest_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "cut-uniform", "7", "8");
    let report = solve(dir.path(), &inst);
    let other = gen(dir.path(), "cut-uniform", "7", "9");
    let out = submax(&["verify", "--instance", p(&other), "--report", p(&report)], None);
    assert_eq!(code(&out), 6);
}

#[test]
fn verify_flags_corrupted_report() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "cut-partition", "8", "3");
    let report = solve(dir.path(), &inst);
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let value = v["value"].as_f64().unwrap();
    v["value"] = Value::from(value + 1.0);
    fs::write(&report, serde_json::to_string(&v).unwrap()).unwrap();
    let out = submax(&["verify", "--instance", p(&inst), "--report", p(&report)], None);
    assert_eq!(code(&out), 5);
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(summary["violations"].as_u64().unwrap() > 0);
}

#[test]
fn suite_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(
        code(&submax(
            &["suite", "--seed", "3", "--count", "2", "--out-dir", p(&a)],
            Some("1")
        )),
        0
    );
    assert_eq!(
        code(&submax(
            &["suite", "--seed", "3", "--count", "2", "--out-dir", p(&b)],
            Some("4")
        )),
        0
    );
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 12 * 2 * 3 + 1);
    for name in names {
        assert_eq!(
            fs::read(a.join(&name)).unwrap(),
            fs::read(b.join(&name)).unwrap(),
            "{name:?}"
        );
    }
    let csv = fs::read_to_string(a.join("suite.csv")).unwrap();
    assert!(csv.starts_with("family,n,epsilon,ratio,queries_value,queries_indep,violations\n"));
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = submax(&["suite", "--count", "1", "--out-dir", p(dir.path())], Some("zero"));
    assert_eq!(code(&out), 2);
}
