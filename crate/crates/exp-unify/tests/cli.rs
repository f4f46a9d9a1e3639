//! Exercises the binary end to end: exit codes, JSON shape, trace and DOT
//! output, and the oracle subcommands.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_exp-unify"))
}

fn write_temp(name: &str, content: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("exp-unify-cli-{name}"));
    std::fs::write(&path, content).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn solve_unifiable_exits_zero() {
    let path = write_temp("pos.txt", "exp(g(A), B) =? g(C)\n");
    let out = bin().arg("solve").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("unifiable"), "{text}");
    assert!(text.contains("C -> A @ B"), "{text}");
}

#[test]
fn solve_failure_exits_one() {
    let path = write_temp("neg.txt", "a =? b\n");
    let out = bin().arg("solve").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("CONST_CLASH"));
}

#[test]
fn parse_error_exits_two() {
    let path = write_temp("bad.txt", "X =? g(\n");
    let out = bin().arg("solve").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_file_exits_two() {
    let out = bin().arg("solve").arg("/nonexistent-problem").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_output_is_valid_and_verified() {
    let path = write_temp("json.txt", "exp(g(A), B) =? g(C)\n");
    let out = bin()
        .args(["solve", "--json", "--verify"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["status"], "unifiable");
    assert_eq!(v["unifier"]["C"], "A @ B");
    assert_eq!(v["verified"], true);
    assert!(v["stats"]["iterations"].as_u64().unwrap() > 0);
}

#[test]
fn trace_goes_to_stderr() {
    let path = write_temp("trace.txt", "exp(g(A), B) =? g(C)\n");
    let out = bin()
        .args(["solve", "--trace"])
        .arg(&path)
        .output()
        .unwrap();
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("trace: f:"), "{err}");
}

#[test]
fn dot_files_are_written() {
    let path = write_temp("dot.txt", "exp(g(A), B) =? g(C)\n");
    let d = std::env::temp_dir().join("exp-unify-cli-d.dot");
    let p = std::env::temp_dir().join("exp-unify-cli-p.dot");
    let out = bin()
        .arg("solve")
        .arg(&path)
        .arg("--dot-d")
        .arg(&d)
        .arg("--dot-p")
        .arg(&p)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&d).unwrap().starts_with("digraph D"));
    assert!(std::fs::read_to_string(&p).unwrap().starts_with("digraph P"));
}

#[test]
fn e1_normalize_prints_canonical_form() {
    let out = bin()
        .args(["e1", "normalize", "exp(g(A @ B), C)"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "g(A @ B @ C)");
}

#[test]
fn e1_check_assignment_file() {
    let path = write_temp(
        "check.txt",
        "X := g(b)\nY := b @ c\nexp(X, Y) =? g(b @ b @ c)\n",
    );
    let out = bin().args(["e1", "check"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "satisfied");

    let path = write_temp("check-bad.txt", "X := g(b)\nX =? g(c)\n");
    let out = bin().args(["e1", "check"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out).trim(), "violated");
}

#[test]
fn e1_gadgets_self_verify() {
    let out = bin().args(["e1", "gadget", "mult", "2", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verification: passed"));

    let out = bin().args(["e1", "gadget", "add", "4", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verification: passed"));
}

#[test]
fn fuzz_runs_seeded() {
    let out = bin()
        .args(["fuzz", "--count", "50", "--seed", "123"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("50 problems solved"));
}
