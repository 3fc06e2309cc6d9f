use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mlunify_cli::{Outcome, Report, Verdict};

const T1: &str = "f x (g 1) (g z)";
const T2: &str = "f (g y) (g y) (g (g x))";

fn mlunify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlunify")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_sig(dir: &Path) -> String {
    let path = dir.join("ex1.sig");
    fs::write(&path, "# example signature\nsymbol f arity 3\nsymbol g arity 1\n").unwrap();
    path.to_str().unwrap().to_string()
}

fn structured(o: &Output) -> Report {
    let text = stdout(o);
    let report: Report = serde_json::from_str(&text).expect("structured output parses");
    let again = serde_json::to_string_pretty(&report).unwrap();
    assert_eq!(again.trim_end(), text.trim_end(), "structured output is lossless");
    report
}

#[test]
fn unify_example_one() {
    let dir = tempfile::tempdir().unwrap();
    let sig = write_sig(dir.path());
    let o = mlunify(&["unify", "--sig", &sig, T1, T2]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "MGU: {x |-> g 1, y |-> 1, z |-> g (g 1)}\n");
}

#[test]
fn unify_trivial_cases() {
    let o = mlunify(&["unify", "x", "g x"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "FAIL: OccursCheck\n");
    let o = mlunify(&["unify", "f", "f"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "MGU: {}\n");
    let o = mlunify(&["unify", "1", "2"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "FAIL: SymbolClashL\n");
}

#[test]
fn unify_input_errors_exit_two() {
    let o = mlunify(&["unify", "f (x", "y"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
    assert_eq!(code(&mlunify(&["unify", "x -> y", "y"])), 2);
    assert_eq!(code(&mlunify(&["unify", "--sig", "/nonexistent/sig", "x", "y"])), 2);
    assert_eq!(code(&mlunify(&["frobnicate"])), 2);
}

#[test]
fn unify_trace_in_worked_order() {
    let dir = tempfile::tempdir().unwrap();
    let sig = write_sig(dir.path());
    let o = mlunify(&["unify", "--sig", &sig, "--trace", "--problem", "list", "--strategy", "rule-first", T1, T2]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let rules: Vec<&str> = text.lines().map(|l| l.split("  ").next().unwrap()).collect();
    assert_eq!(
        rules,
        [
            "Decomposition",
            "Decomposition",
            "Decomposition",
            "Delete",
            "Decomposition",
            "Delete",
            "Decomposition",
            "Delete",
            "Orient",
            "Elimination",
            "Elimination",
            "MGU: {x |-> g 1, y |-> 1, z |-> g (g 1)}",
        ]
    );
    assert_eq!(text.lines().nth(8).unwrap(), "Orient  <1, y> -> <x, g y> <| <y, 1> <| <z, g x>");
}

#[test]
fn structured_unify_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let sig = write_sig(dir.path());
    let o = mlunify(&["--format", "structured", "unify", "--sig", &sig, "--trace", T1, T2]);
    assert_eq!(code(&o), 0);
    match structured(&o) {
        Report::Unify { format_version, outcome: Outcome::Unifiable { mgu }, trace: Some(lines), .. } => {
            assert_eq!(format_version, 1);
            assert_eq!(mgu["x"], "g 1");
            assert_eq!(mgu["z"], "g (g 1)");
            assert!(!lines.is_empty());
        }
        other => panic!("unexpected report {other:?}"),
    }
    let o = mlunify(&["unify", "x", "g x", "--format", "structured"]);
    assert_eq!(code(&o), 1);
    assert!(matches!(structured(&o), Report::Unify { outcome: Outcome::Failed { .. }, .. }));
}

#[test]
fn certify_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let sig = write_sig(dir.path());
    let cert = dir.path().join("ex1.json");
    let cert_s = cert.to_str().unwrap();
    let o = mlunify(&["certify", "--sig", &sig, T1, T2, "--out", cert_s]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = mlunify(&["check", cert_s]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "ACCEPT\n");

    let o = mlunify(&["check", cert_s, "--format", "structured"]);
    assert_eq!(structured(&o), Report::Check { format_version: 1, result: Verdict::Accept });

    for style in ["steps", "chain"] {
        for problem in ["set", "list"] {
            let o = mlunify(&["certify", "--sig", &sig, T1, T2, "--out", cert_s, "--style", style, "--problem", problem]);
            assert_eq!(code(&o), 0);
            assert_eq!(code(&mlunify(&["check", cert_s])), 0);
        }
    }
}

#[test]
fn certify_identical_terms_gives_top() {
    let dir = tempfile::tempdir().unwrap();
    let sig = write_sig(dir.path());
    let cert = dir.path().join("same.json");
    let o = mlunify(&["certify", "--sig", &sig, "g x", "g x", "--out", cert.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(v["sigma"], serde_json::json!({}));
    assert_eq!(v["soundness"]["goal"], "g x = g x <-> top");
    assert_eq!(code(&mlunify(&["check", cert.to_str().unwrap()])), 0);
}

#[test]
fn certify_clash_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let sig = write_sig(dir.path());
    let cert = dir.path().join("none.json");
    let o = mlunify(&["certify", "--sig", &sig, "g 1", "g 2", "--out", cert.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(!cert.exists());
}

#[test]
fn check_flags_damaged_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let sig = write_sig(dir.path());
    let cert = dir.path().join("c.json");
    let cert_s = cert.to_str().unwrap();
    assert_eq!(code(&mlunify(&["certify", "--sig", &sig, T1, T2, "--out", cert_s])), 0);
    let good = fs::read_to_string(&cert).unwrap();

    // Flip one bit in the first sequent rule name.
    let at = good.find("\"rule\": \"AndR\"").expect("root rule") + "\"rule\": \"".len();
    let mut bytes = good.clone().into_bytes();
    bytes[at] ^= 0x01;
    let flipped = dir.path().join("flipped.json");
    fs::write(&flipped, &bytes).unwrap();
    let o = mlunify(&["check", flipped.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("REJECT"));

    let truncated = dir.path().join("truncated.json");
    fs::write(&truncated, &good[..good.len() / 2]).unwrap();
    let o = mlunify(&["check", truncated.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).starts_with("MALFORMED"));

    let future = dir.path().join("future.json");
    fs::write(&future, good.replacen("\"format_version\": 1", "\"format_version\": 99", 1)).unwrap();
    assert_eq!(code(&mlunify(&["check", future.to_str().unwrap()])), 2);

    let wrong_mgu = dir.path().join("wrong.json");
    fs::write(&wrong_mgu, good.replacen("\"y\": \"1\"", "\"y\": \"2\"", 1)).unwrap();
    assert_eq!(code(&mlunify(&["check", wrong_mgu.to_str().unwrap()])), 1);

    assert_eq!(code(&mlunify(&["check", dir.path().join("missing.json").to_str().unwrap()])), 2);
}

#[test]
fn eval_examples() {
    let o = mlunify(&["eval", "ceil(x)", "--bound", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "VALID\n");

    let o = mlunify(&["eval", "bot"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "NOT-VALID\ncountervaluation: {}\n");

    let dir = tempfile::tempdir().unwrap();
    let sig = write_sig(dir.path());
    let thm = format!("{T1} = {T2} <-> x = g 1 /\\ (y = 1 /\\ z = g (g 1))");
    // Nine symbols is the smallest bound holding the common instance; below
    // it both sides are empty everywhere and any right-hand side passes.
    let o = mlunify(&["eval", "--sig", &sig, &thm, "--bound", "9"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "VALID\n");
    let wrong = format!("{T1} = {T2} <-> x = g 1 /\\ (y = 1 /\\ z = g 1)");
    let o = mlunify(&["eval", "--sig", &sig, &wrong, "--bound", "9"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "NOT-VALID\ncountervaluation: {x |-> g 1, y |-> 1, z |-> g 1}\n");

    let o = mlunify(&["eval", "--sig", &sig, "x = g 1", "--format", "structured"]);
    assert_eq!(code(&o), 1);
    match structured(&o) {
        Report::Eval { valid: false, countervaluation: Some(w), .. } => assert!(w.contains_key("x")),
        other => panic!("unexpected report {other:?}"),
    }
}

#[test]
fn eval_needs_a_constant() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.sig");
    fs::write(&path, "symbol g arity 1\n").unwrap();
    let o = mlunify(&["eval", "--sig", path.to_str().unwrap(), "ceil(x)"]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&mlunify(&["eval", "ceil(x)", "--bound", "0"])), 2);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let sig = write_sig(dir.path());
    let a = mlunify(&["certify", "--sig", &sig, T1, T2]);
    let b = mlunify(&["certify", "--sig", &sig, T1, T2]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn long_chains_nest_past_the_json_default_depth() {
    let dir = tempfile::tempdir().unwrap();
    let sig = dir.path().join("list.sig");
    fs::write(&sig, "symbol cons arity 2\nsymbol g arity 1\nsymbol nil arity 0\n").unwrap();
    let n = 30;
    let list = |items: Vec<String>| items.iter().rev().fold("nil".to_string(), |t, x| format!("(cons {x} {t})"));
    let lhs = list((0..n).map(|i| format!("x{i}")).collect());
    let rhs = list((1..=n).map(|i| if i < n { format!("(g x{i})") } else { "nil".into() }).collect());
    let cert = dir.path().join("long.json");
    let cert = cert.to_str().unwrap();
    let o = mlunify(&["certify", "--sig", sig.to_str().unwrap(), &lhs, &rhs, "--out", cert]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(cert).unwrap();
    // Pattern text never contains brackets, so a plain count is exact.
    let mut depth = 0i32;
    let mut deepest = 0;
    for c in text.chars() {
        match c {
            '[' | '{' => {
                depth += 1;
                deepest = deepest.max(depth);
            }
            ']' | '}' => depth -= 1,
            _ => {}
        }
    }
    assert!(deepest > 128, "nesting depth {deepest}");
    let o = mlunify(&["check", cert]);
    assert_eq!(stdout(&o), "ACCEPT\n");
}
