//! Exit codes and output formats of the `scl` binary.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn contract(name: &str) -> String {
    format!("{}/../../contracts/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scl"))
        .args(args)
        .env_remove("SCL_COLOR")
        .output()
        .unwrap()
}

fn scl_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_scl"))
        .args(args)
        .env_remove("SCL_COLOR")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<serde_json::Value> {
    stdout(o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap_or_else(|e| panic!("{l}: {e}")))
        .collect()
}

#[test]
fn check() {
    let sale = contract("sale.scl");
    let o = scl(&["check", &sale]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty() && o.stderr.is_empty());
    let o = scl(&["--json", "check", &sale]);
    assert_eq!(json_lines(&o), vec![serde_json::json!({"ok": true})]);

    let dup = contract("invalid/duplicate_fluent.scl");
    let o = scl(&["check", &dup]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with(&format!("{dup}:4:10: error: ")), "{err}");
    assert_eq!(code(&scl(&["check", &contract("invalid/reserved_effect.scl")])), 2);
    assert_eq!(code(&scl(&["check", "/nonexistent/x.scl"])), 2);
    let o = scl(&["--json", "check", &dup]);
    assert_eq!(json_lines(&o)[0]["ok"], false);
}

#[test]
fn run() {
    let sale = contract("sale.scl");
    let o = scl(&["run", &sale, "--first"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "trace: [pay(widget)@1, oblige(seller,delivered(widget),10)@2, deliver(widget)@5]\n  seller must see to delivered(widget) by 10: fulfilled\n"
    );
    let o = scl(&["--json", "run", &sale, "--program", "late"]);
    let v = json_lines(&o);
    assert_eq!(v.len(), 1);
    assert_eq!(v[0]["obligations"][0]["status"], "violated");
    assert_eq!(v[0]["obligations"][0]["deadline"], "10");
    assert_eq!(v[0]["truncated"], false);
    let o = scl(&["run", &sale, "--max-steps", "1"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("truncated"));
    assert_eq!(code(&scl(&["run", &sale, "--program", "nope"])), 2);
    assert_eq!(code(&scl(&["run", &contract("invalid/unknown_sort.scl")])), 2);
}

#[test]
fn run_without_executions() {
    let dir = std::env::temp_dir().join(format!("scl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("t.scl");
    std::fs::write(&path, "contract T { program main = test(false); }").unwrap();
    let o = scl(&["run", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let o = scl(&["--json", "run", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(o.stdout.is_empty());
}

#[test]
fn query() {
    let sale = contract("sale.scl");
    let q = |after: &str, f: &str, m: &str| {
        scl(&["query", &sale, "--after", after, "--formula", f, "--method", m])
    };
    let o = q("pay(widget)@1", "paid(widget)", "both");
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "true\n"));
    let o = q("", "paid(widget)", "regression");
    assert_eq!((code(&o), stdout(&o).as_str()), (1, "false\n"));
    let o = q("deliver(widget)@1", "true", "progression");
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("step 1"));
    assert_eq!(code(&q("", "paid(", "both")), 2);
    let o = scl(&[
        "--json", "query", &sale, "--after", "pay(widget)@?", "--formula", "paid(widget) & start = 0",
    ]);
    assert_eq!(json_lines(&o), vec![serde_json::json!({"result": true})]);
}

#[test]
fn verify() {
    let sale = contract("sale.scl");
    let o = scl(&["verify", &sale, "--property", "done"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("PASS done"));
    let o = scl(&["verify", &sale, "--property", "on_time"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains(
        "counterexample: [pay(widget)@1, oblige(seller,delivered(widget),10)@2, noop@11]"
    ));
    assert_eq!(code(&scl(&["verify", &sale, "--all-properties"])), 1);
    assert_eq!(code(&scl(&["verify", &sale, "--property", "missing"])), 2);
    let o = scl(&["--json", "verify", &sale]);
    let v = json_lines(&o);
    assert_eq!(v.len(), 2);
    assert_eq!(v[0]["pass"], true);
    assert_eq!(v[1]["trace_kind"], "counterexample");
}

#[test]
fn color_is_opt_in() {
    let sale = contract("sale.scl");
    let o = scl(&["verify", &sale, "--property", "done"]);
    assert!(!stdout(&o).contains('\x1b'));
    let o = Command::new(env!("CARGO_BIN_EXE_scl"))
        .args(["verify", &sale, "--property", "done"])
        .env("SCL_COLOR", "1")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("\x1b[32mPASS\x1b[0m"));
}

#[test]
fn repl_session() {
    let sale = contract("sale.scl");
    let o = scl_stdin(
        &["repl", &sale],
        "do deliver(widget)@1\nshow\ndo pay(widget)@1\nshow\nundo\nundo\nholds not paid(widget)\nquit\n",
    );
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("refused"));
    assert!(out.contains("fluents: paid(widget)"));
    assert!(out.contains("nothing to undo"));
    assert_eq!(*lines.last().unwrap(), "true");
}

#[test]
fn repl_do_undo_restores_show() {
    let sale = contract("sale.scl");
    let script = "do pay(widget)@?\ndo oblige(seller, delivered(widget), deadline 10)@?\nshow\n";
    let before = stdout(&scl_stdin(&["repl", &sale], script));
    let after = stdout(&scl_stdin(
        &["repl", &sale],
        &format!("{script}do deliver(widget)@?\nundo\nshow\n"),
    ));
    let show = |s: &str| s.split("trace: ").last().unwrap().to_string();
    assert_eq!(show(&before), show(&after));
    assert!(before.contains("did pay(widget)@1"));
}

#[test]
fn repl_json() {
    let sale = contract("sale.scl");
    let o = scl_stdin(&["--json", "repl", &sale], "actions\nundo\n");
    let v = json_lines(&o);
    assert_eq!(v.len(), 2);
    assert_eq!(v[0]["output"], serde_json::json!(["pay(widget)@1", "noop@1"]));
    assert_eq!(v[1]["ok"], false);
}
