use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bandcolor(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bandcolor")).current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const TRIANGLE: &str = "c triangle\np edge 3 3\ne 1 2 2\ne 2 3 2\ne 1 3 2\n";

#[test]
fn check_reports_objective() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.col"), TRIANGLE).unwrap();
    fs::write(dir.path().join("good.sol"), "v 1 1\nv 2 3\nv 3 5\n").unwrap();
    fs::write(dir.path().join("bad.sol"), "v 1 1\nv 2 2\nv 3 3\n").unwrap();
    let ok = bandcolor(dir.path(), &["check", "t.col", "good.sol", "--k", "5"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout(&ok).trim(), "f=0");
    let bad = bandcolor(dir.path(), &["check", "t.col", "bad.sol", "--k", "5"]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(stdout(&bad).trim(), "f=2");
}

#[test]
fn solve_writes_verified_solution() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.col"), TRIANGLE).unwrap();
    let out = bandcolor(dir.path(), &["solve", "t.col", "--k", "5", "--seed", "3", "-o", "t.sol"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("status=legal_found k=5 f=0"));
    let check = bandcolor(dir.path(), &["check", "t.col", "t.sol", "--k", "5"]);
    assert_eq!(check.status.code(), Some(0));
}

#[test]
fn infeasible_budget_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.col"), TRIANGLE).unwrap();
    let out = bandcolor(dir.path(), &["solve", "t.col", "--k", "4", "--time-limit", "0.3", "--alpha", "200"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).starts_with("status=timeout"));
    assert!(!dir.path().join("t.sol").exists());
}

#[test]
fn minimize_and_oracle_agree_on_triangle() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.col"), TRIANGLE).unwrap();
    let m = bandcolor(dir.path(), &["minimize", "t.col", "--time-limit", "0.5", "--alpha", "500"]);
    assert_eq!(m.status.code(), Some(0));
    assert!(stdout(&m).contains("best k=5"));
    let o = bandcolor(dir.path(), &["oracle", "t.col"]);
    assert!(stdout(&o).starts_with("min k=5"));
    let infeasible = bandcolor(dir.path(), &["oracle", "t.col", "--k", "4"]);
    assert_eq!(infeasible.status.code(), Some(2));
}

#[test]
fn convert_splits_demands() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("m.col"), "p edge 2 3\nn 1 2\nn 2 2\ne 1 1 1\ne 2 2 3\ne 1 2 2\n").unwrap();
    let out = bandcolor(dir.path(), &["convert", "m.col", "-o", "b.col"]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("b.col")).unwrap();
    assert_eq!(text, "p edge 4 6\ne 1 2 1\ne 1 3 2\ne 1 4 2\ne 2 3 2\ne 2 4 2\ne 3 4 3\n");
}

#[test]
fn bad_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("x.col"), "e 1 2 3\n").unwrap();
    let out = bandcolor(dir.path(), &["solve", "x.col", "--k", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("before the header"));
    assert_eq!(bandcolor(dir.path(), &["solve"]).status.code(), Some(1));
    assert_eq!(bandcolor(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(bandcolor(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn bench_tables_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let gen = bandcolor(dir.path(), &["generate", "--n", "25", "--geometric", "--seed", "9", "-o", "g.col"]);
    assert_eq!(gen.status.code(), Some(0));
    fs::write(dir.path().join("t.col"), TRIANGLE).unwrap();
    fs::write(dir.path().join("suite.txt"), "# demo\ng.col bcp 30 3\nt.col bcp 4 2\n").unwrap();
    let args = [
        "bench", "suite.txt", "--omit-timing", "--max-generations", "5", "--p", "6", "--alpha", "300", "--seed", "5",
    ];
    let a = bandcolor(dir.path(), &[&args[..], &["-o", "a.csv", "--jsonl", "a.jsonl"]].concat());
    let b = bandcolor(dir.path(), &[&args[..], &["-o", "b.csv"]].concat());
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(b.status.code(), Some(0));
    let ta = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(ta, fs::read(dir.path().join("b.csv")).unwrap());
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("instance,k,success,final_f,wall_time_s,iterations,seed\n"));
    assert_eq!(text.lines().count(), 6);
    assert_eq!(fs::read_to_string(dir.path().join("a.jsonl")).unwrap().lines().count(), 5);
    let summary = String::from_utf8_lossy(&a.stderr);
    assert!(summary.contains("3/3"), "{summary}");
    assert!(summary.contains("0/2"), "{summary}");
    assert!(summary.contains("inf"), "{summary}");
}

#[test]
fn bench_dry_run_lists_long_limits() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("suite.txt"), "a.col bcp 82 20 7200\nb.col bmcp 539 20 14400\n").unwrap();
    let out = bandcolor(dir.path(), &["bench", "suite.txt", "--dry-run"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("k=82 reps=20 time_limit_s=7200"));
    assert!(text.contains("kind=bmcp k=539 reps=20 time_limit_s=14400"));
}

#[test]
fn experiment_trace() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.col"), TRIANGLE).unwrap();
    let out = bandcolor(
        dir.path(),
        &["experiment", "alpha_sweep", "t.col", "--k", "4", "--reps", "1", "--max-generations", "4", "--p", "4", "-o", "tr.csv"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("tr.csv")).unwrap();
    assert_eq!(text.lines().count(), 13);
    assert!(text.lines().nth(1).unwrap().starts_with("alpha=5000,"));
}
