use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pls-lab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn gen_reduce_solve_pullback() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = run(
        d,
        &[
            "gen",
            "--problem",
            "cnf",
            "--vars",
            "3",
            "--clauses",
            "3",
            "--seed",
            "4",
            "--out",
            "src.txt",
        ],
    );
    assert!(gen.status.success());
    let red = run(
        d,
        &[
            "reduce", "--from", "src.txt", "--to", "hs", "--out", "red.txt",
        ],
    );
    assert!(red.status.success());
    let reduced = std::fs::read_to_string(d.join("red.txt")).unwrap();
    assert!(reduced.starts_with("problem hs\n"));
    assert!(reduced.contains("meta reduction hs\n"));

    let solved = run(d, &["solve", "--file", "red.txt"]);
    assert!(solved.status.success());
    let text = stdout(&solved);
    let last = text.lines().last().unwrap();
    assert!(last.ends_with("local_opt"), "{last}");
    let solution = last
        .strip_prefix("final ")
        .and_then(|rest| rest.split(" cost ").next())
        .unwrap()
        .to_string();

    let verified = run(d, &["verify", "--file", "red.txt", "--solution", &solution]);
    assert_eq!(verified.status.code(), Some(0));
    assert!(stdout(&verified).contains("locally_optimal yes"));

    let back = run(
        d,
        &[
            "pullback",
            "--reduction",
            "hs",
            "--source",
            "src.txt",
            "--reduced",
            "red.txt",
            "--solution",
            &solution,
        ],
    );
    assert_eq!(back.status.code(), Some(0));
    let out = stdout(&back);
    assert!(out.contains("element_consistent yes"));
    assert!(out.contains("source_locally_optimal yes"));
}

#[test]
fn verify_reports_an_improving_witness() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("hs.txt"),
        "problem hs\nground 2\nset 1 4 : 1\nset 2 3 : 2\nbound mB 2\n",
    )
    .unwrap();
    let o = run(
        d,
        &["verify", "--file", "hs.txt", "--solution", "elements 1"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("locally_optimal no witness elements 1 2 cost 7"));
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.txt"), "problem hs\nground two\n").unwrap();
    let o = run(d, &["solve", "--file", "bad.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn suite_report_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["suite", "--reduction", "sp", "--trials", "4", "--seed", "9"];
    let a = run(d, &args);
    let b = run(d, &args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).ends_with("summary passed 4 failed 0 skipped 0\n"));
}

#[test]
fn observation_modes_exit_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "suite",
            "--reduction",
            "ts",
            "--trials",
            "20",
            "--scheme",
            "paper-literal",
            "--report",
            "ts.txt",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let report = std::fs::read_to_string(dir.path().join("ts.txt")).unwrap();
    assert!(report.contains("observation scheme: paper_literal"));
    assert!(dir.path().join("ts.json").exists());
}
