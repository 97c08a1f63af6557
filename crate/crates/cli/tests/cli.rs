use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_borda-manip"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const EXAMPLE1: &str = r#"{"m":5,"distinguished":5,"votes":[[1,2,3,4,5],[2,3,4,1,5],[3,4,1,2,5],[4,1,2,3,5]]}"#;

#[test]
fn reverse_on_example_election() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "ex1.json", EXAMPLE1);
    let o = run(&["solve", &f, "--algorithm", "reverse"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("n: 4"), "{text}");
    let json = text.lines().last().unwrap();
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    let votes = v["votes"].as_array().unwrap();
    assert_eq!(votes.len(), 4);
    assert!(votes.iter().all(|b| b[0] == 5));
}

#[test]
fn greedy_exit_codes() {
    let dir = TempDir::new().unwrap();
    let prop1 = dir.path().join("prop1.json");
    let o = run(&["gen", "--model", "prop1", "--m", "4", "--out", prop1.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["solve", prop1.to_str().unwrap(), "--algorithm", "lslg", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("status: Success"));

    let thm2 = dir.path().join("thm2.json");
    run(&["gen", "--model", "thm2-k36", "--out", thm2.to_str().unwrap()]);
    let o = run(&["solve", thm2.to_str().unwrap(), "--algorithm", "lslg", "--n", "72"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("status: Failure"));
    let o = run(&["solve", thm2.to_str().unwrap(), "--algorithm", "lsla", "--n", "72"]);
    assert_eq!(o.status.code(), Some(0));
    // lslg without --n is an input error.
    let o = run(&["solve", thm2.to_str().unwrap(), "--algorithm", "lslg"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn trace_lines_are_csv() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "p.json", r#"{"m":4,"distinguished":4,"scores":[3,4,5,0]}"#);
    let o = run(&["solve", &f, "--algorithm", "lsla", "--n", "2", "--trace"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("iter,column,score,column_sum"));
    let steps: Vec<&str> = lines.take_while(|l| !l.starts_with("status")).collect();
    assert_eq!(steps.len(), 6);
    assert!(steps.iter().all(|l| l.split(',').count() == 4));
}

#[test]
fn exact_reports_and_decides() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "ex1.json", EXAMPLE1);
    let o = run(&["exact", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("n_optimal: 4"));
    assert_eq!(run(&["exact", &f, "--n", "3"]).status.code(), Some(1));
    assert_eq!(run(&["exact", &f, "--n", "4"]).status.code(), Some(0));
    let o = run(&["solve", &f, "--algorithm", "exact"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn exhausted_budget_is_unknown() {
    let dir = TempDir::new().unwrap();
    let f = write(
        dir.path(),
        "hard.json",
        r#"{"m":8,"distinguished":8,"scores":[67,60,59,58,58,52,52,42]}"#,
    );
    let o = run(&["--budget-nodes", "1", "exact", &f, "--n", "3"]);
    let code = o.status.code();
    assert!(code == Some(2) || code == Some(1), "{code:?}");
    let o = run(&["--budget-nodes", "0", "exact", &f]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn malformed_input_reports_position() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "bad.json", "{\n  \"m\": 3,\n  oops\n}");
    let o = run(&["solve", &f, "--algorithm", "reverse"]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");
    let f = write(dir.path(), "dup.json", r#"{"m":3,"distinguished":1,"votes":[[1,1,2]]}"#);
    assert_eq!(run(&["solve", &f, "--algorithm", "reverse"]).status.code(), Some(3));
    assert_eq!(
        run(&["solve", "/nonexistent.json", "--algorithm", "reverse"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
}

#[test]
fn batch_generation_names_files() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("batch");
    let o = run(&[
        "--seed",
        "9",
        "gen",
        "--model",
        "urn",
        "--m",
        "5",
        "--p",
        "7",
        "--count",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    for idx in 0..3 {
        let text = std::fs::read_to_string(out.join(format!("urn_m5_p7_{idx}.json"))).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["votes"].as_array().unwrap().len(), 7);
    }
    // Same seed, same file.
    let again = dir.path().join("again");
    run(&[
        "--seed",
        "9",
        "gen",
        "--model",
        "urn",
        "--m",
        "5",
        "--p",
        "7",
        "--count",
        "1",
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(
        std::fs::read(out.join("urn_m5_p7_0.json")).unwrap(),
        std::fs::read(again.join("urn_m5_p7_0.json")).unwrap()
    );
}

#[test]
fn experiment_then_report() {
    let dir = TempDir::new().unwrap();
    let csv_a = dir.path().join("a.csv");
    let csv_b = dir.path().join("b.csv");
    let args = [
        "--seed",
        "3",
        "experiment",
        "--ms",
        "4,6",
        "--ps",
        "4,8",
        "--per-cell",
        "5",
    ];
    let o = bin()
        .args(args)
        .args(["--workers", "1", "--out", csv_a.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("model: uniform"));
    bin()
        .args(args)
        .args(["--workers", "4", "--out", csv_b.to_str().unwrap()])
        .output()
        .unwrap();
    let a = std::fs::read(&csv_a).unwrap();
    assert_eq!(a, std::fs::read(&csv_b).unwrap());
    assert!(a.starts_with(b"# root_seed=3\n"));

    let summary = dir.path().join("summary.csv");
    let o = run(&["report", csv_a.to_str().unwrap(), "--out", summary.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("REVERSE") && text.contains("LSLG beat LSLA"));
    let table = std::fs::read_to_string(summary).unwrap();
    assert_eq!(table.lines().filter(|l| l.starts_with("model,")).count(), 1);
    assert!(table.contains("urn,total,"));
}

#[test]
fn report_edge_cases() {
    let dir = TempDir::new().unwrap();
    let empty = write(dir.path(), "empty.csv", "");
    assert_eq!(run(&["report", &empty]).status.code(), Some(0));
    let bad = write(dir.path(), "bad.csv", "id,m\n1,4\n");
    assert_eq!(run(&["report", &bad]).status.code(), Some(3));
    let one = write(
        dir.path(),
        "one.csv",
        "# root_seed=1\ninstance_id,m,p,model,n_reverse,n_optimal,proof,rev_opt,lslg_opt,lsla_opt,nodes,elapsed_ms\n\
         0,4,4,uniform,2,2,exact_unsat,1,0,1,12,0\n",
    );
    let o = run(&["report", &one]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("uniform,4,1,1,0,1,0,0"), "{}", stdout(&o));
}
