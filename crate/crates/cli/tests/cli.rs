use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stackspt")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// r -> a (F 1), a -> b (F 1), r -> b (P e_1), unit demands.
const TIE: &str = "stackspt 1\ngraph 3 3 1\nroot 0\nedge 0 1 F 1\nedge 1 2 F 1\nedge 0 2 P 1\n";

/// r -> s (F 1), s -> t (P e_1), r -> t (F 10), t -> x (F 1).
const BREAKPOINT: &str = "stackspt 1\ngraph 4 4 1\nroot 0\nedge 0 1 F 1\nedge 1 2 P 1\nedge 0 2 F 10\nedge 2 3 F 1\n";

#[test]
fn gen_is_deterministic_and_parseable() {
    let dir = TempDir::new().unwrap();
    let args = ["gen", "--n", "100", "--m", "300", "--k", "2", "--seed", "1"];
    let a = run(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&run(&args)));
    let path = write(&dir, "g.txt", &stdout(&a));
    let eval = run(&["eval", "--instance", s(&path), "--prices", "1,1"]);
    assert!(eval.status.success(), "{}", String::from_utf8_lossy(&eval.stderr));
}

#[test]
fn gen_rejects_zero_priceable_edges() {
    let out = run(&["gen", "--n", "10", "--m", "20", "--k", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn eval_tie_fixture() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "tie.txt", TIE);
    let out = run(&["eval", "--instance", s(&path), "--prices", "2"]);
    assert_eq!(stdout(&out), "2\n");
    let out = run(&["eval", "--instance", s(&path), "--prices", "1000000"]);
    assert_eq!(stdout(&out), "0\n");
}

#[test]
fn eval_input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "tie.txt", TIE);
    for prices in ["1,2", "0", "-1", "x"] {
        let out = run(&["eval", "--instance", s(&path), "--prices", prices]);
        assert_eq!(out.status.code(), Some(2), "prices {prices}");
    }
    let unreachable = write(&dir, "u.txt", "stackspt 1\ngraph 3 2 1\nroot 0\nedge 0 1 P 1\nedge 2 0 F 1\n");
    let out = run(&["eval", "--instance", s(&unreachable), "--prices", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let broken = write(&dir, "b.txt", "graph 3 2 1\n");
    assert_eq!(run(&["eval", "--instance", s(&broken), "--prices", "1"]).status.code(), Some(2));
}

#[test]
fn eval_with_naive_prints_both() {
    let dir = TempDir::new().unwrap();
    let inst = stdout(&run(&["gen", "--n", "60", "--m", "200", "--k", "3", "--seed", "4", "--demand-max", "3"]));
    let path = write(&dir, "g.txt", &inst);
    let out = run(&["eval", "--instance", s(&path), "--prices", "2,5/2,3", "--naive"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let values: Vec<&str> = text.lines().map(|l| l.split_whitespace().nth(1).unwrap()).collect();
    assert_eq!(values.len(), 2);
    assert_eq!(values[0], values[1]);
}

#[test]
fn solve_breakpoint_fixture() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "bp.txt", BREAKPOINT);
    let out = run(&["solve", "--instance", s(&path)]);
    assert_eq!(stdout(&out), "prices 9\nrevenue 18\nevaluations 1\n");
}

#[test]
fn solve_output_does_not_depend_on_parallelism() {
    let dir = TempDir::new().unwrap();
    let inst = stdout(&run(&["gen", "--n", "80", "--m", "240", "--k", "2", "--seed", "9"]));
    let path = write(&dir, "g.txt", &inst);
    let one = run(&["solve", "--instance", s(&path), "--parallel", "1"]);
    let eight = run(&["solve", "--instance", s(&path), "--parallel", "8"]);
    assert!(one.status.success());
    assert_eq!(stdout(&one), stdout(&eight));
}

#[test]
fn solve_explicit_vector_file() {
    let dir = TempDir::new().unwrap();
    let inst = stdout(&run(&["gen", "--n", "30", "--m", "90", "--k", "2", "--seed", "2"]));
    let path = write(&dir, "g.txt", &inst);
    let cands = write(&dir, "c.txt", "vector 3 7/2\n");
    let out = run(&["solve", "--instance", s(&path), "--candidates", s(&cands)]);
    assert!(stdout(&out).starts_with("prices 3,7/2\n"));
    let empty = write(&dir, "e.txt", "# nothing\n");
    assert_eq!(run(&["solve", "--instance", s(&path), "--candidates", s(&empty)]).status.code(), Some(2));
}

#[test]
fn verify_fleet_passes_with_stable_csv() {
    let args = ["verify", "--random", "--instances", "50", "--trials", "100", "--n", "40", "--m", "120", "--seed", "3"];
    let out = run(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out), "50 instances, 5000 trials, 0 failed\n");

    let csv_args = ["verify", "--random", "--instances", "3", "--trials", "10", "--seed", "5", "--csv"];
    let a = run(&csv_args);
    assert_eq!(a.stdout, run(&csv_args).stdout);
    let text = stdout(&a);
    assert!(text.starts_with("instance,trial,prices,fast,naive,tree_match,partition_ok,pass\n"));
    assert_eq!(text.lines().count(), 31);
}

#[test]
fn verify_reports_injected_fault() {
    let dir = TempDir::new().unwrap();
    let inst = stdout(&run(&["gen", "--n", "30", "--m", "90", "--k", "2", "--seed", "6"]));
    let path = write(&dir, "g.txt", &inst);
    let out = run(&["verify", "--instance", s(&path), "--trials", "5", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("first counterexample"));
    assert!(err.contains("stackspt 1"));
}

#[test]
fn bench_emits_header_and_rows() {
    let out = run(&["bench", "--sizes", "2^8,300", "--queries", "10", "--csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,m,k,build_s,fast_us,naive_us,speedup"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][..3], &["256", "1024", "2"]);
    assert_eq!(&rows[1][..3], &["300", "1200", "2"]);
}

#[test]
fn bench_rejects_bad_sizes() {
    assert_eq!(run(&["bench", "--sizes", "2^x"]).status.code(), Some(2));
}
