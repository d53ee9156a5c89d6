use std::path::PathBuf;
use std::process::{Command, Output};

use projip::io::{parse_instance, SolveOutput};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn projip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projip")).args(args).output().unwrap()
}

fn solve(file: &str, extra: &[&str]) -> (SolveOutput, String) {
    let path = data(file);
    let mut args = vec!["solve", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = projip(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    (SolveOutput::parse(text.trim()).unwrap(), text)
}

#[test]
fn e1_is_optimal() {
    let (out, _) = solve("e1.json", &[]);
    assert_eq!(out.status, "optimal");
    assert_eq!(out.value, "0/1");
    assert_eq!(out.x, Some(vec![0, 1, 0]));
}

#[test]
fn radius_cap_zero_is_heuristic() {
    let (out, _) = solve("spread.json", &["--radius-cap", "0"]);
    assert_eq!(out.status, "heuristic");
    assert_eq!(out.radius_used, 0);
    let (full, _) = solve("spread.json", &[]);
    assert_eq!(full.status, "optimal");
}

#[test]
fn knapsack_shorthand() {
    let (out, _) = solve("knapsack.json", &[]);
    assert_eq!(out.value, "-2/1");
    assert_eq!(out.x, Some(vec![1]));
    let (pair, _) = solve("knapsack_pair.json", &["--engine", "nonneg"]);
    assert_eq!(pair.x, Some(vec![1, 0]));
    assert_eq!(pair.value, "-2/1");
}

#[test]
fn output_round_trips_through_the_model() {
    for file in ["e1.json", "knapsack_pair.json", "ilp.json", "spread.json"] {
        let (out, _) = solve(file, &[]);
        let inst = parse_instance(&std::fs::read_to_string(data(file)).unwrap()).unwrap();
        assert_eq!(inst.evaluate(out.x.as_ref().unwrap()), out.objective_value().unwrap(), "{file}");
    }
}

#[test]
fn jobs_and_deepening_do_not_change_output() {
    for file in ["e1.json", "ilp.json", "spread.json", "knapsack_pair.json"] {
        let (_, one) = solve(file, &["--jobs", "1"]);
        let (_, four) = solve(file, &["--jobs", "4"]);
        assert_eq!(one, four, "{file}");
        let (a, _) = solve(file, &["--deepening", "off"]);
        let (b, _) = solve(file, &[]);
        assert_eq!((a.x, a.value), (b.x, b.value), "{file}");
    }
}

#[test]
fn unknown_w_engine() {
    let (out, _) = solve("sensing.json", &["--engine", "unknown-w"]);
    assert_eq!(out.status, "optimal");
    assert_eq!(out.value, "1/4");
    let (capped, _) = solve("sensing.json", &["--engine", "unknown-w", "--radius-cap", "1"]);
    assert_eq!(capped.status, "heuristic");
}

#[test]
fn validation_failure_exits_2() {
    let out = projip(&["solve", data("bad_bounds.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bound order at index 0"));
    let missing = projip(&["solve", "/nonexistent/instance.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn engine_precondition_exits_3() {
    let file = data("open_quadratic.json");
    let out = projip(&["solve", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let bounded = projip(&["solve", file.to_str().unwrap(), "--engine", "bounded"]);
    assert_eq!(bounded.status.code(), Some(3));
    let (capped, _) = solve("open_quadratic.json", &["--cap-infinite", "4"]);
    assert_eq!(capped.x, Some(vec![3, 1]));
}

#[test]
fn verify_file() {
    let out = projip(&["verify", data("e1.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).trim_end().ends_with("MATCH"));

    let fault = projip(&["verify", data("e1.json").to_str().unwrap(), "--inject-fault"]);
    assert_eq!(fault.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&fault.stdout).contains("MISMATCH"));
}

#[test]
fn verify_batch() {
    let out = projip(&["verify", "--count", "100", "--n", "4", "--m", "2", "--delta", "2", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 102);
    assert!(text.lines().last().unwrap().contains("100/100 MATCH"));

    let out = projip(&["verify", "--count", "20", "--n", "6", "--m", "2", "--engine", "unknown-w"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn bench_csv() {
    let out = projip(&["bench", "--n", "2,4", "--m", "1", "--delta", "0,1", "--repetitions", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(projip_cli::CSV_HEADER));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 8);
    // Δ = 0: only the centre target exists.
    for r in rows.iter().filter(|r| r[2] == "0") {
        assert_eq!(r[12], "0");
    }
}
