use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn ddt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn four_agents() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data/four_agents.json")
        .to_string_lossy()
        .into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const LINE: &str = r#"{
  "vertices": ["s", "m", "t"],
  "edges": [{"u": "s", "v": "m", "len": 2}, {"u": "m", "v": "t", "len": 2}],
  "source": "s", "target": "t",
  "agents": [{"id": "x", "speed": 1, "vertices": ["s", "m", "t"], "start": "t"}]
}"#;

const SPLIT: &str = r#"{
  "vertices": ["s", "m", "n", "t"],
  "edges": [{"u": "s", "v": "m", "len": 1}, {"u": "m", "v": "n", "len": 1}, {"u": "n", "v": "t", "len": 1}],
  "source": "s", "target": "t",
  "agents": [{"id": "a", "speed": 1, "vertices": ["s", "m"]}, {"id": "b", "speed": 1, "vertices": ["n", "t"]}]
}"#;

#[test]
fn solve_solve_example_and_verify_its_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let sched = dir.path().join("sched.json");
    let out = ddt(&["solve", &four_agents(), "--decimal", "--schedule-out", s(&sched)]);
    assert!(out.status.success());
    let report = json(&out);
    assert_eq!(report["algorithm"], "tw");
    assert_eq!(report["optimum"], "5");
    assert_eq!(report["optimum_decimal"], 5.0);

    let out = ddt(&["verify", &four_agents(), s(&sched)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["delivery_time"], "5");

    let text = fs::read_to_string(&sched).unwrap().replacen("\"blue\"", "\"green\"", 1);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, text).unwrap();
    let out = ddt(&["verify", &four_agents(), s(&bad)]);
    assert_ne!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["feasible"], false);
    assert!(!report["violations"].as_array().unwrap().is_empty());
}

#[test]
fn order_solver_on_example() {
    let out = ddt(&["solve", &four_agents(), "--algo", "order", "--order", "blue,green,red"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["optimum"], "5");
}

#[test]
fn fixed_start_mode_rejects_wrong_start() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("line.json");
    fs::write(&inst, LINE).unwrap();
    let sched = dir.path().join("sched.json");
    assert!(ddt(&["solve", s(&inst), "--schedule-out", s(&sched)]).status.success());
    assert_eq!(ddt(&["verify", s(&inst), s(&sched), "--mode", "sp"]).status.code(), Some(0));
    assert_ne!(ddt(&["verify", s(&inst), s(&sched), "--mode", "fp"]).status.code(), Some(0));
}

#[test]
fn infeasible_is_a_successful_answer() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("split.json");
    fs::write(&inst, SPLIT).unwrap();
    let out = ddt(&["solve", s(&inst)]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["optimum"], "inf");
    assert!(report["schedule"].is_null());
}

#[test]
fn usage_and_precondition_errors() {
    assert_eq!(ddt(&["solve", &four_agents(), "--algo", "bogus"]).status.code(), Some(2));
    assert_eq!(ddt(&["gen", "random-graph", "--vertices", "1"]).status.code(), Some(2));
    let out = ddt(&["solve", &four_agents(), "--algo", "path"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a path"));
}

#[test]
fn generation_is_deterministic() {
    let a = ddt(&["gen", "random-graph", "--seed", "7"]);
    let b = ddt(&["gen", "random-graph", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, ddt(&["gen", "random-graph", "--seed", "8"]).stdout);
}

#[test]
fn tree_intersection_output_passes_the_tree_check() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..5 {
        let file = dir.path().join(format!("t{seed}.json"));
        let seed = seed.to_string();
        assert!(ddt(&["gen", "tree-intersection", "--seed", &seed, "--out", s(&file)]).status.success());
        assert_eq!(json(&ddt(&["isect", s(&file)]))["forest"], true);
        let algo = json(&ddt(&["solve", s(&file)]))["algorithm"].clone();
        assert!(algo == "tree" || algo == "path", "{algo}");
    }
}

#[test]
fn gadget_generation() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.json");
    let out = ddt(&["gen", "gadget", "--p", "3,2,1", "--k", "2", "--out", s(&file)]);
    assert!(out.status.success());
    let inst: Value = serde_json::from_slice(&fs::read(&file).unwrap()).unwrap();
    assert_eq!(inst["agents"].as_array().unwrap().len(), 26);
    let side: Value = serde_json::from_slice(&fs::read(dir.path().join("g.sidecar.json")).unwrap()).unwrap();
    assert_eq!(side["d"], "216");
    assert_eq!(side["agents"]["total"], 26);
    assert_eq!(json(&ddt(&["solve", s(&file)]))["algorithm"], "path");
    assert_eq!(ddt(&["gen", "gadget", "--p", "1,2,3", "--k", "2"]).status.code(), Some(2));
}

#[test]
fn isect_dot() {
    let out = ddt(&["isect", &four_agents(), "--dot"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("graph intersection {"));
    assert!(text.contains("\"green\" -- \"red\""));
}

fn corpus(dir: &Path, kind: &str, n: usize) -> PathBuf {
    for seed in 0..n {
        let file = dir.join(format!("{kind}-{seed:02}.json"));
        let seed = seed.to_string();
        assert!(ddt(&["gen", kind, "--seed", &seed, "--out", s(&file)]).status.success());
    }
    dir.to_owned()
}

fn csv_rows(out: &Output) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(out.stdout.as_slice())
        .records()
        .map(Result::unwrap)
        .collect()
}

#[test]
fn bench_random_paths_agree() {
    let dir = tempfile::tempdir().unwrap();
    let root = corpus(dir.path(), "random-path", 20);
    let out = Command::new(env!("CARGO_BIN_EXE_ddt"))
        .args(["bench", s(&root), "--algos", "path,oracle", "--repeat", "2"])
        .env("DDT_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 40);
    assert!(rows.iter().all(|r| &r[10] == "agree"));
    assert!(rows.windows(2).all(|w| w[0][0] <= w[1][0]));
    assert!(String::from_utf8_lossy(&out.stderr).contains("path vs oracle: 20/20"));
}

#[test]
fn bench_empty_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let out = ddt(&["bench", s(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    assert!(csv_rows(&out).is_empty());
    assert_eq!(ddt(&["bench", s(dir.path()), "--algos", "order"]).status.code(), Some(2));
}

#[test]
fn bench_records_precondition_errors() {
    let dir = tempfile::tempdir().unwrap();
    let root = corpus(dir.path(), "random-path", 2);
    fs::copy(four_agents(), root.join("four_agents.json")).unwrap();
    let out = ddt(&["bench", s(&root), "--algos", "path,tw", "--workers", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out);
    let err: Vec<_> = rows.iter().filter(|r| &r[3] == "error").collect();
    assert_eq!(err.len(), 1);
    assert_eq!(&err[0][0], "four_agents.json");
    assert!(err[0][11].contains("not a path"));
    let tw = rows.iter().find(|r| &r[0] == "four_agents.json" && &r[1] == "tw").unwrap();
    assert_eq!(&tw[4], "5");
    assert_eq!(&tw[2], "tw");
    assert_eq!(ddt(&["bench", s(&root), "--algos", "path,tw", "--fail-on-error"]).status.code(), Some(1));
}
