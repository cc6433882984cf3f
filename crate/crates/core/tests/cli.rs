//! End-to-end runs of the binary: outputs, files and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use rosom::model::{read_problem, Solution};

fn rosom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rosom")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(out: &str, key: &str) -> String {
    out.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
        .unwrap_or_else(|| panic!("no {key} in {out}"))
        .to_string()
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_str().unwrap().to_string();
    let mut all = vec!["generate"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--out", &path]);
    let o = rosom(&all);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

#[test]
fn toy1_solve_then_truevalue() {
    let dir = tempfile::tempdir().unwrap();
    let p = generate(dir.path(), "toy1.json", &["toy1"]);
    let sol = dir.path().join("sol.json");
    let o = rosom(&["solve", &p, "--method", "rcr", "--out", sol.to_str().unwrap(), "--no-timing"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!((field(&out, "v_method").parse::<f64>().unwrap() - 2.0).abs() < 1e-6);
    assert_eq!(field(&out, "status"), "optimal");
    assert!(!out.contains("elapsed_ms"));

    let s: Solution = serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    assert!((s.value - 2.0).abs() < 1e-6);
    let o = rosom(&["truevalue", &p, sol.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!((field(&stdout(&o), "v_true").parse::<f64>().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for ex in ["regression", "brachy", "random"] {
        let a = generate(dir.path(), "a.json", &[ex, "--seed", "7"]);
        let first = std::fs::read(&a).unwrap();
        let b = generate(dir.path(), "b.json", &[ex, "--seed", "7"]);
        assert_eq!(first, std::fs::read(&b).unwrap(), "{ex}");
        read_problem(Path::new(&b)).unwrap();
    }
    let a = std::fs::read(generate(dir.path(), "c.json", &["random", "--seed", "1"])).unwrap();
    let b = std::fs::read(generate(dir.path(), "d.json", &["random", "--seed", "2"])).unwrap();
    assert_ne!(a, b);
}

#[test]
fn compare_is_byte_identical_without_timing() {
    let dir = tempfile::tempdir().unwrap();
    let p = generate(dir.path(), "toy2.json", &["toy2"]);
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = rosom(&[
            "compare", &p, "--methods", "rcr,aarcr,eorlc,alg1,alg2,combined", "--no-timing", "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read_to_string(out).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let mut lines = a.lines();
    assert_eq!(lines.next(), Some("method,iterations,solve_millis,v_method,v_true,status"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        assert_eq!(r[5], "optimal", "{r:?}");
        let v_true: f64 = r[4].parse().unwrap();
        assert!(v_true <= r[3].parse::<f64>().unwrap() + 1e-6);
        if !["rcr", "aarcr"].contains(&r[0]) {
            assert!((v_true - 2.0).abs() < 1e-5, "{r:?}");
        }
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let reg = generate(dir.path(), "reg.json", &["regression", "--n", "4"]);
    let toy = generate(dir.path(), "toy2.json", &["toy2"]);

    assert_eq!(rosom(&["solve", &reg, "--method", "vertex"]).status.code(), Some(3));
    assert_eq!(rosom(&["solve", &toy, "--method", "alg1", "--max-iter", "1"]).status.code(), Some(2));
    assert_eq!(rosom(&["solve", "/nonexistent.json", "--method", "rcr"]).status.code(), Some(1));
    assert_eq!(rosom(&["solve", &toy, "--method", "bogus"]).status.code(), Some(1));
    assert_eq!(rosom(&["frobnicate"]).status.code(), Some(1));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(rosom(&["solve", bad.to_str().unwrap(), "--method", "rcr"]).status.code(), Some(1));
}

#[test]
fn compare_keeps_going_past_incompatible_methods() {
    let dir = tempfile::tempdir().unwrap();
    let reg = generate(dir.path(), "reg.json", &["regression", "--n", "4"]);
    let o = rosom(&["compare", &reg, "--methods", "vertex,eorlc", "--no-timing"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("vertex,,,,,incompatible"), "{out}");
    assert!(out.lines().any(|l| l.starts_with("eorlc,") && l.ends_with(",optimal")));

    let o = rosom(&["compare", &reg, "--methods", "vertex"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn trace_file_has_one_row_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let p = generate(dir.path(), "toy2.json", &["toy2"]);
    let trace = dir.path().join("trace.csv");
    let o = rosom(&["solve", &p, "--method", "alg1", "--trace", trace.to_str().unwrap(), "--no-timing"]);
    assert_eq!(o.status.code(), Some(0));
    let iters: usize = field(&stdout(&o), "iterations").parse().unwrap();
    let csv = std::fs::read_to_string(trace).unwrap();
    assert_eq!(csv.lines().count(), iters + 1);
}
