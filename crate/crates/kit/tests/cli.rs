use std::fs;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn kit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_godbersen-kit")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn simplex_ratio_prints_the_formula() {
    let out = kit(&["simplex-ratio", "--n", "3", "--lambda", "1/2"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["ratio"], "3/8");
}

#[test]
fn mixed_volume_of_a_triangle_and_its_reflection() {
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("k.json");
    let t = dir.path().join("t.json");
    fs::write(&k, json!({"dim": 2, "vertices": [[0, 0], [1, 0], [0, 1]]}).to_string()).unwrap();
    fs::write(&t, json!({"dim": 2, "vertices": [[0, 0], [-1, 0], [0, -1]]}).to_string()).unwrap();
    for method in ["interpolation", "polarization"] {
        let out = kit(&["mixed-volume", "--body", k.to_str().unwrap(), "--body", t.to_str().unwrap(), "--j", "1", "--method", method]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(stdout_json(&out)["value"], "1");
    }
}

#[test]
fn reduce_planar_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("hex.json");
    let trace = dir.path().join("trace.json");
    let hexagon = json!({"dim": 2, "vertices": [[2, 0], [1, 2], [-1, 2], [-2, 0], [-1, -2], [1, -2]]});
    fs::write(&input, hexagon.to_string()).unwrap();
    let out = kit(&["reduce-planar", "--input", input.to_str().unwrap(), "--lambda", "1/3", "--trace", trace.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["steps"], 3);
    assert_eq!(v["monotone"], true);
    let steps: Value = serde_json::from_str(&fs::read_to_string(trace).unwrap()).unwrap();
    assert_eq!(steps.as_array().unwrap().len(), 3);
    assert_eq!(steps[2]["after"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_kl_reports_pass() {
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("k.json");
    fs::write(&k, json!({"dim": 2, "vertices": [[0, 0], [1, 0], [0, 1]]}).to_string()).unwrap();
    let out = kit(&["verify-kl", "--k", k.to_str().unwrap(), "--l", k.to_str().unwrap(), "--theta", "1/2"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["meta"]["equality"], true);
}

#[test]
fn experiment_subcommand_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let out_path = dir.path().join("run.jsonl");
    fs::write(&cfg, json!({"kind": "strange", "n": 2, "trials": 2, "output_path": out_path}).to_string()).unwrap();
    let out = kit(&["strange", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(&out_path).unwrap().lines().count(), 2);
    assert!(dir.path().join("run.csv").exists());
    assert!(dir.path().join("run.summary.csv").exists());
}

#[test]
fn config_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, json!({"kind": "kl", "n": 2, "output_path": "x"}).to_string()).unwrap();
    // Subcommand and config kind disagree.
    assert_eq!(kit(&["godbersen", "--config", cfg.to_str().unwrap()]).status.code(), Some(3));
    // Missing theta grid.
    assert_eq!(kit(&["kl", "--config", cfg.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(kit(&["kl", "--config", "/nonexistent/cfg.json"]).status.code(), Some(3));
    assert_eq!(kit(&["no-such-command"]).status.code(), Some(3));
}

#[test]
fn origin_outside_body_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("k.json");
    fs::write(&k, json!({"dim": 2, "vertices": [[1, 1], [2, 1], [1, 2]]}).to_string()).unwrap();
    let out = kit(&["verify-kl", "--k", k.to_str().unwrap(), "--l", k.to_str().unwrap(), "--theta", "1/2"]);
    assert_eq!(out.status.code(), Some(3));
}
