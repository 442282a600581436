use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn capq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capq"))
        .args(args)
        .env_remove("CAPQ_THREADS")
        .output()
        .expect("binary runs")
}

/// Exit code and parsed report.
fn run(args: &[&str]) -> (i32, Value) {
    let out = capq(args);
    let report = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().expect("exit code"), report)
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn contains_number(v: &Value) -> bool {
    match v {
        Value::Number(_) => true,
        Value::Array(a) => a.iter().any(contains_number),
        Value::Object(m) => m.values().any(contains_number),
        _ => false,
    }
}

fn assert_error_only(report: &Value) {
    let results = report["results"].as_object().expect("results object");
    assert_eq!(results.keys().collect::<Vec<_>>(), ["error"], "{report}");
    assert!(!contains_number(&report["results"]));
}

#[test]
fn capacity_of_identity() {
    let (code, r) = run(&["capacity", "--channel", &data("id2.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["command"], "capacity");
    assert!((num(&r["results"]["value"]) - 1.0).abs() <= 1e-4);
    assert_eq!(r["seed"], 0);
    assert!(r.get("wall_time").is_none());
}

#[test]
fn two_copy_capacity_of_half_damping() {
    let (code, r) = run(&["capacity", "--channel", &data("ad_half.json"), "--copies", "2"]);
    assert_eq!(code, 0);
    assert!(num(&r["results"]["value"]).abs() <= 1e-3);
}

#[test]
fn input_digests_are_recorded() {
    let path = data("id2.json");
    let (_, r) = run(&["channel", "validate", &path]);
    let digest = hex::encode(Sha256::digest(std::fs::read(&path).unwrap()));
    assert_eq!(r["inputs"]["channel"], Value::String(digest));
    assert_eq!(r["command"], "channel validate");
    assert_eq!(r["results"]["valid"], true);
}

#[test]
fn timing_is_opt_in() {
    let (_, r) = run(&["--timing", "channel", "validate", &data("id2.json")]);
    assert!(num(&r["wall_time"]) >= 0.0);
}

#[test]
fn graph_bounds() {
    let (code, r) = run(&["graph", "--in", &data("c5.edges"), "--bounds"]);
    assert_eq!(code, 0);
    assert_eq!(num(&r["results"]["lower_bits"]), 1.0);
    assert!((num(&r["results"]["upper_bits"]) - 2.3219).abs() <= 1e-4);

    let (code, r) = run(&["graph", "--in", &data("petersen.dimacs")]);
    assert_eq!(code, 0);
    assert_eq!(num(&r["results"]["lower_bits"]), 2.0);
    assert_eq!(r["results"]["independence_number"], 4);
}

#[test]
fn graph_gram_and_channel_output() {
    let (code, r) = run(&["graph", "--in", &data("c5.edges"), "--gram"]);
    assert_eq!(code, 0);
    assert!((num(&r["results"]["alpha"]) - 0.618034).abs() <= 1e-6);
    assert!(num(&r["results"]["max_gram_defect"]) <= 1e-8);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("phi.json");
    let out_str = out.display().to_string();
    let (code, _) = run(&["graph", "--in", &data("c5.edges"), "--channel", &out_str]);
    assert_eq!(code, 0);
    let (code, r) = run(&["channel", "validate", &out_str]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["dim_in"], 5);
}

#[test]
fn strategy_certification() {
    let c5 = data("c5.edges");
    let (code, r) = run(&["graph", "--in", &c5, "--certify", &data("c5_classical.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["check"]["valid"], true);
    assert_eq!(r["results"]["certificate"]["certified_t"], 2);

    let (code, r) = run(&["graph", "--in", &c5, "--certify", &data("c5_corrupted.json")]);
    assert_eq!(code, 2);
    let violations = r["results"]["check"]["violations"].as_array().unwrap();
    assert!(violations.iter().any(|v| v["kind"] == "overlap"
        && v["i"] == 0
        && v["j"] == 1
        && v["v"] == 0
        && v["w"] == 1));
}

#[test]
fn graph_modes_are_exclusive() {
    assert_eq!(capq(&["graph", "--in", &data("c5.edges"), "--gram", "--bounds"]).status.code(), Some(64));
}

#[test]
fn directsum_checks() {
    let base = [
        "directsum",
        "--phi0",
        &data("id2.json"),
        "--phi1",
        &data("ad_half.json"),
        "--povm",
        &data("povm_z.json"),
        "--sigma",
        &data("sigma_3_4.json"),
    ]
    .map(String::from);
    let with = |extra: &[&str]| {
        let mut args: Vec<&str> = base.iter().map(String::as_str).collect();
        args.extend_from_slice(extra);
        run(&args)
    };

    let (code, r) = with(&[]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["weights"], serde_json::json!([0.75, 0.25]));
    assert_eq!(r["results"]["dim_out"], 4);

    let (code, r) = with(&["--check", "complement"]);
    assert_eq!(code, 0);
    assert!(num(&r["results"]["check"]["distance"]) <= 1e-8);

    let (code, r) = with(&["--check", "additivity"]);
    assert_eq!(code, 0);
    assert!((num(&r["results"]["check"]["lhs"]) - 0.75).abs() <= 1e-3);
    assert!((num(&r["results"]["check"]["rhs"]) - 0.75).abs() <= 1e-3);

    let (code, r) = with(&["--check", "bound"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["check"]["pass"], true);
}

#[test]
fn reduction_gap() {
    let (code, r) = run(&["reduce", "--verifier", &data("always_accept.circ")]);
    assert_eq!(code, 0);
    assert!(num(&r["results"]["capacity_estimate"]) >= 0.999);

    let (_, r) = run(&["reduce", "--verifier", &data("always_reject.circ")]);
    assert!(num(&r["results"]["capacity_estimate"]) <= 0.001);

    let (code, r) = run(&["reduce", "--verifier", &data("measure_proof.circ"), "--joint"]);
    assert_eq!(code, 0);
    assert!(num(&r["results"]["capacity_estimate"]) >= 0.999);
    assert!(num(&r["results"]["joint_experimental"]["capacity_estimate"]) >= 0.999);
}

#[test]
fn invalid_channel_is_a_validation_failure() {
    let (code, r) = run(&["capacity", "--channel", &data("not_tp.json")]);
    assert_eq!(code, 2);
    assert_error_only(&r);
}

#[test]
fn malformed_inputs_yield_no_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.display().to_string()
    };
    let truncated = write("truncated.json", r#"{"dim_in":2,"dim_out":2,"kraus":[{"rows":2"#);
    let bad_shape = write("shape.json", r#"{"dim_in":2,"dim_out":2,"kraus":[{"rows":2,"cols":2,"data":[[1,0]]}]}"#);
    let bad_graph = write("g.edges", "3 2\n0 1\n");
    let bad_circuit = write("v.circ", "H 0\nFOO 0\n");
    let missing = dir.path().join("nope.json").display().to_string();

    for args in [
        vec!["capacity", "--channel", truncated.as_str()],
        vec!["channel", "choi", bad_shape.as_str()],
        vec!["channel", "complement", missing.as_str()],
        vec!["graph", "--in", bad_graph.as_str()],
        vec!["reduce", "--verifier", bad_circuit.as_str()],
        vec!["graph", "--in", &data("c5.edges"), "--certify", truncated.as_str()],
    ] {
        let out = capq(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let r: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_error_only(&r);
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn usage_errors() {
    assert_eq!(capq(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(capq(&[]).status.code(), Some(64));
    assert_eq!(capq(&["capacity"]).status.code(), Some(64));
    assert_eq!(capq(&["capacity", "--channel", "x", "--copies", "3"]).status.code(), Some(64));
    assert_eq!(capq(&["--help"]).status.code(), Some(0));
}

#[test]
fn reports_are_deterministic() {
    let args = ["--seed", "5", "capacity", "--channel", &data("ad_half.json"), "--restarts", "6"];
    let first = capq(&args).stdout;
    assert_eq!(first, capq(&args).stdout);

    let mut threaded = vec!["--threads", "1"];
    threaded.extend_from_slice(&args);
    assert_eq!(first, capq(&threaded).stdout);

    let env = Command::new(env!("CARGO_BIN_EXE_capq"))
        .args(args)
        .env("CAPQ_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(first, env.stdout);

    let other = capq(&["--seed", "6", "capacity", "--channel", &data("ad_half.json"), "--restarts", "6"]);
    let (a, b): (Value, Value) = (
        serde_json::from_slice(&first).unwrap(),
        serde_json::from_slice(&other.stdout).unwrap(),
    );
    assert_eq!(a["seed"], 5);
    assert_eq!(b["seed"], 6);
}

#[test]
fn numbers_have_twelve_significant_digits() {
    let (_, r) = run(&["graph", "--in", &data("c5.edges")]);
    assert_eq!(r["results"]["upper_bits"], serde_json::json!(2.32192809489));
}
