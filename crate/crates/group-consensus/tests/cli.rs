//! CLI contract tests: exit codes, report shapes, CSV layout, determinism.

use std::path::{Path, PathBuf};

use group_consensus::cli::{self, EXIT_INFEASIBLE, EXIT_INPUT_ERROR, EXIT_OK};

fn scenario(name: &str) -> String {
    format!("{}/scenarios/{}", env!("CARGO_MANIFEST_DIR"), name)
}

fn run(args: &[&str]) -> i32 {
    let mut full = vec!["gcl".to_string()];
    full.extend(args.iter().map(|s| s.to_string()));
    cli::run(full)
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gcl-cli-{}-{}", tag, std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn analyze_feasible_toy() {
    let dir = tmp_dir("analyze");
    let out = dir.join("report.txt");
    let code = run(&[
        "analyze",
        &scenario("toy.json"),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("feasible (group consensusable): YES"));
    assert!(text.contains("graph m = 1, quotient m = 1"));
    assert!(text.contains("delta_group: 0.25"));
    assert!(text.contains("delta_pattern: 1"));
}

#[test]
fn analyze_json_report() {
    let dir = tmp_dir("analyze-json");
    let out = dir.join("report.json");
    let code = run(&[
        "analyze",
        &scenario("toy.json"),
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(parsed["feasible"], serde_json::Value::Bool(true));
    assert_eq!(parsed["forest_size_graph"], serde_json::json!(1));
    let dg = parsed["delta_group"].as_f64().unwrap();
    assert!((dg - 0.25).abs() < 1e-9);
}

#[test]
fn analyze_infeasible_exits_2() {
    let code = run(&["analyze", &scenario("infeasible.json")]);
    assert_eq!(code, EXIT_INFEASIBLE);
}

#[test]
fn analyze_malformed_exits_1() {
    let dir = tmp_dir("malformed");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ this is not json").unwrap();
    let code = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT_ERROR);

    let code = run(&["analyze", dir.join("missing.json").to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT_ERROR);
}

#[test]
fn simulate_toy2_boundary_delta_is_applicable() {
    // delta = 1.0 equals delta_pattern for this graph; the boundary is
    // admissible, so the pattern check must run and pass.
    let dir = tmp_dir("sim-toy2");
    let code = run(&[
        "simulate",
        &scenario("toy2_integrators.json"),
        "--out-dir",
        dir.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code, EXIT_OK);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["prediction_applicable"], serde_json::json!(true));
    assert_eq!(summary["prediction_pass"], serde_json::json!(true));
    assert!(summary["final_disagreement"].as_f64().unwrap() <= 1e-3);

    let csv = std::fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    // 1 + n * L columns with n = 1, L = 4
    assert_eq!(header.split(',').count(), 5);
    assert_eq!(header, "t,x1_1,x2_1,x3_1,x4_1");
    let rows = lines.count();
    assert!(rows <= 5001, "CSV must be decimated, got {} rows", rows);
}

#[test]
fn simulate_auto_group_skips_pattern() {
    let dir = tmp_dir("sim-weak");
    let code = run(&[
        "simulate",
        &scenario("oscillator10.json"),
        "--delta",
        "auto-group",
        "--t-final",
        "80",
        "--dt",
        "0.01",
        "--out-dir",
        dir.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code, EXIT_OK);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["prediction_applicable"], serde_json::json!(false));
    assert!(summary["final_disagreement"].as_f64().unwrap() <= 1e-3);
    assert_eq!(summary["delta_source"], serde_json::json!("auto-group"));
}

#[test]
fn simulate_validation_errors_exit_1() {
    let dir = tmp_dir("sim-bad");
    let code = run(&[
        "simulate",
        &scenario("toy.json"),
        "--dt",
        "0",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_INPUT_ERROR);

    let code = run(&[
        "simulate",
        &scenario("toy.json"),
        "--delta",
        "nonsense",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_INPUT_ERROR);
}

#[test]
fn simulate_infeasible_auto_delta_exits_2_without_output() {
    let dir = tmp_dir("sim-infeasible");
    let out_dir = dir.join("never-created");
    let code = run(&[
        "simulate",
        &scenario("infeasible.json"),
        "--delta",
        "auto-group",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_INFEASIBLE);
    assert!(
        !out_dir.exists(),
        "infeasible + auto delta must exit before simulating"
    );
}

#[test]
fn simulate_infeasible_explicit_delta_runs() {
    // An explicit coupling strength is honored even when the topology is
    // infeasible; the run documents the failure to consense.
    let dir = tmp_dir("sim-infeasible-explicit");
    let code = run(&[
        "simulate",
        &scenario("infeasible.json"),
        "--delta",
        "1.0",
        "--t-final",
        "50",
        "--dt",
        "0.05",
        "--out-dir",
        dir.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code, EXIT_OK);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert!(
        summary["final_disagreement"].as_f64().unwrap() > 1e-3,
        "infeasible topology must not consense"
    );
}

#[test]
fn gen_is_deterministic_and_parses() {
    let dir = tmp_dir("gen");
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    assert_eq!(
        run(&["gen", "--clusters", "3,3,3", "--seed", "7", "--out", a.to_str().unwrap()]),
        EXIT_OK
    );
    assert_eq!(
        run(&["gen", "--clusters", "3,3,3", "--seed", "7", "--out", b.to_str().unwrap()]),
        EXIT_OK
    );
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b, "same seed must emit identical files");

    // The generated scenario must be analyzable (feasibility may vary).
    let code = run(&["analyze", a.to_str().unwrap()]);
    assert!(code == EXIT_OK || code == EXIT_INFEASIBLE);

    let c = dir.join("c.json");
    assert_eq!(
        run(&["gen", "--clusters", "3,3,3", "--seed", "8", "--out", c.to_str().unwrap()]),
        EXIT_OK
    );
    assert_ne!(bytes_a, std::fs::read(&c).unwrap());
}

#[test]
fn gen_rejects_zero_cluster() {
    let dir = tmp_dir("gen-bad");
    let out = dir.join("never.json");
    let code = run(&["gen", "--clusters", "3,0,3", "--seed", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT_ERROR);
}

#[test]
fn verify_small_run_passes() {
    assert_eq!(run(&["verify", "--seeds", "2"]), EXIT_OK);
}

#[test]
fn verify_with_injected_fault_fails() {
    assert_ne!(run(&["verify", "--seeds", "2", "--inject-fault"]), EXIT_OK);
}

#[test]
fn built_binary_smoke() {
    let exe = Path::new(env!("CARGO_BIN_EXE_gcl"));
    let output = std::process::Command::new(exe)
        .arg("analyze")
        .arg(scenario("toy.json"))
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("feasible (group consensusable): YES"));
}
