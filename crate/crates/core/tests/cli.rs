mod common;

use std::path::PathBuf;
use std::process::{Command, Output};

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn data(name: &str) -> String {
    manifest_dir().join("tests/data").join(name).display().to_string()
}

fn golden(name: &str) -> String {
    let path = manifest_dir().join("tests/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn riskgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riskgraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[track_caller]
fn assert_golden(args: &[&str], name: &str) {
    let out = riskgraph(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), golden(name), "riskgraph {args:?}");
}

#[test]
fn matrix_goldens() {
    assert_golden(&["matrix", "--paper-literal"], "matrix_paper_literal.txt");
    assert_golden(&["matrix"], "matrix_canonical.txt");
    assert_golden(&["matrix", "--closure"], "closure_canonical.txt");
    assert_golden(&["matrix", "--closure", "--paper-literal"], "closure_paper_literal.txt");
}

#[test]
fn literal_closure_reports_column_agreement() {
    let out = riskgraph(&["matrix", "--closure", "--paper-literal"]);
    assert!(stderr(&out).contains("column N5 matches"));
}

#[test]
fn graph_dot_golden_and_grammar() {
    assert_golden(&["graph", "--canonical", "--closure", "--dot"], "graph_canonical_closure.dot");
    let plain = stdout(&riskgraph(&["graph", "--dot"]));
    assert_eq!(common::check_dot(&plain), Ok((6, 7)));
    let closed = golden("graph_canonical_closure.dot");
    assert_eq!(common::check_dot(&closed), Ok((6, 10)));
    assert_eq!(closed.matches("[style=dashed]").count(), 3);
}

#[test]
fn graph_from_file() {
    let out = riskgraph(&["graph", "--register", &data("extended_graph.json"), "--closure"]);
    assert_eq!(out.status.code(), Some(0));
    let dot = stdout(&out);
    assert_eq!(common::check_dot(&dot), Ok((7, 15)));
    assert!(dot.contains("\"N4\" -> \"N6\" [style=dashed];"));

    // a plain register has no factors and falls back to the built-in model
    let fallback = riskgraph(&["graph", "--register", &data("microwave.json")]);
    assert_eq!(stdout(&fallback), stdout(&riskgraph(&["graph"])));
}

#[test]
fn assess_goldens() {
    let reg = data("microwave.json");
    assert_golden(&["assess", &reg], "assess_microwave.txt");
    assert_golden(&["assess", &reg, "--csv"], "assess_microwave.csv");
    assert_golden(
        &["report", &reg, "--residual", "--trials", "20000", "--seed", "42"],
        "report_microwave_residual.txt",
    );
}

#[test]
fn predict_is_reproducible() {
    let reg = data("microwave.json");
    let args = ["predict", reg.as_str(), "--trials", "100000", "--seed", "7"];
    assert_golden(&args, "predict_microwave.json");
    assert_eq!(riskgraph(&args).stdout, riskgraph(&args).stdout);

    let v: serde_json::Value = serde_json::from_str(&golden("predict_microwave.json")).unwrap();
    assert_eq!(v["sampled"]["rng"], "chacha8-seed_from_u64");
    assert_eq!(v["model"], "independent risks");
}

#[test]
fn predict_analytic_only() {
    let out = riskgraph(&["predict", &data("microwave.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["sampled"].is_null());
    assert!((v["analytic"].as_f64().unwrap() - 0.2234510915).abs() < 1e-12);
}

#[test]
fn validate_exit_codes() {
    let ok = riskgraph(&["validate", &data("microwave.json")]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout(&ok), "ok: 5 risks valid\n");

    let bad = riskgraph(&["validate", &data("bad.json")]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(stdout(&bad), golden("validate_bad.txt"));
    assert!(stdout(&bad).contains("0 < x < 100"));
}

#[test]
fn invalid_register_fails_assessment() {
    let out = riskgraph(&["assess", &data("bad.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(stderr(&out).contains("probability must satisfy 0 < x < 100"));
}

#[test]
fn input_errors_exit_2() {
    let missing = riskgraph(&["assess", "/nonexistent/register.json"]);
    assert_eq!(missing.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"project\": \"x\",\n \"risks\": [}").unwrap();
    let out = riskgraph(&["validate", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let extra = dir.path().join("extra.json");
    std::fs::write(
        &extra,
        r#"{"project": "x", "risks": [{"id": "A", "type": "Cost", "probability": 5, "frequency": "Seldom", "owner": "me"}]}"#,
    )
    .unwrap();
    let strict = riskgraph(&["assess", extra.to_str().unwrap()]);
    assert_eq!(strict.status.code(), Some(2));
    assert!(stderr(&strict).contains("risks[0].owner"));
    let lenient = riskgraph(&["assess", extra.to_str().unwrap(), "--lenient"]);
    assert_eq!(lenient.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_3() {
    for args in [&["bogus"][..], &["matrix", "--nope"], &["assess"], &[]] {
        let out = riskgraph(args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(stderr(&out).contains("Usage"), "{args:?}");
    }
    let zero = riskgraph(&["predict", &data("microwave.json"), "--trials", "0"]);
    assert_eq!(zero.status.code(), Some(3));
}

#[test]
fn regression_warning_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("worse.json");
    std::fs::write(
        &path,
        r#"{"project": "x", "risks": [{"id": "A", "type": "Cost", "probability": 5, "frequency": "Seldom",
            "mitigation": {"description": "oops", "post_frequency": "Likely"}}]}"#,
    )
    .unwrap();
    let out = riskgraph(&["assess", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("raises frequency from Seldom to Likely"));
    assert!(!stdout(&out).contains("warning"));
}

#[test]
fn in_process_run_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = riskgraph::cli::run(["riskgraph", "matrix", "--paper-literal"], &mut out, &mut err);
    assert_eq!(code, riskgraph::cli::ExitCode::Success);
    assert_eq!(String::from_utf8(out).unwrap(), golden("matrix_paper_literal.txt"));
}
