use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mkfix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mkfix")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn run(cmd: &str, config: &str, text: &str) -> (TempDir, Output) {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), config, text);
    let out = mkfix(&[cmd, "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    (dir, out)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no {name} check"))
}

#[test]
fn verify_isometry_flags_meir_keeler() {
    let (dir, out) = run(
        "verify",
        "shift.json",
        r#"{"kind": "verify", "map": {"name": "shift", "offset": 1}, "alpha": {"kind": "constant", "value": 1}}"#,
    );
    assert_eq!(out.status.code(), Some(1));
    let report = json(&dir.path().join("verify_report.json"));
    let mk = check(&report, "meir_keeler");
    assert_eq!(mk["passed"], false);
    assert!(mk["violations"].as_u64().unwrap() > 0);
    assert_eq!(report["exit_code"], 1);
}

#[test]
fn verify_halving_is_clean() {
    let (dir, out) = run(
        "verify",
        "half.json",
        r#"{"kind": "verify", "map": {"name": "halving"}, "alpha": {"kind": "constant", "value": 1}}"#,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report = json(&dir.path().join("verify_report.json"));
    assert_eq!(report["violation_count"], 0);
    assert_eq!(report["settings"]["epsilon_cap"], 64);
}

#[test]
fn relation_matrix_counterexample_chain() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("rel.csv"), "a,b\n0,1\n1,0\n").unwrap();
    let cfg = write_config(
        dir.path(),
        "rel.json",
        r#"{"kind": "verify", "alpha": {"kind": "relation-matrix", "path": "rel.csv"}, "transitivity_n": 1, "output_dir": "out"}"#,
    );
    let out = mkfix(&["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&dir.path().join("out/verify_report.json"));
    let t = check(&report, "n_transitive");
    assert_eq!(t["detail"]["counterexample_labels"], serde_json::json!(["a", "b", "a"]));
}

#[test]
fn solve_bvp_unit_source() {
    let (dir, out) = run("solve", "bvp.json", r#"{"kind": "bvp", "source": {"name": "unit"}}"#);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("report.json"));
    assert_eq!(report["status"], "converged");
    assert_eq!(report["diagnostics"]["iterations"], 1);
    assert_eq!(report["result"]["grid_nodes"], 201);

    let mut reader = csv::Reader::from_path(dir.path().join("solution.csv")).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["t", "x"]);
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        let (t, x): (f64, f64) = (rec[0].parse().unwrap(), rec[1].parse().unwrap());
        assert!((x - (t - t * t * t) / 6.0).abs() < 1e-12, "t = {t}");
        rows += 1;
    }
    assert_eq!(rows, 201);
}

#[test]
fn solve_coupled_quarter_difference() {
    let (dir, out) = run(
        "solve",
        "coupled.json",
        r#"{"kind": "coupled", "coupled_map": {"name": "quarter-difference"}, "start": [1, 3]}"#,
    );
    assert_eq!(out.status.code(), Some(0));
    let report = json(&dir.path().join("report.json"));
    assert!(report["result"]["x_star"].as_f64().unwrap().abs() < 1e-10);
    assert!(report["result"]["y_star"].as_f64().unwrap().abs() < 1e-10);
    assert_eq!(report["result"]["diagonal"], true);
}

#[test]
fn solve_shift_hits_iteration_cap_with_full_trace() {
    let (dir, out) = run(
        "solve",
        "shift.json",
        r#"{"kind": "fixed-point", "map": {"name": "shift", "offset": 1}, "start": 0, "iteration": {"max_iterations": 25}}"#,
    );
    assert_eq!(out.status.code(), Some(1));
    let report = json(&dir.path().join("report.json"));
    assert_eq!(report["status"], "max_iterations");
    let trace = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("iter,point_repr,residual,alpha_ok,cauchy_window_max"));
    assert_eq!(lines.count(), 25);
}

#[test]
fn report_halving_trace_rate() {
    let (dir, out) = run("solve", "half.json", r#"{"kind": "fixed-point", "map": {"name": "halving"}, "start": 1}"#);
    assert_eq!(out.status.code(), Some(0));
    let out = mkfix(&["report", dir.path().join("trace.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rate: f64 = text.lines().find_map(|l| l.strip_prefix("rate estimate: ")).unwrap().parse().unwrap();
    assert!((rate - 0.5).abs() < 1e-9, "{text}");
    assert!(text.contains("residual monotone: pass"));
}

#[test]
fn report_empty_and_single_row() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    assert_eq!(mkfix(&["report", empty.to_str().unwrap()]).status.code(), Some(2));

    let one = dir.path().join("one.csv");
    fs::write(&one, "iter,point_repr,residual,alpha_ok,cauchy_window_max\n0,1,0.5,,0.5\n").unwrap();
    let out = mkfix(&["report", one.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("final residual: 5e-1"), "{text}");
    assert!(text.contains("rate estimate: n/a"), "{text}");
}

#[test]
fn config_errors_exit_two() {
    let missing = mkfix(&["verify", "--config", "/nonexistent/config.json"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(!missing.stderr.is_empty());
    let (_dir, bad) = run("solve", "bad.json", r#"{"kind": "fixed-point", "map": {"name": "warp"}}"#);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn cyclic_solve_reports_membership() {
    let (dir, out) = run(
        "solve",
        "cyc.json",
        r#"{"kind": "cyclic", "map": {"name": "negate-half"}, "alpha": {"kind": "cyclic", "sets": [[-1, 0], [0, 1]]}, "start": -1}"#,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&dir.path().join("report.json"));
    assert_eq!(report["result"]["membership"], serde_json::json!([true, true]));
    assert_eq!(report["result"]["follows_rotation"], true);
}

#[test]
fn verify_bvp_conditions() {
    let (dir, out) = run(
        "verify",
        "bvp.json",
        r#"{"kind": "bvp", "source": {"name": "linear", "mu": 0.5, "g": 1}, "bvp": {"grid_nodes": 41}}"#,
    );
    let report = json(&dir.path().join("verify_report.json"));
    for name in ["k1", "j1", "j2", "j3", "j4", "j5", "gauge"] {
        check(&report, name);
    }
    assert_eq!(check(&report, "k1")["detail"]["scope"], "sample-level");
    assert!(matches!(out.status.code(), Some(0 | 1)));
}
