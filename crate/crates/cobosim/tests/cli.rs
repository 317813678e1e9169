//! End-to-end runs of the installed binary: shapes, bytes, and exit codes.

use std::io::Write;
use std::process::{Command, Output};

fn cobosim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cobosim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn null_preset_hom4_reports_the_analytic_time() {
    let out = cobosim(&["null", "--preset", "hom4"]);
    let v = stdout_json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "null");
    assert_eq!(v["stay"], "2:2");
    let t_star = 0.22672492052927723;
    assert!((v["predicted"].as_f64().unwrap() - t_star).abs() < 1e-9);
    let found = v["found"].as_array().unwrap();
    assert!(!found.is_empty());
    assert!((found[0].as_f64().unwrap() - t_star).abs() < 1e-9);
    for r in v["residuals"].as_array().unwrap() {
        assert!(r.as_f64().unwrap() <= 1e-10);
    }
}

#[test]
fn every_unperturbed_preset_nulls_at_the_predicted_time() {
    let presets: &[&[&str]] = &[
        &["hom4"],
        &["nboson", "1"],
        &["nboson", "3"],
        &["general", "2", "1"],
        &["shifted", "2", "1", "1", "0"],
        &["threemode", "2", "1"],
        &["dicke"],
    ];
    for preset in presets {
        let mut args = vec!["null", "--preset"];
        args.extend_from_slice(preset);
        let v = stdout_json(&cobosim(&args));
        let predicted = v["predicted"].as_f64().unwrap();
        let hit = v["found"]
            .as_array()
            .unwrap()
            .iter()
            .any(|t| (t.as_f64().unwrap() - predicted).abs() <= 1e-10);
        assert!(hit, "preset {preset:?}: no found time within 1e-10 of {predicted}");
    }
}

#[test]
fn trace_csv_bytes_are_exact_and_deterministic() {
    let window = std::f64::consts::PI / (4.0 * 3f64.sqrt());
    let w = window.to_string();
    let args = ["trace", "--preset", "hom4", "--steps", "5", "--window", &w];
    let out = cobosim(&args);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0], "t,P[0:4],P[2:2],P[4:0]");
    assert_eq!(
        lines[1],
        "0.00000000000e0,0.00000000000e0,1.00000000000e0,0.00000000000e0"
    );
    // the middle grid point is the null time π/(8√3)
    let cells: Vec<f64> = lines[3].split(',').map(|s| s.parse().unwrap()).collect();
    assert!(cells[2] <= 1e-12, "stay probability {}", cells[2]);
    assert!((cells[1] - 0.5).abs() <= 1e-10);
    assert!((cells[3] - 0.5).abs() <= 1e-10);
    assert!(text.ends_with('\n'));

    let again = cobosim(&args);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn eigen_reports_the_chain_spectrum() {
    let v = stdout_json(&cobosim(&["eigen", "--preset", "general", "2", "1"]));
    let eigs: Vec<f64> = v["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(eigs.len(), 3);
    assert!((eigs[0] + 4.0).abs() < 1e-9);
    assert!(eigs[1].abs() < 1e-9);
    assert!((eigs[2] - 4.0).abs() < 1e-9);
    assert_eq!(v["block"].as_array().unwrap().len(), 3);
    assert_eq!(v["eigenvectors"].as_array().unwrap().len(), 3);
}

#[test]
fn scenario_file_with_superposition_and_explicit_times() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(
        file,
        r#"{{
  "modes": 2,
  "terms": [
    {{"coeff": [1.0, 0.0], "raise": [2, 0], "lower": [0, 2]}},
    {{"coeff": [1.0, 0.0], "raise": [0, 2], "lower": [2, 0]}}
  ],
  "initial": {{"superposition": [
    {{"occupation": [2, 0], "amplitude": [1.0, 0.0]}},
    {{"occupation": [0, 2], "amplitude": [0.0, 1.0]}}
  ]}},
  "time": {{"at": [0.0]}}
}}"#
    )
    .unwrap();
    let path = file.path().to_str().unwrap().to_string();
    let v = stdout_json(&cobosim(&["state", "--scenario", &path]));
    assert_eq!(v["command"], "state");
    let states = v["states"].as_array().unwrap();
    assert_eq!(states.len(), 1);
    let amps = states[0]["amplitudes"].as_array().unwrap();
    assert_eq!(amps.len(), 2);
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    // block order (0:2, 2:0); at t = 0 the normalized input comes back exactly
    assert!((amps[0][1].as_f64().unwrap() - inv).abs() < 1e-9);
    assert!((amps[1][0].as_f64().unwrap() - inv).abs() < 1e-9);
}

#[test]
fn outcome_outside_the_block_warns_and_stays_zero() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(
        file,
        r#"{{
  "modes": 2,
  "terms": [{{"coeff": [1.0, 0.0], "raise": [2, 0], "lower": [0, 2]}}],
  "initial": {{"occupation": [2, 2]}},
  "outcomes": [[2, 2], [3, 1]],
  "time": {{"max": 0.5, "steps": 3}}
}}"#
    )
    .unwrap();
    let path = file.path().to_str().unwrap().to_string();
    let out = cobosim(&["trace", "--scenario", &path]);
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("warning"), "stderr: {stderr}");
    assert!(stderr.contains("3:1"));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,P[2:2],P[3:1]");
    for line in &lines[1..] {
        assert!(line.ends_with(",0.00000000000e0"), "row: {line}");
    }
}

#[test]
fn out_flag_writes_the_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = cobosim(&["null", "--preset", "hom4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn perturbed_null_search_reports_no_found_times() {
    let out = cobosim(&["null", "--preset", "perturbed", "0.1", "--window", "1.814"]);
    let v = stdout_json(&out);
    assert!(v["found"].as_array().unwrap().is_empty());
    assert!(!v["minima"].as_array().unwrap().is_empty());
    for m in v["minima"].as_array().unwrap() {
        assert!((m["probability"].as_f64().unwrap() - 2.912621359223e-2).abs() < 1e-9);
    }
}

#[test]
fn validation_capacity_and_io_exit_codes() {
    // unknown command
    let out = cobosim(&["spectrum", "--preset", "hom4"]);
    assert_eq!(out.status.code(), Some(2));
    // unknown preset
    let out = cobosim(&["null", "--preset", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    // neither preset nor scenario
    let out = cobosim(&["null"]);
    assert_eq!(out.status.code(), Some(2));
    // unreadable scenario path
    let out = cobosim(&["null", "--scenario", "/nonexistent/scenario.json"]);
    assert_eq!(out.status.code(), Some(4));
    // malformed document
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "{{not json").unwrap();
    let out = cobosim(&["null", "--scenario", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    // closure walks past the occupation cap
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(
        file,
        r#"{{
  "modes": 2,
  "terms": [{{"coeff": [1.0, 0.0], "raise": [1, 0], "lower": [0, 1]}}],
  "initial": {{"occupation": [90, 90]}},
  "time": {{"max": 1.0, "steps": 2}}
}}"#
    )
    .unwrap();
    let out = cobosim(&["trace", "--scenario", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}
