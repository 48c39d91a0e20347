use std::process::{Command, Output};

use serde_json::Value;

const UNIFORM: &str = r#"{"weights":[0.5,0.5],"values":[1,1]}"#;
const SKEWED: &str = r#"{"weights":[0.5,0.5],"values":[1.6,0.4]}"#;

fn expgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expgeo"))
        .args(args)
        .env_remove("EXPGEO_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scalar(out: &Output) -> f64 {
    stdout(out).trim().parse().unwrap()
}

#[test]
fn norm_of_two_point_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    let v = dir.path().join("v.json");
    std::fs::write(&p, UNIFORM).unwrap();
    std::fs::write(&v, r#"{"weights":[0.5,0.5],"values":[1,-1]}"#).unwrap();
    let out = expgeo(&[
        "norm",
        "--density",
        p.to_str().unwrap(),
        "--variable",
        v.to_str().unwrap(),
        "--kind",
        "b",
    ]);
    let expected = 1.0 / (2.0 + 3f64.sqrt()).ln();
    assert!((scalar(&out) - expected).abs() < 1e-10);
    assert!((expected - 0.759326).abs() < 1e-6);
}

#[test]
fn kl_of_identical_densities_is_zero() {
    let out = expgeo(&["kl", "--q1", SKEWED, "--q2", SKEWED]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["direct"].as_f64().unwrap(), 0.0);
    assert!(v["chart"].as_f64().unwrap().abs() < 1e-15);
}

#[test]
fn kl_csv_and_custom_base() {
    let base = r#"{"weights":[0.5,0.5],"values":[0.5,1.5]}"#;
    let out = expgeo(&["kl", "--q1", SKEWED, "--q2", UNIFORM, "--base", base, "--format", "csv"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("direct,chart"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    let expected = 0.8 * 1.6f64.ln() + 0.2 * 0.4f64.ln();
    assert!((row[0] - expected).abs() < 1e-15);
    assert!((row[1] - expected).abs() < 1e-12);
}

#[test]
fn entropy_scalar() {
    let out = expgeo(&["entropy", "--density", SKEWED]);
    assert!((scalar(&out) - 0.19274).abs() < 1e-5);
}

#[test]
fn chart_round_trip() {
    let out = expgeo(&["chart", "--base", UNIFORM, "--density", SKEWED]);
    let coordinate = stdout(&out);
    let out = expgeo(&["chart", "--base", UNIFORM, "--coordinate", coordinate.trim()]);
    let q: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let values: Vec<f64> = q["values"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((values[0] - 1.6).abs() < 1e-14 && (values[1] - 0.4).abs() < 1e-14);
}

#[test]
fn expectation_flow_matches_closed_form() {
    let f = r#"{"weights":[0.25,0.25,0.5],"values":[1,-0.5,0.3]}"#;
    let p0 = r#"{"weights":[0.25,0.25,0.5],"values":[0.6,1.8,0.8]}"#;
    let out = expgeo(&["flow", "--field", "expectation", "--f", f, "--p0", p0, "--t", "1", "--format", "json"]);
    let q: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let got: Vec<f64> = q["values"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    let w = [0.25, 0.25, 0.5];
    let raw: Vec<f64> = [(1.0f64, 0.6), (-0.5, 1.8), (0.3, 0.8)]
        .iter()
        .map(|(f, p)| f.exp() * p)
        .collect();
    let z: f64 = raw.iter().zip(w).map(|(r, w)| r * w).sum();
    for (g, r) in got.iter().zip(&raw) {
        assert!((g - r / z).abs() < 1e-8);
    }
    // The emitted density is accepted back as an initial condition.
    let again = expgeo(&["flow", "--field", "entropy", "--p0", &q.to_string(), "--t", "0.01"]);
    assert!(again.status.success());
}

#[test]
fn flow_csv_layout() {
    let out = expgeo(&["flow", "--field", "entropy", "--p0", SKEWED, "--t", "0.1", "--step", "0.01"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,p_1,p_2,value,fisher");
    assert_eq!(lines.len(), 12);
    let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    let last: Vec<f64> = lines[11].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((last[0] - 0.1).abs() < 1e-15);
    // entropy increases along its own gradient flow
    assert!(last[3] > first[3]);
    assert!(first[4] > 0.0);
}

#[test]
fn boltzmann_is_seeded_and_thread_independent() {
    let spec = r#"{"linear":[0,0,0],"quadratic":[[0.2,0,0],[0,-0.1,0],[0,0,0]],"bounded":[]}"#;
    let args = ["boltzmann", "--spec", spec, "--g", "logf", "--n", "30000", "--seed", "7"];
    let a = stdout(&expgeo(&args));
    let b = stdout(&expgeo(&args));
    assert_eq!(a, b);
    let threaded = Command::new(env!("CARGO_BIN_EXE_expgeo"))
        .args(args)
        .env("EXPGEO_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(a, stdout(&threaded));
    let est: Value = serde_json::from_str(&a).unwrap();
    assert!(est["mean"].as_f64().unwrap() < 0.0);
    assert_eq!(est["n"].as_u64(), Some(30000));
}

#[test]
fn boltzmann_invariant_and_polynomial() {
    let spec = r#"{"quadratic":[[0.2,0,0],[0,-0.1,0],[0,0,0]]}"#;
    let out = stdout(&expgeo(&["boltzmann", "--spec", spec, "--g", "custom-polynomial", "--poly", r#"[{"coef":2,"pow":[0,0,0]}]"#, "--n", "100"]));
    let est: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(est["mean"].as_f64(), Some(0.0));
    assert_eq!(est["stderr"].as_f64(), Some(0.0));
    let out = stdout(&expgeo(&["boltzmann", "--spec", spec, "--g", "invariant", "--n", "1000"]));
    let est: Value = serde_json::from_str(&out).unwrap();
    assert!(est["mean"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn validation_errors_exit_with_two() {
    let bad_field = expgeo(&["entropy", "--density", r#"{"weights":[0.5,0.5],"values":[1.6,"x"]}"#]);
    assert_eq!(bad_field.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_field.stderr).contains("values[1]"));

    let missing = expgeo(&["entropy", "--density", r#"{"values":[1,1]}"#]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("weights"));

    let unnormalized = expgeo(&["entropy", "--density", r#"{"weights":[0.5,0.5],"values":[1,2]}"#]);
    assert_eq!(unnormalized.status.code(), Some(2));

    let spectral = expgeo(&["boltzmann", "--spec", r#"{"quadratic":[[0.6,0,0],[0,0,0],[0,0,0]]}"#, "--g", "v1sq"]);
    assert_eq!(spectral.status.code(), Some(2));

    let bad_step = expgeo(&["flow", "--field", "entropy", "--p0", SKEWED, "--step", "-1"]);
    assert_eq!(bad_step.status.code(), Some(2));

    let no_file = expgeo(&["entropy", "--density", "/nonexistent/p.json"]);
    assert_eq!(no_file.status.code(), Some(2));

    let threads = Command::new(env!("CARGO_BIN_EXE_expgeo"))
        .args(["boltzmann", "--spec", "{}", "--g", "v1sq", "--n", "10"])
        .env("EXPGEO_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn numeric_failures_exit_with_one() {
    let f = r#"{"weights":[0.5,0.5],"values":[500,-500]}"#;
    let out = expgeo(&["flow", "--field", "expectation", "--f", f, "--p0", UNIFORM, "--t", "5", "--step", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds"));
}
