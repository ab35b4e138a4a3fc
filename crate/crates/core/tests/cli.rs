//! The command-line binary end to end.

use std::path::Path;
use std::process::{Command, Output};

fn jacobi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jacobi-spectra")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn hermite_density_table() {
    let o = jacobi(&["density", "--preset", "hermite", "--grid", "-4:4:0.05", "--tol", "1e-6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,ac_density"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (x, d) = l.split_once(',').unwrap();
            (x.parse().unwrap(), d.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 161);
    let at_zero = rows.iter().find(|r| r.0 == 0.0).unwrap().1;
    assert!((at_zero - 0.5642).abs() < 1e-4);
}

#[test]
fn output_is_byte_identical_and_honours_out() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.csv");
    let args = ["spectrum", "--preset", "power_law", "--params", "α=1,p=1,γ=4,δ=0"];
    let first = jacobi(&args);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap(), "--threads", "2"]);
    let second = jacobi(&with_out);
    assert_eq!(second.status.code(), Some(0));
    assert!(second.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), first.stdout);
    assert_eq!(stdout(&first).lines().count(), 11);
}

#[test]
fn json_config_reproduces_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"sequence": {"preset": "constant", "params": {"a": 0.5, "b": 0}}, "n0": 1, "grid": "-0.9:0.9:0.3"}"#,
    )
    .unwrap();
    let o = jacobi(&["frozen", "--json-config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["kind"], "FROZEN");
    assert_eq!(v["points"].as_array().unwrap().len(), 0);
    for s in v["ac"].as_array().unwrap() {
        let (x, d) = (s[0].as_f64().unwrap(), s[1].as_f64().unwrap());
        assert!((d - 2.0 / std::f64::consts::PI * (1.0 - x * x).sqrt()).abs() < 1e-8);
    }
}

#[test]
fn inline_sequence_table() {
    let seq = r#"{"table": {"a": [1, 1, 1, 1], "b": [0, 0, 0, 0], "continuation": "freeze_last"}}"#;
    let o = jacobi(&["hypotheses", "--sequence", seq]);
    // bounded coefficients do not meet the hypotheses
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["regime"], "UNKNOWN");
}

#[test]
fn asymptotics_json_lines() {
    let o = jacobi(&["asymptotics", "--preset", "hermite", "--x", "0,1", "--nmin", "128", "--nmax", "1024"]);
    assert_eq!(o.status.code(), Some(0));
    let residuals: Vec<f64> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["residual"].as_f64().unwrap())
        .collect();
    assert_eq!(residuals.len(), 4);
    assert!(residuals.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn verify_passes_for_hermite() {
    let o = jacobi(&["verify", "--preset", "hermite", "--nmax", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "PASS");
    let orth = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "orthonormality").unwrap();
    assert!(orth["value"].as_f64().unwrap() < 1e-2);
}

#[test]
fn diagnostics_are_json_with_exit_codes() {
    let bad = jacobi(&["hypotheses", "--preset", "power_law", "--params", "alpha"]);
    assert_eq!(bad.status.code(), Some(1));
    let diag: serde_json::Value = serde_json::from_slice(&bad.stderr).unwrap();
    assert_eq!(diag["error"], "INVALID_PARAMETER");

    let missing = jacobi(&["density"]);
    assert_eq!(missing.status.code(), Some(1));

    let regime = jacobi(&["frozen", "--preset", "hermite"]);
    assert_eq!(regime.status.code(), Some(1), "frozen without --n0 is a usage error");

    let mismatch = jacobi(&["spectrum", "--preset", "hermite"]);
    assert_eq!(mismatch.status.code(), Some(2));
    assert!(!Path::new("spectrum.csv").exists());
}
