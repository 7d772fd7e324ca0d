//! The `wc4dvar` binary on a reduced configuration.

use std::path::Path;
use std::process::Command;

const SMALL: &str = r#"
seed = 3
network = "c"

[model]
n = 16
steps = 3
spinup_steps = 300

[solver]
tol = 1e-6
max_iters = 500
"#;

fn run(dir: &Path, args: &[&str]) -> std::process::Output {
    let config = dir.join("small.toml");
    std::fs::write(&config, SMALL).unwrap();
    Command::new(env!("CARGO_BIN_EXE_wc4dvar"))
        .arg("--config")
        .arg(&config)
        .args(args)
        .env("WC4DVAR_OUTPUT_DIR", dir.join("out"))
        .output()
        .unwrap()
}

#[test]
fn spectrum_writes_index_eigenvalue_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["spectrum"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("out/spectrum_a3_c.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,eigenvalue"));
    let values: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    let p = 16 / 4 * 2;
    assert_eq!(values.len(), 2 * 16 * 4 + p);
    assert!(values.windows(2).all(|w| w[0] <= w[1]));
    for form in ["a2", "a1"] {
        assert!(dir.path().join(format!("out/spectrum_{form}_c.csv")).exists());
    }
}

#[test]
fn bounds_json_reports_containment() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["bounds", "--network", "e", "--alternative"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/bounds_a3_e.json")).unwrap()).unwrap();
    assert_eq!(json["network"], "e");
    assert_eq!(json["standard"]["containment"]["contained"], true);
    assert_eq!(json["alternative"]["kind"], "alternative");
    assert!(json["summary"]["theta_min"].as_f64().unwrap() > 0.0);
}

#[test]
fn solve_writes_residual_histories() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["solve", "--network", "f", "--formulation", "A2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("out/residuals_a2_f.csv")).unwrap();
    let rows: Vec<(usize, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (i, r) = l.split_once(',').unwrap();
            (i.parse().unwrap(), r.parse().unwrap())
        })
        .collect();
    assert_eq!(rows[0], (0, 1.0));
    assert!(rows.last().unwrap().1 <= 1e-6);
    assert!(!dir.path().join("out/residuals_a3_f.csv").exists());
}

#[test]
fn simulate_and_verify_one_network() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["simulate", "--network", "b"]).status.success());
    assert!(dir.path().join("out/simulate_b.json").exists());
    let out = run(dir.path(), &["verify", "--network", "d"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/verify.json")).unwrap()).unwrap();
    assert_eq!(json["containment_passed"], true);
    assert_eq!(json["networks"][0], "d");
}

#[test]
fn unknown_network_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["spectrum", "--network", "g"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"g\""));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn bad_config_fails() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "[model]\ndt = 0.0\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_wc4dvar"))
        .args(["--config", config.to_str().unwrap(), "spectrum"])
        .env("WC4DVAR_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
