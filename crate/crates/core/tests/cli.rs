use std::process::Command;

fn whlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_whlab"))
}

const DISK: &str = r#"{kind="disk", center=[0,0], radius=1}"#;

#[test]
fn coeff_v1_prints_json() {
    let out = whlab().args(["coeff", "v1", "--lambda", DISK, "--omega", DISK]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let value = v["value"].as_f64().unwrap();
    assert!((value - 1.0 / std::f64::consts::PI.powi(2)).abs() < 1e-6);
    assert!(v["convergence"].is_array() && v["method"].is_string() && v["error"].is_number());
}

#[test]
fn precondition_failures_exit_with_2() {
    let out = whlab().args(["trace", "--symbol", "nope", "--region", DISK, "--alpha", "1", "--f", "x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = whlab()
        .args(["entropy", "ee", "--T", "0.1", "--region", r#"{kind="interval", lo=0, hi=1}"#, "--alpha", "10", "--kappa", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_and_fit_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lab.toml");
    std::fs::write(
        &cfg,
        r#"
[regions]
lam = { kind = "interval", lo = 0.0, hi = 1.0 }
om = { kind = "interval", lo = -1.0, hi = 1.0 }

[symbols]
fermi = { kind = "fermi", T = 0.1 }

[functions]
eta1 = { name = "eta", gamma = 1.0 }

[plans.warm]
regime = "super_critical"
symbol = "fermi"
region = "lam"
function = "eta1"
start = 0.4
n_points = 4
"#,
    )
    .unwrap();
    let out = whlab()
        .args(["--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--threads", "2", "sweep", "--plan", "warm"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("warm.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("alpha,T,gamma_or_f,trace,bulk,remainder,grid_n,two_grid_err,wall_ms"));

    let out = whlab()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "fit",
            "--csv",
            dir.path().join("warm.csv").to_str().unwrap(),
            "--predictor",
            "log-inv-t",
            "--f",
            "eta1",
            "--lambda",
            "lam",
            "--omega",
            "om",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["fit"]["theory"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-8);
    assert!(v["fit"]["slope"].as_f64().unwrap() > 0.0);
}
