use whlab_web::{fermi_b_scan_json, trace_json, v1_json};

const DISK: &str = r#"{kind="disk", center=[0,0], radius=1}"#;

#[test]
fn v1_of_unit_disks() {
    let v: serde_json::Value = serde_json::from_str(&v1_json(DISK, DISK, 64).unwrap()).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.0 / std::f64::consts::PI.powi(2)).abs() < 1e-6);
}

#[test]
fn trace_of_linear_function_vanishes() {
    let s = trace_json(
        r#"{kind="fermi", T=0.2}"#,
        r#"{kind="interval", lo=0, hi=1}"#,
        30.0,
        r#"{name="monomial", p=1}"#,
        2000,
    )
    .unwrap();
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert!(v["value"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn row_cap_is_reported() {
    let err = trace_json(r#"{kind="fermi", T=0.2}"#, r#"{kind="interval", lo=0, hi=1}"#, 3000.0, r#"{name="eta", gamma=1}"#, 500)
        .unwrap_err();
    assert!(err.to_string().contains("memory guard"), "{err}");
}

#[test]
fn b_scan_decreases_towards_limit() {
    let v: serde_json::Value = serde_json::from_str(&fermi_b_scan_json(&[0.2, 0.1, 0.05], 1.0, r#"{name="eta", gamma=1}"#).unwrap()).unwrap();
    let ratios: Vec<f64> = v["rows"].as_array().unwrap().iter().map(|r| r["ratio"].as_f64().unwrap()).collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
    assert!((v["limit"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-8);
}
