//! wasm-bindgen bindings for the browser demo. Every call takes region,
//! symbol and function literals in the config syntax and returns JSON.

use serde_json::json;
use wasm_bindgen::prelude::*;

use whlab::coeffs::{b_coeff, v1, BOptions, Restriction};
use whlab::lab::Config;
use whlab::specfun::u_functional;
use whlab::whop::{trace_d, GridSpec};

fn js(e: whlab::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"))
}

/// 𝔙₁ with b ≡ 1 for two region literals.
pub fn v1_json(lambda: &str, omega: &str, nodes: usize) -> whlab::Result<String> {
    let c = Config::default();
    Ok(to_json(&v1(|_, _| 1.0, &c.region(lambda)?, &c.region(omega)?, nodes)?))
}

/// tr D_α(a, Λ; f) on the default grid, capped at `max_rows` nodes.
pub fn trace_json(symbol: &str, region: &str, alpha: f64, f: &str, max_rows: usize) -> whlab::Result<String> {
    let c = Config::default();
    let grid = GridSpec { max_rows, ..GridSpec::default() };
    let r = trace_d(&c.symbol(symbol)?, &c.region(region)?, alpha, &c.function(f)?, &grid)?;
    Ok(to_json(&r))
}

/// 𝓑(a_T; f)/log(1/T) for the 1D Fermi symbol at each temperature, next
/// to U(f)/(2π²), the limit for one endpoint and Ω = (−√μ, √μ).
pub fn fermi_b_scan_json(temperatures: &[f64], mu: f64, f: &str) -> whlab::Result<String> {
    let c = Config::default();
    let f = c.function(f)?;
    let mut rows = Vec::new();
    for &t in temperatures {
        let a = c.symbol(&format!("{{kind=\"fermi\", mu={mu:?}, T={t:?}}}"))?;
        let b = b_coeff(&Restriction::of_symbol(&a)?, &f, &BOptions::default())?;
        rows.push(json!({ "T": t, "b": b.value, "error": b.error, "ratio": b.value / (1.0 / t).ln() }));
    }
    let limit = u_functional(&f)?.value / (2.0 * std::f64::consts::PI.powi(2));
    Ok(json!({ "rows": rows, "limit": limit }).to_string())
}

#[wasm_bindgen]
pub fn v1_boundary(lambda: &str, omega: &str, nodes: usize) -> Result<String, JsError> {
    v1_json(lambda, omega, nodes).map_err(js)
}

#[wasm_bindgen]
pub fn regularized_trace(symbol: &str, region: &str, alpha: f64, f: &str, max_rows: usize) -> Result<String, JsError> {
    trace_json(symbol, region, alpha, f, max_rows).map_err(js)
}

#[wasm_bindgen]
pub fn fermi_b_scan(temperatures: Vec<f64>, mu: f64, f: &str) -> Result<String, JsError> {
    fermi_b_scan_json(&temperatures, mu, f).map_err(js)
}
