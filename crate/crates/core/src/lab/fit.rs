//! Log-slope regression of sweep records and comparison with U(f)·𝔙₁.

use serde::{Deserialize, Serialize};

use super::config::Quantity;
use super::sweep::RunRecord;
use crate::coeffs::v1;
use crate::error::{invalid, Error, Result};
use crate::regions::Region;
use crate::specfun::{u_functional, SpectralFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predictor {
    LogAlpha,
    LogInvT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Response {
    Trace,
    /// trace / α^{d−1}
    Remainder,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub predictor: Predictor,
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
    pub n_used: usize,
    /// Indices of records left out, with the reason.
    pub excluded: Vec<(usize, String)>,
    pub theory: Option<f64>,
    /// |slope − theory| / |theory|
    pub gap: Option<f64>,
}

/// Ordinary least squares y = slope·x + intercept, returning
/// (slope, intercept, slope standard error, R²).
pub fn ols(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64, f64)> {
    let n = x.len();
    if n != y.len() || n < 2 {
        return Err(Error::RankDeficient("need at least 2 points".into()));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let scale = x.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    if !(sxx > 1e-24 * scale * scale * nf) {
        return Err(Error::RankDeficient("predictor values are not distinct".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    let stderr = if n > 2 { (ss_res / (nf - 2.0) / sxx).sqrt() } else { f64::NAN };
    Ok((slope, intercept, stderr, r2))
}

fn predictor_value(p: Predictor, r: &RunRecord) -> f64 {
    match p {
        Predictor::LogAlpha => r.alpha.ln(),
        Predictor::LogInvT => (1.0 / r.temperature).ln(),
    }
}

fn response_value(s: Response, r: &RunRecord) -> f64 {
    match s {
        Response::Trace => r.trace,
        Response::Remainder => r.remainder,
    }
}

/// Least-squares slope of the response against log α or log(1/T). The
/// least asymptotic point (smallest α, or largest T) is dropped when its
/// two-grid error exceeds 1% of the trace.
pub fn fit_log_slope(records: &[RunRecord], predictor: Predictor, response: Response, theory: Option<f64>) -> Result<FitResult> {
    let mut excluded = Vec::new();
    let mut usable: Vec<usize> = Vec::new();
    for (i, r) in records.iter().enumerate() {
        let ok = r.is_usable()
            && response_value(response, r).is_finite()
            && predictor_value(predictor, r).is_finite();
        if ok {
            usable.push(i);
        } else {
            excluded.push((i, r.error.clone().unwrap_or_else(|| "non-finite value".into())));
        }
    }
    let first = usable.iter().copied().min_by(|&a, &b| {
        predictor_value(predictor, &records[a]).total_cmp(&predictor_value(predictor, &records[b]))
    });
    if let Some(i) = first {
        let r = &records[i];
        if usable.len() > 3 && r.two_grid_err > 0.01 * r.trace.abs() {
            usable.retain(|&j| j != i);
            excluded.push((i, format!("two-grid error {:.3e} exceeds 1% of {:.6}", r.two_grid_err, r.trace)));
        }
    }
    if usable.len() < 3 {
        return Err(invalid(format!("need at least 3 usable records, have {}", usable.len())));
    }
    let x: Vec<f64> = usable.iter().map(|&i| predictor_value(predictor, &records[i])).collect();
    let y: Vec<f64> = usable.iter().map(|&i| response_value(response, &records[i])).collect();
    let (slope, intercept, slope_stderr, r_squared) = ols(&x, &y)?;
    for (i, why) in &excluded {
        eprintln!("fit: excluded record {i}: {why}");
    }
    let gap = theory.filter(|t| *t != 0.0).map(|t| ((slope - t) / t).abs());
    Ok(FitResult { predictor, slope, intercept, slope_stderr, r_squared, n_used: usable.len(), excluded, theory, gap })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Theory slope is 0 while the fit is not.
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoryReport {
    pub slope: f64,
    pub theory: f64,
    pub abs_gap: f64,
    pub rel_gap: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub summary: String,
}

pub fn compare_to_theory(slope: f64, theory: f64, tolerance: f64) -> Result<TheoryReport> {
    if !slope.is_finite() || !theory.is_finite() || !(tolerance >= 0.0) {
        return Err(invalid("slope, theory and tolerance must be finite"));
    }
    let abs_gap = (slope - theory).abs();
    let (rel_gap, verdict) = if theory == 0.0 {
        (None, if slope == 0.0 { Verdict::Pass } else { Verdict::Indeterminate })
    } else {
        let g = abs_gap / theory.abs();
        (Some(g), if g <= tolerance { Verdict::Pass } else { Verdict::Fail })
    };
    let summary = match rel_gap {
        Some(g) => format!(
            "{}: slope {slope:.6} vs theory {theory:.6}, gap {:.2}% (tol {:.2}%)",
            if verdict == Verdict::Pass { "PASS" } else { "FAIL" },
            100.0 * g,
            100.0 * tolerance
        ),
        None if verdict == Verdict::Pass => format!("PASS: slope {slope:.6} vs theory 0"),
        None => format!("INDETERMINATE: slope {slope:.6} vs theory 0, absolute gap {abs_gap:.3e}"),
    };
    Ok(TheoryReport { slope, theory, abs_gap, rel_gap, tolerance, verdict, summary })
}

/// U(f)·𝔙₁(1; ∂Λ, ∂Ω), doubled for the entanglement entropy.
pub fn theory_slope(f: &SpectralFunction, lambda: &Region, omega: &Region, quantity: Quantity) -> Result<f64> {
    let u = u_functional(f)?.value;
    let v = v1(|_, _| 1.0, lambda, omega, 256)?.value;
    Ok(match quantity {
        Quantity::Trace => u * v,
        Quantity::Entanglement => 2.0 * u * v,
    })
}
