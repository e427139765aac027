//! Thermal entropies of free fermions: the density s_γ, the local entropy
//! S_γ and the entanglement entropy H_γ.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::regions::Region;
use crate::specfun::{renyi_eta, SpectralFunction};
use crate::symbols::{make_fermi, Dispersion, SymbolSpec};
use crate::whop::kernel::build_kernel_with_reach;
use crate::whop::sectors::assemble_sectors;
use crate::whop::trace::{symbol_integral, trace_d, Operator};
use crate::whop::GridSpec;

#[derive(Debug, Clone, Serialize)]
pub struct Truncation {
    pub kappa: f64,
    pub value_at_2kappa: f64,
    /// |H(κ) − H(2κ)|
    pub error: f64,
    /// The error exceeds 10% of the value.
    pub flagged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyResult {
    pub gamma: f64,
    pub temperature: f64,
    pub mu: f64,
    pub alpha: f64,
    pub region: String,
    /// S_γ or H_γ
    pub value: f64,
    /// α^d s_γ |Λ| (zero for H_γ)
    pub bulk: f64,
    pub remainder: f64,
    pub grid_n: usize,
    pub two_grid_err: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation>,
}

fn fermi(dim: usize, temperature: f64, mu: f64) -> Result<SymbolSpec> {
    make_fermi(Dispersion::quadratic(dim, mu)?, temperature)
}

/// (2π)^{-d} ∫ η_γ(a(ξ)) dξ for any symbol.
pub fn entropy_density_of(symbol: &SymbolSpec, gamma: f64) -> Result<f64> {
    let eta = renyi_eta(gamma)?;
    Ok(symbol_integral(symbol, &eta)? / (2.0 * PI).powi(symbol.dim() as i32))
}

/// s_γ(T, μ) for the Fermi symbol of `dispersion`.
pub fn entropy_density(gamma: f64, temperature: f64, mu: f64, dispersion: &Dispersion) -> Result<f64> {
    let d = Dispersion { mu, ..dispersion.clone() };
    entropy_density_of(&make_fermi(d, temperature)?, gamma)
}

fn region_label(r: &Region) -> String {
    match r {
        Region::Line(p) => p.iter().map(|(a, b)| format!("({a},{b})")).collect::<Vec<_>>().join("u"),
        Region::Plane(_) => match r.as_disk() {
            Some((c, rad)) => format!("disk([{},{}],{rad})", c[0], c[1]),
            None => "plane".into(),
        },
    }
}

/// S_γ(T, μ; αΛ) = Σ η_γ(λ_j) of W_α(a_{T,μ}; Λ), split into the bulk term
/// α^d s_γ |Λ| and the remainder.
pub fn local_entropy(
    gamma: f64,
    temperature: f64,
    mu: f64,
    region: &Region,
    alpha: f64,
    grid: &GridSpec,
) -> Result<EntropyResult> {
    let a = fermi(region.dim(), temperature, mu)?;
    let r = trace_d(&a, region, alpha, &renyi_eta(gamma)?, grid)?;
    Ok(EntropyResult {
        gamma,
        temperature,
        mu,
        alpha,
        region: region_label(region),
        value: r.spectral,
        bulk: r.weyl,
        remainder: r.spectral - r.weyl,
        grid_n: r.grid_n,
        two_grid_err: r.two_grid_err,
        truncation: None,
    })
}

/// Grid for the truncated complement: same node density as for Λ.
fn complement_grid(grid: &GridSpec, region: &Region) -> GridSpec {
    let mut g = grid.clone();
    if let Some(n) = g.total.take() {
        g.points_per_unit = Some(n as f64 / region.measure());
    }
    g
}

/// tr D_α(a, ℝ^d∖Λ; η) approximated by tr D_α(a, B∖Λ; η) − tr D_α(a, B; η),
/// where B is a container of size κ·diam(Λ). Subtracting the container
/// alone removes the spurious contribution of ∂B.
fn complement_trace(a: &SymbolSpec, region: &Region, alpha: f64, eta: &SpectralFunction, kappa: f64, grid: &GridSpec) -> Result<f64> {
    let g = complement_grid(grid, region);
    let g = GridSpec { two_grid: false, ..g };
    match region {
        Region::Line(parts) => {
            let (lo, hi) = (parts[0].0, parts[parts.len() - 1].1);
            let c = 0.5 * (lo + hi);
            let half = 0.5 * kappa * (hi - lo);
            let (bl, br) = (c - half, c + half);
            let mut rest = Vec::new();
            let mut left = bl;
            for &(l, r) in parts {
                rest.push((left, l));
                left = r;
            }
            rest.push((left, br));
            let outside = Region::intervals(rest)?;
            let container = Region::interval(bl, br)?;
            Ok(trace_d(a, &outside, alpha, eta, &g)?.value - trace_d(a, &container, alpha, eta, &g)?.value)
        }
        Region::Plane(_) => {
            let Some((_, r)) = region.as_disk() else {
                return Err(Error::Unsupported("2D entanglement entropy is implemented for disks".into()));
            };
            let outer = kappa * r;
            let k = build_kernel_with_reach(a, alpha, 2.0 * outer)?;
            let s = symbol_integral(a, eta)?;
            let weyl = |area: f64| (alpha / (2.0 * PI)).powi(2) * area * s;
            let annulus = Operator::Sectors(assemble_sectors(&k, r, outer, &g)?);
            let disk = Operator::Sectors(assemble_sectors(&k, 0.0, outer, &g)?);
            let ann = annulus.spectral_sum(eta)?.0 - weyl(PI * (outer * outer - r * r));
            let full = disk.spectral_sum(eta)?.0 - weyl(PI * outer * outer);
            Ok(ann - full)
        }
    }
}

/// H_γ(T, μ; αΛ) = tr D_α(a, Λ; η_γ) + tr D_α(a, ℝ^d∖Λ; η_γ), the complement
/// truncated at κ and rechecked at 2κ.
pub fn entanglement_entropy(
    gamma: f64,
    temperature: f64,
    mu: f64,
    region: &Region,
    alpha: f64,
    kappa: f64,
    grid: &GridSpec,
) -> Result<EntropyResult> {
    if !(kappa >= 3.0) {
        return Err(invalid("truncation factor κ must be at least 3"));
    }
    let a = fermi(region.dim(), temperature, mu)?;
    let eta = renyi_eta(gamma)?;
    let inside = trace_d(&a, region, alpha, &eta, grid)?;
    let h1 = inside.value + complement_trace(&a, region, alpha, &eta, kappa, grid)?;
    let h2 = inside.value + complement_trace(&a, region, alpha, &eta, 2.0 * kappa, grid)?;
    let error = (h1 - h2).abs();
    Ok(EntropyResult {
        gamma,
        temperature,
        mu,
        alpha,
        region: region_label(region),
        value: h1,
        bulk: 0.0,
        remainder: h1,
        grid_n: inside.grid_n,
        two_grid_err: inside.two_grid_err,
        truncation: Some(Truncation { kappa, value_at_2kappa: h2, error, flagged: error > 0.1 * h1.abs() }),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundPoint {
    pub alpha: f64,
    pub temperature: f64,
    pub entropy: f64,
    /// H_γ / (α^{d−1} log(min(α, 1/T) + 1))
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub points: Vec<BoundPoint>,
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// max/min ≤ 2 over the sweep.
    pub stable: bool,
}

/// Scan of H_γ against α^{d−1} log(min(α, 1/T) + 1) over (α, T) points.
pub fn ee_bound_check(
    gamma: f64,
    mu: f64,
    region: &Region,
    points: &[(f64, f64)],
    kappa: f64,
    grid: &GridSpec,
) -> Result<BoundReport> {
    if points.is_empty() {
        return Err(invalid("empty sweep"));
    }
    let d = region.dim() as i32;
    let mut out = Vec::new();
    for &(alpha, t) in points {
        let h = entanglement_entropy(gamma, t, mu, region, alpha, kappa, grid)?.value;
        let scale = alpha.powi(d - 1) * (alpha.min(1.0 / t) + 1.0).ln();
        out.push(BoundPoint { alpha, temperature: t, entropy: h, ratio: h / scale });
    }
    let max_ratio = out.iter().map(|p| p.ratio).fold(f64::NEG_INFINITY, f64::max);
    let min_ratio = out.iter().map(|p| p.ratio).fold(f64::INFINITY, f64::min);
    Ok(BoundReport { points: out, max_ratio, min_ratio, stable: max_ratio <= 2.0 * min_ratio })
}
