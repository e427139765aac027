use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quad::Adaptive;
use crate::regions::Region;
use crate::specfun::SpectralFunction;
use crate::symbols::SymbolSpec;

use super::assemble::{assemble, DiscretizedWH, GridMethod, GridSpec};
use super::kernel::{build_kernel_with_reach, centred_symbol, KernelEval, SYMBOL_CUTOFF};
use super::sectors::{assemble_sectors, multiplicity, SectorOperator};

/// A discretized W_α(a; Λ).
#[derive(Debug)]
pub enum Operator {
    Grid(DiscretizedWH),
    Sectors(SectorOperator),
}

impl Operator {
    pub fn rows(&self) -> usize {
        match self {
            Operator::Grid(g) => g.rows(),
            Operator::Sectors(s) => s.n_radial * (2 * s.m_max + 1),
        }
    }

    pub fn resolution_ratio(&self) -> f64 {
        match self {
            Operator::Grid(g) => g.resolution_ratio,
            Operator::Sectors(s) => s.resolution_ratio,
        }
    }

    pub fn method(&self) -> &'static str {
        match self {
            Operator::Grid(_) => "nystrom_grid",
            Operator::Sectors(_) => "angular_sectors",
        }
    }

    /// Eigenvalues with multiplicities.
    pub fn spectrum(&self) -> Result<Vec<(f64, f64)>> {
        Ok(match self {
            Operator::Grid(g) => g.eigenvalues()?.iter().map(|l| (*l, 1.0)).collect(),
            Operator::Sectors(s) => s
                .eigenvalues()?
                .iter()
                .enumerate()
                .flat_map(|(m, e)| e.iter().map(move |l| (*l, multiplicity(m))))
                .collect(),
        })
    }

    /// Σ f(clamp(λ)) and the largest clamp distance.
    pub fn spectral_sum(&self, f: &SpectralFunction) -> Result<(f64, f64)> {
        let mut sum = 0.0;
        let mut clamp = 0.0f64;
        for (l, mult) in self.spectrum()? {
            let c = l.clamp(0.0, 1.0);
            clamp = clamp.max((l - c).abs());
            sum += mult * f.eval(c);
        }
        Ok((sum, clamp))
    }

    pub fn trace_power(&self, p: u32) -> f64 {
        match self {
            Operator::Grid(g) => g.trace_power(p),
            Operator::Sectors(s) => s.trace_power(p),
        }
    }
}

/// Discretize W_α(a; Λ).
pub fn discretize(symbol: &SymbolSpec, region: &Region, alpha: f64, grid: &GridSpec) -> Result<Operator> {
    if symbol.dim() != region.dim() {
        return Err(Error::DimensionMismatch { expected: symbol.dim(), got: region.dim() });
    }
    let kernel = build_kernel_with_reach(symbol, alpha, region.diameter())?;
    let sectors_ok = region.as_disk().is_some() && kernel.symbol.is_radial();
    let use_sectors = match grid.method {
        GridMethod::Sectors if !sectors_ok => {
            return Err(Error::Unsupported("sector decomposition needs a disk and a radial symbol".into()))
        }
        GridMethod::Sectors => true,
        GridMethod::Auto => sectors_ok,
        GridMethod::Grid => false,
    };
    if use_sectors {
        let (_, r) = region.as_disk().unwrap();
        Ok(Operator::Sectors(assemble_sectors(&kernel, 0.0, r, grid)?))
    } else {
        Ok(Operator::Grid(assemble(&kernel, region, grid)?))
    }
}

/// ∫ f(a(ξ)) dξ over ℝ^d.
pub fn symbol_integral(symbol: &SymbolSpec, f: &SpectralFunction) -> Result<f64> {
    let f0 = f.eval(0.0);
    if f0.abs() > 1e-15 {
        return Err(invalid(format!(
            "{} does not vanish at 0, so f∘a is not integrable for a decaying symbol",
            f.name()
        )));
    }
    if !symbol.is_smooth() {
        return Ok(f.eval(1.0) * symbol.omega.measure());
    }
    let (sym, _) = centred_symbol(symbol)?;
    let xi_max = sym.support_radius(SYMBOL_CUTOFF);
    let t = sym.temperature();
    let q = Adaptive::new(1e-15, 1e-13);
    match sym.dim() {
        1 => {
            let mut breaks = vec![-xi_max, xi_max];
            for &(l, r) in sym.omega.intervals_slice().unwrap() {
                for e in [l, r] {
                    for k in [-8.0, -2.0, 0.0, 2.0, 8.0] {
                        breaks.push(e + k * t);
                    }
                }
            }
            breaks.retain(|b| b.abs() <= xi_max);
            breaks.sort_by(f64::total_cmp);
            breaks.dedup();
            let r = q.integrate_with_breaks(
                &mut |x: f64| {
                    let (a, c) = sym.value_pair(&[x]);
                    f.eval_pair(a, c)
                },
                &breaks,
            );
            Ok(r.value)
        }
        _ => {
            if !sym.is_radial() {
                return Err(Error::Unsupported("2D symbol integral needs a radial symbol".into()));
            }
            let kf = sym.omega.as_disk().map(|(_, r)| r).unwrap_or(0.0);
            let mut breaks = vec![0.0, xi_max];
            for k in [-8.0, -2.0, 0.0, 2.0, 8.0] {
                breaks.push(kf + k * t);
            }
            breaks.retain(|b| *b >= 0.0 && *b <= xi_max);
            breaks.sort_by(f64::total_cmp);
            breaks.dedup();
            let r = q.integrate_with_breaks(
                &mut |rho: f64| {
                    let (a, c) = sym.value_pair(&[rho, 0.0]);
                    2.0 * PI * rho * f.eval_pair(a, c)
                },
                &breaks,
            );
            Ok(r.value)
        }
    }
}

/// (α/2π)^d |Λ| ∫ f(a(ξ)) dξ
pub fn weyl_trace(symbol: &SymbolSpec, region: &Region, alpha: f64, f: &SpectralFunction) -> Result<f64> {
    if symbol.dim() != region.dim() {
        return Err(Error::DimensionMismatch { expected: symbol.dim(), got: region.dim() });
    }
    let d = symbol.dim() as i32;
    Ok((alpha / (2.0 * PI)).powi(d) * region.measure() * symbol_integral(symbol, f)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceResult {
    /// tr D_α(a, Λ; f)
    pub value: f64,
    /// Σ_j f(λ_j)
    pub spectral: f64,
    pub weyl: f64,
    pub grid_n: usize,
    pub resolution_ratio: f64,
    /// |value − value on the half-resolution grid|
    pub two_grid_err: f64,
    /// Largest distance an eigenvalue was moved to reach [0, 1].
    pub clamp: f64,
    pub method: String,
}

fn kernel_scale(symbol: &SymbolSpec, region: &Region, alpha: f64) -> Result<KernelEval> {
    build_kernel_with_reach(symbol, alpha, region.diameter())
}

/// tr D_α(a, Λ; f) = Σ f(λ_j) − weyl_trace, with a two-grid error estimate.
pub fn trace_d(
    symbol: &SymbolSpec,
    region: &Region,
    alpha: f64,
    f: &SpectralFunction,
    grid: &GridSpec,
) -> Result<TraceResult> {
    let weyl = weyl_trace(symbol, region, alpha, f)?;
    let op = discretize(symbol, region, alpha, grid)?;
    let (spectral, clamp) = op.spectral_sum(f)?;
    let value = spectral - weyl;
    let two_grid_err = if grid.two_grid {
        let k = kernel_scale(symbol, region, alpha)?;
        let coarse = discretize(symbol, region, alpha, &grid.halved(alpha, k.xi_max))?;
        (coarse.spectral_sum(f)?.0 - weyl - value).abs()
    } else {
        f64::NAN
    };
    Ok(TraceResult {
        value,
        spectral,
        weyl,
        grid_n: op.rows(),
        resolution_ratio: op.resolution_ratio(),
        two_grid_err,
        clamp,
        method: op.method().into(),
    })
}

/// Σ_p c_p t^p as a spectral function (c_0 must be 0).
fn polynomial_function(coeffs: &[f64]) -> Result<SpectralFunction> {
    if coeffs.first().copied().unwrap_or(0.0) != 0.0 {
        return Err(invalid("polynomial must vanish at 0"));
    }
    let mut terms = Vec::new();
    for (p, c) in coeffs.iter().enumerate().skip(1) {
        if *c != 0.0 {
            terms.push((*c, SpectralFunction::monomial(p as u32)?));
        }
    }
    Ok(SpectralFunction::combination(terms))
}

/// tr D_α for f(t) = Σ_p c_p t^p via traces of matrix powers, without an
/// eigensolve.
pub fn trace_d_polynomial(
    symbol: &SymbolSpec,
    region: &Region,
    alpha: f64,
    coeffs: &[f64],
    grid: &GridSpec,
) -> Result<TraceResult> {
    if coeffs.len() > 9 {
        return Err(invalid("polynomial degree must be at most 8"));
    }
    let f = polynomial_function(coeffs)?;
    let weyl = weyl_trace(symbol, region, alpha, &f)?;
    let eval = |op: &Operator| -> f64 {
        coeffs.iter().enumerate().skip(1).filter(|(_, c)| **c != 0.0).map(|(p, c)| c * op.trace_power(p as u32)).sum()
    };
    let op = discretize(symbol, region, alpha, grid)?;
    let spectral = eval(&op);
    let value = spectral - weyl;
    let two_grid_err = if grid.two_grid {
        let k = kernel_scale(symbol, region, alpha)?;
        let coarse = discretize(symbol, region, alpha, &grid.halved(alpha, k.xi_max))?;
        (eval(&coarse) - weyl - value).abs()
    } else {
        f64::NAN
    };
    Ok(TraceResult {
        value,
        spectral,
        weyl,
        grid_n: op.rows(),
        resolution_ratio: op.resolution_ratio(),
        two_grid_err,
        clamp: 0.0,
        method: format!("{}_powers", op.method()),
    })
}

/// tr D_α(a, Λ; g_p) = tr(A^p) − weyl_trace(g_p).
pub fn trace_d_poly(symbol: &SymbolSpec, region: &Region, alpha: f64, p: u32, grid: &GridSpec) -> Result<TraceResult> {
    if p == 0 || p > 8 {
        return Err(invalid("power must be in 1..=8"));
    }
    let mut coeffs = vec![0.0; p as usize + 1];
    coeffs[p as usize] = 1.0;
    trace_d_polynomial(symbol, region, alpha, &coeffs, grid)
}
