//! W_α(a; Λ) for Λ a disk (or annulus) and a radial symbol, split into
//! angular-momentum sectors. On functions u(r)e^{imθ} the operator acts on
//! L²(r dr) with kernel
//!
//!   k_m(r, r') = α² ∫ a(ρ) J_m(αρr) J_m(αρr') ρ dρ,
//!
//! and sectors m and −m are isospectral.

use std::f64::consts::PI;
use std::sync::OnceLock;

use faer::Mat;

use crate::error::{Error, Result};
use crate::quad::{composite_gauss, panel_rule};
use crate::special::bessel_j_sequence;

use super::assemble::{symmetric_eigenvalues, trace_power, GridSpec};
use super::kernel::KernelEval;

#[derive(Debug)]
pub struct SectorOperator {
    pub alpha: f64,
    pub r_in: f64,
    pub r_out: f64,
    pub m_max: usize,
    pub n_radial: usize,
    pub n_rho: usize,
    pub resolution_ratio: f64,
    blocks: Vec<Mat<f64>>,
    eig: OnceLock<Vec<Vec<f64>>>,
}

pub fn multiplicity(m: usize) -> f64 {
    if m == 0 {
        1.0
    } else {
        2.0
    }
}

/// Sector blocks on the annulus r_in < |x − c| < r_out (r_in = 0: disk).
pub fn assemble_sectors(kernel: &KernelEval, r_in: f64, r_out: f64, grid: &GridSpec) -> Result<SectorOperator> {
    if kernel.dim != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: kernel.dim });
    }
    if !(r_out > r_in && r_in >= 0.0) {
        return Err(Error::DegenerateShape(format!("annulus ({r_in}, {r_out})")));
    }
    let alpha = kernel.alpha;
    let (rho, c) = hankel_rule(kernel, r_out)?;
    let density = match grid.total {
        Some(n) => n as f64 / (r_out - r_in),
        None => grid.density(alpha, kernel.xi_max),
    };
    let ratio = density * 2.0 * PI / (alpha * kernel.xi_max);
    grid.check_ratio(ratio)?;
    let panels = (((r_out - r_in) * density) / 8.0).ceil().max(1.0) as usize;
    let (r, w) = composite_gauss(r_in, r_out, panels, 8);
    let n_r = r.len();
    grid.check_rows(n_r)?;
    let x_max = alpha * kernel.xi_max * r_out;
    let m_max = (x_max + 20.0 + 4.0 * x_max.cbrt()).ceil() as usize;

    let n_rho = rho.len();
    let left: Vec<f64> = r.iter().zip(&w).map(|(r, w)| (w * r).sqrt()).collect();
    let right: Vec<f64> = c.iter().map(|c| alpha * c.max(0.0).sqrt()).collect();
    let chunk = (8_000_000 / (n_r * n_rho).max(1)).clamp(1, m_max + 1);
    let mut blocks = Vec::with_capacity(m_max + 1);
    let mut seq = Vec::new();
    let mut m0 = 0;
    while m0 <= m_max {
        let m1 = (m0 + chunk).min(m_max + 1);
        let mut cs: Vec<Mat<f64>> = (m0..m1).map(|_| Mat::zeros(n_r, n_rho)).collect();
        for i in 0..n_r {
            for k in 0..n_rho {
                bessel_j_sequence(alpha * rho[k] * r[i], m1 - 1, &mut seq);
                let s = left[i] * right[k];
                for m in m0..m1 {
                    cs[m - m0][(i, k)] = s * seq[m];
                }
            }
        }
        for cm in cs {
            blocks.push(&cm * cm.transpose());
        }
        m0 = m1;
    }
    Ok(SectorOperator {
        alpha,
        r_in,
        r_out,
        m_max,
        n_radial: n_r,
        n_rho,
        resolution_ratio: ratio,
        blocks,
        eig: OnceLock::new(),
    })
}

/// Nodes ρ_k and weights c_k with Σ c_k g(ρ_k) ≈ ∫ a(ρ) g(ρ) ρ dρ for
/// integrands oscillating at frequency up to 2α r_out.
fn hankel_rule(kernel: &KernelEval, r_out: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let wave = PI / (2.0 * kernel.alpha * r_out);
    let sym = &kernel.symbol;
    if !sym.is_radial() {
        return Err(Error::Unsupported("sector decomposition needs a radial symbol".into()));
    }
    let (rho, v) = if sym.is_smooth() {
        let kf = sym.omega.as_disk().map(|(_, r)| r).unwrap_or(kernel.xi_max);
        super::kernel::radial_rule(kf, sym.temperature(), kernel.xi_max, wave)
    } else {
        panel_rule(&[0.0, kernel.xi_max], wave, 12)
    };
    let c = rho.iter().zip(&v).map(|(r, v)| v * r * sym.radial_value(*r)).collect();
    Ok((rho, c))
}

impl SectorOperator {
    pub fn sectors(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, m: usize) -> &Mat<f64> {
        &self.blocks[m]
    }

    /// Eigenvalues per sector, ascending within each.
    pub fn eigenvalues(&self) -> Result<&[Vec<f64>]> {
        if let Some(e) = self.eig.get() {
            return Ok(e);
        }
        let e = self.blocks.iter().map(symmetric_eigenvalues).collect::<Result<Vec<_>>>()?;
        Ok(self.eig.get_or_init(|| e))
    }

    /// Σ_m mult(m) tr(A_m^p)
    pub fn trace_power(&self, p: u32) -> f64 {
        self.blocks.iter().enumerate().map(|(m, b)| multiplicity(m) * trace_power(b, p)).sum()
    }

    pub fn trace(&self) -> f64 {
        self.trace_power(1)
    }
}
