use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{panel_rule, Adaptive};
use crate::regions::Region;
use crate::symbols::{Mollifier, SymbolKind, SymbolSpec};

/// Symbol values below this are treated as zero when choosing Ξ_max.
pub const SYMBOL_CUTOFF: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMethod {
    ClosedForm,
    /// Trapezoid sum over a uniform ξ-grid, evaluated exactly at the
    /// requested offsets (no interpolation).
    FftTable,
    RadialQuadrature,
}

#[derive(Debug, Clone)]
enum Imp {
    /// Even union of intervals: Σ cos(αcΔ) sin(αwΔ)/(πΔ)
    Sinc { parts: Vec<(f64, f64)> },
    /// Σ_m w_m cos(α ξ_m Δ)
    Cosine { xi: Vec<f64>, w: Vec<f64> },
    /// α R J₁(αR|Δ|) / (2π|Δ|)
    Disk { radius: f64 },
    /// Σ_k w_k J₀(α ρ_k |Δ|)
    Bessel { rho: Vec<f64>, w: Vec<f64> },
}

/// Integral kernel Δ ↦ K(Δ) = (α/2π)^d ∫ e^{iαξ·Δ} a(ξ) dξ of Op_α(a).
///
/// Symbols whose limit set is a single interval or disk off the origin are
/// first translated to be centred; the translation multiplies the kernel by
/// e^{iαc·Δ}, which is a unitary conjugation of W_α on any Λ, so spectra and
/// traces are unchanged. `modulation` records c.
#[derive(Debug, Clone)]
pub struct KernelEval {
    pub alpha: f64,
    pub dim: usize,
    pub method: KernelMethod,
    /// Momentum cutoff.
    pub xi_max: f64,
    /// Estimate of the kernel error from discarding |ξ| > Ξ_max.
    pub tail_error: f64,
    /// Largest |Δ| for which the table is alias-free.
    pub reach: f64,
    pub modulation: Vec<f64>,
    pub symbol: SymbolSpec,
    imp: Imp,
}

/// Kernel alias-free for offsets up to the diameter of the unit interval.
pub fn build_kernel(symbol: &SymbolSpec, alpha: f64) -> Result<KernelEval> {
    build_kernel_with_reach(symbol, alpha, 1.0)
}

/// Bring a symbol into a form whose kernel is real.
pub fn centred_symbol(symbol: &SymbolSpec) -> Result<(SymbolSpec, Vec<f64>)> {
    let d = symbol.dim();
    if symbol.is_even() {
        return Ok((symbol.clone(), vec![0.0; d]));
    }
    let shift = match (&symbol.omega, symbol.omega.as_disk()) {
        (Region::Line(p), _) if p.len() == 1 => vec![0.5 * (p[0].0 + p[0].1)],
        (_, Some((c, _))) => vec![c[0], c[1]],
        _ => {
            return Err(Error::Unsupported(
                "kernel needs an even (1D) or radial (2D) symbol up to translation".into(),
            ))
        }
    };
    Ok((symbol.translated(&shift)?, shift))
}

pub fn build_kernel_with_reach(symbol: &SymbolSpec, alpha: f64, reach: f64) -> Result<KernelEval> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter("alpha must be positive".into()));
    }
    let (sym, modulation) = centred_symbol(symbol)?;
    let reach = reach.max(1e-12);
    let d = sym.dim();
    let xi_max = sym.support_radius(SYMBOL_CUTOFF);
    let base = |method, imp, tail_error| KernelEval {
        alpha,
        dim: d,
        method,
        xi_max,
        tail_error,
        reach,
        modulation: modulation.clone(),
        symbol: sym.clone(),
        imp,
    };
    match (&sym.kind, d) {
        (SymbolKind::Indicator, 1) => {
            let parts = sym.omega.intervals_slice().unwrap().to_vec();
            Ok(base(KernelMethod::ClosedForm, Imp::Sinc { parts }, 0.0))
        }
        (SymbolKind::Indicator, _) => {
            let (_, radius) = sym.omega.as_disk().expect("radial indicator is a disk");
            Ok(base(KernelMethod::ClosedForm, Imp::Disk { radius }, 0.0))
        }
        (_, 1) => {
            let t = sym.temperature();
            // alias distance beyond which the kernel has decayed to ~1e−13
            let decay = match &sym.kind {
                SymbolKind::Mollified { mollifier: Mollifier::Gaussian, .. } => 12.0 / (t * alpha),
                SymbolKind::Mollified { mollifier: Mollifier::CompactBump, .. } => 900.0 / (t * alpha),
                _ => 60.0 / (PI * t * alpha),
            };
            let period = reach + decay.max(reach);
            let dxi = 2.0 * PI / (alpha * period);
            let m = (xi_max / dxi).ceil() as usize + 1;
            let mut xi = Vec::with_capacity(m + 1);
            let mut w = Vec::with_capacity(m + 1);
            for k in 0..=m {
                let x = k as f64 * dxi;
                let half = if k == 0 { 0.5 } else { 1.0 };
                xi.push(x);
                w.push(alpha / PI * dxi * half * sym.radial_value(x));
            }
            let tail = alpha / PI * tail_integral(&sym, xi_max, 1);
            Ok(base(KernelMethod::FftTable, Imp::Cosine { xi, w }, tail))
        }
        _ => {
            let t = sym.temperature();
            let kf = sym.omega.as_disk().map(|(_, r)| r).unwrap_or(xi_max);
            let (rho, v) = radial_rule(kf, t, xi_max, PI / (alpha * reach));
            let pref = alpha * alpha / (2.0 * PI);
            let w = rho.iter().zip(&v).map(|(r, v)| pref * v * r * sym.radial_value(*r)).collect();
            let tail = pref * tail_integral(&sym, xi_max, 2);
            Ok(base(KernelMethod::RadialQuadrature, Imp::Bessel { rho, w }, tail))
        }
    }
}

/// Gauss-Legendre panels on [0, Ξ]: at most `wave` wide, and at most T/2
/// wide inside the transition layer |ρ − k_F| < 40T.
pub(crate) fn radial_rule(kf: f64, t: f64, xi_max: f64, wave: f64) -> (Vec<f64>, Vec<f64>) {
    let lo = (kf - 40.0 * t).max(0.0);
    let hi = (kf + 40.0 * t).min(xi_max);
    let mut rho = Vec::new();
    let mut w = Vec::new();
    for (a, b, width) in [(0.0, lo, wave), (lo, hi, wave.min(0.5 * t)), (hi, xi_max, wave)] {
        if b > a {
            let (x, v) = panel_rule(&[a, b], width, 12);
            rho.extend(x);
            w.extend(v);
        }
    }
    (rho, w)
}

/// ∫ over |ξ| > Ξ of a, radially.
fn tail_integral(sym: &SymbolSpec, xi_max: f64, dim: usize) -> f64 {
    let t = sym.temperature().max(1e-300);
    let r = Adaptive::new(1e-30, 1e-6).integrate(
        |x| {
            let a = sym.radial_value(x);
            if dim == 1 {
                a
            } else {
                x * a
            }
        },
        xi_max,
        xi_max + 60.0 * t,
    );
    r.value
}

impl KernelEval {
    /// K(Δ) for |Δ| ≤ reach.
    pub fn eval(&self, delta: &[f64]) -> f64 {
        match &self.imp {
            Imp::Sinc { parts } => {
                let x = delta[0];
                parts
                    .iter()
                    .map(|&(l, r)| {
                        let c = 0.5 * (l + r);
                        let hw = 0.5 * (r - l);
                        let s = self.alpha * hw;
                        let sinc = if x.abs() * s < 1e-8 { s } else { (s * x).sin() / x };
                        (self.alpha * c * x).cos() * sinc / PI
                    })
                    .sum()
            }
            Imp::Cosine { xi, w } => {
                let x = self.alpha * delta[0];
                xi.iter().zip(w).map(|(k, w)| w * (k * x).cos()).sum()
            }
            Imp::Disk { radius } => {
                let r = delta[0].hypot(delta[1]);
                let z = self.alpha * radius * r;
                if z < 1e-8 {
                    self.alpha * self.alpha * radius * radius / (4.0 * PI)
                } else {
                    self.alpha * radius * libm::j1(z) / (2.0 * PI * r)
                }
            }
            Imp::Bessel { rho, w } => {
                let r = self.alpha * delta[0].hypot(delta[1]);
                rho.iter().zip(w).map(|(k, w)| w * libm::j0(k * r)).sum()
            }
        }
    }

    pub fn k0(&self) -> f64 {
        self.eval(&vec![0.0; self.dim])
    }

    /// K at the 1D offsets `base + k·h`, k = k_lo..=k_hi.
    pub(crate) fn table_1d(&self, base: f64, h: f64, k_lo: i64, k_hi: i64) -> Vec<f64> {
        (k_lo..=k_hi).map(|k| self.eval(&[base + k as f64 * h])).collect()
    }

}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{make_fermi, make_mollified, Dispersion};

    #[test]
    fn sinc_kernel_examples() {
        let a = SymbolSpec::indicator(Region::interval(-1.0, 1.0).unwrap());
        let k = build_kernel(&a, 7.0).unwrap();
        assert_eq!(k.method, KernelMethod::ClosedForm);
        assert!((k.k0() - 7.0 / PI).abs() < 1e-14);
        for &d in &[0.013, 0.2, -0.7] {
            assert!((k.eval(&[d]) - (7.0 * d).sin() / (PI * d)).abs() < 1e-14);
            assert_eq!(k.eval(&[d]), k.eval(&[-d]));
        }
    }

    #[test]
    fn shifted_interval_is_modulated() {
        let a = SymbolSpec::indicator(Region::interval(0.0, 2.0).unwrap());
        let k = build_kernel(&a, 5.0).unwrap();
        assert_eq!(k.modulation, vec![1.0]);
        assert!((k.k0() - 5.0 / PI).abs() < 1e-14);
        let two = SymbolSpec::indicator(Region::intervals(vec![(0.0, 1.0), (2.0, 3.0)]).unwrap());
        assert!(build_kernel(&two, 1.0).is_err());
    }

    #[test]
    fn disk_kernel_value_at_origin() {
        let a = SymbolSpec::indicator(Region::disk([0.0, 0.0], 1.0).unwrap());
        let k = build_kernel(&a, 3.0).unwrap();
        assert!((k.k0() - 9.0 / (4.0 * PI)).abs() < 1e-14);
        // small-argument continuity
        assert!((k.eval(&[1e-6, 0.0]) - k.k0()).abs() < 1e-9);
    }

    #[test]
    fn fermi_kernel_matches_direct_fourier_integral() {
        let a = make_fermi(Dispersion::quadratic(1, 1.0).unwrap(), 0.1).unwrap();
        let alpha = 30.0;
        let k = build_kernel(&a, alpha).unwrap();
        assert_eq!(k.method, KernelMethod::FftTable);
        for &d in &[0.0, 0.05, 0.31, 0.9] {
            let direct = Adaptive::new(1e-14, 1e-12)
                .integrate_with_breaks(
                    &mut |x: f64| alpha / PI * a.radial_value(x) * (alpha * x * d).cos(),
                    &[0.0, 0.5, 1.0, 1.5, k.xi_max],
                )
                .value;
            assert!((k.eval(&[d]) - direct).abs() < 1e-9, "d={d}: {} vs {direct}", k.eval(&[d]));
        }
    }

    #[test]
    fn fermi_kernel_tends_to_sinc() {
        let sharp = build_kernel(&SymbolSpec::indicator(Region::interval(-1.0, 1.0).unwrap()), 20.0).unwrap();
        let mut prev = f64::INFINITY;
        for t in [0.1, 0.01, 0.001] {
            let a = make_fermi(Dispersion::quadratic(1, 1.0).unwrap(), t).unwrap();
            let k = build_kernel(&a, 20.0).unwrap();
            let gap = [0.1, 0.4, 0.8].iter().map(|d| (k.eval(&[*d]) - sharp.eval(&[*d])).abs()).fold(0.0, f64::max);
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn radial_kernel_matches_disk_closed_form_for_sharp_profile() {
        // a narrow compact mollifier is exactly the indicator away from the rim
        let a = make_mollified(Region::disk([0.0, 0.0], 1.0).unwrap(), 1e-3, Mollifier::CompactBump).unwrap();
        let k = build_kernel(&a, 4.0).unwrap();
        assert_eq!(k.method, KernelMethod::RadialQuadrature);
        let sharp = build_kernel(&SymbolSpec::indicator(Region::disk([0.0, 0.0], 1.0).unwrap()), 4.0).unwrap();
        for &r in &[0.0, 0.3, 0.9] {
            assert!((k.eval(&[r, 0.0]) - sharp.eval(&[r, 0.0])).abs() < 1e-3);
        }
        assert!((k.eval(&[0.3, 0.4]) - k.eval(&[0.5, 0.0])).abs() < 1e-14);
    }
}
