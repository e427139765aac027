//! Sweep schedules over (α, T).

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::config::{Quantity, SymbolFamily};
use crate::error::{invalid, Result};
use crate::regions::Region;
use crate::specfun::SpectralFunction;
use crate::whop::GridSpec;

/// αT at which the sub- and super-critical regimes meet.
pub const REGIME_THRESHOLD: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    SmoothFixedT,
    SubCritical,
    Critical,
    SuperCritical,
}

impl Regime {
    /// Default αT for the canonical schedule.
    pub fn default_product(self) -> f64 {
        match self {
            Regime::SubCritical => 0.25,
            Regime::Critical => 1.0,
            Regime::SuperCritical => 4.0,
            Regime::SmoothFixedT => f64::NAN,
        }
    }

    /// Whether (α, T) belongs to the regime. Critical points are checked
    /// against the plan as a whole in [`ExperimentPlan::validate`].
    pub fn admits(self, alpha: f64, temperature: f64) -> bool {
        let at = alpha * temperature;
        match self {
            Regime::SubCritical => at <= REGIME_THRESHOLD,
            Regime::SuperCritical => at >= REGIME_THRESHOLD,
            Regime::Critical | Regime::SmoothFixedT => true,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::SmoothFixedT => "smooth_fixed_t",
            Regime::SubCritical => "sub_critical",
            Regime::Critical => "critical",
            Regime::SuperCritical => "super_critical",
        }
    }
}

/// Everything a plan needs besides its regime and length.
#[derive(Debug, Clone)]
pub struct BaseConfig {
    pub symbol: SymbolFamily,
    pub region: Region,
    pub function: SpectralFunction,
    pub quantity: Quantity,
    pub kappa: f64,
    /// First α, or first T for super-critical plans.
    pub start: f64,
    /// Growth factor of α, or the divisor of T for super-critical plans.
    pub ratio: f64,
    /// αT, defaulting to the regime's canonical value.
    pub product: Option<f64>,
    /// Fixed T for smooth plans.
    pub temperature: Option<f64>,
    pub grid: GridSpec,
    pub output: Option<PathBuf>,
}

impl BaseConfig {
    pub fn new(symbol: SymbolFamily, region: Region, function: SpectralFunction, start: f64) -> Self {
        Self {
            symbol,
            region,
            function,
            quantity: Quantity::Trace,
            kappa: 4.0,
            start,
            ratio: 2.0,
            product: None,
            temperature: None,
            grid: GridSpec::default(),
            output: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub regime: Regime,
    pub symbol: SymbolFamily,
    pub region: Region,
    pub function: SpectralFunction,
    pub quantity: Quantity,
    pub kappa: f64,
    /// (α, T) pairs in execution order.
    pub points: Vec<(f64, f64)>,
    pub grid: GridSpec,
    pub output: Option<PathBuf>,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        for &(a, t) in &self.points {
            if !(a > 0.0 && a.is_finite()) || !(t >= 0.0 && t.is_finite()) {
                return Err(invalid(format!("bad sweep point (α={a}, T={t})")));
            }
            if !self.regime.admits(a, t) {
                return Err(invalid(format!("point (α={a}, T={t}) violates the {} regime", self.regime.name())));
            }
            if self.symbol.is_fixed() != (t == 0.0) {
                return Err(invalid(format!("T={t} does not match the symbol family")));
            }
        }
        if self.regime == Regime::Critical {
            if let Some(&(a0, t0)) = self.points.first() {
                let p0 = a0 * t0;
                if self.points.iter().any(|(a, t)| ((a * t - p0) / p0).abs() > 1e-12) {
                    return Err(invalid("critical plan must keep αT constant"));
                }
            }
        }
        if self.regime == Regime::SmoothFixedT {
            if let Some(&(_, t0)) = self.points.first() {
                if self.points.iter().any(|(_, t)| *t != t0) {
                    return Err(invalid("smooth plan must keep T fixed"));
                }
            }
        }
        Ok(())
    }
}

/// Canonical schedule for `regime`: α geometric with T = (αT)/α, T halving
/// with α = (αT)/T for super-critical plans, T fixed for smooth plans.
pub fn plan_sweep(regime: Regime, base: BaseConfig, n_points: usize) -> Result<ExperimentPlan> {
    if n_points < 4 {
        return Err(invalid("a sweep needs at least 4 points"));
    }
    if !(base.start > 0.0 && base.start.is_finite()) || !(base.ratio > 1.0 && base.ratio.is_finite()) {
        return Err(invalid("start must be positive and ratio greater than 1"));
    }
    let product = base.product.unwrap_or(regime.default_product());
    let geometric = |k: usize| base.start * base.ratio.powi(k as i32);
    let points: Vec<(f64, f64)> = match regime {
        Regime::SmoothFixedT => {
            if base.product.is_some() {
                return Err(invalid("smooth plans take a fixed T, not αT"));
            }
            let t = match (&base.symbol, base.temperature) {
                (SymbolFamily::Fixed(_), None | Some(0.0)) => 0.0,
                (SymbolFamily::Fixed(_), Some(_)) => return Err(invalid("sharp symbols have T = 0")),
                (_, Some(t)) if t > 0.0 => t,
                _ => return Err(invalid("smooth plan needs a positive T")),
            };
            (0..n_points).map(|k| (geometric(k), t)).collect()
        }
        _ => {
            if base.symbol.is_fixed() {
                return Err(invalid(format!("{} plans need a temperature-dependent symbol", regime.name())));
            }
            if base.temperature.is_some() {
                return Err(invalid(format!("{} plans derive T from αT", regime.name())));
            }
            if !(product > 0.0 && product.is_finite()) {
                return Err(invalid("αT must be positive"));
            }
            match regime {
                Regime::SuperCritical => (0..n_points)
                    .map(|k| {
                        let t = base.start / base.ratio.powi(k as i32);
                        (product / t, t)
                    })
                    .collect(),
                _ => (0..n_points).map(|k| (geometric(k), product / geometric(k))).collect(),
            }
        }
    };
    let plan = ExperimentPlan {
        regime,
        symbol: base.symbol,
        region: base.region,
        function: base.function,
        quantity: base.quantity,
        kappa: base.kappa,
        points,
        grid: base.grid,
        output: base.output,
    };
    plan.validate()?;
    Ok(plan)
}
