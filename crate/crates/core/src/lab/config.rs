//! Experiment config files: named regions, symbols, functions and plans,
//! written as TOML tables of inline literals, e.g.
//!
//! ```toml
//! [regions]
//! lam = { kind = "interval", lo = 0.0, hi = 1.0 }
//!
//! [symbols]
//! fermi = { kind = "fermi", h = "quadratic", mu = 1.0, T = 0.05 }
//!
//! [functions]
//! eta1 = { name = "eta", gamma = 1.0 }
//!
//! [plans.sub]
//! regime = "sub_critical"
//! symbol = "fermi"
//! region = "lam"
//! function = "eta1"
//! start = 100.0
//! n_points = 4
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;

use super::plan::{plan_sweep, BaseConfig, ExperimentPlan};
use crate::error::{Error, Result};
use crate::regions::{Region, Shape};
use crate::specfun::{renyi_eta, SpectralFunction};
use crate::symbols::{make_fermi, make_mollified, Dispersion, Mollifier, SymbolSpec};
use crate::whop::{GridMethod, GridSpec};

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionLit {
    Interval { lo: f64, hi: f64 },
    Intervals { parts: Vec<[f64; 2]> },
    Disk { center: [f64; 2], radius: f64 },
    Rect { lo: [f64; 2], hi: [f64; 2] },
    Polygon { vertices: Vec<[f64; 2]> },
    /// Disjoint union of 2D shapes.
    Union { shapes: Vec<RegionLit> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RegionRef {
    Name(String),
    Literal(RegionLit),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolLit {
    Indicator {
        omega: RegionRef,
    },
    Fermi {
        #[serde(default = "quadratic")]
        h: String,
        #[serde(default = "one")]
        mu: f64,
        #[serde(rename = "T")]
        t: f64,
        #[serde(default = "one_dim")]
        dim: usize,
    },
    Mollified {
        omega: RegionRef,
        #[serde(rename = "T")]
        t: f64,
        #[serde(default = "gaussian")]
        mollifier: String,
    },
}

fn quadratic() -> String {
    "quadratic".into()
}
fn gaussian() -> String {
    "gaussian".into()
}
fn one() -> f64 {
    1.0
}
fn one_dim() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SymbolRef {
    Name(String),
    Literal(SymbolLit),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionLit {
    Eta { gamma: f64 },
    Monomial { p: u32 },
    Cusp { z: f64, gamma: f64 },
    Parabola,
    Linear { slope: f64, intercept: f64 },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FunctionRef {
    Name(String),
    Literal(FunctionLit),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// tr D_α(a, Λ; f)
    Trace,
    /// H_γ with f = η_γ
    Entanglement,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanLit {
    pub regime: super::plan::Regime,
    pub symbol: SymbolRef,
    pub region: RegionRef,
    pub function: FunctionRef,
    #[serde(default = "trace_quantity")]
    pub quantity: Quantity,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    pub n_points: usize,
    /// First α (first T for super-critical plans).
    pub start: f64,
    #[serde(default = "two")]
    pub ratio: f64,
    /// αT for sub-critical, critical and super-critical plans.
    pub product: Option<f64>,
    /// T for smooth fixed-T plans.
    #[serde(rename = "T")]
    pub temperature: Option<f64>,
    pub points_per_unit: Option<f64>,
    pub method: Option<String>,
    #[serde(default = "yes")]
    pub two_grid: bool,
    pub output: Option<String>,
}

fn trace_quantity() -> Quantity {
    Quantity::Trace
}
fn default_kappa() -> f64 {
    4.0
}
fn two() -> f64 {
    2.0
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub regions: BTreeMap<String, RegionLit>,
    #[serde(default)]
    pub symbols: BTreeMap<String, SymbolLit>,
    #[serde(default)]
    pub functions: BTreeMap<String, FunctionLit>,
    #[serde(default)]
    pub plans: BTreeMap<String, PlanLit>,
}

fn cfg(msg: impl std::fmt::Display) -> Error {
    Error::Config(msg.to_string())
}

/// Parse a single inline literal such as `{kind="disk", center=[0,0], radius=1}`.
pub fn parse_literal<T: DeserializeOwned>(text: &str) -> Result<T> {
    #[derive(Deserialize)]
    struct Wrap<T> {
        v: T,
    }
    let w: Wrap<T> = toml::from_str(&format!("v = {text}")).map_err(cfg)?;
    Ok(w.v)
}

/// A symbol whose smoothing scale can be reset, so plans can sweep T.
#[derive(Debug, Clone)]
pub enum SymbolFamily {
    Fixed(SymbolSpec),
    Fermi(Dispersion),
    Mollified { omega: Region, mollifier: Mollifier },
}

impl SymbolFamily {
    pub fn at(&self, temperature: f64) -> Result<SymbolSpec> {
        match self {
            SymbolFamily::Fixed(s) => Ok(s.clone()),
            SymbolFamily::Fermi(d) => make_fermi(d.clone(), temperature),
            SymbolFamily::Mollified { omega, mollifier } => make_mollified(omega.clone(), temperature, *mollifier),
        }
    }

    /// The limit set Ω of the family as T → 0.
    pub fn omega(&self) -> Result<Region> {
        match self {
            SymbolFamily::Fixed(s) => Ok(s.omega.clone()),
            SymbolFamily::Fermi(d) => d.fermi_sea(),
            SymbolFamily::Mollified { omega, .. } => Ok(omega.clone()),
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, SymbolFamily::Fixed(_))
    }
}

impl RegionLit {
    pub fn build(&self) -> Result<Region> {
        match self {
            RegionLit::Interval { lo, hi } => Region::interval(*lo, *hi),
            RegionLit::Intervals { parts } => Region::intervals(parts.iter().map(|p| (p[0], p[1])).collect()),
            RegionLit::Union { shapes } => {
                let mut out = Vec::new();
                for s in shapes {
                    match s.build()? {
                        Region::Plane(v) => out.extend(v),
                        Region::Line(_) => return Err(cfg("union members must be 2D shapes")),
                    }
                }
                Region::plane(out)
            }
            RegionLit::Disk { center, radius } => Region::disk(*center, *radius),
            RegionLit::Rect { lo, hi } => Region::rect(*lo, *hi),
            RegionLit::Polygon { vertices } => Region::polygon(vertices.clone()),
        }
    }
}

fn mollifier(name: &str) -> Result<Mollifier> {
    match name {
        "gaussian" => Ok(Mollifier::Gaussian),
        "bump" | "compact_bump" => Ok(Mollifier::CompactBump),
        other => Err(cfg(format!("unknown mollifier '{other}'"))),
    }
}

impl FunctionLit {
    pub fn build(&self) -> Result<SpectralFunction> {
        match self {
            FunctionLit::Eta { gamma } => renyi_eta(*gamma),
            FunctionLit::Monomial { p } => SpectralFunction::monomial(*p),
            FunctionLit::Cusp { z, gamma } => SpectralFunction::cusp(*z, *gamma),
            FunctionLit::Parabola => Ok(SpectralFunction::parabola()),
            FunctionLit::Linear { slope, intercept } => Ok(SpectralFunction::linear(*slope, *intercept)),
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(cfg)
    }

    /// A region by name, or an inline literal when `key` starts with `{`.
    pub fn region(&self, key: &str) -> Result<Region> {
        if key.trim_start().starts_with('{') {
            return parse_literal::<RegionLit>(key)?.build();
        }
        self.regions.get(key).ok_or_else(|| cfg(format!("unknown region '{key}'")))?.build()
    }

    pub fn region_ref(&self, r: &RegionRef) -> Result<Region> {
        match r {
            RegionRef::Name(n) => self.region(n),
            RegionRef::Literal(l) => l.build(),
        }
    }

    pub fn function(&self, key: &str) -> Result<SpectralFunction> {
        if key.trim_start().starts_with('{') {
            return parse_literal::<FunctionLit>(key)?.build();
        }
        self.functions.get(key).ok_or_else(|| cfg(format!("unknown function '{key}'")))?.build()
    }

    pub fn function_ref(&self, r: &FunctionRef) -> Result<SpectralFunction> {
        match r {
            FunctionRef::Name(n) => self.function(n),
            FunctionRef::Literal(l) => l.build(),
        }
    }

    pub fn family_lit(&self, lit: &SymbolLit) -> Result<SymbolFamily> {
        match lit {
            SymbolLit::Indicator { omega } => Ok(SymbolFamily::Fixed(SymbolSpec::indicator(self.region_ref(omega)?))),
            SymbolLit::Fermi { h, mu, dim, .. } => {
                if h != "quadratic" {
                    return Err(cfg(format!("unsupported dispersion '{h}'")));
                }
                Ok(SymbolFamily::Fermi(Dispersion::quadratic(*dim, *mu)?))
            }
            SymbolLit::Mollified { omega, mollifier: m, .. } => Ok(SymbolFamily::Mollified {
                omega: self.region_ref(omega)?,
                mollifier: mollifier(m)?,
            }),
        }
    }

    fn symbol_lit(&self, key: &str) -> Result<SymbolLit> {
        if key.trim_start().starts_with('{') {
            return parse_literal(key);
        }
        self.symbols.get(key).cloned().ok_or_else(|| cfg(format!("unknown symbol '{key}'")))
    }

    fn lit_temperature(lit: &SymbolLit) -> Option<f64> {
        match lit {
            SymbolLit::Indicator { .. } => None,
            SymbolLit::Fermi { t, .. } | SymbolLit::Mollified { t, .. } => Some(*t),
        }
    }

    /// A symbol at the temperature written in its literal.
    pub fn symbol(&self, key: &str) -> Result<SymbolSpec> {
        let lit = self.symbol_lit(key)?;
        let fam = self.family_lit(&lit)?;
        fam.at(Self::lit_temperature(&lit).unwrap_or(0.0))
    }

    pub fn family(&self, key: &str) -> Result<SymbolFamily> {
        self.family_lit(&self.symbol_lit(key)?)
    }

    pub fn family_ref(&self, r: &SymbolRef) -> Result<SymbolFamily> {
        match r {
            SymbolRef::Name(n) => self.family(n),
            SymbolRef::Literal(l) => self.family_lit(l),
        }
    }

    /// The canonical schedule of the named plan.
    pub fn plan(&self, name: &str) -> Result<ExperimentPlan> {
        let p = self.plans.get(name).ok_or_else(|| cfg(format!("unknown plan '{name}'")))?;
        let method = match p.method.as_deref() {
            None | Some("auto") => GridMethod::Auto,
            Some("grid") => GridMethod::Grid,
            Some("sectors") => GridMethod::Sectors,
            Some(other) => return Err(cfg(format!("unknown grid method '{other}'"))),
        };
        let grid = GridSpec { points_per_unit: p.points_per_unit, two_grid: p.two_grid, method, ..GridSpec::default() };
        let mut base = BaseConfig::new(
            self.family_ref(&p.symbol)?,
            self.region_ref(&p.region)?,
            self.function_ref(&p.function)?,
            p.start,
        );
        base.quantity = p.quantity;
        base.kappa = p.kappa;
        base.ratio = p.ratio;
        base.product = p.product;
        base.temperature = p.temperature;
        base.grid = grid;
        base.output = p.output.as_ref().map(PathBuf::from);
        plan_sweep(p.regime, base, p.n_points)
    }
}

/// Shapes of a 2D region, for callers that need to reject unions.
pub fn shapes(region: &Region) -> &[Shape] {
    match region {
        Region::Plane(s) => s,
        Region::Line(_) => &[],
    }
}
