//! Symbols a(ξ): the sharp indicator χ_Ω, the Fermi symbol
//! 1/(1 + exp((h(ξ) − μ)/T)) and indicators mollified at width T.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quad::{composite_gauss, gauss_legendre};
use crate::regions::{Region, Shape};
use crate::special::logistic_tail;

/// Free Hamiltonian h(ξ) = |ξ|² with chemical potential μ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dispersion {
    pub dim: usize,
    pub mu: f64,
    /// Growth exponents of h, kept as metadata.
    pub beta1: f64,
    pub beta2: f64,
}

impl Dispersion {
    pub fn quadratic(dim: usize, mu: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(invalid("dispersion dimension must be 1 or 2"));
        }
        Ok(Self { dim, mu, beta1: 2.0, beta2: 2.0 })
    }

    pub fn h(&self, xi: &[f64]) -> f64 {
        xi.iter().map(|x| x * x).sum()
    }

    pub fn grad(&self, xi: &[f64]) -> Vec<f64> {
        xi.iter().map(|x| 2.0 * x).collect()
    }

    /// Sub-level set {h < μ}.
    pub fn fermi_sea(&self) -> Result<Region> {
        if !(self.mu > 0.0) {
            return Err(invalid("level set {h = μ} is empty for μ <= 0"));
        }
        let kf = self.mu.sqrt();
        match self.dim {
            1 => Region::interval(-kf, kf),
            _ => Region::disk([0.0, 0.0], kf),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mollifier {
    /// ζ(ξ) = c_d exp(−|ξ|²)
    Gaussian,
    /// ζ(ξ) = c_d exp(−1/(1 − |ξ|²)) on the unit ball
    CompactBump,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SymbolKind {
    Indicator,
    Fermi { dispersion: Dispersion, temperature: f64 },
    Mollified { temperature: f64, mollifier: Mollifier },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolSpec {
    pub kind: SymbolKind,
    /// The limit set Ω of a_T as T → 0.
    #[serde(skip)]
    pub omega: Region,
    /// Declared decay exponent β of |a_T − χ_Ω|; metadata only.
    pub decay_beta: f64,
}

impl SymbolSpec {
    pub fn indicator(omega: Region) -> Self {
        Self { kind: SymbolKind::Indicator, omega, decay_beta: f64::INFINITY }
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    pub fn temperature(&self) -> f64 {
        match &self.kind {
            SymbolKind::Indicator => 0.0,
            SymbolKind::Fermi { temperature, .. } | SymbolKind::Mollified { temperature, .. } => *temperature,
        }
    }

    pub fn is_smooth(&self) -> bool {
        !matches!(self.kind, SymbolKind::Indicator)
    }

    pub fn with_decay_beta(mut self, beta: f64) -> Self {
        self.decay_beta = beta;
        self
    }

    /// Short tag used in records.
    pub fn label(&self) -> String {
        match &self.kind {
            SymbolKind::Indicator => "indicator".into(),
            SymbolKind::Fermi { dispersion, temperature } => {
                format!("fermi(mu={},T={})", dispersion.mu, temperature)
            }
            SymbolKind::Mollified { temperature, mollifier } => {
                format!("mollified({mollifier:?},T={temperature})")
            }
        }
    }

    /// a(ξ) ∈ [0, 1].
    pub fn eval(&self, xi: &[f64]) -> Result<f64> {
        if xi.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: xi.len() });
        }
        Ok(self.value(xi))
    }

    pub(crate) fn value(&self, xi: &[f64]) -> f64 {
        match &self.kind {
            SymbolKind::Indicator => {
                if self.omega.indicator(xi).unwrap_or(false) {
                    1.0
                } else {
                    0.0
                }
            }
            SymbolKind::Fermi { dispersion, temperature } => {
                logistic_tail((dispersion.h(xi) - dispersion.mu) / temperature)
            }
            SymbolKind::Mollified { temperature, mollifier } => {
                mollified_value(&self.omega, *temperature, *mollifier, xi)
            }
        }
    }

    /// (a(ξ), 1 − a(ξ)) with the complement computed without cancellation
    /// where a closed form allows it.
    pub fn value_pair(&self, xi: &[f64]) -> (f64, f64) {
        match &self.kind {
            SymbolKind::Fermi { dispersion, temperature } => {
                let x = (dispersion.h(xi) - dispersion.mu) / temperature;
                (logistic_tail(x), logistic_tail(-x))
            }
            SymbolKind::Mollified { temperature, mollifier: Mollifier::Gaussian } => match &self.omega {
                Region::Line(parts) if parts.len() == 1 => {
                    let (l, r) = parts[0];
                    let t = *temperature;
                    let x = xi[0];
                    let a = 0.5 * erf_difference((r - x) / t, (l - x) / t);
                    let c = 0.5 * (libm::erfc((r - x) / t) + libm::erfc((x - l) / t));
                    (a.clamp(0.0, 1.0), c.clamp(0.0, 1.0))
                }
                _ => {
                    let a = self.value(xi);
                    (a, 1.0 - a)
                }
            },
            _ => {
                let a = self.value(xi);
                (a, 1.0 - a)
            }
        }
    }

    /// The same symbol with Ω translated by −`shift`.
    pub fn translated(&self, shift: &[f64]) -> Result<SymbolSpec> {
        if shift.iter().all(|s| *s == 0.0) {
            return Ok(self.clone());
        }
        if matches!(self.kind, SymbolKind::Fermi { .. }) {
            return Err(Error::Unsupported("translating a Fermi symbol".into()));
        }
        let omega = match &self.omega {
            Region::Line(parts) => Region::intervals(parts.iter().map(|&(l, r)| (l - shift[0], r - shift[0])).collect())?,
            Region::Plane(shapes) => {
                let moved: Vec<Shape> = shapes
                    .iter()
                    .map(|s| match s {
                        Shape::Disk { center, radius } => Shape::Disk {
                            center: [center[0] - shift[0], center[1] - shift[1]],
                            radius: *radius,
                        },
                        Shape::Rect { lo, hi } => Shape::Rect {
                            lo: [lo[0] - shift[0], lo[1] - shift[1]],
                            hi: [hi[0] - shift[0], hi[1] - shift[1]],
                        },
                        Shape::Polygon { vertices } => Shape::Polygon {
                            vertices: vertices.iter().map(|v| [v[0] - shift[0], v[1] - shift[1]]).collect(),
                        },
                    })
                    .collect();
                Region::plane(moved)?
            }
        };
        Ok(SymbolSpec { omega, ..self.clone() })
    }

    /// Whether a(−ξ) = a(ξ), so that the kernel is real.
    pub fn is_even(&self) -> bool {
        match &self.kind {
            SymbolKind::Fermi { .. } => true,
            _ => match &self.omega {
                Region::Line(parts) => {
                    let n = parts.len();
                    (0..n).all(|i| {
                        let (a, b) = parts[i];
                        let (c, d) = parts[n - 1 - i];
                        (a + d).abs() < 1e-14 * (1.0 + d.abs()) && (b + c).abs() < 1e-14 * (1.0 + c.abs())
                    })
                }
                Region::Plane(_) => self.is_radial(),
            },
        }
    }

    /// Whether a depends on |ξ| only (2D).
    pub fn is_radial(&self) -> bool {
        if self.dim() != 2 {
            return false;
        }
        match &self.kind {
            SymbolKind::Fermi { .. } => true,
            _ => matches!(self.omega.as_disk(), Some((c, _)) if c == [0.0, 0.0]),
        }
    }

    /// Profile r ↦ a(r e) for symbols that are even (1D) or radial (2D).
    pub fn radial_value(&self, r: f64) -> f64 {
        match self.dim() {
            1 => self.value(&[r]),
            _ => self.value(&[r, 0.0]),
        }
    }

    /// ρ(ξ) = dist(ξ, ∂Ω), computed from the shape.
    pub fn rho(&self, xi: &[f64]) -> Result<f64> {
        self.omega.distance_to_boundary(xi)
    }

    /// Radius beyond which a(ξ) < `tol` for every |ξ|, found by bisection
    /// on the radial profile outside the limit region.
    pub fn support_radius(&self, tol: f64) -> f64 {
        let extent = farthest_point(&self.omega);
        if !self.is_smooth() {
            return extent;
        }
        let t = self.temperature();
        let probe = |r: f64| -> f64 {
            // sup of a over the sphere |ξ| = r, sampled
            if self.dim() == 1 {
                self.value(&[r]).max(self.value(&[-r]))
            } else if self.is_radial() {
                self.radial_value(r)
            } else {
                (0..64)
                    .map(|k| {
                        let th = 2.0 * PI * k as f64 / 64.0;
                        self.value(&[r * th.cos(), r * th.sin()])
                    })
                    .fold(0.0, f64::max)
            }
        };
        let mut a = extent;
        let mut b = extent + t;
        while probe(b) >= tol {
            a = b;
            b = extent + 2.0 * (b - extent);
        }
        for _ in 0..80 {
            let m = 0.5 * (a + b);
            if probe(m) >= tol {
                a = m;
            } else {
                b = m;
            }
        }
        b
    }
}

/// sup |ξ| over the closure of Ω.
fn farthest_point(omega: &Region) -> f64 {
    match omega {
        Region::Line(parts) => parts.iter().fold(0.0f64, |m, &(l, r)| m.max(l.abs()).max(r.abs())),
        Region::Plane(shapes) => shapes
            .iter()
            .map(|s| match s {
                Shape::Disk { center, radius } => center[0].hypot(center[1]) + radius,
                Shape::Rect { lo, hi } => [lo[0], hi[0]]
                    .iter()
                    .flat_map(|x| [lo[1], hi[1]].map(|y| x.hypot(y)))
                    .fold(0.0, f64::max),
                Shape::Polygon { vertices } => vertices.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max),
            })
            .fold(0.0, f64::max),
    }
}

/// Fermi symbol with limit region {h < μ}.
pub fn make_fermi(dispersion: Dispersion, temperature: f64) -> Result<SymbolSpec> {
    if !(temperature > 0.0) {
        return Err(invalid("temperature must be positive"));
    }
    let omega = dispersion.fermi_sea()?;
    Ok(SymbolSpec {
        kind: SymbolKind::Fermi { dispersion, temperature },
        omega,
        decay_beta: 4.0,
    })
}

/// χ_Ω convolved with ζ_T(ξ) = T^{-d} ζ(ξ/T).
pub fn make_mollified(omega: Region, temperature: f64, mollifier: Mollifier) -> Result<SymbolSpec> {
    if !(temperature > 0.0) {
        return Err(invalid("mollifier width must be positive"));
    }
    match &omega {
        Region::Line(_) => {}
        Region::Plane(shapes) => {
            if !shapes.iter().all(|s| matches!(s, Shape::Disk { .. })) {
                return Err(Error::Unsupported("2D mollification is implemented for disks only".into()));
            }
        }
    }
    Ok(SymbolSpec {
        kind: SymbolKind::Mollified { temperature, mollifier },
        omega,
        decay_beta: 4.0,
    })
}

fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

struct BumpTables {
    /// 1/∫ bump over (−1, 1)
    c1: f64,
    /// 1/∫ bump(|x|) over the unit disk
    c2: f64,
    gl_x: Vec<f64>,
    gl_w: Vec<f64>,
}

fn bump_tables() -> &'static BumpTables {
    static TABLES: OnceLock<BumpTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let (x, w) = composite_gauss(-1.0, 1.0, 64, 16);
        let i1: f64 = x.iter().zip(&w).map(|(x, w)| w * bump(*x)).sum();
        let (r, wr) = composite_gauss(0.0, 1.0, 64, 16);
        let i2: f64 = r.iter().zip(&wr).map(|(r, w)| w * 2.0 * PI * r * bump(*r)).sum();
        let (gl_x, gl_w) = gauss_legendre(48);
        BumpTables { c1: 1.0 / i1, c2: 1.0 / i2, gl_x, gl_w }
    })
}

/// ∫_{-1}^{s} c₁ bump(u) du, clamped to exactly 0 / 1 outside (−1, 1).
fn bump_cdf(s: f64) -> f64 {
    if s <= -1.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let t = bump_tables();
    // integrate from the nearer end for accuracy
    let (a, b, flip) = if s <= 0.0 { (-1.0, s, false) } else { (s, 1.0, true) };
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    // two panels: the bump is flat near ±1 and peaked at 0
    let mut acc = 0.0;
    for (lo, hi) in [(a, c), (c, b)] {
        let hh = 0.5 * (hi - lo);
        let cc = 0.5 * (hi + lo);
        acc += t.gl_x.iter().zip(&t.gl_w).map(|(x, w)| w * hh * bump(cc + hh * x)).sum::<f64>();
    }
    let _ = h;
    let v = t.c1 * acc;
    if flip {
        1.0 - v
    } else {
        v
    }
}

fn erf_difference(u: f64, v: f64) -> f64 {
    // erf(u) − erf(v) for u ≥ v, accurate in both tails
    if v >= 0.0 {
        libm::erfc(v) - libm::erfc(u)
    } else if u <= 0.0 {
        libm::erfc(-u) - libm::erfc(-v)
    } else {
        libm::erf(u) - libm::erf(v)
    }
}

fn mollified_value(omega: &Region, t: f64, mollifier: Mollifier, xi: &[f64]) -> f64 {
    match omega {
        Region::Line(parts) => {
            let x = xi[0];
            let v: f64 = parts
                .iter()
                .map(|&(l, r)| match mollifier {
                    Mollifier::Gaussian => 0.5 * erf_difference((r - x) / t, (l - x) / t),
                    Mollifier::CompactBump => bump_cdf((x - l) / t) - bump_cdf((x - r) / t),
                })
                .sum();
            v.clamp(0.0, 1.0)
        }
        Region::Plane(shapes) => {
            let p = [xi[0], xi[1]];
            let v: f64 = shapes
                .iter()
                .map(|s| match s {
                    Shape::Disk { center, radius } => {
                        let d = (p[0] - center[0]).hypot(p[1] - center[1]);
                        mollified_disk(d, *radius, t, mollifier)
                    }
                    _ => 0.0,
                })
                .sum();
            v.clamp(0.0, 1.0)
        }
    }
}

/// Fraction of the circle of radius s around a point at distance d from
/// the centre of a disk of radius R that lies inside the disk.
fn arc_fraction(d: f64, s: f64, radius: f64) -> f64 {
    if s <= radius - d {
        return 1.0;
    }
    if s >= radius + d || s <= d - radius {
        return 0.0;
    }
    let c = ((d * d + s * s - radius * radius) / (2.0 * d * s)).clamp(-1.0, 1.0);
    c.acos() / PI
}

fn mollified_disk(d: f64, radius: f64, t: f64, mollifier: Mollifier) -> f64 {
    let reach = match mollifier {
        Mollifier::Gaussian => 9.0 * t,
        Mollifier::CompactBump => t,
    };
    let rho = (d - radius).abs();
    if rho >= reach {
        return if d < radius { 1.0 } else { 0.0 };
    }
    // radial density of ζ_T times the circumference
    let density = |s: f64| match mollifier {
        Mollifier::Gaussian => 2.0 * s / (t * t) * (-(s * s) / (t * t)).exp(),
        Mollifier::CompactBump => {
            let c2 = bump_tables().c2;
            2.0 * PI * s * c2 * bump(s / t) / (t * t)
        }
    };
    let mut breaks = vec![0.0, reach];
    for b in [(radius - d).abs(), radius + d] {
        if b > 0.0 && b < reach {
            breaks.push(b);
        }
    }
    breaks.sort_by(f64::total_cmp);
    let mut acc = 0.0;
    // s = a + (b − a) u²(3 − 2u) removes the square-root kinks of the arc
    // fraction at the breakpoints
    let (gx, gw) = composite_gauss(0.0, 1.0, 4, 16);
    for w in breaks.windows(2) {
        let len = w[1] - w[0];
        acc += gx
            .iter()
            .zip(&gw)
            .map(|(u, wu)| {
                let s = w[0] + len * u * u * (3.0 - 2.0 * u);
                let jac = len * 6.0 * u * (1.0 - u);
                wu * jac * density(s) * arc_fraction(d, s, radius)
            })
            .sum::<f64>();
    }
    acc
}

/// Where to probe the symbol in [`verify_condition_at`].
#[derive(Debug, Clone)]
pub enum SampleSpec {
    Explicit(Vec<Vec<f64>>),
    /// Points at signed distance k·T from a handful of boundary nodes, for
    /// each multiple k, plus the same number of bulk points.
    BoundaryLayers { multiples: Vec<f64> },
}

impl SampleSpec {
    pub fn default_layers() -> Self {
        SampleSpec::BoundaryLayers {
            multiples: vec![0.0, 0.1, 0.3, 1.0, 2.0, 4.0, 8.0, 16.0, 40.0],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionSample {
    pub xi: Vec<f64>,
    pub rho: f64,
    /// |∇^m a_T| divided by the claimed bound, m = 0, 1, 2.
    pub ratios: [f64; 3],
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub temperature: f64,
    pub beta: f64,
    pub samples: Vec<ConditionSample>,
    pub max_ratio: [f64; 3],
}

/// Scan observed derivatives of a_T against
/// (T + ρ̃)^{−m} ⟨ρ/T⟩^{−β} with finite differences of step T/100.
pub fn verify_condition_at(symbol: &SymbolSpec, samples: &SampleSpec, beta: f64) -> Result<ConditionReport> {
    if !symbol.is_smooth() {
        return Err(invalid("the indicator symbol has no smoothness to verify (T = 0)"));
    }
    let t = symbol.temperature();
    let d = symbol.dim();
    let points: Vec<Vec<f64>> = match samples {
        SampleSpec::Explicit(p) => p.clone(),
        SampleSpec::BoundaryLayers { multiples } => {
            let q = symbol.omega.boundary_quadrature(8)?;
            let mut pts = Vec::new();
            let step = (q.nodes.len() / 4).max(1);
            for node in q.nodes.iter().step_by(step) {
                for &k in multiples {
                    for sgn in [-1.0, 1.0] {
                        let p: Vec<f64> = (0..d).map(|c| node.point[c] + sgn * k * t * node.normal[c]).collect();
                        pts.push(p);
                    }
                }
            }
            pts
        }
    };
    let h = t / 100.0;
    let mut out = Vec::with_capacity(points.len());
    let mut max_ratio = [0.0f64; 3];
    for xi in points {
        if xi.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: xi.len() });
        }
        let rho = symbol.rho(&xi)?;
        let rho_t = rho.min(1.0);
        let decay = (1.0 + (rho / t).powi(2)).sqrt().powf(-beta);
        let chi = if symbol.omega.indicator(&xi)? { 1.0 } else { 0.0 };
        let a0 = symbol.value(&xi);
        let mut grad2 = 0.0;
        let mut hess2 = 0.0;
        for i in 0..d {
            let mut p = xi.clone();
            p[i] += h;
            let ap = symbol.value(&p);
            p[i] -= 2.0 * h;
            let am = symbol.value(&p);
            grad2 += ((ap - am) / (2.0 * h)).powi(2);
            hess2 += ((ap - 2.0 * a0 + am) / (h * h)).powi(2);
            for j in (i + 1)..d {
                let mut q = xi.clone();
                let mut f = |di: f64, dj: f64| {
                    q[i] = xi[i] + di;
                    q[j] = xi[j] + dj;
                    symbol.value(&q)
                };
                let mixed = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
                hess2 += 2.0 * mixed * mixed;
            }
        }
        let bound = |m: i32| (t + rho_t).powi(-m) * decay;
        let ratios = [
            (a0 - chi).abs() / decay,
            grad2.sqrt() / bound(1),
            hess2.sqrt() / bound(2),
        ];
        for m in 0..3 {
            if ratios[m].is_finite() {
                max_ratio[m] = max_ratio[m].max(ratios[m]);
            }
        }
        out.push(ConditionSample { xi, rho, ratios });
    }
    Ok(ConditionReport { temperature: t, beta, samples: out, max_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fermi1(t: f64) -> SymbolSpec {
        make_fermi(Dispersion::quadratic(1, 1.0).unwrap(), t).unwrap()
    }

    #[test]
    fn fermi_examples() {
        let a = fermi1(0.3);
        assert_eq!(a.eval(&[1.0]).unwrap(), 0.5);
        let a = fermi1(0.1);
        let expect = 1.0 / (1.0 + (-10f64).exp());
        assert!((a.eval(&[0.0]).unwrap() - expect).abs() < 1e-15);
        assert!((expect - 0.999_954_6).abs() < 1e-7);
        // tiny T stays finite and exact
        let a = fermi1(1e-4);
        assert_eq!(a.eval(&[0.0]).unwrap(), 1.0);
        assert_eq!(a.eval(&[2.0]).unwrap(), 0.0);
        assert_eq!(a.eval(&[1.0]).unwrap(), 0.5);
    }

    #[test]
    fn fermi_limit_region_and_tail_bound() {
        let a = fermi1(0.05);
        assert_eq!(a.omega, Region::interval(-1.0, 1.0).unwrap());
        let a2 = make_fermi(Dispersion::quadratic(2, 1.0).unwrap(), 0.05).unwrap();
        assert_eq!(a2.omega, Region::disk([0.0, 0.0], 1.0).unwrap());
        for &t in &[0.2, 0.1, 0.05] {
            let a = fermi1(t);
            let gap = 1.0 - a.eval(&[0.5]).unwrap();
            assert!(gap <= (-0.75 / t).exp());
        }
        assert!(make_fermi(Dispersion::quadratic(1, -1.0).unwrap(), 0.1).is_err());
        assert!(make_fermi(Dispersion::quadratic(1, 1.0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn indicator_example() {
        let a = SymbolSpec::indicator(Region::interval(-1.0, 1.0).unwrap());
        assert_eq!(a.eval(&[2.0]).unwrap(), 0.0);
        assert_eq!(a.eval(&[0.0]).unwrap(), 1.0);
        assert!(a.eval(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn gaussian_mollifier_edge_profile() {
        let t = 0.1;
        let a = make_mollified(Region::interval(-1.0, 1.0).unwrap(), t, Mollifier::Gaussian).unwrap();
        // half height up to the opposite edge's tail ½ erfc(2/T)
        let tail = 0.5 * libm::erfc(2.0 / t);
        assert!((a.eval(&[1.0]).unwrap() - (0.5 - tail)).abs() < 1e-15);
        assert!((a.eval(&[-1.0]).unwrap() - (0.5 - tail)).abs() < 1e-15);
        let small = make_mollified(Region::interval(-1.0, 1.0).unwrap(), 1e-3, Mollifier::Gaussian).unwrap();
        assert!((small.eval(&[0.3]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn compact_bump_is_exact_away_from_boundary() {
        let t = 0.05;
        let a = make_mollified(Region::interval(-1.0, 1.0).unwrap(), t, Mollifier::CompactBump).unwrap();
        assert_eq!(a.eval(&[1.0 - 2.0 * t]).unwrap(), 1.0);
        assert_eq!(a.eval(&[1.0 + 2.0 * t]).unwrap(), 0.0);
        assert!((a.eval(&[1.0]).unwrap() - 0.5).abs() < 1e-12);
        let d = make_mollified(Region::disk([0.0, 0.0], 1.0).unwrap(), t, Mollifier::CompactBump).unwrap();
        assert_eq!(d.eval(&[0.0, 1.0 - 2.0 * t]).unwrap(), 1.0);
        assert_eq!(d.eval(&[1.0 + 2.0 * t, 0.0]).unwrap(), 0.0);
        // near a straight-ish edge the 2D profile is close to ½
        assert!((d.eval(&[1.0, 0.0]).unwrap() - 0.5).abs() < 0.02);
    }

    #[test]
    fn mollified_disk_gaussian_matches_direct_2d_quadrature() {
        let t = 0.2;
        let a = make_mollified(Region::disk([0.0, 0.0], 1.0).unwrap(), t, Mollifier::Gaussian).unwrap();
        let p = [0.9, 0.3];
        // brute-force polar grid over the disk
        let (r, wr) = composite_gauss(0.0, 1.0, 40, 8);
        let (th, wt) = composite_gauss(0.0, 2.0 * PI, 80, 8);
        let mut acc = 0.0;
        for (ri, wri) in r.iter().zip(&wr) {
            for (ti, wti) in th.iter().zip(&wt) {
                let (x, y) = (ri * ti.cos(), ri * ti.sin());
                let d2 = (x - p[0]).powi(2) + (y - p[1]).powi(2);
                acc += wri * wti * ri * (-d2 / (t * t)).exp() / (PI * t * t);
            }
        }
        assert!((a.eval(&p).unwrap() - acc).abs() < 1e-9, "{} vs {acc}", a.eval(&p).unwrap());
        assert!(make_mollified(
            Region::polygon(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap(),
            0.1,
            Mollifier::Gaussian
        )
        .is_err());
    }

    #[test]
    fn support_radius_bisection() {
        let a = fermi1(0.1);
        let r = a.support_radius(1e-14);
        let exact = (1.0 + 0.1 * ((1.0 - 1e-14) / 1e-14f64).ln()).sqrt();
        assert!((r - exact).abs() < 1e-9);
    }

    #[test]
    fn condition_scan_is_stable_under_refinement() {
        let r1 = verify_condition_at(&fermi1(0.05), &SampleSpec::default_layers(), 4.0).unwrap();
        let r2 = verify_condition_at(&fermi1(0.025), &SampleSpec::default_layers(), 4.0).unwrap();
        for m in 0..3 {
            assert!(r1.max_ratio[m].is_finite() && r1.max_ratio[m] > 0.0);
            let q = r1.max_ratio[m] / r2.max_ratio[m];
            assert!(q > 0.5 && q < 2.0, "m={m}: {} vs {}", r1.max_ratio[m], r2.max_ratio[m]);
        }
        let ind = SymbolSpec::indicator(Region::interval(-1.0, 1.0).unwrap());
        assert!(verify_condition_at(&ind, &SampleSpec::default_layers(), 4.0).is_err());
        let bump = make_mollified(Region::interval(-1.0, 1.0).unwrap(), 0.05, Mollifier::CompactBump).unwrap();
        let far = verify_condition_at(&bump, &SampleSpec::Explicit(vec![vec![0.0], vec![1.5]]), 4.0).unwrap();
        assert_eq!(far.max_ratio, [0.0, 0.0, 0.0]);
    }
}
