//! Asymptotic coefficients: the boundary double integral 𝔙₁, the smooth
//! symbol coefficient 𝓑 in one dimension and its hyperplane lift 𝓑_d.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quad::Adaptive;
use crate::regions::{BoundaryQuadrature, Point2, Region, Shape};
use crate::specfun::{u_functional, u_two_point_pair, SpectralFunction};
use crate::symbols::SymbolSpec;

/// Values below this are treated as zero when deciding whether a line
/// restriction of a symbol contributes.
const NEGLIGIBLE: f64 = 1e-13;
const SUPPORT_CUTOFF: f64 = 1e-14;

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientResult {
    pub value: f64,
    pub error: f64,
    pub method: String,
    /// Successive refinements, last one is `value`.
    pub convergence: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CoefficientResult {
    fn exact(value: f64, method: &str) -> Self {
        Self { value, error: 0.0, method: method.into(), convergence: vec![value], notes: Vec::new() }
    }
}

fn dot(a: Point2, b: Point2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// (2π)^{-(d+1)} Σ_x Σ_ξ w_x w_ξ b(x, ξ) |n_x · n_ξ|
pub fn v1_from_rules<B: Fn(Point2, Point2) -> f64>(
    b: &B,
    boundary_lambda: &BoundaryQuadrature,
    boundary_omega: &BoundaryQuadrature,
) -> Result<f64> {
    if boundary_lambda.dim != boundary_omega.dim {
        return Err(Error::DimensionMismatch { expected: boundary_lambda.dim, got: boundary_omega.dim });
    }
    let d = boundary_lambda.dim as i32;
    let mut s = 0.0;
    for x in &boundary_lambda.nodes {
        for xi in &boundary_omega.nodes {
            s += x.weight * xi.weight * b(x.point, xi.point) * dot(x.normal, xi.normal).abs();
        }
    }
    Ok(s / (2.0 * PI).powi(d + 1))
}

/// 𝔙₁ with amplitude `b`, error from doubling the boundary nodes. The
/// rules are split where |n_x · n_ξ| has kinks.
pub fn v1<B: Fn(Point2, Point2) -> f64>(b: B, lambda: &Region, omega: &Region, nodes: usize) -> Result<CoefficientResult> {
    if lambda.dim() != omega.dim() {
        return Err(Error::DimensionMismatch { expected: lambda.dim(), got: omega.dim() });
    }
    if lambda.dim() == 1 {
        let q = |r: &Region| r.boundary_quadrature(1);
        let v = v1_from_rules(&b, &q(lambda)?, &q(omega)?)?;
        return Ok(CoefficientResult::exact(v, "point_sum"));
    }
    let rule = |n: usize| -> Result<f64> {
        let outer = lambda.boundary_panels(n, &omega.edge_normals())?;
        let mut s = 0.0;
        for x in &outer.nodes {
            let inner = omega.boundary_panels(n, &[x.normal])?;
            for xi in &inner.nodes {
                s += x.weight * xi.weight * b(x.point, xi.point) * dot(x.normal, xi.normal).abs();
            }
        }
        Ok(s / (2.0 * PI).powi(3))
    };
    let coarse = rule(nodes)?;
    let fine = rule(2 * nodes)?;
    Ok(CoefficientResult {
        value: fine,
        error: (fine - coarse).abs(),
        method: "boundary_panels".into(),
        convergence: vec![coarse, fine],
        notes: Vec::new(),
    })
}

/// 𝔙₁ (b ≡ 1) with the inner ∂Ω integral replaced by counting crossings of
/// random lines parallel to n_x. Each outer node draws from its own stream
/// of the seeded generator.
pub fn v1_ray_counting(lambda: &Region, omega: &Region, samples: usize, seed: u64) -> Result<CoefficientResult> {
    if lambda.dim() != 2 || omega.dim() != 2 {
        return Err(Error::Unsupported("ray counting needs d = 2".into()));
    }
    if samples < 2 {
        return Err(invalid("need at least 2 samples"));
    }
    let nodes_per = (samples / 64).clamp(16, 256);
    let q = lambda.boundary_panels(nodes_per, &omega.edge_normals())?;
    let per_node = (samples / q.nodes.len()).max(2);
    let mut est = 0.0;
    let mut var = 0.0;
    let mut retries = 0;
    for (i, node) in q.nodes.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let (f, se, r) = omega.flux_by_counting(node.normal, per_node, &mut rng)?;
        est += node.weight * f;
        var += (node.weight * se).powi(2);
        retries += r;
    }
    let norm = (2.0 * PI).powi(3);
    let mut notes = Vec::new();
    if retries > 0 {
        notes.push(format!("grazing retries: {retries}"));
    }
    Ok(CoefficientResult {
        value: est / norm,
        error: var.sqrt() / norm,
        method: "ray_counting".into(),
        convergence: vec![est / norm],
        notes,
    })
}

type Profile = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// A one-dimensional symbol t ↦ a(t), given as (a, 1 − a), together with the
/// points where it jumps in the T → 0 limit.
#[derive(Clone)]
pub struct Restriction {
    profile: Profile,
    pub edges: Vec<f64>,
    /// Transition width at each edge, 1/(4|a'|).
    pub widths: Vec<f64>,
    /// The smoothing scale of the family (T).
    pub temperature: f64,
    /// a < 1e-14 outside this interval.
    pub extent: (f64, f64),
    constant: bool,
}

impl std::fmt::Debug for Restriction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Restriction")
            .field("edges", &self.edges)
            .field("widths", &self.widths)
            .field("temperature", &self.temperature)
            .field("extent", &self.extent)
            .finish()
    }
}

impl Restriction {
    pub fn new(
        profile: impl Fn(f64) -> (f64, f64) + Send + Sync + 'static,
        edges: Vec<f64>,
        temperature: f64,
        extent: (f64, f64),
    ) -> Result<Self> {
        if !(temperature > 0.0) || !(extent.1 > extent.0) {
            return Err(invalid("restriction needs a positive temperature and a nonempty extent"));
        }
        let profile: Profile = Arc::new(profile);
        let widths = edges
            .iter()
            .map(|&e| {
                let h = 1e-4 * temperature;
                let slope = (profile(e + h).0 - profile(e - h).0) / (2.0 * h);
                let w = 0.25 / slope.abs();
                if w.is_finite() {
                    w.clamp(1e-3 * temperature, extent.1 - extent.0)
                } else {
                    temperature
                }
            })
            .collect();
        Ok(Self { profile, edges, widths, temperature, extent, constant: false })
    }

    pub fn constant(c: f64) -> Self {
        Self {
            profile: Arc::new(move |_| (c, 1.0 - c)),
            edges: Vec::new(),
            widths: Vec::new(),
            temperature: 1.0,
            extent: (-1.0, 1.0),
            constant: true,
        }
    }

    /// A smooth one-dimensional symbol.
    pub fn of_symbol(symbol: &SymbolSpec) -> Result<Self> {
        if symbol.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: symbol.dim() });
        }
        if !symbol.is_smooth() {
            return Err(Error::Unsupported("the smooth coefficient needs a smooth symbol".into()));
        }
        let r = symbol.support_radius(SUPPORT_CUTOFF);
        let edges = symbol.omega.intervals_slice().unwrap().iter().flat_map(|&(l, r)| [l, r]).collect();
        let s = symbol.clone();
        Self::new(move |t| s.value_pair(&[t]), edges, symbol.temperature(), (-r, r))
    }

    /// t ↦ a(offset·e⊥ + t·e) with e⊥ = (e_y, −e_x); `None` when the line
    /// sees only values below 1e-13.
    pub fn along_line(symbol: &SymbolSpec, e: Point2, offset: f64) -> Result<Option<Self>> {
        if symbol.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: symbol.dim() });
        }
        if !symbol.is_smooth() {
            return Err(Error::Unsupported("the smooth coefficient needs a smooth symbol".into()));
        }
        let r = symbol.support_radius(SUPPORT_CUTOFF);
        if offset.abs() >= r {
            return Ok(None);
        }
        let half = (r * r - offset * offset).sqrt();
        let base = [offset * e[1], -offset * e[0]];
        let point = move |t: f64| [base[0] + t * e[0], base[1] + t * e[1]];
        let mut off = offset;
        let edges = loop {
            match symbol.omega.ray_intersections(e, off) {
                Ok(v) => break v,
                Err(Error::Grazing { .. }) => off += 1e-12 * (1.0 + r),
                Err(err) => return Err(err),
            }
        };
        let peak = edges
            .iter()
            .chain(std::iter::once(&0.0))
            .map(|t| symbol.value_pair(&point(*t)).0)
            .fold(0.0, f64::max);
        if peak < NEGLIGIBLE {
            return Ok(None);
        }
        let s = symbol.clone();
        Self::new(move |t| s.value_pair(&point(t)), edges, symbol.temperature(), (-half, half)).map(Some)
    }

    /// t ↦ a(τt)
    pub fn scaled(&self, tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(invalid("scale must be positive"));
        }
        let p = self.profile.clone();
        Ok(Self {
            profile: Arc::new(move |t| p(tau * t)),
            edges: self.edges.iter().map(|e| e / tau).collect(),
            widths: self.widths.iter().map(|w| w / tau).collect(),
            temperature: self.temperature / tau,
            extent: (self.extent.0 / tau, self.extent.1 / tau),
            constant: self.constant,
        })
    }

    pub fn value(&self, t: f64) -> (f64, f64) {
        (self.profile)(t)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BOptions {
    /// r_split = θ·T
    pub theta: f64,
    /// ε_k = r_split·2^{-k}, k = 1..=levels
    pub levels: usize,
    pub rel_tol: f64,
}

impl Default for BOptions {
    fn default() -> Self {
        Self { theta: 1.0, levels: 10, rel_tol: 1e-6 }
    }
}

const LAYER: [f64; 11] = [-40.0, -12.0, -4.0, -1.5, -0.5, 0.0, 0.5, 1.5, 4.0, 12.0, 40.0];

fn sorted_breaks(mut v: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    v.push(lo);
    v.push(hi);
    v.retain(|b| *b >= lo && *b <= hi);
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

struct BEval<'a> {
    restr: &'a Restriction,
    f: &'a SpectralFunction,
    err: RefCell<Option<Error>>,
    calls: std::cell::Cell<usize>,
}

impl BEval<'_> {
    fn u(&self, p: (f64, f64), q: (f64, f64)) -> f64 {
        match u_two_point_pair(p.0, q.0, p.1, q.1, self.f) {
            Ok(r) => r.value,
            Err(e) => {
                self.err.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    }

    /// G(Δ) = ∫ U(a(ξ), a(ξ + Δ)) dξ
    fn g(&self, delta: f64) -> f64 {
        self.calls.set(self.calls.get() + 1);
        let r = self.restr;
        let (lo, hi) = (r.extent.0 - delta, r.extent.1);
        let mut br = vec![0.0, -delta];
        for (e, w) in r.edges.iter().zip(&r.widths) {
            for k in LAYER {
                br.push(e + k * w);
                br.push(e - delta + k * w);
            }
        }
        let br = sorted_breaks(br, lo, hi);
        let q = Adaptive { abs_tol: 1e-14, rel_tol: 1e-11, max_segments: 4000 };
        q.integrate_with_breaks(&mut |x: f64| self.u(r.value(x), r.value(x + delta)), &br).value
    }

    /// 2∫U(a(ξ), 0) dξ, the value of G beyond the support.
    fn g_inf(&self) -> f64 {
        let r = self.restr;
        let mut br = vec![0.0];
        for (e, w) in r.edges.iter().zip(&r.widths) {
            for k in LAYER {
                br.push(e + k * w);
            }
        }
        let br = sorted_breaks(br, r.extent.0, r.extent.1);
        let q = Adaptive { abs_tol: 1e-14, rel_tol: 1e-11, max_segments: 4000 };
        2.0 * q.integrate_with_breaks(&mut |x: f64| self.u(r.value(x), (0.0, 1.0)), &br).value
    }

    fn check(&self) -> Result<()> {
        match self.err.borrow_mut().take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

/// 𝓑(a; f) = (1/8π²) lim_{ε→0} ∬_{|ξ₁−ξ₂|>ε} U(a(ξ₁), a(ξ₂); f)/|ξ₁−ξ₂|²,
/// split at r = θT into the ε-limit part on (0, r) and a direct part.
pub fn b_coeff(restr: &Restriction, f: &SpectralFunction, opts: &BOptions) -> Result<CoefficientResult> {
    if restr.constant || f.is_affine() {
        return Ok(CoefficientResult::exact(0.0, "identically_zero"));
    }
    if !(opts.theta > 0.0) || opts.levels < 3 {
        return Err(invalid("need θ > 0 and at least three ε levels"));
    }
    let ev = BEval { restr, f, err: RefCell::new(None), calls: 0.into() };
    let norm = 1.0 / (4.0 * PI * PI);
    let r = opts.theta * restr.temperature;
    let span = restr.extent.1 - restr.extent.0;
    let wmax = restr.widths.iter().cloned().fold(r, f64::max);

    // Δ ∈ [r, span]: G varies where two edge layers overlap.
    let mut br = Vec::new();
    let mut s = r;
    while s < 40.0 * wmax {
        br.push(s);
        s *= 2.0;
    }
    for (i, (ei, wi)) in restr.edges.iter().zip(&restr.widths).enumerate() {
        for (ej, wj) in restr.edges.iter().zip(&restr.widths).skip(i + 1) {
            for k in LAYER {
                br.push((ei - ej).abs() + k * (wi + wj));
            }
        }
    }
    let br = sorted_breaks(br, r, span);
    let q = Adaptive { abs_tol: 1e-12, rel_tol: 1e-9, max_segments: 2000 };
    let outer = q.integrate_with_breaks(&mut |d: f64| ev.g(d) / (d * d), &br);
    ev.check()?;
    let tail = ev.g_inf() / span;
    ev.check()?;
    let b2 = norm * (outer.value + tail);

    // Δ ∈ (ε_k, r). G/Δ² is even and smooth at 0, so the partial integrals
    // carry errors in ε and ε³; two Richardson stages remove both.
    let qi = Adaptive { abs_tol: 1e-13, rel_tol: 1e-11, max_segments: 500 };
    let mut partial = 0.0;
    let mut prev_s = 0.0;
    let mut prev_r1: Option<f64> = None;
    let mut prev_r2: Option<f64> = None;
    let mut diffs = Vec::new();
    let mut trace = Vec::new();
    let mut hi = r;
    let mut converged = false;
    let mut b1 = 0.0;
    for _ in 0..opts.levels {
        let lo = 0.5 * hi;
        partial += qi.integrate(|d| ev.g(d) / (d * d), lo, hi).value;
        ev.check()?;
        hi = lo;
        let r1 = 2.0 * partial - prev_s;
        prev_s = partial;
        let Some(p1) = prev_r1.replace(r1) else { continue };
        let r2 = (8.0 * r1 - p1) / 7.0;
        b1 = norm * r2;
        trace.push(b1 + b2);
        if let Some(p2) = prev_r2.replace(r2) {
            let d = (r2 - p2).abs() * norm;
            diffs.push(d);
            if d <= opts.rel_tol * (b1 + b2).abs().max(1e-300) {
                converged = true;
                break;
            }
        }
    }
    let last = *diffs.last().unwrap_or(&f64::INFINITY);
    if !converged {
        let decreasing = diffs.windows(2).all(|w| w[1] <= w[0]);
        if !decreasing || !last.is_finite() {
            return Err(Error::Convergence(format!("ε sequence not converging: differences {diffs:?}")));
        }
    }
    let value = b1 + b2;
    let mut notes = vec![format!("r_split = {r:.3e}"), format!("G evaluations: {}", ev.calls.get())];
    if !outer.converged {
        notes.push("outer Δ quadrature hit its segment limit".into());
    }
    Ok(CoefficientResult {
        value,
        error: last + norm * outer.error,
        method: "split_epsilon_richardson".into(),
        convergence: trace,
        notes,
    })
}

/// Offsets where lines with direction `e` touch ∂Ω tangentially or pass
/// through a corner.
fn critical_offsets(omega: &Region, e: Point2) -> Vec<f64> {
    let eperp = [e[1], -e[0]];
    let mut out = Vec::new();
    if let Region::Plane(shapes) = omega {
        for s in shapes {
            match s {
                Shape::Disk { center, radius } => {
                    let c = dot(*center, eperp);
                    out.extend([c - radius, c + radius]);
                }
                Shape::Rect { lo, hi } => {
                    for p in [*lo, [hi[0], lo[1]], *hi, [lo[0], hi[1]]] {
                        out.push(dot(p, eperp));
                    }
                }
                Shape::Polygon { vertices } => out.extend(vertices.iter().map(|v| dot(*v, eperp))),
            }
        }
    }
    out
}

/// 𝒜_d(a, e; f) = ∫ 𝓑(a(ξ° + t e); f) dξ° over the line orthogonal to e.
pub fn a_d_coeff(symbol: &SymbolSpec, e: Point2, f: &SpectralFunction, opts: &BOptions) -> Result<CoefficientResult> {
    if symbol.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: symbol.dim() });
    }
    if !symbol.is_smooth() {
        return Err(Error::Unsupported("the smooth coefficient needs a smooth symbol".into()));
    }
    let n = e[0].hypot(e[1]);
    if (n - 1.0).abs() > 1e-12 {
        return Err(invalid("direction must be a unit vector"));
    }
    if f.is_affine() {
        return Ok(CoefficientResult::exact(0.0, "identically_zero"));
    }
    let r = symbol.support_radius(SUPPORT_CUTOFF);
    let t = symbol.temperature();
    // Radial symbols give the same restriction at ±s.
    let radial = symbol.is_radial();
    let lo = if radial { 0.0 } else { -r };
    let mut br = Vec::new();
    for c in critical_offsets(&symbol.omega, e) {
        for k in [-16.0, -4.0, -1.0, 0.0, 1.0, 4.0, 16.0] {
            br.push(c + k * t);
        }
        for k in [-2.0, 2.0] {
            br.push(c + k * t.sqrt());
        }
    }
    let br = sorted_breaks(br, lo, r);
    let err: RefCell<Option<Error>> = RefCell::new(None);
    let skipped = std::cell::Cell::new(0usize);
    let mut integrand = |s: f64| -> f64 {
        if err.borrow().is_some() {
            return 0.0;
        }
        let res = Restriction::along_line(symbol, e, s).and_then(|rs| match rs {
            Some(rs) => b_coeff(&rs, f, opts).map(|b| b.value),
            None => {
                skipped.set(skipped.get() + 1);
                Ok(0.0)
            }
        });
        res.unwrap_or_else(|e| {
            err.borrow_mut().get_or_insert(e);
            0.0
        })
    };
    let q = Adaptive { abs_tol: 1e-7, rel_tol: 1e-5, max_segments: 400 };
    let res = q.integrate_with_breaks(&mut integrand, &br);
    if let Some(e) = err.borrow_mut().take() {
        return Err(e);
    }
    let factor = if radial { 2.0 } else { 1.0 };
    let mut notes = vec![format!("restrictions below {NEGLIGIBLE:e} skipped: {}", skipped.get())];
    if !res.converged {
        notes.push("offset quadrature hit its segment limit".into());
    }
    Ok(CoefficientResult {
        value: factor * res.value,
        error: factor * res.error,
        method: "hyperplane_quadrature".into(),
        convergence: vec![factor * res.value],
        notes,
    })
}

/// 𝓑_d(a; ∂Λ, f) = (2π)^{-(d−1)} ∫_{∂Λ} 𝒜_d(a, n_x; f) dS_x. In one
/// dimension this is the sum of 𝓑 over the endpoints of Λ.
pub fn b_d_coeff(
    symbol: &SymbolSpec,
    boundary: &BoundaryQuadrature,
    f: &SpectralFunction,
    opts: &BOptions,
) -> Result<CoefficientResult> {
    if symbol.dim() != boundary.dim {
        return Err(Error::DimensionMismatch { expected: symbol.dim(), got: boundary.dim });
    }
    if boundary.dim == 1 {
        let b = b_coeff(&Restriction::of_symbol(symbol)?, f, opts)?;
        let k = boundary.nodes.iter().map(|n| n.weight).sum::<f64>();
        return Ok(CoefficientResult {
            value: k * b.value,
            error: k * b.error,
            method: format!("endpoint_sum({})", b.method),
            convergence: b.convergence.iter().map(|v| k * v).collect(),
            notes: b.notes,
        });
    }
    let norm = 1.0 / (2.0 * PI);
    if symbol.is_radial() {
        let a = a_d_coeff(symbol, [1.0, 0.0], f, opts)?;
        let w = boundary.total_weight();
        return Ok(CoefficientResult {
            value: norm * w * a.value,
            error: norm * w * a.error,
            method: "radial_hyperplane".into(),
            convergence: vec![norm * w * a.value],
            notes: a.notes,
        });
    }
    // Nodes sharing a normal share 𝒜_d.
    let mut cache: Vec<(Point2, f64, f64)> = Vec::new();
    let mut value = 0.0;
    let mut error = 0.0;
    for node in &boundary.nodes {
        let hit = cache.iter().find(|(n, _, _)| (n[0] - node.normal[0]).abs() < 1e-12 && (n[1] - node.normal[1]).abs() < 1e-12);
        let (v, e) = match hit {
            Some((_, v, e)) => (*v, *e),
            None => {
                let a = a_d_coeff(symbol, node.normal, f, opts)?;
                cache.push((node.normal, a.value, a.error));
                (a.value, a.error)
            }
        };
        value += node.weight * v;
        error += node.weight * e;
    }
    Ok(CoefficientResult {
        value: norm * value,
        error: norm * error,
        method: "boundary_hyperplane".into(),
        convergence: vec![norm * value],
        notes: vec![format!("distinct normals: {}", cache.len())],
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub temperatures: Vec<f64>,
    /// 𝓑_d(a_T)/log(1/T)
    pub ratios: Vec<f64>,
    /// Intercept of the linear fit of the ratios against 1/log(1/T).
    pub extrapolated: f64,
    /// U(f)·𝔙₁
    pub target: f64,
    /// |ratio − target| / |target| (absolute when the target is 0).
    pub gaps: Vec<f64>,
    pub monotone: bool,
}

/// 𝓑_d(a_T; ∂Λ, f)/log(1/T) along a decreasing temperature schedule,
/// compared with U(f)·𝔙₁(∂Λ, ∂Ω).
pub fn comparison_limit<F: Fn(f64) -> Result<SymbolSpec>>(
    family: F,
    f: &SpectralFunction,
    lambda: &Region,
    omega: &Region,
    temperatures: &[f64],
    opts: &BOptions,
) -> Result<ComparisonReport> {
    if temperatures.len() < 4 {
        return Err(invalid("need at least 4 temperatures"));
    }
    if !temperatures.windows(2).all(|w| w[1] < w[0]) || temperatures.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
        return Err(invalid("temperatures must decrease within (0, 1)"));
    }
    let u = u_functional(f)?.value;
    let v = v1(|_, _| 1.0, lambda, omega, 256)?.value;
    let target = u * v;
    let boundary = lambda.boundary_quadrature(256)?;
    let mut ratios = Vec::new();
    for &t in temperatures {
        let b = b_d_coeff(&family(t)?, &boundary, f, opts)?;
        ratios.push(b.value / (1.0 / t).ln());
    }
    let gap = |r: f64| if target == 0.0 { (r - target).abs() } else { ((r - target) / target).abs() };
    let gaps: Vec<f64> = ratios.iter().map(|r| gap(*r)).collect();
    let monotone = gaps.windows(2).all(|w| w[1] <= w[0]);
    let x: Vec<f64> = temperatures.iter().map(|t| 1.0 / (1.0 / t).ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = ratios.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&ratios).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    Ok(ComparisonReport {
        temperatures: temperatures.to_vec(),
        ratios,
        extrapolated: my - slope * mx,
        target,
        gaps,
        monotone,
    })
}
