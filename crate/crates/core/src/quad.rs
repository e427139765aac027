//! One-dimensional quadrature: Gauss-Legendre panels, adaptive
//! Gauss-Kronrod (7/15) and a tanh-sinh rule on the unit interval that
//! hands the integrand both `t` and `1 - t` so endpoint singularities can
//! be evaluated without cancellation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

/// Value plus an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule: `panels` equal panels on [a, b] with
/// `order` nodes each. Returns (nodes, weights).
pub fn composite_gauss(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut xs = Vec::with_capacity(panels * order);
    let mut ws = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + h * p as f64;
        for (x, w) in gx.iter().zip(&gw) {
            xs.push(lo + 0.5 * h * (x + 1.0));
            ws.push(0.5 * h * w);
        }
    }
    (xs, ws)
}

/// Composite Gauss-Legendre over consecutive breakpoints, each piece split
/// into panels no wider than `max_width`.
pub fn panel_rule(breaks: &[f64], max_width: f64, order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::new();
    let mut ws = Vec::new();
    for win in breaks.windows(2) {
        let (a, b) = (win[0], win[1]);
        if b <= a {
            continue;
        }
        let panels = ((b - a) / max_width).ceil().max(1.0) as usize;
        let (x, w) = composite_gauss(a, b, panels, order);
        xs.extend(x);
        ws.extend(w);
    }
    (xs, ws)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive Gauss-Kronrod quadrature with optional interior breakpoints.
#[derive(Debug, Clone)]
pub struct Adaptive {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_segments: 2000,
        }
    }
}

impl Adaptive {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> QuadResult {
        self.integrate_with_breaks(&mut f, &[a, b])
    }

    /// `breaks` must be increasing; points outside (first, last) are ignored.
    pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(&self, f: &mut F, breaks: &[f64]) -> QuadResult {
        let mut heap = BinaryHeap::new();
        let mut total = 0.0;
        let mut err = 0.0;
        for w in breaks.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            let (v, e) = gk15(f, w[0], w[1]);
            total += v;
            err += e;
            heap.push(Segment {
                a: w[0],
                b: w[1],
                value: v,
                error: e,
            });
        }
        let mut converged = true;
        while err > self.abs_tol.max(self.rel_tol * total.abs()) {
            if heap.len() >= self.max_segments {
                converged = false;
                break;
            }
            let Some(seg) = heap.pop() else { break };
            let m = 0.5 * (seg.a + seg.b);
            if m <= seg.a || m >= seg.b {
                heap.push(seg);
                converged = false;
                break;
            }
            let (v1, e1) = gk15(f, seg.a, m);
            let (v2, e2) = gk15(f, m, seg.b);
            total += v1 + v2 - seg.value;
            err += e1 + e2 - seg.error;
            heap.push(Segment { a: seg.a, b: m, value: v1, error: e1 });
            heap.push(Segment { a: m, b: seg.b, value: v2, error: e2 });
        }
        // Re-sum to shed accumulated rounding from the running updates.
        let value: f64 = heap.iter().map(|s| s.value).sum();
        let error: f64 = heap.iter().map(|s| s.error).sum();
        QuadResult { value, error, converged }
    }
}

/// Tanh-sinh quadrature of `f` over (0, 1) where the integrand is supplied
/// as `f(t, 1 - t)` and the Jacobian already includes a factor `t(1-t)`:
/// the rule computes `∫ g(t) / (t(1-t)) dt` given `g`.
///
/// Integrands with algebraic endpoint behaviour `t^(γ-1)` converge
/// double-exponentially.
pub fn tanh_sinh_over_t1mt<F: FnMut(f64, f64) -> f64>(mut g: F, tol: f64) -> QuadResult {
    const U_MAX: f64 = 6.0;
    let mut h = 0.5;
    let node = |u: f64| {
        let s = PI * u.sinh();
        // t = 1/(1+e^{-s}), 1-t = 1/(1+e^{s})
        let t = 1.0 / (1.0 + (-s).exp());
        let omt = 1.0 / (1.0 + s.exp());
        (t, omt, PI * u.cosh())
    };
    let mut sum = {
        let (t, omt, jac) = node(0.0);
        g(t, omt) * jac
    };
    let n0 = (U_MAX / h) as i64;
    for k in 1..=n0 {
        let u = k as f64 * h;
        for &uu in &[u, -u] {
            let (t, omt, jac) = node(uu);
            if t > 0.0 && omt > 0.0 {
                sum += g(t, omt) * jac;
            }
        }
    }
    let mut prev = sum * h;
    for _level in 0..9 {
        h *= 0.5;
        let n = (U_MAX / h) as i64;
        let mut k = 1;
        while k <= n {
            let u = k as f64 * h;
            for &uu in &[u, -u] {
                let (t, omt, jac) = node(uu);
                if t > 0.0 && omt > 0.0 {
                    sum += g(t, omt) * jac;
                }
            }
            k += 2;
        }
        let cur = sum * h;
        let diff = (cur - prev).abs();
        if diff <= tol.max(1e-15 * cur.abs()) && _level >= 2 {
            return QuadResult { value: cur, error: diff, converged: true };
        }
        prev = cur;
    }
    QuadResult {
        value: prev,
        error: f64::NAN,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(7);
        // degree 12 polynomial
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((v - 2.0 / 13.0).abs() < 1e-14);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_sqrt_endpoint() {
        let r = Adaptive::new(1e-12, 1e-12).integrate(|x| x.sqrt(), 0.0, 1.0);
        assert!(r.converged);
        assert!((r.value - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn tanh_sinh_weak_singularity() {
        // ∫ t^{-3/4} (1-t)^{-1/2} dt = B(1/4, 1/2)
        let r = tanh_sinh_over_t1mt(|t, omt| t * omt * t.powf(-0.75) * omt.powf(-0.5), 1e-12);
        let beta = 5.244_115_108_584_239_6; // Γ(1/4)Γ(1/2)/Γ(3/4)
        assert!(r.converged);
        assert!((r.value - beta).abs() < 1e-9, "{}", r.value);
    }
}
