use std::f64::consts::PI;
use std::sync::OnceLock;

use faer::{Mat, Side};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::regions::{Point2, Region};

use super::kernel::KernelEval;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridMethod {
    /// Angular-momentum sectors when Λ is a disk and the symbol radial,
    /// otherwise a point grid.
    Auto,
    Grid,
    Sectors,
}

/// Grid policy for the Nyström discretization.
#[derive(Debug, Clone, Serialize)]
pub struct GridSpec {
    /// Nodes per unit length; default max(8αΞ/(2π), 32).
    pub points_per_unit: Option<f64>,
    /// Total node count (1D), overriding `points_per_unit`.
    pub total: Option<usize>,
    pub min_points_per_period: f64,
    pub allow_under_resolved: bool,
    pub max_rows: usize,
    pub override_memory_guard: bool,
    pub method: GridMethod,
    pub two_grid: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points_per_unit: None,
            total: None,
            min_points_per_period: 8.0,
            allow_under_resolved: false,
            max_rows: 20_000,
            override_memory_guard: false,
            method: GridMethod::Auto,
            two_grid: true,
        }
    }
}

impl GridSpec {
    pub fn with_total(n: usize) -> Self {
        Self { total: Some(n), ..Self::default() }
    }

    pub fn with_points_per_unit(p: f64) -> Self {
        Self { points_per_unit: Some(p), ..Self::default() }
    }

    /// Nodes per unit length for kernel `k`.
    pub fn density(&self, alpha: f64, xi_max: f64) -> f64 {
        self.points_per_unit
            .unwrap_or_else(|| (8.0 * alpha * xi_max / (2.0 * PI)).max(32.0))
    }

    /// The coarse grid of the two-grid diagnostic.
    pub fn halved(&self, alpha: f64, xi_max: f64) -> Self {
        let mut g = self.clone();
        match self.total {
            Some(n) => g.total = Some((n / 2).max(1)),
            None => g.points_per_unit = Some(0.5 * self.density(alpha, xi_max)),
        }
        g.allow_under_resolved = true;
        g.two_grid = false;
        g
    }

    pub(crate) fn check_rows(&self, rows: usize) -> Result<()> {
        if rows > self.max_rows && !self.override_memory_guard {
            return Err(Error::MemoryGuard { rows, limit: self.max_rows });
        }
        Ok(())
    }

    pub(crate) fn check_ratio(&self, ratio: f64) -> Result<()> {
        if ratio < self.min_points_per_period && !self.allow_under_resolved {
            return Err(Error::Resolution { ratio, required: self.min_points_per_period });
        }
        Ok(())
    }
}

/// Nyström matrix A_ij = √(w_i w_j) K(x_i − x_j) of W_α(a; Λ).
#[derive(Debug)]
pub struct DiscretizedWH {
    pub alpha: f64,
    pub dim: usize,
    pub nodes: Vec<Point2>,
    pub weights: Vec<f64>,
    pub matrix: Mat<f64>,
    /// Grid points per period 2π/(αΞ_max).
    pub resolution_ratio: f64,
    pub k0: f64,
    eig: OnceLock<Vec<f64>>,
}

/// Discretize W_α(a; Λ) with the kernel `kernel`.
pub fn assemble(kernel: &KernelEval, region: &Region, grid: &GridSpec) -> Result<DiscretizedWH> {
    if region.dim() != kernel.dim {
        return Err(Error::DimensionMismatch { expected: kernel.dim, got: region.dim() });
    }
    let diam = region.diameter();
    if diam > kernel.reach * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "kernel table reaches |Δ| <= {} but the region has diameter {diam}",
            kernel.reach
        )));
    }
    match region {
        Region::Line(parts) => assemble_line(kernel, parts, grid),
        Region::Plane(_) => assemble_plane(kernel, region, grid),
    }
}

fn period(kernel: &KernelEval) -> f64 {
    2.0 * PI / (kernel.alpha * kernel.xi_max)
}

fn assemble_line(kernel: &KernelEval, parts: &[(f64, f64)], grid: &GridSpec) -> Result<DiscretizedWH> {
    let length: f64 = parts.iter().map(|(a, b)| b - a).sum();
    let density = match grid.total {
        Some(n) => n as f64 / length,
        None => {
            // an even integer count per unit keeps commensurate components
            // on a common lattice
            let d = grid.density(kernel.alpha, kernel.xi_max).ceil();
            d + (d as u64 % 2) as f64
        }
    };
    let counts: Vec<usize> = parts.iter().map(|(a, b)| (((b - a) * density - 1e-9).ceil() as usize).max(1)).collect();
    let rows: usize = counts.iter().sum();
    grid.check_rows(rows)?;
    let h_max = parts.iter().zip(&counts).map(|((a, b), n)| (b - a) / *n as f64).fold(0.0, f64::max);
    let ratio = period(kernel) / h_max;
    grid.check_ratio(ratio)?;

    let mut nodes = Vec::with_capacity(rows);
    let mut weights = Vec::with_capacity(rows);
    let mut starts = Vec::new();
    for ((a, b), n) in parts.iter().zip(&counts) {
        starts.push(nodes.len());
        let h = (b - a) / *n as f64;
        for i in 0..*n {
            nodes.push([a + (i as f64 + 0.5) * h, 0.0]);
            weights.push(h);
        }
    }
    let mut m = Mat::<f64>::zeros(rows, rows);
    for p in 0..parts.len() {
        for q in 0..=p {
            let (np, nq) = (counts[p], counts[q]);
            let (hp, hq) = (weights[starts[p]], weights[starts[q]]);
            let base = nodes[starts[p]][0] - nodes[starts[q]][0];
            let scale = (hp * hq).sqrt();
            if (hp - hq).abs() <= 1e-13 * hp {
                // Toeplitz block: offsets base + k h
                let lo = -(nq as i64 - 1);
                let table = kernel.table_1d(base, hp, lo, np as i64 - 1);
                for i in 0..np {
                    for j in 0..nq {
                        let v = scale * table[(i as i64 - j as i64 - lo) as usize];
                        m[(starts[p] + i, starts[q] + j)] = v;
                        m[(starts[q] + j, starts[p] + i)] = v;
                    }
                }
            } else {
                for i in 0..np {
                    for j in 0..nq {
                        let d = nodes[starts[p] + i][0] - nodes[starts[q] + j][0];
                        let v = scale * kernel.eval(&[d]);
                        m[(starts[p] + i, starts[q] + j)] = v;
                        m[(starts[q] + j, starts[p] + i)] = v;
                    }
                }
            }
        }
    }
    Ok(DiscretizedWH {
        alpha: kernel.alpha,
        dim: 1,
        nodes,
        weights,
        matrix: m,
        resolution_ratio: ratio,
        k0: kernel.k0(),
        eig: OnceLock::new(),
    })
}

fn assemble_plane(kernel: &KernelEval, region: &Region, grid: &GridSpec) -> Result<DiscretizedWH> {
    let density = match grid.total {
        Some(n) => (n as f64 / region.measure()).sqrt(),
        None => grid.density(kernel.alpha, kernel.xi_max),
    };
    let h = 1.0 / density;
    let ratio = period(kernel) / h;
    grid.check_ratio(ratio)?;
    let (lo, hi) = region.bounding_box();
    let nx = ((hi[0] - lo[0]) / h).ceil() as usize;
    let ny = ((hi[1] - lo[1]) / h).ceil() as usize;
    // centre the lattice on the bounding box
    let ox = 0.5 * (lo[0] + hi[0]) - 0.5 * nx as f64 * h;
    let oy = 0.5 * (lo[1] + hi[1]) - 0.5 * ny as f64 * h;
    let mut cells = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            let p = [ox + (i as f64 + 0.5) * h, oy + (j as f64 + 0.5) * h];
            if region.indicator(&p)? {
                cells.push((i, j, p));
            }
        }
    }
    let rows = cells.len();
    if rows == 0 {
        return Err(Error::Resolution { ratio, required: grid.min_points_per_period });
    }
    grid.check_rows(rows)?;
    // radial kernel: tabulate on the lattice of offsets
    let mut table = vec![0.0; (nx + 1) * (ny + 1)];
    for di in 0..=nx {
        for dj in 0..=ny {
            table[di * (ny + 1) + dj] = kernel.eval(&[di as f64 * h, dj as f64 * h]);
        }
    }
    let w = h * h;
    let mut m = Mat::<f64>::zeros(rows, rows);
    for a in 0..rows {
        for b in 0..=a {
            let di = cells[a].0.abs_diff(cells[b].0);
            let dj = cells[a].1.abs_diff(cells[b].1);
            let v = w * table[di * (ny + 1) + dj];
            m[(a, b)] = v;
            m[(b, a)] = v;
        }
    }
    Ok(DiscretizedWH {
        alpha: kernel.alpha,
        dim: 2,
        nodes: cells.iter().map(|c| c.2).collect(),
        weights: vec![w; rows],
        matrix: m,
        resolution_ratio: ratio,
        k0: kernel.k0(),
        eig: OnceLock::new(),
    })
}

impl DiscretizedWH {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    /// Ascending eigenvalues, computed once.
    pub fn eigenvalues(&self) -> Result<&[f64]> {
        if let Some(e) = self.eig.get() {
            return Ok(e);
        }
        let e = symmetric_eigenvalues(&self.matrix)?;
        Ok(self.eig.get_or_init(|| e))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows()).map(|i| self.matrix[(i, i)]).sum()
    }

    /// tr(A^p) by matrix products (no eigensolve).
    pub fn trace_power(&self, p: u32) -> f64 {
        trace_power(&self.matrix, p)
    }

    /// max |A_ij − A_ji| / max |A_ij|
    pub fn asymmetry(&self) -> f64 {
        let n = self.rows();
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                num = num.max((self.matrix[(i, j)] - self.matrix[(j, i)]).abs());
                den = den.max(self.matrix[(i, j)].abs());
            }
        }
        num / den.max(f64::MIN_POSITIVE)
    }

    /// max ‖Av − λv‖ / ‖A‖ over `samples` eigenpairs spread across the spectrum.
    pub fn eigen_residual(&self, samples: usize) -> Result<f64> {
        eigen_residual(&self.matrix, samples)
    }
}

pub(crate) fn symmetric_eigenvalues(m: &Mat<f64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut e = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Convergence(format!("symmetric eigensolver: {e:?}")))?;
    e.sort_by(f64::total_cmp);
    Ok(e)
}

pub(crate) fn trace_power(m: &Mat<f64>, p: u32) -> f64 {
    let n = m.nrows();
    match p {
        0 => n as f64,
        1 => (0..n).map(|i| m[(i, i)]).sum(),
        2 => {
            let mut s = 0.0;
            for j in 0..n {
                for i in 0..n {
                    s += m[(i, j)] * m[(j, i)];
                }
            }
            s
        }
        _ => {
            let half = p / 2;
            let mut b = m.clone();
            for _ in 1..half {
                b = &b * m;
            }
            let c = if p % 2 == 0 { b.clone() } else { &b * m };
            // tr(B C) = Σ B_ij C_ji
            let mut s = 0.0;
            for j in 0..n {
                for i in 0..n {
                    s += b[(i, j)] * c[(j, i)];
                }
            }
            s
        }
    }
}

pub(crate) fn eigen_residual(m: &Mat<f64>, samples: usize) -> Result<f64> {
    let n = m.nrows();
    if n == 0 {
        return Ok(0.0);
    }
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Convergence(format!("symmetric eigensolver: {e:?}")))?;
    let u = evd.U();
    let s = evd.S();
    let norm = (0..n).map(|k| s[k].abs()).fold(0.0, f64::max);
    let step = (n / samples.max(1)).max(1);
    let mut worst = 0.0f64;
    for k in (0..n).step_by(step) {
        let lam = s[k];
        let v = u.col(k);
        let av = m * v;
        let mut r = 0.0;
        for i in 0..n {
            r += (av[i] - lam * v[i]).powi(2);
        }
        worst = worst.max(r.sqrt() / norm.max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}
