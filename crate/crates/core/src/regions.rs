//! Concrete regions in one and two dimensions: finite unions of open
//! intervals, and finite disjoint unions of disks, axis-aligned boxes and
//! simple counter-clockwise polygons.
//!
//! Lines used by [`Region::ray_intersections`] are parametrised as
//! `offset * e⊥ + t * e` with `e⊥ = (e_y, -e_x)`, so for `e = (0, 1)` the
//! offset is the x coordinate and for `e = (1, 0)` it is `-y`.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

pub type Point2 = [f64; 2];

const GRAZE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Disk { center: Point2, radius: f64 },
    Rect { lo: Point2, hi: Point2 },
    Polygon { vertices: Vec<Point2> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Region {
    /// Sorted, pairwise separated open intervals.
    Line(Vec<(f64, f64)>),
    Plane(Vec<Shape>),
}

/// One node of a boundary rule. In one dimension only the first component
/// of `point` and `normal` is used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    pub point: Point2,
    pub normal: Point2,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryQuadrature {
    pub dim: usize,
    pub nodes: Vec<BoundaryNode>,
    /// Points where the outward normal jumps.
    pub corners: Vec<Point2>,
}

impl BoundaryQuadrature {
    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }

    /// Same nodes with every weight multiplied by `factor`.
    pub fn scaled_weights(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for n in &mut out.nodes {
            n.weight *= factor;
        }
        out
    }
}

fn cross(a: Point2, b: Point2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn sub(a: Point2, b: Point2) -> Point2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: Point2, b: Point2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: Point2) -> f64 {
    a[0].hypot(a[1])
}

fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = sub(b, a);
    let ap = sub(p, a);
    let s = (dot(ap, ab) / dot(ab, ab)).clamp(0.0, 1.0);
    norm(sub(ap, [s * ab[0], s * ab[1]]))
}

fn segments_intersect(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool {
    let d1 = cross(sub(q2, q1), sub(p1, q1));
    let d2 = cross(sub(q2, q1), sub(p2, q1));
    let d3 = cross(sub(p2, p1), sub(q1, p1));
    let d4 = cross(sub(p2, p1), sub(q2, p1));
    if ((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0)) {
        return true;
    }
    let on = |a: Point2, b: Point2, p: Point2, d: f64| {
        d == 0.0
            && p[0] >= a[0].min(b[0])
            && p[0] <= a[0].max(b[0])
            && p[1] >= a[1].min(b[1])
            && p[1] <= a[1].max(b[1])
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

impl Shape {
    fn polygon_vertices(&self) -> Option<Vec<Point2>> {
        match self {
            Shape::Rect { lo, hi } => Some(vec![*lo, [hi[0], lo[1]], *hi, [lo[0], hi[1]]]),
            Shape::Polygon { vertices } => Some(vertices.clone()),
            Shape::Disk { .. } => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Shape::Disk { center, radius } => {
                if !(*radius > 0.0) || !radius.is_finite() || !center.iter().all(|c| c.is_finite()) {
                    return Err(Error::DegenerateShape(format!("disk radius {radius}")));
                }
            }
            Shape::Rect { lo, hi } => {
                if !(hi[0] > lo[0] && hi[1] > lo[1]) {
                    return Err(Error::DegenerateShape("box with empty interior".into()));
                }
            }
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                if n < 3 {
                    return Err(Error::DegenerateShape("polygon needs at least 3 vertices".into()));
                }
                for i in 0..n {
                    if vertices[i] == vertices[(i + 1) % n] {
                        return Err(Error::DegenerateShape(format!("repeated vertex {i}")));
                    }
                }
                if signed_area(vertices) <= 0.0 {
                    return Err(Error::InvalidRegion("polygon must be counter-clockwise".into()));
                }
                for i in 0..n {
                    for j in (i + 1)..n {
                        let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                        if adjacent {
                            continue;
                        }
                        let (a1, a2) = (vertices[i], vertices[(i + 1) % n]);
                        let (b1, b2) = (vertices[j], vertices[(j + 1) % n]);
                        if segments_intersect(a1, a2, b1, b2) {
                            return Err(Error::InvalidRegion("self-intersecting polygon".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn area(&self) -> f64 {
        match self {
            Shape::Disk { radius, .. } => PI * radius * radius,
            Shape::Rect { lo, hi } => (hi[0] - lo[0]) * (hi[1] - lo[1]),
            Shape::Polygon { vertices } => signed_area(vertices),
        }
    }

    fn perimeter(&self) -> f64 {
        match self {
            Shape::Disk { radius, .. } => 2.0 * PI * radius,
            _ => {
                let v = self.polygon_vertices().unwrap();
                (0..v.len()).map(|i| norm(sub(v[(i + 1) % v.len()], v[i]))).sum()
            }
        }
    }

    fn contains(&self, p: Point2) -> bool {
        match self {
            Shape::Disk { center, radius } => norm(sub(p, *center)) < *radius,
            Shape::Rect { lo, hi } => p[0] > lo[0] && p[0] < hi[0] && p[1] > lo[1] && p[1] < hi[1],
            Shape::Polygon { vertices } => {
                if self.boundary_distance(p) == 0.0 {
                    return false;
                }
                winding_number(vertices, p) != 0
            }
        }
    }

    fn boundary_distance(&self, p: Point2) -> f64 {
        match self {
            Shape::Disk { center, radius } => (norm(sub(p, *center)) - radius).abs(),
            _ => {
                let v = self.polygon_vertices().unwrap();
                (0..v.len())
                    .map(|i| segment_distance(p, v[i], v[(i + 1) % v.len()]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    fn bbox(&self) -> (Point2, Point2) {
        match self {
            Shape::Disk { center, radius } => (
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            Shape::Rect { lo, hi } => (*lo, *hi),
            Shape::Polygon { vertices } => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for v in vertices {
                    for k in 0..2 {
                        lo[k] = lo[k].min(v[k]);
                        hi[k] = hi[k].max(v[k]);
                    }
                }
                (lo, hi)
            }
        }
    }

    fn boundary_nodes(&self, n: usize, nodes: &mut Vec<BoundaryNode>, corners: &mut Vec<Point2>) {
        match self {
            Shape::Disk { center, radius } => {
                let w = 2.0 * PI * radius / n as f64;
                for k in 0..n {
                    let th = 2.0 * PI * (k as f64 + 0.5) / n as f64;
                    let (s, c) = th.sin_cos();
                    nodes.push(BoundaryNode {
                        point: [center[0] + radius * c, center[1] + radius * s],
                        normal: [c, s],
                        weight: w,
                    });
                }
            }
            _ => {
                let v = self.polygon_vertices().unwrap();
                let m = v.len();
                for i in 0..m {
                    let a = v[i];
                    let b = v[(i + 1) % m];
                    let edge = sub(b, a);
                    let len = norm(edge);
                    // outward normal of a counter-clockwise polygon
                    let normal = [edge[1] / len, -edge[0] / len];
                    let w = len / n as f64;
                    for k in 0..n {
                        let s = (k as f64 + 0.5) / n as f64;
                        nodes.push(BoundaryNode {
                            point: [a[0] + s * edge[0], a[1] + s * edge[1]],
                            normal,
                            weight: w,
                        });
                    }
                    corners.push(a);
                }
            }
        }
    }

    /// Gauss-Legendre panels; disk arcs are also split where the normal is
    /// orthogonal to one of `kinks`.
    fn panel_nodes(&self, n: usize, kinks: &[Point2], nodes: &mut Vec<BoundaryNode>) {
        const ORDER: usize = 16;
        let (gx, gw) = gauss_legendre(ORDER);
        match self {
            Shape::Disk { center, radius } => {
                let tau = 2.0 * PI;
                let mut br = vec![0.0, tau];
                for d in kinks {
                    let a = d[1].atan2(d[0]);
                    for b in [a + 0.5 * PI, a - 0.5 * PI] {
                        br.push(b.rem_euclid(tau));
                    }
                }
                br.sort_by(f64::total_cmp);
                br.dedup();
                for w in br.windows(2) {
                    let len = w[1] - w[0];
                    if len <= 0.0 {
                        continue;
                    }
                    let panels = ((n as f64 * len / tau) / ORDER as f64).ceil().max(1.0) as usize;
                    let h = len / panels as f64;
                    for p in 0..panels {
                        let a = w[0] + p as f64 * h;
                        for (x, wt) in gx.iter().zip(&gw) {
                            let th = a + 0.5 * h * (x + 1.0);
                            let (s, c) = th.sin_cos();
                            nodes.push(BoundaryNode {
                                point: [center[0] + radius * c, center[1] + radius * s],
                                normal: [c, s],
                                weight: 0.5 * h * wt * radius,
                            });
                        }
                    }
                }
            }
            _ => {
                let v = self.polygon_vertices().unwrap();
                let m = v.len();
                let panels = (n / ORDER).max(1);
                for i in 0..m {
                    let a = v[i];
                    let edge = sub(v[(i + 1) % m], a);
                    let len = norm(edge);
                    let normal = [edge[1] / len, -edge[0] / len];
                    for p in 0..panels {
                        for (x, wt) in gx.iter().zip(&gw) {
                            let s = (p as f64 + 0.5 * (x + 1.0)) / panels as f64;
                            nodes.push(BoundaryNode {
                                point: [a[0] + s * edge[0], a[1] + s * edge[1]],
                                normal,
                                weight: 0.5 * wt * len / panels as f64,
                            });
                        }
                    }
                }
            }
        }
    }

    fn line_crossings(&self, e: Point2, offset: f64, out: &mut Vec<f64>) -> Result<()> {
        let eperp = [e[1], -e[0]];
        let o = [offset * eperp[0], offset * eperp[1]];
        match self {
            Shape::Disk { center, radius } => {
                let q = sub(o, *center);
                let b = dot(q, e);
                let c = dot(q, q) - radius * radius;
                let disc = b * b - c;
                if disc.abs() <= GRAZE_TOL * radius * radius {
                    return Err(Error::Grazing { offset });
                }
                if disc > 0.0 {
                    let r = disc.sqrt();
                    out.push(-b - r);
                    out.push(-b + r);
                }
            }
            _ => {
                let v = self.polygon_vertices().unwrap();
                let m = v.len();
                for i in 0..m {
                    let a = v[i];
                    let w = sub(v[(i + 1) % m], a);
                    let len = norm(w);
                    let denom = cross(w, e);
                    if denom.abs() <= GRAZE_TOL * len {
                        // parallel: collinear with the edge is a grazing line
                        let dist = cross(sub(a, o), e).abs();
                        if dist <= GRAZE_TOL * len.max(1.0) {
                            return Err(Error::Grazing { offset });
                        }
                        continue;
                    }
                    let s = cross(sub(o, a), e) / denom;
                    if s < -GRAZE_TOL || s > 1.0 + GRAZE_TOL {
                        continue;
                    }
                    if s.abs() <= GRAZE_TOL || (s - 1.0).abs() <= GRAZE_TOL {
                        return Err(Error::Grazing { offset });
                    }
                    let t = cross(sub(a, o), w) / cross(e, w);
                    out.push(t);
                }
            }
        }
        Ok(())
    }
}

fn signed_area(v: &[Point2]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| cross(v[i], v[(i + 1) % n])).sum::<f64>()
}

fn winding_number(v: &[Point2], p: Point2) -> i32 {
    let n = v.len();
    let mut wn = 0;
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        let is_left = cross(sub(b, a), sub(p, a));
        if a[1] <= p[1] {
            if b[1] > p[1] && is_left > 0.0 {
                wn += 1;
            }
        } else if b[1] <= p[1] && is_left < 0.0 {
            wn -= 1;
        }
    }
    wn
}

fn shapes_separated(a: &Shape, b: &Shape) -> bool {
    match (a, b) {
        (Shape::Disk { center: c1, radius: r1 }, Shape::Disk { center: c2, radius: r2 }) => {
            norm(sub(*c1, *c2)) > r1 + r2
        }
        (Shape::Disk { center, radius }, other) | (other, Shape::Disk { center, radius }) => {
            other.boundary_distance(*center) > *radius && !other.contains(*center)
        }
        _ => {
            let va = a.polygon_vertices().unwrap();
            let vb = b.polygon_vertices().unwrap();
            for i in 0..va.len() {
                for j in 0..vb.len() {
                    if segments_intersect(va[i], va[(i + 1) % va.len()], vb[j], vb[(j + 1) % vb.len()]) {
                        return false;
                    }
                }
            }
            !a.contains(vb[0]) && !b.contains(va[0])
        }
    }
}

impl Region {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::intervals(vec![(lo, hi)])
    }

    pub fn intervals(mut parts: Vec<(f64, f64)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidRegion("empty interval list".into()));
        }
        parts.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(lo, hi) in &parts {
            if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::DegenerateShape(format!("interval ({lo}, {hi})")));
            }
        }
        for w in parts.windows(2) {
            if w[0].1 >= w[1].0 {
                return Err(Error::InvalidRegion("intervals must have disjoint closures".into()));
            }
        }
        Ok(Region::Line(parts))
    }

    pub fn disk(center: Point2, radius: f64) -> Result<Self> {
        Self::plane(vec![Shape::Disk { center, radius }])
    }

    pub fn rect(lo: Point2, hi: Point2) -> Result<Self> {
        Self::plane(vec![Shape::Rect { lo, hi }])
    }

    pub fn polygon(vertices: Vec<Point2>) -> Result<Self> {
        Self::plane(vec![Shape::Polygon { vertices }])
    }

    pub fn plane(shapes: Vec<Shape>) -> Result<Self> {
        if shapes.is_empty() {
            return Err(Error::InvalidRegion("empty shape list".into()));
        }
        for s in &shapes {
            s.validate()?;
        }
        for i in 0..shapes.len() {
            for j in (i + 1)..shapes.len() {
                if !shapes_separated(&shapes[i], &shapes[j]) {
                    return Err(Error::InvalidRegion(format!(
                        "components {i} and {j} overlap or touch"
                    )));
                }
            }
        }
        Ok(Region::Plane(shapes))
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Line(_) => 1,
            Region::Plane(_) => 2,
        }
    }

    /// Lebesgue measure (length or area).
    pub fn measure(&self) -> f64 {
        match self {
            Region::Line(p) => p.iter().map(|(a, b)| b - a).sum(),
            Region::Plane(s) => s.iter().map(Shape::area).sum(),
        }
    }

    /// Surface measure of the boundary; in 1D the number of endpoints.
    pub fn perimeter(&self) -> f64 {
        match self {
            Region::Line(p) => 2.0 * p.len() as f64,
            Region::Plane(s) => s.iter().map(Shape::perimeter).sum(),
        }
    }

    pub fn intervals_slice(&self) -> Option<&[(f64, f64)]> {
        match self {
            Region::Line(p) => Some(p),
            Region::Plane(_) => None,
        }
    }

    /// The single disk `(center, radius)` when the region is one.
    pub fn as_disk(&self) -> Option<(Point2, f64)> {
        match self {
            Region::Plane(s) if s.len() == 1 => match &s[0] {
                Shape::Disk { center, radius } => Some((*center, *radius)),
                _ => None,
            },
            _ => None,
        }
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got,
            });
        }
        Ok(())
    }

    /// Membership in the open region; boundary points are outside.
    pub fn indicator(&self, point: &[f64]) -> Result<bool> {
        self.check_dim(point.len())?;
        Ok(match self {
            Region::Line(p) => p.iter().any(|&(a, b)| point[0] > a && point[0] < b),
            Region::Plane(s) => s.iter().any(|sh| sh.contains([point[0], point[1]])),
        })
    }

    /// Distance from `point` to the boundary, computed from the shape.
    pub fn distance_to_boundary(&self, point: &[f64]) -> Result<f64> {
        self.check_dim(point.len())?;
        Ok(match self {
            Region::Line(p) => p
                .iter()
                .flat_map(|&(a, b)| [(point[0] - a).abs(), (point[0] - b).abs()])
                .fold(f64::INFINITY, f64::min),
            Region::Plane(s) => s
                .iter()
                .map(|sh| sh.boundary_distance([point[0], point[1]]))
                .fold(f64::INFINITY, f64::min),
        })
    }

    /// Axis-aligned bounding box (`lo`, `hi`); the second coordinate is 0 in 1D.
    pub fn bounding_box(&self) -> (Point2, Point2) {
        match self {
            Region::Line(p) => ([p[0].0, 0.0], [p.last().unwrap().1, 0.0]),
            Region::Plane(s) => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for sh in s {
                    let (a, b) = sh.bbox();
                    for k in 0..2 {
                        lo[k] = lo[k].min(a[k]);
                        hi[k] = hi[k].max(b[k]);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Diameter of the bounding box (an upper bound for the true diameter,
    /// exact for intervals and single disks).
    pub fn diameter(&self) -> f64 {
        if let Some((_, r)) = self.as_disk() {
            return 2.0 * r;
        }
        let (lo, hi) = self.bounding_box();
        norm(sub(hi, lo))
    }

    /// Image under x ↦ factor·x.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(Error::InvalidParameter("scale factor must be positive".into()));
        }
        let sp = |p: Point2| [p[0] * factor, p[1] * factor];
        Ok(match self {
            Region::Line(p) => Region::Line(p.iter().map(|&(a, b)| (a * factor, b * factor)).collect()),
            Region::Plane(s) => Region::Plane(
                s.iter()
                    .map(|sh| match sh {
                        Shape::Disk { center, radius } => Shape::Disk {
                            center: sp(*center),
                            radius: radius * factor,
                        },
                        Shape::Rect { lo, hi } => Shape::Rect { lo: sp(*lo), hi: sp(*hi) },
                        Shape::Polygon { vertices } => Shape::Polygon {
                            vertices: vertices.iter().map(|v| sp(*v)).collect(),
                        },
                    })
                    .collect(),
            ),
        })
    }

    /// Boundary rule. For 2D shapes `nodes_per_component` is the number of
    /// nodes on a disk or on each polygon side; in 1D every endpoint gets
    /// weight 1 and normal ±1.
    pub fn boundary_quadrature(&self, nodes_per_component: usize) -> Result<BoundaryQuadrature> {
        match self {
            Region::Line(p) => {
                let mut nodes = Vec::with_capacity(2 * p.len());
                for &(a, b) in p {
                    nodes.push(BoundaryNode { point: [a, 0.0], normal: [-1.0, 0.0], weight: 1.0 });
                    nodes.push(BoundaryNode { point: [b, 0.0], normal: [1.0, 0.0], weight: 1.0 });
                }
                Ok(BoundaryQuadrature { dim: 1, nodes, corners: Vec::new() })
            }
            Region::Plane(s) => {
                if nodes_per_component < 4 {
                    return Err(Error::InvalidParameter(
                        "need at least 4 boundary nodes per component".into(),
                    ));
                }
                let mut nodes = Vec::new();
                let mut corners = Vec::new();
                for sh in s {
                    sh.boundary_nodes(nodes_per_component, &mut nodes, &mut corners);
                }
                Ok(BoundaryQuadrature { dim: 2, nodes, corners })
            }
        }
    }

    /// Boundary rule of Gauss-Legendre panels about `nodes_per_component`
    /// strong, with disk arcs split where the normal is orthogonal to one of
    /// `kinks`, so that integrands involving |n·d| stay smooth per panel.
    pub fn boundary_panels(&self, nodes_per_component: usize, kinks: &[Point2]) -> Result<BoundaryQuadrature> {
        match self {
            Region::Line(_) => self.boundary_quadrature(nodes_per_component),
            Region::Plane(s) => {
                let mut nodes = Vec::new();
                let mut corners = Vec::new();
                for sh in s {
                    sh.panel_nodes(nodes_per_component, kinks, &mut nodes);
                    if let Some(v) = sh.polygon_vertices() {
                        corners.extend(v);
                    }
                }
                Ok(BoundaryQuadrature { dim: 2, nodes, corners })
            }
        }
    }

    /// Outward normals of the straight boundary pieces.
    pub fn edge_normals(&self) -> Vec<Point2> {
        let mut out = Vec::new();
        if let Region::Plane(s) = self {
            for sh in s {
                if let Some(v) = sh.polygon_vertices() {
                    for i in 0..v.len() {
                        let e = sub(v[(i + 1) % v.len()], v[i]);
                        let l = norm(e);
                        out.push([e[1] / l, -e[0] / l]);
                    }
                }
            }
        }
        out
    }

    /// Parameters where the line `offset·e⊥ + t·e` crosses the boundary,
    /// strictly increasing. Tangency or passing through a vertex is
    /// reported as [`Error::Grazing`].
    pub fn ray_intersections(&self, direction: Point2, offset: f64) -> Result<Vec<f64>> {
        let Region::Plane(shapes) = self else {
            return Err(Error::Unsupported("ray intersections need a 2D region".into()));
        };
        let len = norm(direction);
        if (len - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("direction must be a unit vector".into()));
        }
        let mut out = Vec::new();
        for sh in shapes {
            sh.line_crossings(direction, offset, &mut out)?;
        }
        out.sort_by(f64::total_cmp);
        for w in out.windows(2) {
            if w[1] - w[0] <= GRAZE_TOL {
                return Err(Error::Grazing { offset });
            }
        }
        Ok(out)
    }

    /// Range of offsets whose lines can meet the region.
    pub fn offset_range(&self, direction: Point2) -> (f64, f64) {
        let eperp = [direction[1], -direction[0]];
        let (lo, hi) = self.bounding_box();
        let corners = [lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]];
        let proj: Vec<f64> = corners.iter().map(|c| dot(*c, eperp)).collect();
        (
            proj.iter().cloned().fold(f64::INFINITY, f64::min),
            proj.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        )
    }

    /// ∫_{∂Ω} |n·e| dS by boundary quadrature.
    pub fn surface_flux(&self, direction: Point2) -> Result<f64> {
        if self.dim() != 2 {
            return Err(Error::Unsupported("surface flux needs a 2D region".into()));
        }
        let q = self.boundary_quadrature(4096)?;
        Ok(q.nodes
            .iter()
            .map(|n| n.weight * dot(n.normal, direction).abs())
            .sum())
    }

    /// Monte-Carlo estimate of ∫ #X(offset) d offset over uniformly drawn
    /// offsets. Returns (estimate, standard error, grazing retries).
    pub fn flux_by_counting<R: Rng>(&self, direction: Point2, samples: usize, rng: &mut R) -> Result<(f64, f64, usize)> {
        let (lo, hi) = self.offset_range(direction);
        let width = hi - lo;
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        let mut retries = 0;
        for _ in 0..samples {
            let c = loop {
                let off = lo + width * rng.random::<f64>();
                match self.ray_intersections(direction, off) {
                    Ok(v) => break v.len() as f64,
                    Err(Error::Grazing { .. }) => retries += 1,
                    Err(e) => return Err(e),
                }
            };
            sum += c;
            sum2 += c * c;
        }
        let n = samples as f64;
        let mean = sum / n;
        let var = (sum2 / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
        Ok((width * mean, width * (var / n).sqrt(), retries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_square() -> Region {
        Region::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    #[test]
    fn indicator_examples() {
        let d = Region::disk([0.0, 0.0], 1.0).unwrap();
        assert!(d.indicator(&[0.0, 0.0]).unwrap());
        let i = Region::interval(0.0, 1.0).unwrap();
        assert!(!i.indicator(&[1.0]).unwrap());
        assert!(unit_square().indicator(&[0.5, 0.5]).unwrap());
        assert!(!unit_square().indicator(&[1.0, 0.5]).unwrap());
        assert!(matches!(d.indicator(&[0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn winding_oracle_agrees_on_l_shape() {
        let l = Region::polygon(vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 2.0],
            [0.0, 2.0],
        ])
        .unwrap();
        assert!(l.indicator(&[0.5, 1.5]).unwrap());
        assert!(!l.indicator(&[1.5, 1.5]).unwrap());
        assert!((l.measure() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_rules() {
        let d = Region::disk([0.0, 0.0], 1.0).unwrap();
        let q = d.boundary_quadrature(128).unwrap();
        assert!((q.total_weight() - 2.0 * PI).abs() < 1e-10);
        for n in &q.nodes {
            assert!((norm(n.normal) - 1.0).abs() < 1e-12);
        }
        let i = Region::interval(0.0, 1.0).unwrap().boundary_quadrature(1).unwrap();
        assert_eq!(i.nodes.len(), 2);
        assert_eq!(i.nodes[0].point[0], 0.0);
        assert_eq!(i.nodes[0].normal[0], -1.0);
        assert_eq!(i.nodes[1].normal[0], 1.0);
        let s = unit_square().boundary_quadrature(64).unwrap();
        assert!((s.total_weight() - 4.0).abs() < 1e-12);
        assert_eq!(s.corners.len(), 4);
        assert!(d.boundary_quadrature(3).is_err());
    }

    #[test]
    fn degenerate_shapes_rejected() {
        assert!(matches!(Region::disk([0.0, 0.0], 0.0), Err(Error::DegenerateShape(_))));
        assert!(matches!(
            Region::polygon(vec![[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]]),
            Err(Error::DegenerateShape(_))
        ));
        // clockwise
        assert!(Region::polygon(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).is_err());
        // bow tie
        assert!(Region::polygon(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]).is_err());
        assert!(Region::intervals(vec![(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(Region::plane(vec![
            Shape::Disk { center: [0.0, 0.0], radius: 1.0 },
            Shape::Disk { center: [1.5, 0.0], radius: 1.0 },
        ])
        .is_err());
    }

    #[test]
    fn ray_examples() {
        let d = Region::disk([0.0, 0.0], 1.0).unwrap();
        assert_eq!(d.ray_intersections([1.0, 0.0], 0.0).unwrap(), vec![-1.0, 1.0]);
        assert!(d.ray_intersections([1.0, 0.0], 2.0).unwrap().is_empty());
        assert!(matches!(d.ray_intersections([1.0, 0.0], 1.0), Err(Error::Grazing { .. })));
        let s = unit_square().ray_intersections([0.0, 1.0], 0.5).unwrap();
        assert!((s[0] - 0.0).abs() < 1e-15 && (s[1] - 1.0).abs() < 1e-15);
        // corner hit
        let diag = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];
        assert!(matches!(unit_square().ray_intersections(diag, 0.0), Err(Error::Grazing { .. })));
    }

    #[test]
    fn flux_examples() {
        let d = Region::disk([0.0, 0.0], 1.0).unwrap();
        assert!((d.surface_flux([1.0, 0.0]).unwrap() - 4.0).abs() < 1e-6);
        let e = [0.6, 0.8];
        assert!((d.surface_flux(e).unwrap() - 4.0).abs() < 1e-6);
        assert!((unit_square().surface_flux([1.0, 0.0]).unwrap() - 2.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (v, se, _) = d.flux_by_counting([1.0, 0.0], 20_000, &mut rng).unwrap();
        assert!((v - 4.0).abs() < 3.0 * se + 1e-12, "{v} ± {se}");
    }

    #[test]
    fn perimeter_converges_with_nodes() {
        // node positions on a circle are exact; the polygon through them converges at order 2
        let d = Region::disk([0.0, 0.0], 1.0).unwrap();
        let chord = |n: usize| {
            let q = d.boundary_quadrature(n).unwrap();
            let pts: Vec<Point2> = q.nodes.iter().map(|n| n.point).collect();
            (0..pts.len()).map(|i| norm(sub(pts[(i + 1) % pts.len()], pts[i]))).sum::<f64>()
        };
        let e1 = (2.0 * PI - chord(16)).abs();
        let e2 = (2.0 * PI - chord(32)).abs();
        assert!((e1 / e2).log2() > 1.9);
    }
}
