//! Exact 2D convex-polygon engine: halfplane intersection, cell
//! decomposition of max-of-affine functions, closed-form integrals of
//! exp-affine densities over polygons and segments, Minkowski sum and
//! difference, and the first mixed volume.
//!
//! All predicates use the scale-aware tolerance [`eps_at`]; integrals are
//! closed-form with series switches for removable singularities, so the
//! only approximation anywhere in this module is floating-point rounding.

use crate::error::{Error, Result};
use crate::numeric::{self, GEOM_EPS};
use serde::{Deserialize, Serialize};

pub type Point2 = [f64; 2];

pub fn dot2(a: Point2, b: Point2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub fn sub2(a: Point2, b: Point2) -> Point2 {
    [a[0] - b[0], a[1] - b[1]]
}

pub fn add2(a: Point2, b: Point2) -> Point2 {
    [a[0] + b[0], a[1] + b[1]]
}

pub fn cross2(a: Point2, b: Point2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn norm2(a: Point2) -> f64 {
    a[0].hypot(a[1])
}

/// Tolerance at a point, relative to its magnitude.
pub fn eps_at(p: Point2) -> f64 {
    GEOM_EPS * (1.0 + p[0].abs().max(p[1].abs()))
}

/// Closed halfplane `{x : <normal, x> <= height}` with unit normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Halfspace2 {
    pub normal: Point2,
    pub height: f64,
}

impl Halfspace2 {
    pub fn new(normal: Point2, height: f64) -> Result<Self> {
        let n = norm2(normal);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidInput("halfspace normal must be nonzero".into()));
        }
        Ok(Self {
            normal: [normal[0] / n, normal[1] / n],
            height: height / n,
        })
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        dot2(self.normal, p) <= self.height + tol
    }
}

/// Bounded convex polygon with a counterclockwise vertex cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolygonData", into = "PolygonData")]
pub struct Polygon {
    vertices: Vec<Point2>,
}

#[derive(Serialize, Deserialize)]
struct PolygonData {
    vertices: Vec<Point2>,
}

impl TryFrom<PolygonData> for Polygon {
    type Error = Error;
    fn try_from(d: PolygonData) -> Result<Self> {
        Polygon::new(d.vertices)
    }
}

impl From<Polygon> for PolygonData {
    fn from(p: Polygon) -> Self {
        PolygonData { vertices: p.vertices }
    }
}

/// Result of an intersection/erosion that may fail to have interior.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Polygon(Polygon),
    Segment([Point2; 2]),
    Point(Point2),
    Empty,
}

impl Region {
    pub fn area(&self) -> f64 {
        match self {
            Region::Polygon(p) => p.area(),
            _ => 0.0,
        }
    }

    pub fn support(&self, dir: Point2) -> f64 {
        match self {
            Region::Polygon(p) => p.support(dir),
            Region::Segment([a, b]) => dot2(*a, dir).max(dot2(*b, dir)),
            Region::Point(p) => dot2(*p, dir),
            Region::Empty => f64::NEG_INFINITY,
        }
    }

    pub fn as_polygon(&self) -> Option<&Polygon> {
        match self {
            Region::Polygon(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Region::Empty)
    }

    /// Vertex list of whatever is left (empty for `Empty`).
    pub fn points(&self) -> Vec<Point2> {
        match self {
            Region::Polygon(p) => p.vertices().to_vec(),
            Region::Segment(s) => s.to_vec(),
            Region::Point(p) => vec![*p],
            Region::Empty => vec![],
        }
    }
}

impl Polygon {
    /// Builds a polygon from a vertex cycle: orients counterclockwise, merges
    /// duplicate and collinear vertices, and rejects degenerate input.
    pub fn new(mut vertices: Vec<Point2>) -> Result<Self> {
        if vertices.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::InvalidInput("non-finite polygon vertex".into()));
        }
        if vertices.len() < 3 {
            return Err(Error::Degenerate(format!(
                "polygon needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        let cleaned = clean_cycle(&vertices);
        if cleaned.len() < 3 {
            return Err(Error::Degenerate("polygon has no interior".into()));
        }
        // convexity: every turn strictly left
        let n = cleaned.len();
        for i in 0..n {
            let a = cleaned[i];
            let b = cleaned[(i + 1) % n];
            let c = cleaned[(i + 2) % n];
            let turn = cross2(sub2(b, a), sub2(c, b));
            if turn < -eps_at(b) * (norm2(sub2(b, a)) + norm2(sub2(c, b)) + 1.0) {
                return Err(Error::InvalidInput("polygon vertex cycle is not convex".into()));
            }
        }
        Ok(Self { vertices: cleaned })
    }

    pub fn rectangle(lo: Point2, hi: Point2) -> Result<Self> {
        Self::new(vec![lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]])
    }

    pub fn square(half_side: f64) -> Self {
        Self::rectangle([-half_side, -half_side], [half_side, half_side]).expect("square")
    }

    /// Regular polygon inscribed in the circle of radius `r`.
    pub fn regular(sides: usize, r: f64) -> Self {
        let pts = (0..sides)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / sides as f64;
                [r * th.cos(), r * th.sin()]
            })
            .collect();
        Self::new(pts).expect("regular polygon")
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().iter().map(|e| e.length).sum()
    }

    pub fn centroid(&self) -> Point2 {
        let mut cx = 0.0;
        let mut cy = 0.0;
        let mut a = 0.0;
        let n = self.vertices.len();
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let w = cross2(p, q);
            a += w;
            cx += (p[0] + q[0]) * w;
            cy += (p[1] + q[1]) * w;
        }
        [cx / (3.0 * a), cy / (3.0 * a)]
    }

    pub fn support(&self, dir: Point2) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot2(*v, dir))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        self.edges().iter().all(|e| dot2(e.normal, p) <= e.height + tol)
    }

    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                d = d.max(norm2(sub2(*b, *a)));
            }
        }
        d
    }

    pub fn max_norm(&self) -> f64 {
        self.vertices.iter().map(|v| norm2(*v)).fold(0.0, f64::max)
    }

    /// Edges in cycle order with outward unit normals.
    pub fn edges(&self) -> Vec<Edge> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                let d = sub2(b, a);
                let len = norm2(d);
                let normal = [d[1] / len, -d[0] / len];
                Edge {
                    start: a,
                    end: b,
                    normal,
                    height: dot2(normal, a),
                    length: len,
                }
            })
            .collect()
    }

    /// The polygon as a halfspace list (its own edge constraints).
    pub fn halfspaces(&self) -> Vec<Halfspace2> {
        self.edges()
            .iter()
            .map(|e| Halfspace2 {
                normal: e.normal,
                height: e.height,
            })
            .collect()
    }

    pub fn translate(&self, v: Point2) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|p| add2(*p, v)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Result<Polygon> {
        if c <= 0.0 {
            return Err(Error::InvalidInput("polygon scale must be positive".into()));
        }
        Polygon::new(self.vertices.iter().map(|p| [c * p[0], c * p[1]]).collect())
    }

    /// Clips by a halfplane; the result may lose its interior.
    pub fn clip(&self, hs: &Halfspace2) -> Region {
        classify(clip_cycle(&self.vertices, hs))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Edge {
    pub start: Point2,
    pub end: Point2,
    pub normal: Point2,
    pub height: f64,
    pub length: f64,
}

fn signed_area(pts: &[Point2]) -> f64 {
    let n = pts.len();
    let mut a = 0.0;
    for i in 0..n {
        a += cross2(pts[i], pts[(i + 1) % n]);
    }
    a / 2.0
}

/// Merges duplicates and removes collinear middle vertices from a CCW cycle.
fn clean_cycle(pts: &[Point2]) -> Vec<Point2> {
    let mut dedup: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in pts {
        if let Some(&last) = dedup.last() {
            if norm2(sub2(p, last)) <= eps_at(p) {
                continue;
            }
        }
        dedup.push(p);
    }
    while dedup.len() >= 2 && norm2(sub2(dedup[0], *dedup.last().unwrap())) <= eps_at(dedup[0]) {
        dedup.pop();
    }
    if dedup.len() < 3 {
        return dedup;
    }
    let mut out: Vec<Point2> = Vec::with_capacity(dedup.len());
    let n = dedup.len();
    for i in 0..n {
        let prev = dedup[(i + n - 1) % n];
        let cur = dedup[i];
        let next = dedup[(i + 1) % n];
        let turn = cross2(sub2(cur, prev), sub2(next, cur));
        let scale = norm2(sub2(cur, prev)) * norm2(sub2(next, cur));
        if turn.abs() > eps_at(cur) * (scale + 1.0) {
            out.push(cur);
        }
    }
    out
}

/// Sutherland-Hodgman step for one halfplane over a convex CCW cycle.
fn clip_cycle(pts: &[Point2], hs: &Halfspace2) -> Vec<Point2> {
    let n = pts.len();
    if n == 0 {
        return vec![];
    }
    let mut out = Vec::with_capacity(n + 2);
    let val = |p: Point2| dot2(hs.normal, p) - hs.height;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let va = val(a);
        let vb = val(b);
        let ta = eps_at(a);
        let tb = eps_at(b);
        if va <= ta {
            out.push(a);
        }
        if (va > ta && vb < -tb) || (va < -ta && vb > tb) {
            let t = va / (va - vb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Classifies a clipped vertex cycle as polygon / segment / point / empty.
fn classify(pts: Vec<Point2>) -> Region {
    if pts.is_empty() {
        return Region::Empty;
    }
    if let Ok(p) = Polygon::new(pts.clone()) {
        if p.area() > eps_at(p.vertices()[0]) {
            return Region::Polygon(p);
        }
    }
    // lower-dimensional: find the two extreme points
    let mut lo = pts[0];
    let mut hi = pts[0];
    for &p in &pts {
        if (p[0], p[1]) < (lo[0], lo[1]) {
            lo = p;
        }
        if (p[0], p[1]) > (hi[0], hi[1]) {
            hi = p;
        }
    }
    if norm2(sub2(hi, lo)) <= eps_at(lo) {
        Region::Point(lo)
    } else {
        Region::Segment([lo, hi])
    }
}

/// Intersection of halfplanes. Unbounded feasible regions are an error
/// unless `bbox` supplies the truncation; degenerate results are flagged
/// through [`Region`], never silently returned as thin polygons.
pub fn halfplane_intersection(constraints: &[Halfspace2], bbox: Option<&Polygon>) -> Result<Region> {
    if constraints.is_empty() {
        return Err(Error::InvalidInput("empty constraint list".into()));
    }
    let base = match bbox {
        Some(b) => b.clone(),
        None => {
            if !normals_positively_span(constraints) {
                return Err(Error::Unbounded);
            }
            let h = 1.0 + constraints.iter().map(|c| c.height.abs()).fold(0.0, f64::max);
            // any bounded feasible set lies within this box once normals span
            Polygon::square(4.0 * h * constraints.len() as f64)
        }
    };
    let mut pts = base.vertices().to_vec();
    for hs in constraints {
        pts = clip_cycle(&pts, hs);
        if pts.is_empty() {
            return Ok(Region::Empty);
        }
    }
    Ok(classify(pts))
}

/// True when every direction violates some constraint, i.e. the largest
/// angular gap between outward normals is strictly below pi.
fn normals_positively_span(constraints: &[Halfspace2]) -> bool {
    let mut angles: Vec<f64> = constraints
        .iter()
        .map(|c| c.normal[1].atan2(c.normal[0]))
        .collect();
    angles.sort_by(f64::total_cmp);
    let n = angles.len();
    if n < 3 {
        return false;
    }
    let mut max_gap = 0.0f64;
    for i in 0..n {
        let next = if i + 1 == n {
            angles[0] + 2.0 * std::f64::consts::PI
        } else {
            angles[i + 1]
        };
        max_gap = max_gap.max(next - angles[i]);
    }
    max_gap < std::f64::consts::PI - 1e-9
}

/// Gradient cells and domain facets of a 2D max-of-affine function.
#[derive(Debug, Clone)]
pub struct CellComplex {
    /// `cells[i]` is the region where piece `i` attains the max (absent when empty).
    pub cells: Vec<Option<Polygon>>,
    /// `facets[j]` is the part of domain constraint `j` active on the boundary.
    pub facets: Vec<Option<[Point2; 2]>>,
    /// The truncated domain the cells partition.
    pub base: Region,
}

impl CellComplex {
    /// All vertices of the decomposition (cell corners), deduplicated.
    pub fn vertex_set(&self) -> Vec<Point2> {
        let mut out: Vec<Point2> = Vec::new();
        let mut push = |p: Point2| {
            if !out.iter().any(|q| norm2(sub2(*q, p)) <= 10.0 * eps_at(p)) {
                out.push(p);
            }
        };
        for c in self.cells.iter().flatten() {
            for &v in c.vertices() {
                push(v);
            }
        }
        if let Region::Polygon(p) = &self.base {
            for &v in p.vertices() {
                push(v);
            }
        }
        out
    }
}

/// Decomposes `max_i(<x, slope_i> - offset_i)` restricted to
/// `domain ∩ truncation` into the regions where each piece wins, and returns
/// the domain facets separately. Ties sit on measure-zero boundaries; point
/// queries resolve them to the lowest index via [`argmax_piece`].
pub fn cell_decomposition(
    pieces: &[(Point2, f64)],
    domain: &[Halfspace2],
    truncation: &Polygon,
) -> CellComplex {
    let mut pts = truncation.vertices().to_vec();
    for hs in domain {
        pts = clip_cycle(&pts, hs);
    }
    let base = classify(pts);
    let base_poly = match &base {
        Region::Polygon(p) => p.clone(),
        _ => {
            return CellComplex {
                cells: vec![None; pieces.len()],
                facets: vec![None; domain.len()],
                base,
            }
        }
    };

    let mut cells = Vec::with_capacity(pieces.len());
    for (i, (yi, ci)) in pieces.iter().enumerate() {
        let mut cell_pts = base_poly.vertices().to_vec();
        for (k, (yk, ck)) in pieces.iter().enumerate() {
            if k == i {
                continue;
            }
            // piece i dominates: <yk - yi, x> <= ck - ci
            let d = sub2(*yk, *yi);
            let nn = norm2(d);
            if nn <= GEOM_EPS {
                // identical slopes: the smaller offset dominates everywhere
                if ck - ci < -GEOM_EPS {
                    cell_pts.clear();
                }
                continue;
            }
            let hs = Halfspace2 {
                normal: [d[0] / nn, d[1] / nn],
                height: (ck - ci) / nn,
            };
            cell_pts = clip_cycle(&cell_pts, &hs);
            if cell_pts.is_empty() {
                break;
            }
        }
        match classify(cell_pts) {
            Region::Polygon(p) => cells.push(Some(p)),
            _ => cells.push(None),
        }
    }

    let mut facets = Vec::with_capacity(domain.len());
    for hs in domain {
        facets.push(boundary_segment(&base_poly, hs));
    }

    CellComplex {
        cells,
        facets,
        base,
    }
}

/// The (possibly absent) edge of `poly` lying on the boundary line of `hs`.
fn boundary_segment(poly: &Polygon, hs: &Halfspace2) -> Option<[Point2; 2]> {
    let on_line: Vec<Point2> = poly
        .vertices()
        .iter()
        .copied()
        .filter(|&p| (dot2(hs.normal, p) - hs.height).abs() <= 100.0 * eps_at(p))
        .collect();
    if on_line.len() < 2 {
        return None;
    }
    let tangent = [-hs.normal[1], hs.normal[0]];
    let mut lo = on_line[0];
    let mut hi = on_line[0];
    for &p in &on_line {
        if dot2(p, tangent) < dot2(lo, tangent) {
            lo = p;
        }
        if dot2(p, tangent) > dot2(hi, tangent) {
            hi = p;
        }
    }
    if norm2(sub2(hi, lo)) <= eps_at(lo) {
        None
    } else {
        Some([lo, hi])
    }
}

/// Index of the maximizing piece at `x`, lowest index on ties.
pub fn argmax_piece(pieces: &[(Point2, f64)], x: Point2) -> usize {
    let mut best = 0usize;
    let mut best_val = f64::NEG_INFINITY;
    for (i, (y, c)) in pieces.iter().enumerate() {
        let v = dot2(*y, x) - c;
        if v > best_val + eps_at(x) {
            best = i;
            best_val = v;
        }
    }
    best
}

// ---------------------------------------------------------------------------
// exp-affine integrals
// ---------------------------------------------------------------------------

/// Exact `int_P e^{-<a,x> - b} dx`, by centroid fan triangulation and the
/// closed form over each triangle. Exponents are anchored at the triangle
/// vertex minimizing `<a, x>` so they stay nonnegative.
pub fn exp_affine_polygon_integral(p: &Polygon, a: Point2, b: f64) -> f64 {
    triangle_sum(p, a, b, |anchor_val, jac, al, be, _, _, _| {
        (-anchor_val).exp() * jac * numeric::simplex_exp(al, be)
    })
}

/// Exact `int_P x e^{-<a,x> - b} dx` (vector first moment).
pub fn exp_affine_polygon_moment(p: &Polygon, a: Point2, b: f64) -> Point2 {
    let mut out = [0.0, 0.0];
    triangle_sum(p, a, b, |anchor_val, jac, al, be, v0, u, w| {
        let i0 = numeric::simplex_exp(al, be);
        let is = numeric::simplex_exp_s(al, be);
        let it = numeric::simplex_exp_s(be, al);
        let f = (-anchor_val).exp() * jac;
        out[0] += f * (v0[0] * i0 + u[0] * is + w[0] * it);
        out[1] += f * (v0[1] * i0 + u[1] * is + w[1] * it);
        0.0
    });
    out
}

/// Exact `int_P (<a,x> + b) e^{-<a,x> - b} dx`, the piece of `-∫ f log f`
/// living on one gradient cell.
pub fn exp_affine_polygon_weighted(p: &Polygon, a: Point2, b: f64) -> f64 {
    triangle_sum(p, a, b, |anchor_val, jac, al, be, _, _, _| {
        let i0 = numeric::simplex_exp(al, be);
        let is = numeric::simplex_exp_s(al, be);
        let it = numeric::simplex_exp_s(be, al);
        (-anchor_val).exp() * jac * (anchor_val * i0 + al * is + be * it)
    })
}

fn triangle_sum(
    p: &Polygon,
    a: Point2,
    b: f64,
    mut f: impl FnMut(f64, f64, f64, f64, Point2, Point2, Point2) -> f64,
) -> f64 {
    let c = p.centroid();
    let verts = p.vertices();
    let n = verts.len();
    let mut total = 0.0;
    for i in 0..n {
        let tri = [c, verts[i], verts[(i + 1) % n]];
        // anchor at the vertex minimizing <a, v>
        let mut k0 = 0;
        for k in 1..3 {
            if dot2(a, tri[k]) < dot2(a, tri[k0]) {
                k0 = k;
            }
        }
        let v0 = tri[k0];
        let p1 = tri[(k0 + 1) % 3];
        let p2 = tri[(k0 + 2) % 3];
        let u = sub2(p1, v0);
        let w = sub2(p2, v0);
        let jac = cross2(u, w).abs();
        if jac == 0.0 {
            continue;
        }
        let al = dot2(a, u);
        let be = dot2(a, w);
        total += f(dot2(a, v0) + b, jac, al, be, v0, u, w);
    }
    total
}

/// Exact `int_seg e^{-<a,x> - b} dH^1` over a line segment.
pub fn exp_affine_segment_integral(seg: [Point2; 2], a: Point2, b: f64) -> f64 {
    let [p, q] = seg;
    let len = norm2(sub2(q, p));
    if len == 0.0 {
        return 0.0;
    }
    // anchor at the endpoint with the smaller exponent
    let (p0, p1) = if dot2(a, p) <= dot2(a, q) { (p, q) } else { (q, p) };
    let z = dot2(a, sub2(p1, p0));
    len * (-(dot2(a, p0) + b)).exp() * numeric::e1(z)
}

// ---------------------------------------------------------------------------
// Minkowski algebra
// ---------------------------------------------------------------------------

/// Lowest-then-leftmost vertex first (for the edge merge).
fn reorder_lowest(pts: &mut Vec<Point2>) {
    let mut pos = 0;
    for i in 1..pts.len() {
        if (pts[i][1], pts[i][0]) < (pts[pos][1], pts[pos][0]) {
            pos = i;
        }
    }
    pts.rotate_left(pos);
}

/// Minkowski sum by interleaving edges in normal-angle order; vertices are
/// exact sums of input vertices.
pub fn minkowski_sum(p: &Polygon, q: &Polygon) -> Polygon {
    let mut a = p.vertices().to_vec();
    let mut b = q.vertices().to_vec();
    reorder_lowest(&mut a);
    reorder_lowest(&mut b);
    a.push(a[0]);
    a.push(a[1]);
    b.push(b[0]);
    b.push(b[1]);
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() - 2 || j < b.len() - 2 {
        out.push(add2(a[i], b[j]));
        let c = cross2(sub2(a[i + 1], a[i]), sub2(b[j + 1], b[j]));
        if c >= 0.0 && i < a.len() - 2 {
            i += 1;
        }
        if c <= 0.0 && j < b.len() - 2 {
            j += 1;
        }
    }
    Polygon::new(out).expect("minkowski sum of polygons has interior")
}

/// Minkowski sum where either side may be degenerate.
pub fn minkowski_sum_region(p: &Region, q: &Region) -> Region {
    match (p, q) {
        (Region::Empty, _) | (_, Region::Empty) => Region::Empty,
        (Region::Point(v), other) | (other, Region::Point(v)) => match other {
            Region::Polygon(poly) => Region::Polygon(poly.translate(*v)),
            Region::Segment([a, b]) => Region::Segment([add2(*a, *v), add2(*b, *v)]),
            Region::Point(w) => Region::Point(add2(*v, *w)),
            Region::Empty => Region::Empty,
        },
        (Region::Polygon(a), Region::Polygon(b)) => Region::Polygon(minkowski_sum(a, b)),
        _ => {
            // at least one segment: hull of pairwise vertex sums
            let mut pts = Vec::new();
            for &u in &p.points() {
                for &v in &q.points() {
                    pts.push(add2(u, v));
                }
            }
            classify(convex_hull(pts))
        }
    }
}

/// `P ⊖ Q = {x : x + Q ⊆ P}`, via the support-number constraints of `P`'s
/// edge normals. Empty or lower-dimensional erosions are flagged.
pub fn minkowski_difference(p: &Polygon, q: &Polygon) -> Region {
    let constraints: Vec<Halfspace2> = p
        .edges()
        .iter()
        .map(|e| Halfspace2 {
            normal: e.normal,
            height: e.height - q.support(e.normal),
        })
        .collect();
    let bbox = Polygon::square(p.max_norm() + q.max_norm() + 1.0);
    halfplane_intersection(&constraints, Some(&bbox)).unwrap_or(Region::Empty)
}

/// First mixed volume `V1(K, L)` in 2D: `(1/2) sum_e h_L(n_e) len_e`.
/// `L` may be degenerate (a segment or a point).
pub fn mixed_volume_v1(k: &Polygon, l: &Region) -> f64 {
    0.5 * k
        .edges()
        .iter()
        .map(|e| l.support(e.normal) * e.length)
        .sum::<f64>()
}

/// Matheron's one-parameter volume: `|A + tB|` for `t >= 0`, `|A ⊖ |t|B|`
/// for `t < 0` (an error once the erosion dies).
pub fn matheron_beta(a: &Polygon, b: &Polygon, t: f64) -> Result<f64> {
    if t >= 0.0 {
        if t == 0.0 {
            return Ok(a.area());
        }
        Ok(minkowski_sum(a, &b.scale(t)?).area())
    } else {
        let eroded = minkowski_difference(a, &b.scale(-t)?);
        match eroded {
            Region::Polygon(p) => Ok(p.area()),
            Region::Segment(_) | Region::Point(_) => Ok(0.0),
            Region::Empty => Err(Error::Degenerate(format!(
                "erosion by {}B is empty",
                -t
            ))),
        }
    }
}

/// Monotone-chain convex hull (CCW, no duplicate endpoint). Collinear
/// boundary points are dropped.
pub fn convex_hull(mut pts: Vec<Point2>) -> Vec<Point2> {
    pts.sort_by(|a, b| (a[0], a[1]).partial_cmp(&(b[0], b[1])).unwrap());
    pts.dedup_by(|a, b| norm2(sub2(*a, *b)) <= eps_at(*a));
    let n = pts.len();
    if n <= 2 {
        return pts;
    }
    let chain = |iter: &mut dyn Iterator<Item = Point2>| -> Vec<Point2> {
        let mut out: Vec<Point2> = Vec::new();
        for p in iter {
            while out.len() >= 2 {
                let a = out[out.len() - 2];
                let b = out[out.len() - 1];
                if cross2(sub2(b, a), sub2(p, b)) <= eps_at(b) * (1.0 + norm2(sub2(p, a))) {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p);
        }
        out
    };
    let mut lower = chain(&mut pts.iter().copied());
    let mut upper = chain(&mut pts.iter().rev().copied());
    lower.pop();
    upper.pop();
    lower.append(&mut upper);
    lower
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
        assert!((a - b).abs() <= tol, "{what}: {a} vs {b} (tol {tol})");
    }

    #[test]
    fn halfplane_square() {
        let hs = [
            Halfspace2::new([1.0, 0.0], 1.0).unwrap(),
            Halfspace2::new([-1.0, 0.0], 1.0).unwrap(),
            Halfspace2::new([0.0, 1.0], 1.0).unwrap(),
            Halfspace2::new([0.0, -1.0], 1.0).unwrap(),
        ];
        let r = halfplane_intersection(&hs, None).unwrap();
        let p = r.as_polygon().expect("square");
        assert_close(p.area(), 4.0, 1e-12, "square area");
    }

    #[test]
    fn halfplane_infeasible_flagged() {
        let hs = [
            Halfspace2::new([1.0, 0.0], 1.0).unwrap(),
            Halfspace2::new([-1.0, 0.0], -2.0).unwrap(),
        ];
        let bbox = Polygon::square(10.0);
        let r = halfplane_intersection(&hs, Some(&bbox)).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn halfplane_unbounded_errors() {
        let hs = [
            Halfspace2::new([1.0, 0.0], 1.0).unwrap(),
            Halfspace2::new([0.0, 1.0], 1.0).unwrap(),
        ];
        assert!(matches!(halfplane_intersection(&hs, None), Err(Error::Unbounded)));
    }

    #[test]
    fn halfplane_triangle_area() {
        // normals at 120 degree spacing, height 1: equilateral triangle, area 3*sqrt(3)
        let hs: Vec<Halfspace2> = (0..3)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                Halfspace2::new([th.cos(), th.sin()], 1.0).unwrap()
            })
            .collect();
        let r = halfplane_intersection(&hs, None).unwrap();
        assert_close(
            r.area(),
            3.0 * 3.0f64.sqrt(),
            1e-10,
            "equilateral triangle area",
        );
    }

    #[test]
    fn exp_affine_integrals_match_separable_forms() {
        let sq = Polygon::rectangle([0.0, 0.0], [1.0, 1.0]).unwrap();
        assert_close(
            exp_affine_polygon_integral(&Polygon::square(1.0), [0.0, 0.0], 0.0),
            4.0,
            1e-12,
            "area via exp integral",
        );
        let one_minus_e = 1.0 - (-1.0f64).exp();
        assert_close(
            exp_affine_polygon_integral(&sq, [1.0, 0.0], 0.0),
            one_minus_e,
            1e-12,
            "separable x-exponential",
        );
        assert_close(
            exp_affine_polygon_integral(&sq, [1.0, 1.0], 0.0),
            one_minus_e * one_minus_e,
            1e-12,
            "separable xy-exponential",
        );
    }

    #[test]
    fn exp_affine_segment_matches_1d() {
        let seg = [[0.0, 0.0], [1.0, 0.0]];
        assert_close(exp_affine_segment_integral(seg, [0.0, 0.0], 0.0), 1.0, 1e-14, "length");
        assert_close(
            exp_affine_segment_integral(seg, [1.0, 0.0], 0.0),
            1.0 - (-1.0f64).exp(),
            1e-14,
            "1d integral",
        );
        assert_close(
            exp_affine_segment_integral(seg, [0.0, 1.0], 0.0),
            1.0,
            1e-14,
            "orthogonal direction",
        );
    }

    #[test]
    fn exp_affine_matches_monte_carlo() {
        // exact integrals vs 10^6-sample Monte Carlo, within 3 standard errors
        let tri = Polygon::new(vec![[0.0, 0.0], [2.0, 0.3], [0.5, 1.7]]).unwrap();
        let a = [0.8, -0.4];
        let b = 0.2;
        let exact = exp_affine_polygon_integral(&tri, a, b);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let (n, mut sum, mut sumsq) = (1_000_000usize, 0.0f64, 0.0f64);
        let box_area = 2.0 * 1.7;
        for _ in 0..n {
            let p = [rng.random_range(0.0..2.0), rng.random_range(0.0..1.7)];
            let v = if tri.contains(p, 0.0) {
                (-(dot2(a, p) + b)).exp()
            } else {
                0.0
            };
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / n as f64;
        let var = (sumsq / n as f64 - mean * mean).max(0.0);
        let est = box_area * mean;
        let se = box_area * (var / n as f64).sqrt();
        assert!(
            (exact - est).abs() <= 3.0 * se,
            "exact {exact} vs mc {est} +- {se}"
        );
    }

    #[test]
    fn moment_of_centered_square_vanishes() {
        let p = Polygon::square(1.0);
        let m = exp_affine_polygon_moment(&p, [0.0, 0.0], 0.0);
        assert_close(m[0], 0.0, 1e-12, "x moment");
        assert_close(m[1], 0.0, 1e-12, "y moment");
        // with a = (1, 0): int x e^{-x} over [-1,1]^2 = 2 * (2/e - ... ) check by quadrature
        let brute = numeric::adaptive_simpson(&|x: f64| x * (-x).exp(), -1.0, 1.0, 1e-13) * 2.0;
        let m2 = exp_affine_polygon_moment(&p, [1.0, 0.0], 0.0);
        assert_close(m2[0], brute, 1e-11, "x moment vs quadrature");
    }

    #[test]
    fn weighted_integral_matches_quadrature() {
        let p = Polygon::rectangle([0.0, 0.0], [1.0, 1.0]).unwrap();
        let got = exp_affine_polygon_weighted(&p, [2.0, 0.0], 0.5);
        let brute =
            numeric::adaptive_simpson(&|x: f64| (2.0 * x + 0.5) * (-(2.0 * x + 0.5)).exp(), 0.0, 1.0, 1e-13);
        assert_close(got, brute, 1e-11, "weighted exp-affine");
    }

    #[test]
    fn minkowski_sum_squares() {
        let s = Polygon::square(1.0);
        let sum = minkowski_sum(&s, &s);
        assert_close(sum.area(), 16.0, 1e-12, "sum of squares area");
        assert_close(sum.support([1.0, 0.0]), 2.0, 1e-12, "sum support");
    }

    #[test]
    fn minkowski_sum_rotated_square_is_octagon() {
        let s = Polygon::square(1.0);
        let r = 2.0f64.sqrt() / 2.0;
        let rot = Polygon::new(vec![[2.0 * r, 0.0], [0.0, 2.0 * r], [-2.0 * r, 0.0], [0.0, -2.0 * r]])
            .unwrap()
            .scale(0.5)
            .unwrap();
        let sum = minkowski_sum(&s, &rot);
        assert_eq!(sum.vertices().len(), 8, "octagon");
        // |P+Q| = |P| + 2 V1-cross + |Q| in 2D
        let cross_term = 2.0 * mixed_volume_v1(&s, &Region::Polygon(rot.clone()));
        assert_close(
            sum.area(),
            s.area() + cross_term + rot.area(),
            1e-10,
            "area polynomial",
        );
        // oracle: support-function sampling
        for k in 0..64 {
            let th = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
            let d = [th.cos(), th.sin()];
            assert_close(sum.support(d), s.support(d) + rot.support(d), 1e-10, "support additivity");
        }
    }

    #[test]
    fn minkowski_difference_shrinks_square() {
        let s = Polygon::square(1.0);
        let t = Polygon::square(0.25);
        let r = minkowski_difference(&s, &t);
        assert_close(r.area(), 4.0 * 0.75 * 0.75, 1e-12, "eroded square");
        // P - P = {0}, degenerate
        assert!(matches!(minkowski_difference(&s, &s), Region::Point(_)));
        // definitional containment: (P - Q) + Q subset of P
        let back = minkowski_sum_region(&r, &Region::Polygon(t));
        for p in back.points() {
            assert!(s.contains(p, 1e-9), "containment violated at {p:?}");
        }
    }

    #[test]
    fn erosion_by_disk_approx_matches_definition() {
        let tri = Polygon::new(vec![[0.0, 0.0], [4.0, 0.0], [1.0, 3.0]]).unwrap();
        let disk = Polygon::regular(32, 0.3);
        let eroded = minkowski_difference(&tri, &disk);
        let ep = eroded.as_polygon().expect("nonempty erosion");
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let x = [rng.random_range(-1.0..5.0), rng.random_range(-1.0..4.0)];
            let in_eroded = ep.contains(x, -1e-9);
            // definitional oracle: x + disk subset of tri (sampled on vertices)
            let def = disk.vertices().iter().all(|v| tri.contains(add2(x, *v), 1e-9));
            if in_eroded {
                assert!(def, "eroded point {x:?} fails definition");
            }
            if !def {
                assert!(!ep.contains(x, 1e-6) || def, "definition fails inside erosion");
            }
        }
    }

    #[test]
    fn v1_identities() {
        let k = Polygon::square(1.0);
        assert_close(
            mixed_volume_v1(&k, &Region::Polygon(k.clone())),
            k.area(),
            1e-12,
            "V1(K,K) = |K|",
        );
        assert_close(
            mixed_volume_v1(&k, &Region::Point([0.0, 0.0])),
            0.0,
            1e-15,
            "V1(K, {0}) = 0",
        );
        // L = [-e1, e1]: V1 = (2/n) |proj K| = 2
        assert_close(
            mixed_volume_v1(&k, &Region::Segment([[-1.0, 0.0], [1.0, 0.0]])),
            2.0,
            1e-12,
            "V1 against projection",
        );
        // Minkowski additivity of V1 in L on fixtures
        let l1 = Polygon::square(0.5);
        let l2 = Polygon::regular(6, 0.7);
        let v_sum = mixed_volume_v1(&k, &Region::Polygon(minkowski_sum(&l1, &l2)));
        let v_parts = mixed_volume_v1(&k, &Region::Polygon(l1))
            + mixed_volume_v1(&k, &Region::Polygon(l2));
        assert_close(v_sum, v_parts, 1e-10, "V1 additive in L");
    }

    #[test]
    fn matheron_beta_square_values() {
        let s = Polygon::square(1.0);
        assert_close(matheron_beta(&s, &s, 0.5).unwrap(), 9.0, 1e-12, "beta(0.5)");
        assert_close(matheron_beta(&s, &s, -0.5).unwrap(), 1.0, 1e-12, "beta(-0.5)");
        let h = 1e-4;
        let sym = (matheron_beta(&s, &s, h).unwrap() - matheron_beta(&s, &s, -h).unwrap()) / (2.0 * h);
        assert_close(sym, 8.0, 1e-3, "symmetric difference quotient");
    }

    #[test]
    fn matheron_beta_is_convex_on_grid() {
        let a = Polygon::new(vec![[0.0, 0.0], [3.0, 0.5], [2.0, 2.5], [0.3, 2.0]]).unwrap();
        let b = Polygon::regular(8, 0.5);
        let ts: Vec<f64> = (0..=60).map(|k| -0.5 + k as f64 * 0.025).collect();
        let vals: Vec<f64> = ts.iter().map(|&t| matheron_beta(&a, &b, t).unwrap()).collect();
        for w in vals.windows(3) {
            assert!(
                w[0] - 2.0 * w[1] + w[2] >= -1e-9,
                "second difference negative: {w:?}"
            );
        }
    }

    #[test]
    fn cell_decomposition_l1_cone() {
        // pieces (+-e1, 0), (+-e2, 0) on the square: 4 congruent triangular cells
        let pieces = vec![
            ([1.0, 0.0], 0.0),
            ([-1.0, 0.0], 0.0),
            ([0.0, 1.0], 0.0),
            ([0.0, -1.0], 0.0),
        ];
        let trunc = Polygon::square(1.0);
        let cx = cell_decomposition(&pieces, &[], &trunc);
        let mut total = 0.0;
        for c in cx.cells.iter() {
            let c = c.as_ref().expect("four nonempty cells");
            assert_close(c.area(), 1.0, 1e-12, "triangle cell area");
            total += c.area();
        }
        assert_close(total, 4.0, 1e-12, "partition covers the square");
    }

    #[test]
    fn cell_decomposition_dominated_piece_absent() {
        let pieces = vec![([1.0, 0.0], 0.0), ([1.0, 0.0], 1.0)];
        let cx = cell_decomposition(&pieces, &[], &Polygon::square(2.0));
        assert!(cx.cells[0].is_some());
        assert!(cx.cells[1].is_none(), "dominated piece has no cell");
    }

    #[test]
    fn cell_decomposition_single_piece_with_domain() {
        let domain: Vec<Halfspace2> = Polygon::square(1.0).halfspaces();
        let cx = cell_decomposition(&[([0.0, 0.0], 0.0)], &domain, &Polygon::square(50.0));
        assert_close(cx.cells[0].as_ref().unwrap().area(), 4.0, 1e-12, "cell = domain");
        assert_eq!(cx.facets.iter().filter(|f| f.is_some()).count(), 4, "four facets");
        let conservation: f64 = cx
            .cells
            .iter()
            .flatten()
            .map(|c| exp_affine_polygon_integral(c, [0.0, 0.0], 0.0))
            .sum();
        assert_close(conservation, 4.0, 1e-12, "cell mass conservation");
    }

    #[test]
    fn polygon_json_roundtrip() {
        let p = Polygon::regular(5, 1.5);
        let s = serde_json::to_string(&p).unwrap();
        let q: Polygon = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        assert!(serde_json::from_str::<Polygon>("{\"vertices\":[[0,0],[1,0]]}").is_err());
    }
}
