//! Lower-semicontinuous convex functions on R^n and the log-concave
//! densities built from them: evaluation, Legendre transform, horizon
//! function, sup-convolution, dilation, epigraph predicates, and an
//! epi-convergence pseudometric.
//!
//! `+inf` is first-class throughout (`f64::INFINITY`); indicator functions
//! and domain constraints rely on it, and arithmetic saturates.

mod epi;
mod legendre;
pub mod line;

pub use epi::{epi_contains, epi_distance, epi_distance_detailed, translate_to_eps_class, EpiPoint};
pub(crate) use epi::{ball_samples, interior_margin};

use crate::error::{Error, Result};
use crate::numeric::{self, dot, norm};
use crate::poly2d::{self, Polygon};
use serde::{Deserialize, Serialize};

/// Extended real serialized as a JSON number, or the string `"inf"` for
/// `+infinity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtReal(pub f64);

impl Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str("inf")
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::Number(n) => Ok(ExtReal(n.as_f64().unwrap_or(f64::INFINITY))),
            serde_json::Value::String(s) if s == "inf" => Ok(ExtReal(f64::INFINITY)),
            other => Err(D::Error::custom(format!("expected number or \"inf\", got {other}"))),
        }
    }
}

/// One affine piece `x -> <slope, x> - offset` of a max-affine function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub slope: Vec<f64>,
    pub offset: f64,
}

/// Closed halfspace `{x : <normal, x> <= height}` in R^n (unit normal).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub height: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, height: f64) -> Result<Self> {
        let n = norm(&normal);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidInput("halfspace normal must be nonzero".into()));
        }
        Ok(Self {
            normal: normal.iter().map(|x| x / n).collect(),
            height: height / n,
        })
    }

    pub fn to_2d(&self) -> poly2d::Halfspace2 {
        poly2d::Halfspace2 {
            normal: [self.normal[0], self.normal[1]],
            height: self.height,
        }
    }
}

/// `max_i (<x, slope_i> - offset_i)`, optionally restricted to a polyhedral
/// domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyhedral {
    pub pieces: Vec<Piece>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<Halfspace>>,
}

impl Polyhedral {
    pub fn dim(&self) -> usize {
        self.pieces[0].slope.len()
    }

    pub fn pieces_2d(&self) -> Vec<([f64; 2], f64)> {
        self.pieces
            .iter()
            .map(|p| ([p.slope[0], p.slope[1]], p.offset))
            .collect()
    }

    pub fn domain_2d(&self) -> Vec<poly2d::Halfspace2> {
        self.domain
            .as_deref()
            .unwrap_or(&[])
            .iter()
            .map(|h| h.to_2d())
            .collect()
    }
}

/// Sampled convex function on an axis-aligned box; `+inf` values mark the
/// complement of the (convex) finite region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFn {
    pub lo: Vec<f64>,
    pub step: Vec<f64>,
    pub shape: Vec<usize>,
    pub values: Vec<ExtReal>,
}

impl GridFn {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn value(&self, idx: &[usize]) -> f64 {
        let mut flat = 0usize;
        for (k, &i) in idx.iter().enumerate() {
            flat = flat * self.shape[k] + i;
        }
        self.values[flat].0
    }
}

/// `x -> (1/2) (x - center)^T matrix (x - center)` with positive-definite matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quadratic {
    pub matrix: Vec<Vec<f64>>,
    pub center: Vec<f64>,
}

impl Quadratic {
    pub fn isotropic(a: f64, dim: usize) -> Self {
        let mut m = vec![vec![0.0; dim]; dim];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = a;
        }
        Quadratic {
            matrix: m,
            center: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }
}

/// `x -> slope * |x| + offset` with `slope > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    pub slope: f64,
    pub offset: f64,
    pub dim: usize,
}

/// Convex base sets for indicators and distance cones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseSet {
    Interval { lo: f64, hi: f64 },
    Polygon(Polygon),
    Ball { center: Vec<f64>, radius: f64 },
    Point(Vec<f64>),
}

impl BaseSet {
    pub fn dim(&self) -> usize {
        match self {
            BaseSet::Interval { .. } => 1,
            BaseSet::Polygon(_) => 2,
            BaseSet::Ball { center, .. } => center.len(),
            BaseSet::Point(p) => p.len(),
        }
    }

    pub fn translate(&self, d: &[f64]) -> BaseSet {
        match self {
            BaseSet::Interval { lo, hi } => BaseSet::Interval {
                lo: lo + d[0],
                hi: hi + d[0],
            },
            BaseSet::Polygon(p) => BaseSet::Polygon(p.translate([d[0], d[1]])),
            BaseSet::Ball { center, radius } => BaseSet::Ball {
                center: numeric::add(center, d),
                radius: *radius,
            },
            BaseSet::Point(p) => BaseSet::Point(numeric::add(p, d)),
        }
    }

    pub fn scale(&self, c: f64) -> Result<BaseSet> {
        Ok(match self {
            BaseSet::Interval { lo, hi } => BaseSet::Interval {
                lo: c * lo,
                hi: c * hi,
            },
            BaseSet::Polygon(p) => BaseSet::Polygon(p.scale(c)?),
            BaseSet::Ball { center, radius } => BaseSet::Ball {
                center: numeric::scale(center, c),
                radius: c * radius,
            },
            BaseSet::Point(p) => BaseSet::Point(numeric::scale(p, c)),
        })
    }

    /// Euclidean distance from `x` to the set (0 inside).
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            BaseSet::Interval { lo, hi } => (lo - x[0]).max(x[0] - hi).max(0.0),
            BaseSet::Polygon(p) => {
                let q = [x[0], x[1]];
                if p.contains(q, 0.0) {
                    return 0.0;
                }
                let mut best = f64::INFINITY;
                for e in p.edges() {
                    best = best.min(point_segment_distance(q, e.start, e.end));
                }
                best
            }
            BaseSet::Ball { center, radius } => (numeric::dist(x, center) - radius).max(0.0),
            BaseSet::Point(p) => numeric::dist(x, p),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.distance(x) <= tol
    }

    /// Classical support function `h_S(y)`.
    pub fn support(&self, y: &[f64]) -> f64 {
        match self {
            BaseSet::Interval { lo, hi } => (lo * y[0]).max(hi * y[0]),
            BaseSet::Polygon(p) => p.support([y[0], y[1]]),
            BaseSet::Ball { center, radius } => dot(center, y) + radius * norm(y),
            BaseSet::Point(p) => dot(p, y),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            BaseSet::Interval { lo, hi } => (hi - lo).max(0.0),
            BaseSet::Polygon(p) => p.area(),
            BaseSet::Ball { radius, center } => unit_ball_volume(center.len()) * radius.powi(center.len() as i32),
            BaseSet::Point(_) => 0.0,
        }
    }

    pub fn perimeter(&self) -> f64 {
        match self {
            BaseSet::Interval { .. } => 2.0,
            BaseSet::Polygon(p) => p.perimeter(),
            BaseSet::Ball { radius, center } if center.len() == 2 => {
                2.0 * std::f64::consts::PI * radius
            }
            _ => f64::NAN,
        }
    }

    /// An interior-most point (centroid / center / midpoint).
    pub fn inner_point(&self) -> Vec<f64> {
        match self {
            BaseSet::Interval { lo, hi } => vec![0.5 * (lo + hi)],
            BaseSet::Polygon(p) => p.centroid().to_vec(),
            BaseSet::Ball { center, .. } => center.clone(),
            BaseSet::Point(p) => p.clone(),
        }
    }

    pub fn max_norm(&self) -> f64 {
        match self {
            BaseSet::Interval { lo, hi } => lo.abs().max(hi.abs()),
            BaseSet::Polygon(p) => p.max_norm(),
            BaseSet::Ball { center, radius } => norm(center) + radius,
            BaseSet::Point(p) => norm(p),
        }
    }

    pub fn minkowski_sum(&self, other: &BaseSet) -> Result<BaseSet> {
        Ok(match (self, other) {
            (BaseSet::Point(p), s) | (s, BaseSet::Point(p)) => s.translate(p),
            (BaseSet::Interval { lo, hi }, BaseSet::Interval { lo: l2, hi: h2 }) => {
                BaseSet::Interval {
                    lo: lo + l2,
                    hi: hi + h2,
                }
            }
            (BaseSet::Polygon(a), BaseSet::Polygon(b)) => {
                BaseSet::Polygon(poly2d::minkowski_sum(a, b))
            }
            (BaseSet::Ball { center, radius }, BaseSet::Ball { center: c2, radius: r2 }) => {
                BaseSet::Ball {
                    center: numeric::add(center, c2),
                    radius: radius + r2,
                }
            }
            _ => {
                return Err(Error::Unsupported(
                    "minkowski sum of mixed base-set kinds".into(),
                ))
            }
        })
    }
}

/// Volume of the unit ball in R^n: pi^{n/2} / Gamma(n/2 + 1).
pub fn unit_ball_volume(n: usize) -> f64 {
    let pi = std::f64::consts::PI;
    // Gamma(n/2 + 1) for integer n via the half-integer recursion
    let mut gamma = if n % 2 == 0 { 1.0 } else { pi.sqrt() };
    let mut k = if n % 2 == 0 { 1.0 } else { 0.5 };
    while k <= n as f64 / 2.0 {
        gamma *= k;
        k += 1.0;
    }
    pi.powf(n as f64 / 2.0) / gamma
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = poly2d::sub2(b, a);
    let ap = poly2d::sub2(p, a);
    let t = (poly2d::dot2(ap, ab) / poly2d::dot2(ab, ab)).clamp(0.0, 1.0);
    poly2d::norm2(poly2d::sub2(p, [a[0] + t * ab[0], a[1] + t * ab[1]]))
}

/// `x -> slope * dist(x, core) + offset`: the sup-convolution of a cone
/// profile with a set indicator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistCone {
    pub slope: f64,
    pub offset: f64,
    pub core: BaseSet,
}

/// `inner(x) + <linear, x> + constant`. Construction through
/// [`ConvexFunction::shifted`] absorbs the affine part into polyhedral and
/// quadratic inners, so a stored `Shifted` only wraps the other variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shifted {
    pub inner: ConvexFunction,
    pub linear: Vec<f64>,
    pub constant: f64,
}

/// Tagged representation of a lower-semicontinuous convex function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexFunction {
    Polyhedral(Polyhedral),
    Grid(GridFn),
    Quadratic(Quadratic),
    Cone(Cone),
    Indicator { set: BaseSet },
    DistCone(DistCone),
    Shifted(Box<Shifted>),
}

/// Certified coercivity bound `phi(x) >= a|x| + b` with `a > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub a: f64,
    pub b: f64,
}

impl Witness {
    /// Radius beyond which the 2D tail mass of `e^{-(a|x|+b)}` is below `tol`.
    pub fn tail_radius(&self, dim: usize, tol: f64) -> f64 {
        let mut r: f64 = 1.0;
        loop {
            let tail = match dim {
                1 => 2.0 * (-self.b).exp() * (-self.a * r).exp() / self.a,
                _ => {
                    2.0 * std::f64::consts::PI
                        * (-self.b).exp()
                        * (r / self.a + 1.0 / (self.a * self.a))
                        * (-self.a * r).exp()
                }
            };
            if tail <= tol || r > 1e7 {
                return r;
            }
            r *= 2.0;
        }
    }
}

impl ConvexFunction {
    // -- constructors ------------------------------------------------------

    pub fn polyhedral(pieces: Vec<(Vec<f64>, f64)>, domain: Option<Vec<(Vec<f64>, f64)>>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidInput("polyhedral function needs at least one piece".into()));
        }
        let dim = pieces[0].0.len();
        // deduplicate identical slopes, keeping the smaller offset
        let mut ps: Vec<Piece> = Vec::new();
        for (slope, offset) in pieces {
            if slope.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: slope.len() });
            }
            if let Some(existing) = ps
                .iter_mut()
                .find(|p| numeric::dist(&p.slope, &slope) <= numeric::GEOM_EPS * (1.0 + norm(&slope)))
            {
                existing.offset = existing.offset.min(offset);
            } else {
                ps.push(Piece { slope, offset });
            }
        }
        let dom = match domain {
            None => None,
            Some(hs) => {
                let mut out = Vec::new();
                for (normal, height) in hs {
                    if normal.len() != dim {
                        return Err(Error::DimensionMismatch { expected: dim, got: normal.len() });
                    }
                    out.push(Halfspace::new(normal, height)?);
                }
                Some(out)
            }
        };
        Ok(ConvexFunction::Polyhedral(Polyhedral { pieces: ps, domain: dom }))
    }

    /// `x -> a|x| + b` in dimension `dim`.
    pub fn cone(a: f64, b: f64, dim: usize) -> Result<Self> {
        if a <= 0.0 {
            return Err(Error::InvalidInput("cone slope must be positive".into()));
        }
        Ok(ConvexFunction::Cone(Cone { slope: a, offset: b, dim }))
    }

    pub fn gaussian_potential(dim: usize) -> Self {
        ConvexFunction::Quadratic(Quadratic::isotropic(1.0, dim))
    }

    pub fn indicator(set: BaseSet) -> Self {
        ConvexFunction::Indicator { set }
    }

    pub fn indicator_interval(lo: f64, hi: f64) -> Self {
        ConvexFunction::Indicator { set: BaseSet::Interval { lo, hi } }
    }

    pub fn indicator_polygon(p: Polygon) -> Self {
        ConvexFunction::Indicator { set: BaseSet::Polygon(p) }
    }

    /// `inner + <linear, x> + constant`, normalizing polyhedral and quadratic
    /// inners so the affine data never stacks.
    pub fn shifted(inner: ConvexFunction, linear: Vec<f64>, constant: f64) -> Self {
        let dim = inner.dim();
        debug_assert_eq!(linear.len(), dim);
        if linear.iter().all(|&v| v == 0.0) && constant == 0.0 {
            return inner;
        }
        match inner {
            ConvexFunction::Polyhedral(p) => {
                let pieces = p
                    .pieces
                    .into_iter()
                    .map(|pc| Piece {
                        slope: numeric::add(&pc.slope, &linear),
                        offset: pc.offset - constant,
                    })
                    .collect();
                ConvexFunction::Polyhedral(Polyhedral { pieces, domain: p.domain })
            }
            ConvexFunction::Quadratic(q) => {
                // 1/2 (x-c)^T A (x-c) + <v,x> + k = 1/2 (x-c')^T A (x-c') + k'
                if let Some(inv_v) = solve_spd(&q.matrix, &linear) {
                    let c2 = numeric::sub(&q.center, &inv_v);
                    let k2 = constant + dot(&linear, &q.center)
                        - 0.5 * dot(&linear, &inv_v);
                    let qq = ConvexFunction::Quadratic(Quadratic { matrix: q.matrix, center: c2 });
                    if k2 == 0.0 {
                        qq
                    } else {
                        ConvexFunction::Shifted(Box::new(Shifted {
                            inner: qq,
                            linear: vec![0.0; dim],
                            constant: k2,
                        }))
                    }
                } else {
                    ConvexFunction::Shifted(Box::new(Shifted {
                        inner: ConvexFunction::Quadratic(q),
                        linear,
                        constant,
                    }))
                }
            }
            ConvexFunction::Shifted(s) => ConvexFunction::shifted(
                s.inner,
                numeric::add(&s.linear, &linear),
                s.constant + constant,
            ),
            other => ConvexFunction::Shifted(Box::new(Shifted { inner: other, linear, constant })),
        }
    }

    pub fn plus_constant(self, c: f64) -> Self {
        let dim = self.dim();
        ConvexFunction::shifted(self, vec![0.0; dim], c)
    }

    // -- basic queries -----------------------------------------------------

    pub fn dim(&self) -> usize {
        match self {
            ConvexFunction::Polyhedral(p) => p.dim(),
            ConvexFunction::Grid(g) => g.dim(),
            ConvexFunction::Quadratic(q) => q.dim(),
            ConvexFunction::Cone(c) => c.dim,
            ConvexFunction::Indicator { set } => set.dim(),
            ConvexFunction::DistCone(d) => d.core.dim(),
            ConvexFunction::Shifted(s) => s.inner.dim(),
        }
    }

    /// `phi(x)`, `+inf` outside the domain. Exact for polyhedral and analytic
    /// variants, multilinear interpolation for grids.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(self.eval_with_tol(x, 0.0))
    }

    /// Evaluation with a domain-membership slack: points within `tol` of the
    /// domain are treated as boundary points. Measure atoms produced by exact
    /// engines sit on domain boundaries up to rounding, so pairings use a
    /// small positive `tol`.
    pub fn eval_with_tol(&self, x: &[f64], tol: f64) -> f64 {
        match self {
            ConvexFunction::Polyhedral(p) => {
                if let Some(dom) = &p.domain {
                    let scale = 1.0 + norm(x);
                    for h in dom {
                        if dot(&h.normal, x) > h.height + tol + numeric::GEOM_EPS * scale {
                            return f64::INFINITY;
                        }
                    }
                }
                p.pieces
                    .iter()
                    .map(|pc| dot(&pc.slope, x) - pc.offset)
                    .fold(f64::NEG_INFINITY, f64::max)
            }
            ConvexFunction::Grid(g) => grid_eval(g, x),
            ConvexFunction::Quadratic(q) => {
                let d = numeric::sub(x, &q.center);
                let mut acc = 0.0;
                for (i, row) in q.matrix.iter().enumerate() {
                    acc += d[i] * dot(row, &d);
                }
                0.5 * acc
            }
            ConvexFunction::Cone(c) => c.slope * norm(x) + c.offset,
            ConvexFunction::Indicator { set } => {
                let scale = 1.0 + norm(x);
                if set.contains(x, tol + numeric::GEOM_EPS * scale) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            ConvexFunction::DistCone(d) => d.slope * d.core.distance(x) + d.offset,
            ConvexFunction::Shifted(s) => {
                let inner = s.inner.eval_with_tol(x, tol);
                if inner.is_infinite() {
                    f64::INFINITY
                } else {
                    inner + dot(&s.linear, x) + s.constant
                }
            }
        }
    }

    /// `tau_v phi : x -> phi(x + v)`, exact in every representation.
    pub fn translate(&self, v: &[f64]) -> ConvexFunction {
        let neg: Vec<f64> = v.iter().map(|x| -x).collect();
        match self {
            ConvexFunction::Polyhedral(p) => ConvexFunction::Polyhedral(Polyhedral {
                pieces: p
                    .pieces
                    .iter()
                    .map(|pc| Piece {
                        slope: pc.slope.clone(),
                        offset: pc.offset - dot(&pc.slope, v),
                    })
                    .collect(),
                domain: p.domain.as_ref().map(|dom| {
                    dom.iter()
                        .map(|h| Halfspace {
                            normal: h.normal.clone(),
                            height: h.height - dot(&h.normal, v),
                        })
                        .collect()
                }),
            }),
            ConvexFunction::Grid(g) => ConvexFunction::Grid(GridFn {
                lo: numeric::sub(&g.lo, v),
                step: g.step.clone(),
                shape: g.shape.clone(),
                values: g.values.clone(),
            }),
            ConvexFunction::Quadratic(q) => ConvexFunction::Quadratic(Quadratic {
                matrix: q.matrix.clone(),
                center: numeric::sub(&q.center, v),
            }),
            ConvexFunction::Cone(c) => {
                if v.iter().all(|&t| t == 0.0) {
                    ConvexFunction::Cone(c.clone())
                } else {
                    ConvexFunction::DistCone(DistCone {
                        slope: c.slope,
                        offset: c.offset,
                        core: BaseSet::Point(neg),
                    })
                }
            }
            ConvexFunction::Indicator { set } => ConvexFunction::Indicator { set: set.translate(&neg) },
            ConvexFunction::DistCone(d) => ConvexFunction::DistCone(DistCone {
                slope: d.slope,
                offset: d.offset,
                core: d.core.translate(&neg),
            }),
            ConvexFunction::Shifted(s) => ConvexFunction::shifted(
                s.inner.translate(v),
                s.linear.clone(),
                s.constant + dot(&s.linear, v),
            ),
        }
    }

    /// `phi -> lambda * phi(. / lambda)` (the potential of the dilation).
    pub fn dilate(&self, lambda: f64) -> Result<ConvexFunction> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidInput(format!("dilation factor must be positive, got {lambda}")));
        }
        Ok(match self {
            ConvexFunction::Polyhedral(p) => ConvexFunction::Polyhedral(Polyhedral {
                pieces: p
                    .pieces
                    .iter()
                    .map(|pc| Piece { slope: pc.slope.clone(), offset: lambda * pc.offset })
                    .collect(),
                domain: p.domain.as_ref().map(|dom| {
                    dom.iter()
                        .map(|h| Halfspace { normal: h.normal.clone(), height: lambda * h.height })
                        .collect()
                }),
            }),
            ConvexFunction::Grid(g) => ConvexFunction::Grid(GridFn {
                lo: numeric::scale(&g.lo, lambda),
                step: numeric::scale(&g.step, lambda),
                shape: g.shape.clone(),
                values: g.values.iter().map(|v| ExtReal(lambda * v.0)).collect(),
            }),
            ConvexFunction::Quadratic(q) => ConvexFunction::Quadratic(Quadratic {
                matrix: q
                    .matrix
                    .iter()
                    .map(|row| row.iter().map(|a| a / lambda).collect())
                    .collect(),
                center: numeric::scale(&q.center, lambda),
            }),
            ConvexFunction::Cone(c) => ConvexFunction::Cone(Cone {
                slope: c.slope,
                offset: lambda * c.offset,
                dim: c.dim,
            }),
            ConvexFunction::Indicator { set } => ConvexFunction::Indicator { set: set.scale(lambda)? },
            ConvexFunction::DistCone(d) => ConvexFunction::DistCone(DistCone {
                slope: d.slope,
                offset: lambda * d.offset,
                core: d.core.scale(lambda)?,
            }),
            ConvexFunction::Shifted(s) => ConvexFunction::shifted(
                s.inner.dilate(lambda)?,
                s.linear.clone(),
                lambda * s.constant,
            ),
        })
    }

    /// Minimum value and a minimizer. Exact for analytic variants; polyhedral
    /// minima come from the arrangement vertices.
    pub fn min_value(&self) -> Result<(f64, Vec<f64>)> {
        match self {
            ConvexFunction::Quadratic(q) => Ok((0.0, q.center.clone())),
            ConvexFunction::Cone(c) => Ok((c.offset, vec![0.0; c.dim])),
            ConvexFunction::Indicator { set } => Ok((0.0, set.inner_point())),
            ConvexFunction::DistCone(d) => Ok((d.offset, d.core.inner_point())),
            ConvexFunction::Grid(g) => {
                let mut best = f64::INFINITY;
                let mut arg = vec![0.0; g.dim()];
                for_each_grid_node(g, |x, v| {
                    if v < best {
                        best = v;
                        arg = x.to_vec();
                    }
                });
                if best.is_infinite() {
                    return Err(Error::Improper("grid function is identically +inf".into()));
                }
                Ok((best, arg))
            }
            ConvexFunction::Polyhedral(p) => polyhedral_min(p),
            ConvexFunction::Shifted(s) => shifted_min(s),
        }
    }

    /// Certified coercivity witness `(a, b)` with `phi >= a|x| + b`, `a > 0`.
    pub fn witness(&self) -> Result<Witness> {
        match self {
            ConvexFunction::Quadratic(q) => {
                let lam = spd_min_eigenvalue(&q.matrix)?;
                let c = norm(&q.center);
                Ok(Witness { a: lam, b: -lam * (c + 0.5) })
            }
            ConvexFunction::Cone(c) => Ok(Witness { a: c.slope, b: c.offset }),
            ConvexFunction::Indicator { set } => match set {
                BaseSet::Point(p) => Ok(Witness { a: 1.0, b: -norm(p) }),
                _ => Ok(Witness { a: 1.0, b: -set.max_norm() }),
            },
            ConvexFunction::DistCone(d) => Ok(Witness {
                a: d.slope,
                b: d.offset - d.slope * d.core.max_norm(),
            }),
            ConvexFunction::Grid(g) => {
                let (m, _) = self.min_value()?;
                let r = g
                    .lo
                    .iter()
                    .zip(&g.step)
                    .zip(&g.shape)
                    .map(|((lo, st), sh)| lo.abs().max((lo + st * (*sh as f64 - 1.0)).abs()))
                    .fold(0.0f64, |acc, v| acc + v * v)
                    .sqrt();
                Ok(Witness { a: 1.0, b: m - r })
            }
            ConvexFunction::Polyhedral(p) => polyhedral_witness(p),
            ConvexFunction::Shifted(s) => {
                let inner = s.inner.witness()?;
                let v = norm(&s.linear);
                if inner.a - v <= 0.0 {
                    return Err(Error::NoWitness(format!(
                        "linear tilt |v| = {v} cancels the coercivity slope {}",
                        inner.a
                    )));
                }
                Ok(Witness { a: inner.a - v, b: inner.b + s.constant })
            }
        }
    }

    /// Horizon (recession) function `theta -> lim psi(p + t theta)/t`.
    pub fn horizon(&self, theta: &[f64]) -> Result<f64> {
        Ok(self.horizon_with_error(theta)?.0)
    }

    /// Horizon value with an error bar; exact variants report an error of 0,
    /// grids report the Richardson extrapolation defect.
    pub fn horizon_with_error(&self, theta: &[f64]) -> Result<(f64, f64)> {
        if theta.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: theta.len() });
        }
        match self {
            ConvexFunction::Polyhedral(p) => {
                if let Some(dom) = &p.domain {
                    for h in dom {
                        if dot(&h.normal, theta) > numeric::GEOM_EPS * (1.0 + norm(theta)) {
                            return Ok((f64::INFINITY, 0.0));
                        }
                    }
                }
                let v = p
                    .pieces
                    .iter()
                    .map(|pc| dot(&pc.slope, theta))
                    .fold(f64::NEG_INFINITY, f64::max);
                Ok((v, 0.0))
            }
            ConvexFunction::Quadratic(_) => Ok((
                if norm(theta) > 0.0 { f64::INFINITY } else { 0.0 },
                0.0,
            )),
            ConvexFunction::Cone(c) => Ok((c.slope * norm(theta), 0.0)),
            ConvexFunction::Indicator { .. } => Ok((
                if norm(theta) > 0.0 { f64::INFINITY } else { 0.0 },
                0.0,
            )),
            ConvexFunction::DistCone(d) => Ok((d.slope * norm(theta), 0.0)),
            ConvexFunction::Shifted(s) => {
                let (h, e) = s.inner.horizon_with_error(theta)?;
                Ok((h + dot(&s.linear, theta), e))
            }
            ConvexFunction::Grid(g) => grid_horizon(g, theta),
        }
    }

    /// Legendre transform `psi*(y) = sup_x (<x,y> - psi(x))`.
    pub fn legendre(&self) -> Result<ConvexFunction> {
        legendre::legendre(self)
    }

    /// Polyhedral view: native polyhedral functions plus indicators of
    /// intervals and polygons (one zero piece with domain constraints).
    pub fn to_polyhedral(&self) -> Option<Polyhedral> {
        match self {
            ConvexFunction::Polyhedral(p) => Some(p.clone()),
            ConvexFunction::Indicator { set } => match set {
                BaseSet::Interval { lo, hi } => Some(Polyhedral {
                    pieces: vec![Piece { slope: vec![0.0], offset: 0.0 }],
                    domain: Some(vec![
                        Halfspace { normal: vec![1.0], height: *hi },
                        Halfspace { normal: vec![-1.0], height: -lo },
                    ]),
                }),
                BaseSet::Polygon(p) => Some(Polyhedral {
                    pieces: vec![Piece { slope: vec![0.0, 0.0], offset: 0.0 }],
                    domain: Some(
                        p.halfspaces()
                            .iter()
                            .map(|h| Halfspace {
                                normal: h.normal.to_vec(),
                                height: h.height,
                            })
                            .collect(),
                    ),
                }),
                _ => None,
            },
            ConvexFunction::Shifted(s) => {
                let base = s.inner.to_polyhedral()?;
                let pieces = base
                    .pieces
                    .into_iter()
                    .map(|pc| Piece {
                        slope: numeric::add(&pc.slope, &s.linear),
                        offset: pc.offset - s.constant,
                    })
                    .collect();
                Some(Polyhedral { pieces, domain: base.domain })
            }
            _ => None,
        }
    }
}

fn grid_eval(g: &GridFn, x: &[f64]) -> f64 {
    let dim = g.dim();
    let mut idx = vec![0usize; dim];
    let mut frac = vec![0.0f64; dim];
    for k in 0..dim {
        let t = (x[k] - g.lo[k]) / g.step[k];
        let max = (g.shape[k] - 1) as f64;
        if t < -1e-12 || t > max + 1e-12 {
            return f64::INFINITY;
        }
        let t = t.clamp(0.0, max);
        let i = (t.floor() as usize).min(g.shape[k].saturating_sub(2));
        idx[k] = i;
        frac[k] = t - i as f64;
    }
    // multilinear over the 2^dim cell corners; any infinite corner poisons
    let corners = 1usize << dim;
    let mut acc = 0.0;
    for c in 0..corners {
        let mut w = 1.0;
        let mut corner_idx = idx.clone();
        for k in 0..dim {
            if (c >> k) & 1 == 1 {
                corner_idx[k] += 1;
                w *= frac[k];
            } else {
                w *= 1.0 - frac[k];
            }
        }
        let v = g.value(&corner_idx);
        if v.is_infinite() {
            if w > 1e-12 {
                return f64::INFINITY;
            }
            continue;
        }
        acc += w * v;
    }
    acc
}

fn for_each_grid_node(g: &GridFn, mut f: impl FnMut(&[f64], f64)) {
    let dim = g.dim();
    let mut idx = vec![0usize; dim];
    let total: usize = g.shape.iter().product();
    let mut x = vec![0.0; dim];
    for flat in 0..total {
        let mut rem = flat;
        for k in (0..dim).rev() {
            idx[k] = rem % g.shape[k];
            rem /= g.shape[k];
        }
        // row-major with axis 0 slowest, to match `GridFn::value`
        let mut check = 0usize;
        for k in 0..dim {
            check = check * g.shape[k] + idx[k];
        }
        debug_assert_eq!(check, flat);
        for k in 0..dim {
            x[k] = g.lo[k] + g.step[k] * idx[k] as f64;
        }
        f(&x, g.values[flat].0);
    }
}

fn grid_horizon(g: &GridFn, theta: &[f64]) -> Result<(f64, f64)> {
    let nt = norm(theta);
    if nt == 0.0 {
        return Ok((0.0, 0.0));
    }
    // base point: grid argmin
    let (_, p) = ConvexFunction::Grid(g.clone()).min_value()?;
    let phi = |pt: &[f64]| grid_eval(g, pt);
    let base = phi(&p);
    // largest lambda staying in the box
    let mut lam_max = f64::INFINITY;
    for k in 0..g.dim() {
        let hi = g.lo[k] + g.step[k] * (g.shape[k] - 1) as f64;
        if theta[k] > 1e-15 {
            lam_max = lam_max.min((hi - p[k]) / theta[k]);
        } else if theta[k] < -1e-15 {
            lam_max = lam_max.min((g.lo[k] - p[k]) / theta[k]);
        }
    }
    if !lam_max.is_finite() || lam_max <= 0.0 {
        return Ok((f64::INFINITY, 0.0));
    }
    let lam_max = 0.999 * lam_max;
    let ratio = |lam: f64| -> f64 {
        let pt: Vec<f64> = p.iter().zip(theta).map(|(pk, tk)| pk + lam * tk).collect();
        (phi(&pt) - base) / lam
    };
    let g2 = ratio(lam_max);
    if g2.is_infinite() {
        return Ok((f64::INFINITY, 0.0));
    }
    let g1 = ratio(lam_max / 2.0);
    // ratio(lam) ~ L - c/lam: Richardson
    let extrap = 2.0 * g2 - g1;
    Ok((extrap, (extrap - g2).abs()))
}

fn polyhedral_min(p: &Polyhedral) -> Result<(f64, Vec<f64>)> {
    match p.dim() {
        1 => {
            let l = line::Line1::from_polyhedral(p)?;
            l.min_value()
        }
        2 => {
            let w = polyhedral_witness(p);
            let radius = match (&w, &p.domain) {
                (Ok(wt), _) => {
                    // |argmin| <= (phi(x_ref) - b)/a for any reference value
                    let x0 = domain_point(p);
                    let v0 = p
                        .pieces
                        .iter()
                        .map(|pc| dot(&pc.slope, &x0) - pc.offset)
                        .fold(f64::NEG_INFINITY, f64::max);
                    ((v0 - wt.b) / wt.a).abs() + norm(&x0) + 1.0
                }
                (Err(_), Some(_)) => domain_radius_2d(p)? + 1.0,
                (Err(e), None) => return Err(Error::NoWitness(e.to_string())),
            };
            let trunc = Polygon::square(radius.max(1.0));
            let cx = poly2d::cell_decomposition(&p.pieces_2d(), &p.domain_2d(), &trunc);
            let mut best = f64::INFINITY;
            let mut arg = vec![0.0, 0.0];
            for v in cx.vertex_set() {
                let val = p
                    .pieces
                    .iter()
                    .map(|pc| pc.slope[0] * v[0] + pc.slope[1] * v[1] - pc.offset)
                    .fold(f64::NEG_INFINITY, f64::max);
                if val < best {
                    best = val;
                    arg = v.to_vec();
                }
            }
            if best.is_infinite() {
                return Err(Error::Improper("polyhedral function has empty domain".into()));
            }
            Ok((best, arg))
        }
        d => Err(Error::Unsupported(format!("polyhedral minimum in dimension {d}"))),
    }
}

/// Any point of the (possibly unbounded) domain.
pub(crate) fn domain_point(p: &Polyhedral) -> Vec<f64> {
    match &p.domain {
        None => vec![0.0; p.dim()],
        Some(_dom) if p.dim() == 2 => {
            let trunc = Polygon::square(1e4);
            let cx = poly2d::cell_decomposition(&p.pieces_2d(), &p.domain_2d(), &trunc);
            match &cx.base {
                poly2d::Region::Polygon(poly) => poly.centroid().to_vec(),
                r => r.points().first().map(|q| q.to_vec()).unwrap_or(vec![0.0, 0.0]),
            }
        }
        Some(dom) => {
            // 1D: midpoint of the interval bounds where available
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for h in dom {
                if h.normal[0] > 0.0 {
                    hi = hi.min(h.height / h.normal[0]);
                } else {
                    lo = lo.max(-h.height / -h.normal[0].abs());
                }
            }
            match (lo.is_finite(), hi.is_finite()) {
                (true, true) => vec![0.5 * (lo + hi)],
                (true, false) => vec![lo + 1.0],
                (false, true) => vec![hi - 1.0],
                _ => vec![0.0],
            }
        }
    }
}

fn domain_radius_2d(p: &Polyhedral) -> Result<f64> {
    let dom = p.domain_2d();
    match poly2d::halfplane_intersection(&dom, None) {
        Ok(r) => {
            let pts = r.points();
            Ok(pts.iter().map(|q| poly2d::norm2(*q)).fold(0.0, f64::max))
        }
        Err(_) => Err(Error::Unbounded),
    }
}

fn shifted_min(s: &Shifted) -> Result<(f64, Vec<f64>)> {
    match &s.inner {
        ConvexFunction::Indicator { set } => {
            // minimize a linear function over the set
            match set {
                BaseSet::Interval { lo, hi } => {
                    let (v, x) = if s.linear[0] >= 0.0 { (s.linear[0] * lo, *lo) } else { (s.linear[0] * hi, *hi) };
                    Ok((v + s.constant, vec![x]))
                }
                BaseSet::Polygon(p) => {
                    let mut best = f64::INFINITY;
                    let mut arg = [0.0, 0.0];
                    for &v in p.vertices() {
                        let val = s.linear[0] * v[0] + s.linear[1] * v[1];
                        if val < best {
                            best = val;
                            arg = v;
                        }
                    }
                    Ok((best + s.constant, arg.to_vec()))
                }
                BaseSet::Ball { center, radius } => {
                    let n = norm(&s.linear);
                    if n == 0.0 {
                        return Ok((s.constant, center.clone()));
                    }
                    let x: Vec<f64> = center
                        .iter()
                        .zip(&s.linear)
                        .map(|(c, l)| c - radius * l / n)
                        .collect();
                    Ok((dot(&s.linear, &x) + s.constant, x))
                }
                BaseSet::Point(p) => Ok((dot(&s.linear, p) + s.constant, p.clone())),
            }
        }
        // cone-like inners with |linear| < slope keep their minimum at the core
        ConvexFunction::Cone(c) => {
            if norm(&s.linear) < c.slope {
                Ok((c.offset + s.constant, vec![0.0; c.dim]))
            } else {
                Err(Error::Improper("tilted cone is unbounded below".into()))
            }
        }
        ConvexFunction::DistCone(d) => {
            if norm(&s.linear) < d.slope {
                let shadow = Shifted {
                    inner: ConvexFunction::Indicator { set: d.core.clone() },
                    linear: s.linear.clone(),
                    constant: s.constant + d.offset,
                };
                shifted_min(&shadow)
            } else {
                Err(Error::Improper("tilted distance cone is unbounded below".into()))
            }
        }
        ConvexFunction::Grid(_) => {
            // sample grid nodes of the tilted function
            let g = match &s.inner {
                ConvexFunction::Grid(g) => g,
                _ => unreachable!(),
            };
            let mut best = f64::INFINITY;
            let mut arg = vec![0.0; g.dim()];
            for_each_grid_node(g, |x, v| {
                let val = v + dot(&s.linear, x) + s.constant;
                if val < best {
                    best = val;
                    arg = x.to_vec();
                }
            });
            Ok((best, arg))
        }
        other => {
            let (m, x) = other.min_value()?;
            if s.linear.iter().all(|&v| v == 0.0) {
                Ok((m + s.constant, x))
            } else {
                Err(Error::Unsupported("minimum of tilted function".into()))
            }
        }
    }
}

/// Witness for max-affine functions: exact when the slopes span, otherwise
/// from the domain geometry (safety factor 0.9 on the partial-recession case).
fn polyhedral_witness(p: &Polyhedral) -> Result<Witness> {
    let max_c = p.pieces.iter().map(|pc| pc.offset).fold(f64::NEG_INFINITY, f64::max);
    match p.dim() {
        1 => {
            let smax = p.pieces.iter().map(|pc| pc.slope[0]).fold(f64::NEG_INFINITY, f64::max);
            let smin = p.pieces.iter().map(|pc| pc.slope[0]).fold(f64::INFINITY, f64::min);
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            if let Some(dom) = &p.domain {
                for h in dom {
                    if h.normal[0] > 0.0 {
                        hi = hi.min(h.height);
                    } else {
                        lo = lo.max(-h.height);
                    }
                }
            }
            let grow_right = if hi.is_finite() { f64::INFINITY } else { smax };
            let grow_left = if lo.is_finite() { f64::INFINITY } else { -smin };
            let a = grow_right.min(grow_left);
            if a <= 0.0 {
                return Err(Error::NoWitness("1D slopes do not span and domain is unbounded".into()));
            }
            if a.is_infinite() {
                // bounded domain
                let l = line::Line1::from_polyhedral(p)?;
                let (m, _) = l.min_value()?;
                let r = lo.abs().max(hi.abs());
                return Ok(Witness { a: 1.0, b: m - r });
            }
            // witness through the envelope at the finite side(s)
            let b = -max_c
                - if lo.is_finite() { (1.0 + smax.abs() + smin.abs()) * lo.abs() } else { 0.0 }
                - if hi.is_finite() { (1.0 + smax.abs() + smin.abs()) * hi.abs() } else { 0.0 };
            Ok(Witness { a, b })
        }
        2 => {
            let slopes: Vec<[f64; 2]> = p.pieces.iter().map(|pc| [pc.slope[0], pc.slope[1]]).collect();
            let hull = poly2d::convex_hull(slopes.clone());
            if hull.len() >= 3 {
                if let Ok(hp) = Polygon::new(hull.clone()) {
                    let min_h = hp.edges().iter().map(|e| e.height).fold(f64::INFINITY, f64::min);
                    if min_h > 0.0 {
                        // 0 interior to conv(slopes): max_i <y_i, x> >= min_h |x|
                        return Ok(Witness { a: min_h, b: -max_c });
                    }
                }
            }
            let Some(dom) = &p.domain else {
                return Err(Error::NoWitness(
                    "slopes do not surround the origin and there is no domain".into(),
                ));
            };
            // bounded domain: witness from the minimum over the domain
            let dom2 = p.domain_2d();
            if let Ok(region) = poly2d::halfplane_intersection(&dom2, None) {
                let pts = region.points();
                if pts.is_empty() {
                    return Err(Error::Improper("empty domain".into()));
                }
                let r = pts.iter().map(|q| poly2d::norm2(*q)).fold(0.0, f64::max);
                let (m, _) = polyhedral_min(p)?;
                return Ok(Witness { a: 1.0, b: m - r - 1.0 });
            }
            // unbounded domain: growth along recession directions only
            let _ = dom;
            partial_recession_witness(p)
        }
        d => Err(Error::Unsupported(format!("witness in dimension {d}"))),
    }
}

/// Unbounded-domain case: `a` is the minimum of `max_i <y_i, d>` over unit
/// recession directions `d` of the domain (candidates: recession-arc
/// endpoints and slope-hull edge normals), with a 0.9 safety factor; `b`
/// accounts for the bounded part of the domain.
fn partial_recession_witness(p: &Polyhedral) -> Result<Witness> {
    let dom2 = p.domain_2d();
    let feasible = |ang: f64| -> bool {
        let d = [ang.cos(), ang.sin()];
        dom2.iter().all(|h| poly2d::dot2(h.normal, d) <= 1e-9)
    };
    let sigma = |ang: f64| -> f64 {
        let d = [ang.cos(), ang.sin()];
        p.pieces
            .iter()
            .map(|pc| pc.slope[0] * d[0] + pc.slope[1] * d[1])
            .fold(f64::NEG_INFINITY, f64::max)
    };
    // locate recession arcs on a fine angular grid, refine endpoints by bisection
    let n = 8192;
    let mut candidates: Vec<f64> = Vec::new();
    let tau = 2.0 * std::f64::consts::PI;
    let mut any = false;
    for k in 0..n {
        let a0 = tau * k as f64 / n as f64;
        let a1 = tau * (k + 1) as f64 / n as f64;
        let (f0, f1) = (feasible(a0), feasible(a1));
        if f0 {
            any = true;
            candidates.push(a0);
        }
        if f0 != f1 {
            let (mut lo, mut hi) = (a0, a1);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if feasible(mid) == f0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            candidates.push(if f0 { lo } else { hi });
        }
    }
    if !any {
        return Err(Error::NoWitness("no recession direction found".into()));
    }
    let hull = poly2d::convex_hull(p.pieces.iter().map(|pc| [pc.slope[0], pc.slope[1]]).collect());
    if hull.len() >= 3 {
        if let Ok(hp) = Polygon::new(hull) {
            for e in hp.edges() {
                let ang = e.normal[1].atan2(e.normal[0]);
                if feasible(ang) {
                    candidates.push(ang);
                }
            }
        }
    }
    let a0 = candidates.iter().map(|&ang| sigma(ang)).fold(f64::INFINITY, f64::min);
    if a0 <= 0.0 {
        return Err(Error::NoWitness(format!(
            "growth rate {a0:.3e} along a recession direction is not positive"
        )));
    }
    let a = 0.9 * a0;
    // rho: extent of the domain's bounded part (true vertices only)
    let big = 1e6;
    let bbox = Polygon::square(big);
    let region = poly2d::halfplane_intersection(&dom2, Some(&bbox))
        .map_err(|e| Error::NoWitness(e.to_string()))?;
    let rho = region
        .points()
        .iter()
        .filter(|q| q[0].abs() < 0.99 * big && q[1].abs() < 0.99 * big)
        .map(|q| poly2d::norm2(*q))
        .fold(1.0f64, f64::max);
    let cmax = p.pieces.iter().map(|pc| pc.offset).fold(f64::NEG_INFINITY, f64::max);
    let ymax = p.pieces.iter().map(|pc| norm(&pc.slope)).fold(0.0, f64::max);
    Ok(Witness { a, b: -cmax - rho * (a + ymax) })
}

/// Smallest eigenvalue of a symmetric positive-definite matrix (closed form
/// for n <= 2, diagonal-dominance bound above that).
fn spd_min_eigenvalue(m: &[Vec<f64>]) -> Result<f64> {
    let n = m.len();
    let lam = match n {
        1 => m[0][0],
        2 => {
            let tr = m[0][0] + m[1][1];
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
            tr / 2.0 - disc
        }
        _ => m
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter().enumerate().map(|(j, v)| if i == j { *v } else { -v.abs() }).sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min),
    };
    if lam <= 0.0 {
        return Err(Error::NoWitness("quadratic matrix is not certified positive definite".into()));
    }
    Ok(lam)
}

/// Solve `A x = rhs` for symmetric positive-definite `A` (n <= 4 Gauss).
fn solve_spd(a: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        let d = m[col][col];
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r][col] / d;
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    Some((0..n).map(|i| b[i] / m[i][i]).collect())
}

pub(crate) fn invert_spd(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(solve_spd(a, &e)?);
    }
    let mut out = vec![vec![0.0; n]; n];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            out[i][j] = col[i];
        }
    }
    Some(out)
}

pub(crate) fn det_spd(a: &[Vec<f64>]) -> f64 {
    match a.len() {
        1 => a[0][0],
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        n => {
            let mut m: Vec<Vec<f64>> = a.to_vec();
            let mut det = 1.0;
            for col in 0..n {
                let mut piv = col;
                for r in col + 1..n {
                    if m[r][col].abs() > m[piv][col].abs() {
                        piv = r;
                    }
                }
                if piv != col {
                    m.swap(col, piv);
                    det = -det;
                }
                det *= m[col][col];
                if m[col][col] == 0.0 {
                    return 0.0;
                }
                for r in col + 1..n {
                    let f = m[r][col] / m[col][col];
                    for c in col..n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
            det
        }
    }
}

mod density;
pub use density::{IntegralEstimate, IntegralMethod, LogConcaveDensity};
