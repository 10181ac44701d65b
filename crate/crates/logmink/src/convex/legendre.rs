//! Legendre transforms: closed forms for analytic variants, epigraph-vertex
//! enumeration for polyhedral functions, and the separable linear-time scan
//! for grids. Conjugates of conjugates reproduce the closed convex hull.

use super::line::Line1;
use super::{
    invert_spd, BaseSet, Cone, ConvexFunction, GridFn, Halfspace, Piece, Polyhedral, Quadratic,
    ExtReal,
};
use crate::error::{Error, Result};
use crate::numeric::{dot, solve2, GEOM_EPS};
use crate::poly2d::{self, Polygon};

pub fn legendre(phi: &ConvexFunction) -> Result<ConvexFunction> {
    match phi {
        ConvexFunction::Quadratic(q) => conj_quadratic(q),
        ConvexFunction::Cone(c) => Ok(conj_cone(c)),
        ConvexFunction::Indicator { set } => Ok(conj_indicator(set)),
        ConvexFunction::Shifted(s) => {
            // (g + <v,.> + k)*(y) = g*(y - v) - k
            let inner = legendre(&s.inner)?;
            let shifted_arg = inner.translate(&s.linear.iter().map(|v| -v).collect::<Vec<_>>());
            Ok(shifted_arg.plus_constant(-s.constant))
        }
        ConvexFunction::Polyhedral(p) => conj_polyhedral(p),
        ConvexFunction::Grid(g) => conj_grid(g),
        ConvexFunction::DistCone(_) => Err(Error::Unsupported(
            "legendre transform of a distance cone (use the defining sup directly)".into(),
        )),
    }
}

fn conj_quadratic(q: &Quadratic) -> Result<ConvexFunction> {
    let inv = invert_spd(&q.matrix)
        .ok_or_else(|| Error::Improper("quadratic matrix is singular".into()))?;
    let qq = Quadratic { matrix: inv, center: vec![0.0; q.dim()] };
    if q.center.iter().all(|&c| c == 0.0) {
        return Ok(ConvexFunction::Quadratic(qq));
    }
    // 1/2 (y - c)^T A (y - c) conjugates to <y,c> + 1/2 y^T A^{-1} y
    Ok(ConvexFunction::shifted(
        ConvexFunction::Quadratic(qq),
        q.center.clone(),
        0.0,
    ))
}

fn conj_cone(c: &Cone) -> ConvexFunction {
    let ball = if c.dim == 1 {
        BaseSet::Interval { lo: -c.slope, hi: c.slope }
    } else {
        BaseSet::Ball { center: vec![0.0; c.dim], radius: c.slope }
    };
    ConvexFunction::Indicator { set: ball }.plus_constant(-c.offset)
}

fn conj_indicator(set: &BaseSet) -> ConvexFunction {
    match set {
        BaseSet::Interval { lo, hi } => ConvexFunction::polyhedral(
            vec![(vec![*lo], 0.0), (vec![*hi], 0.0)],
            None,
        )
        .expect("interval support function"),
        BaseSet::Polygon(p) => ConvexFunction::polyhedral(
            p.vertices().iter().map(|v| (v.to_vec(), 0.0)).collect(),
            None,
        )
        .expect("polygon support function"),
        BaseSet::Ball { center, radius } => {
            let cone = ConvexFunction::Cone(Cone {
                slope: *radius,
                offset: 0.0,
                dim: center.len(),
            });
            if center.iter().all(|&c| c == 0.0) {
                cone
            } else {
                ConvexFunction::shifted(cone, center.clone(), 0.0)
            }
        }
        BaseSet::Point(p) => ConvexFunction::polyhedral(vec![(p.clone(), 0.0)], None)
            .expect("point support function"),
    }
}

fn conj_polyhedral(p: &Polyhedral) -> Result<ConvexFunction> {
    match p.dim() {
        1 => conj_polyhedral_1d(p),
        2 => conj_polyhedral_2d(p),
        d => Err(Error::Unsupported(format!(
            "exact polyhedral legendre transform in dimension {d}"
        ))),
    }
}

fn conj_polyhedral_1d(p: &Polyhedral) -> Result<ConvexFunction> {
    let l = Line1::from_polyhedral(p)?;
    if l.pieces.len() == 1 && l.lo.is_none() && l.hi.is_none() {
        // affine: conjugate is the point indicator at the slope
        let (s, o) = l.pieces[0];
        return Ok(ConvexFunction::Indicator { set: BaseSet::Point(vec![s]) }.plus_constant(o));
    }
    let span = 1.0
        + l.pieces
            .iter()
            .flat_map(|a| l.pieces.iter().map(move |b| (a, b)))
            .filter(|(a, b)| (a.0 - b.0).abs() > GEOM_EPS)
            .map(|(a, b)| ((a.1 - b.1) / (a.0 - b.0)).abs())
            .fold(0.0f64, f64::max);
    let left = l.lo.unwrap_or(-span);
    let right = l.hi.unwrap_or(span);
    let verts = l.vertices(left, right);
    if verts.is_empty() {
        return Err(Error::Improper("1D polyhedral function with empty domain".into()));
    }
    let pieces: Vec<(Vec<f64>, f64)> = verts.iter().map(|&(x, v)| (vec![x], v)).collect();
    // recession bounds become domain constraints of the conjugate
    let mut dom: Vec<(Vec<f64>, f64)> = Vec::new();
    if l.hi.is_none() {
        let smax = l.pieces.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        dom.push((vec![1.0], smax));
    }
    if l.lo.is_none() {
        let smin = l.pieces.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        dom.push((vec![-1.0], -smin));
    }
    ConvexFunction::polyhedral(pieces, if dom.is_empty() { None } else { Some(dom) })
}

fn conj_polyhedral_2d(p: &Polyhedral) -> Result<ConvexFunction> {
    match &p.domain {
        None => conj_envelope_2d(p),
        Some(_) => {
            let dom2 = p.domain_2d();
            match poly2d::halfplane_intersection(&dom2, None) {
                Ok(poly2d::Region::Polygon(dp)) => conj_bounded_2d(p, &dp),
                Ok(_) => Err(Error::Improper("polyhedral domain has empty interior".into())),
                Err(_) => Err(Error::Unsupported(
                    "legendre transform of a 2D polyhedral function with unbounded domain".into(),
                )),
            }
        }
    }
}

/// Bounded domain: the conjugate is the max over arrangement vertices `v` of
/// `<v, y> - phi(v)`, finite everywhere.
fn conj_bounded_2d(p: &Polyhedral, domain_poly: &Polygon) -> Result<ConvexFunction> {
    let margin = domain_poly.max_norm() + 1.0;
    let trunc = Polygon::square(margin);
    let cx = poly2d::cell_decomposition(&p.pieces_2d(), &p.domain_2d(), &trunc);
    let phi = |v: [f64; 2]| -> f64 {
        p.pieces
            .iter()
            .map(|pc| pc.slope[0] * v[0] + pc.slope[1] * v[1] - pc.offset)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let pieces: Vec<(Vec<f64>, f64)> = cx
        .vertex_set()
        .into_iter()
        .map(|v| (v.to_vec(), phi(v)))
        .collect();
    if pieces.is_empty() {
        return Err(Error::Improper("empty domain".into()));
    }
    ConvexFunction::polyhedral(pieces, None)
}

/// No domain: the conjugate is the lower convex envelope of the points
/// `(slope_i, offset_i)`, with domain `conv{slope_i}`.
fn conj_envelope_2d(p: &Polyhedral) -> Result<ConvexFunction> {
    let pts: Vec<([f64; 2], f64)> = p.pieces_2d();
    if pts.len() == 1 {
        return Ok(ConvexFunction::Indicator {
            set: BaseSet::Point(pts[0].0.to_vec()),
        }
        .plus_constant(pts[0].1));
    }
    if pts.len() > 60 {
        return Err(Error::Unsupported(format!(
            "envelope of {} pieces exceeds the exact-path budget",
            pts.len()
        )));
    }
    let hull = poly2d::convex_hull(pts.iter().map(|(y, _)| *y).collect());
    if hull.len() < 3 {
        return Err(Error::Unsupported(
            "collinear slope set: conjugate domain has empty interior".into(),
        ));
    }
    let hull_poly = Polygon::new(hull)?;
    let scale = 1.0
        + pts.iter().map(|(y, c)| y[0].abs().max(y[1].abs()).max(c.abs())).fold(0.0, f64::max);
    // supporting planes through point triples
    let mut pieces: Vec<(Vec<f64>, f64)> = Vec::new();
    let m = pts.len();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let (yi, ci) = pts[i];
                let (yj, cj) = pts[j];
                let (yk, ck) = pts[k];
                let a = [
                    [yj[0] - yi[0], yj[1] - yi[1]],
                    [yk[0] - yi[0], yk[1] - yi[1]],
                ];
                let rhs = [cj - ci, ck - ci];
                let Some(g) = solve2(a, rhs, GEOM_EPS * scale) else {
                    continue;
                };
                let d = ci - (g[0] * yi[0] + g[1] * yi[1]);
                // keep planes supporting from below: c_m >= <g, y_m> + d
                let supports = pts
                    .iter()
                    .all(|(y, c)| *c >= g[0] * y[0] + g[1] * y[1] + d - 1e-9 * scale);
                if supports {
                    let slope = vec![g[0], g[1]];
                    let dup = pieces.iter().any(|(s, o)| {
                        (s[0] - slope[0]).abs() + (s[1] - slope[1]).abs() + (o + d).abs()
                            <= 1e-9 * scale
                    });
                    if !dup {
                        pieces.push((slope, -d));
                    }
                }
            }
        }
    }
    if pieces.is_empty() {
        return Err(Error::Numerical(
            "no supporting plane found for the lower envelope".into(),
        ));
    }
    let dom: Vec<(Vec<f64>, f64)> = hull_poly
        .halfspaces()
        .iter()
        .map(|h| (h.normal.to_vec(), h.height))
        .collect();
    ConvexFunction::polyhedral(pieces, Some(dom))
}

/// Separable discrete Legendre transform: one monotone linear scan per axis.
fn conj_grid(g: &GridFn) -> Result<ConvexFunction> {
    match g.dim() {
        1 => {
            let xs: Vec<f64> = (0..g.shape[0]).map(|k| g.lo[0] + g.step[0] * k as f64).collect();
            let vals: Vec<f64> = g.values.iter().map(|v| v.0).collect();
            let (ys, out) = conj_nodes(&xs, &vals, g.shape[0].max(33));
            Ok(ConvexFunction::Grid(grid_from_samples(vec![ys], vec![out.len()], out)))
        }
        2 => {
            let (n0, n1) = (g.shape[0], g.shape[1]);
            let x0: Vec<f64> = (0..n0).map(|k| g.lo[0] + g.step[0] * k as f64).collect();
            let x1: Vec<f64> = (0..n1).map(|k| g.lo[1] + g.step[1] * k as f64).collect();
            // global y0 range over all finite axis-0 differences
            let m0 = n0.max(65);
            let mut lo0 = f64::INFINITY;
            let mut hi0 = f64::NEG_INFINITY;
            for j in 0..n1 {
                for i in 0..n0 - 1 {
                    let (a, b) = (g.value(&[i, j]), g.value(&[i + 1, j]));
                    if a.is_finite() && b.is_finite() {
                        let s = (b - a) / g.step[0];
                        lo0 = lo0.min(s);
                        hi0 = hi0.max(s);
                    }
                }
            }
            if !lo0.is_finite() {
                return Err(Error::Improper("grid has no finite axis-0 slope".into()));
            }
            let y0: Vec<f64> = linspace(lo0, hi0, m0);
            // pass 1: conjugate along axis 0, one column (j fixed) at a time
            let mut mid = vec![f64::NEG_INFINITY; m0 * n1];
            for j in 0..n1 {
                let col: Vec<f64> = (0..n0).map(|i| g.value(&[i, j])).collect();
                let row = conj_scan(&x0, &col, &y0);
                for (l, v) in row.into_iter().enumerate() {
                    mid[l * n1 + j] = v;
                }
            }
            // pass 2: conjugate along axis 1 (negating the partial conjugate)
            let m1 = n1.max(65);
            let mut lo1 = f64::INFINITY;
            let mut hi1 = f64::NEG_INFINITY;
            for l in 0..m0 {
                for j in 0..n1 - 1 {
                    let (a, b) = (-mid[l * n1 + j], -mid[l * n1 + j + 1]);
                    if a.is_finite() && b.is_finite() {
                        let s = (b - a) / g.step[1];
                        lo1 = lo1.min(s);
                        hi1 = hi1.max(s);
                    }
                }
            }
            if !lo1.is_finite() {
                return Err(Error::Improper("grid conjugate degenerates along axis 1".into()));
            }
            let y1: Vec<f64> = linspace(lo1, hi1, m1);
            let mut out = vec![0.0f64; m0 * m1];
            for l in 0..m0 {
                let col: Vec<f64> = (0..n1).map(|j| -mid[l * n1 + j]).collect();
                let row = conj_scan(&x1, &col, &y1);
                for (t, v) in row.into_iter().enumerate() {
                    out[l * m1 + t] = v;
                }
            }
            Ok(ConvexFunction::Grid(GridFn {
                lo: vec![y0[0], y1[0]],
                step: vec![
                    if m0 > 1 { y0[1] - y0[0] } else { 1.0 },
                    if m1 > 1 { y1[1] - y1[0] } else { 1.0 },
                ],
                shape: vec![m0, m1],
                values: out.into_iter().map(ExtReal).collect(),
            }))
        }
        d => Err(Error::Unsupported(format!("grid legendre transform in dimension {d}"))),
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 || hi <= lo {
        return vec![lo];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

/// Discrete conjugate at query slopes `ys`: `max_k (x_k y - v_k)`, scanned
/// with a monotone argmax (valid because the data are convex in `x`).
fn conj_scan(xs: &[f64], vals: &[f64], ys: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(ys.len());
    let mut k = 0usize;
    let finite: Vec<usize> = (0..xs.len()).filter(|&i| vals[i].is_finite()).collect();
    if finite.is_empty() {
        return vec![f64::NEG_INFINITY; ys.len()];
    }
    for &y in ys {
        if k >= finite.len() {
            k = finite.len() - 1;
        }
        loop {
            let cur = finite[k];
            let next = if k + 1 < finite.len() { Some(finite[k + 1]) } else { None };
            match next {
                Some(nx) if xs[nx] * y - vals[nx] >= xs[cur] * y - vals[cur] => k += 1,
                _ => break,
            }
        }
        let cur = finite[k];
        out.push(xs[cur] * y - vals[cur]);
    }
    out
}

fn conj_nodes(xs: &[f64], vals: &[f64], m: usize) -> (Vec<f64>, Vec<ExtReal>) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..xs.len() - 1 {
        if vals[i].is_finite() && vals[i + 1].is_finite() {
            let s = (vals[i + 1] - vals[i]) / (xs[i + 1] - xs[i]);
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    if !lo.is_finite() {
        // a single finite node: conjugate is affine, sample around the origin
        let i = (0..xs.len()).find(|&i| vals[i].is_finite()).unwrap_or(0);
        let ys = linspace(-1.0, 1.0, m);
        let out = ys.iter().map(|&y| ExtReal(xs[i] * y - vals[i])).collect();
        return (ys, out);
    }
    let ys = linspace(lo, hi, m);
    let out = conj_scan(xs, vals, &ys).into_iter().map(ExtReal).collect();
    (ys, out)
}

fn grid_from_samples(axes: Vec<Vec<f64>>, shape: Vec<usize>, values: Vec<ExtReal>) -> GridFn {
    let lo: Vec<f64> = axes.iter().map(|a| a[0]).collect();
    let step: Vec<f64> = axes
        .iter()
        .map(|a| if a.len() > 1 { a[1] - a[0] } else { 1.0 })
        .collect();
    GridFn { lo, step, shape, values }
}

/// Uniform grid sampling of an arbitrary convex function (the fallback
/// representation for mixed-variant sup-convolutions).
pub fn to_grid(phi: &ConvexFunction, radius: f64, nodes: usize) -> Result<GridFn> {
    let dim = phi.dim();
    let step = 2.0 * radius / (nodes - 1) as f64;
    let lo = vec![-radius; dim];
    match dim {
        1 => {
            let values = (0..nodes)
                .map(|k| ExtReal(phi.eval_with_tol(&[lo[0] + step * k as f64], 0.0)))
                .collect();
            Ok(GridFn { lo, step: vec![step], shape: vec![nodes], values })
        }
        2 => {
            let mut values = Vec::with_capacity(nodes * nodes);
            for i in 0..nodes {
                for j in 0..nodes {
                    let x = [lo[0] + step * i as f64, lo[1] + step * j as f64];
                    values.push(ExtReal(phi.eval_with_tol(&x, 0.0)));
                }
            }
            Ok(GridFn { lo, step: vec![step, step], shape: vec![nodes, nodes], values })
        }
        d => Err(Error::Unsupported(format!("grid sampling in dimension {d}"))),
    }
}

/// Sum of two max-affine functions is max-affine over pairwise piece sums;
/// domains intersect.
pub fn polyhedral_sum(a: &Polyhedral, b: &Polyhedral) -> Result<Polyhedral> {
    if a.pieces.len() * b.pieces.len() > 20_000 {
        return Err(Error::Unsupported("polyhedral sum has too many pieces".into()));
    }
    let mut pieces = Vec::with_capacity(a.pieces.len() * b.pieces.len());
    for pa in &a.pieces {
        for pb in &b.pieces {
            pieces.push(Piece {
                slope: crate::numeric::add(&pa.slope, &pb.slope),
                offset: pa.offset + pb.offset,
            });
        }
    }
    // deduplicate identical slopes keeping the dominant (smaller) offset
    let mut dedup: Vec<Piece> = Vec::new();
    for p in pieces {
        if let Some(q) = dedup
            .iter_mut()
            .find(|q| crate::numeric::dist(&q.slope, &p.slope) <= GEOM_EPS * (1.0 + dot(&p.slope, &p.slope).sqrt()))
        {
            q.offset = q.offset.min(p.offset);
        } else {
            dedup.push(p);
        }
    }
    let mut domain: Vec<Halfspace> = Vec::new();
    if let Some(d) = &a.domain {
        domain.extend(d.iter().cloned());
    }
    if let Some(d) = &b.domain {
        domain.extend(d.iter().cloned());
    }
    Ok(Polyhedral {
        pieces: dedup,
        domain: if domain.is_empty() { None } else { Some(domain) },
    })
}
