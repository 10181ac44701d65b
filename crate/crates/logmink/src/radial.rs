//! The curvilinear radial function: for a potential in the eps-class, the
//! curve `gamma_u(s) = (s u, log(1/s))` crosses the epigraph boundary at a
//! unique parameter `s_phi(u)`. This yields a bijective parametrization
//! `F(u) = (s u, log(1/s))` of the boundary with inverse `G(x, t) = e^t x`,
//! an explicit gradient, and a change of variables that evaluates
//! `int xi d mu_f + int horizon(xi) d nu_f` as a plain integral over R^n —
//! a pipeline fully independent of the cell-decomposition engine.

use crate::convex::{epi_contains, translate_to_eps_class, ConvexFunction, EpiPoint, Witness};
use crate::error::{Error, Result};
use crate::measures::TestFn;
use crate::numeric::{self, adaptive_simpson, dot, norm};
use serde::{Deserialize, Serialize};

/// A potential certified to satisfy `phi(x) < min phi + 1/2` on `|x| <= eps`.
#[derive(Debug, Clone)]
pub struct EpsClassFunction {
    phi: ConvexFunction,
    eps: f64,
    min_value: f64,
    witness: Witness,
}

impl EpsClassFunction {
    /// Re-verifies the class membership on a fine ball sampling with margin
    /// 0.45 (headroom for the sampling error against the strict 1/2 bound).
    pub fn new(phi: ConvexFunction, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidInput("eps must be positive".into()));
        }
        let witness = phi.witness()?;
        let (min_value, _) = phi.min_value()?;
        let dim = phi.dim();
        let sup = crate::convex::ball_samples(dim, eps, 1000 * dim)
            .iter()
            .map(|p| phi.eval_with_tol(p, 0.0))
            .fold(f64::NEG_INFINITY, f64::max);
        if sup >= min_value + 0.45 {
            return Err(Error::InvalidInput(format!(
                "eps-class recheck failed: sup over the {eps}-ball is {sup:.6}, min is {min_value:.6}"
            )));
        }
        Ok(EpsClassFunction { phi, eps, min_value, witness })
    }

    /// Translates an arbitrary coercive potential into the class first.
    pub fn from_translate(phi: &ConvexFunction) -> Result<(Vec<f64>, Self)> {
        let (v, eps, translated) = translate_to_eps_class(phi)?;
        Ok((v, EpsClassFunction::new(translated, eps)?))
    }

    pub fn phi(&self) -> &ConvexFunction {
        &self.phi
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn min_value(&self) -> f64 {
        self.min_value
    }

    pub fn witness(&self) -> Witness {
        self.witness
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }
}

/// A point of the epigraph boundary in radial coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub u: Vec<f64>,
    pub s: f64,
    pub point: EpiPoint,
    /// Outer unit normal (last coordinate <= 0) when unique.
    pub normal: Option<Vec<f64>>,
    /// Active faces when the normal is not unique: `(piece indices, facet indices)`.
    pub active: (Vec<usize>, Vec<usize>),
}

/// The unique `s > 0` with `(s u, log(1/s))` on the epigraph boundary,
/// bracketed from the witness bound above and the class bound below, then
/// bisected on the epigraph membership margin.
pub fn curvilinear_radial(f: &EpsClassFunction, u: &[f64]) -> Result<f64> {
    let phi = &f.phi;
    if u.len() != phi.dim() {
        return Err(Error::DimensionMismatch { expected: phi.dim(), got: u.len() });
    }
    let nu = norm(u);
    if nu == 0.0 {
        // the vertical ray crosses at t = phi(0)
        return Ok((-phi.eval_with_tol(u, 0.0)).exp());
    }
    let margin = |s: f64| -> f64 {
        let x: Vec<f64> = u.iter().map(|v| v * s).collect();
        (1.0 / s).ln() - phi.eval_with_tol(&x, 0.0)
    };
    // upper bracket from the coercivity witness (radial bound of a |x| + b)
    let c = (1.0 / f.witness.a).max((-f.witness.b).exp());
    let mut s_hi = c * (1.0 + nu).ln() / nu;
    let mut tries = 0;
    while margin(s_hi) >= 0.0 {
        s_hi *= 1.5;
        tries += 1;
        if tries > 200 {
            return Err(Error::Numerical("no outer bracket for the radial bisection".into()));
        }
    }
    // lower bracket inside the epigraph: s u in the eps-ball and below the
    // class height
    let mut s_lo = 0.5 * (f.eps / nu).min((-(f.min_value + 0.45)).exp()).min(s_hi);
    tries = 0;
    while margin(s_lo) <= 0.0 {
        s_lo *= 0.5;
        tries += 1;
        if tries > 300 {
            return Err(Error::Numerical("no inner bracket for the radial bisection".into()));
        }
    }
    Ok(numeric::bisect(&margin, s_lo, s_hi, 100))
}

/// `F(u) = (s u, log(1/s))` with the outer normal when unique.
pub fn boundary_param(f: &EpsClassFunction, u: &[f64]) -> Result<BoundaryPoint> {
    let s = curvilinear_radial(f, u)?;
    let x0: Vec<f64> = u.iter().map(|v| v * s).collect();
    let t0 = (1.0 / s).ln();
    let (normal, active) = normal_at(&f.phi, &x0, t0);
    Ok(BoundaryPoint { u: u.to_vec(), s, point: EpiPoint { x: x0, t: t0 }, normal, active })
}

/// `G(x, t) = e^t x`, the inverse of the boundary parametrization.
pub fn inverse_param(p: &EpiPoint) -> Vec<f64> {
    p.x.iter().map(|v| v * p.t.exp()).collect()
}

/// Outer unit normal of the epigraph at a boundary point `(x0, t0)`, `None`
/// on edges and corners. Also returns the active (pieces, facets) for
/// polyhedral potentials.
fn normal_at(phi: &ConvexFunction, x0: &[f64], t0: f64) -> (Option<Vec<f64>>, (Vec<usize>, Vec<usize>)) {
    let scale = 1.0 + norm(x0) + t0.abs();
    let tol = 1e-9 * scale;
    let val = phi.eval_with_tol(x0, tol);
    let on_graph = (t0 - val).abs() <= tol;
    match phi {
        ConvexFunction::Polyhedral(p) => {
            let active_pieces: Vec<usize> = if on_graph {
                p.pieces
                    .iter()
                    .enumerate()
                    .filter(|(_, pc)| (dot(&pc.slope, x0) - pc.offset - val).abs() <= tol)
                    .map(|(i, _)| i)
                    .collect()
            } else {
                vec![]
            };
            let active_facets: Vec<usize> = p
                .domain
                .as_deref()
                .unwrap_or(&[])
                .iter()
                .enumerate()
                .filter(|(_, h)| (dot(&h.normal, x0) - h.height).abs() <= tol)
                .map(|(j, _)| j)
                .collect();
            let normal = match (active_pieces.len(), active_facets.len(), on_graph) {
                (1, 0, true) => {
                    let y = &p.pieces[active_pieces[0]].slope;
                    Some(graph_normal(y))
                }
                (_, 1, false) => {
                    let h = &p.domain.as_deref().unwrap()[active_facets[0]];
                    let mut n = h.normal.clone();
                    n.push(0.0);
                    Some(n)
                }
                _ => None,
            };
            (normal, (active_pieces, active_facets))
        }
        ConvexFunction::Quadratic(_) => {
            (Some(graph_normal(&crate::surface::gradient(phi, x0))), (vec![], vec![]))
        }
        ConvexFunction::Cone(c) => {
            if norm(x0) <= tol {
                (None, (vec![], vec![]))
            } else {
                let g: Vec<f64> = x0.iter().map(|v| c.slope * v / norm(x0)).collect();
                (Some(graph_normal(&g)), (vec![], vec![]))
            }
        }
        ConvexFunction::DistCone(d) => {
            let dist = d.core.distance(x0);
            if dist > tol {
                (Some(graph_normal(&crate::surface::gradient(phi, x0))), (vec![], vec![]))
            } else {
                // flat graph over the core: unique normal strictly inside only
                let indicator = ConvexFunction::Indicator { set: d.core.clone() };
                let inside = crate::convex::interior_margin(&indicator, x0) > tol;
                if on_graph && inside {
                    (Some(graph_normal(&vec![0.0; x0.len()])), (vec![], vec![]))
                } else {
                    (None, (vec![], vec![]))
                }
            }
        }
        ConvexFunction::Indicator { set } => {
            if !on_graph {
                // vertical wall: unique normal where the set boundary is smooth
                match set {
                    crate::convex::BaseSet::Ball { center, radius } => {
                        let diff = numeric::sub(x0, center);
                        let n = norm(&diff);
                        if (n - radius).abs() <= tol && n > 0.0 {
                            let mut out: Vec<f64> = diff.iter().map(|v| v / n).collect();
                            out.push(0.0);
                            (Some(out), (vec![], vec![]))
                        } else {
                            (None, (vec![], vec![]))
                        }
                    }
                    _ => {
                        // reuse the polyhedral logic through the conversion
                        match phi.to_polyhedral() {
                            Some(p) => normal_at(&ConvexFunction::Polyhedral(p), x0, t0),
                            None => (None, (vec![], vec![])),
                        }
                    }
                }
            } else {
                // bottom face: normal (0, ..., -1) in the interior
                let inside_strictly = crate::convex::interior_margin(phi, x0) > tol;
                if inside_strictly {
                    (Some(graph_normal(&vec![0.0; x0.len()])), (vec![], vec![]))
                } else {
                    (None, (vec![], vec![]))
                }
            }
        }
        ConvexFunction::Shifted(s) => {
            let t_inner = t0 - dot(&s.linear, x0) - s.constant;
            let (n, act) = normal_at(&s.inner, x0, t_inner);
            match n {
                Some(n) => {
                    let last = *n.last().unwrap();
                    if last == 0.0 {
                        (Some(n), act)
                    } else {
                        // graph normal tilts with the affine shift
                        let g: Vec<f64> = n[..n.len() - 1]
                            .iter()
                            .zip(&s.linear)
                            .map(|(nk, lk)| nk / (-last) + lk)
                            .collect();
                        (Some(graph_normal(&g)), act)
                    }
                }
                None => (None, act),
            }
        }
        ConvexFunction::Grid(_) => {
            // least-norm subgradient estimate by central differences
            (Some(graph_normal(&crate::surface_gradient(phi, x0))), (vec![], vec![]))
        }
    }
}

fn graph_normal(grad: &[f64]) -> Vec<f64> {
    let nn = (1.0 + dot(grad, grad)).sqrt();
    let mut n: Vec<f64> = grad.iter().map(|g| g / nn).collect();
    n.push(-1.0 / nn);
    n
}

/// `grad s(u) = -s^2 n_x / <n, (x0, -1)>` at points with a unique normal.
pub fn radial_gradient(f: &EpsClassFunction, u: &[f64]) -> Result<Vec<f64>> {
    let bp = boundary_param(f, u)?;
    let Some(n) = &bp.normal else {
        return Err(Error::Numerical(format!(
            "normal not unique at u = {u:?} (active pieces {:?}, facets {:?})",
            bp.active.0, bp.active.1
        )));
    };
    gradient_from_normal(&bp, n)
}

fn gradient_from_normal(bp: &BoundaryPoint, n: &[f64]) -> Result<Vec<f64>> {
    let dim = bp.u.len();
    let mut denom = -n[dim]; // <n, (x0, -1)> = <n_x, x0> - n_t
    for k in 0..dim {
        denom += n[k] * bp.point.x[k];
    }
    if denom <= 0.0 {
        return Err(Error::Numerical("degenerate normal pairing".into()));
    }
    Ok((0..dim).map(|k| -bp.s * bp.s * n[k] / denom).collect())
}

/// `(s(u), F(u), grad s(u), |JF(u)|)` with deterministic jitter off edges.
fn radial_data(f: &EpsClassFunction, u: &[f64]) -> Result<(BoundaryPoint, Vec<f64>, f64)> {
    let mut bp = boundary_param(f, u)?;
    if bp.normal.is_none() {
        // measure-zero edge set: perturb once, deterministically
        let dim = u.len();
        let mut v = u.to_vec();
        let h = 1e-7 * (1.0 + norm(u));
        for k in 0..dim {
            v[k] += h * ((k as f64 + 1.0) * 0.7548776662466927).fract();
        }
        bp = boundary_param(f, &v)?;
        if bp.normal.is_none() {
            return Err(Error::Numerical(format!("normal not unique near u = {u:?}")));
        }
    }
    let n = bp.normal.clone().unwrap();
    let grad = gradient_from_normal(&bp, &n)?;
    let jf = jacobian_norm(&bp, &grad);
    Ok((bp, grad, jf))
}

/// `|JF| = sqrt(det(DF^T DF))` with `DF = [u ⊗ grad s + s I; -grad s / s]`.
fn jacobian_norm(bp: &BoundaryPoint, grad: &[f64]) -> f64 {
    let dim = bp.u.len();
    let s = bp.s;
    match dim {
        1 => {
            let a = bp.u[0] * grad[0] + s;
            let w = -grad[0] / s;
            (a * a + w * w).sqrt()
        }
        2 => {
            let mut a = [[0.0f64; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    a[i][j] = bp.u[i] * grad[j] + if i == j { s } else { 0.0 };
                }
            }
            let w = [-grad[0] / s, -grad[1] / s];
            let mut m = [[0.0f64; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    m[i][j] = a[0][i] * a[0][j] + a[1][i] * a[1][j] + w[i] * w[j];
                }
            }
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]).max(0.0).sqrt()
        }
        _ => f64::NAN,
    }
}

/// The boundary-integral pipeline:
/// `int_{R^n} hat(xi)(n(F(u))) s(u) |JF(u)| du` by adaptive quadrature with
/// a tail radius certified by the polylog majorant of the integrand.
pub fn boundary_integral(f: &EpsClassFunction, xi: &TestFn) -> Result<f64> {
    let dim = f.dim();
    if dim > 2 {
        return Err(Error::Unsupported("boundary integral in dimension > 2".into()));
    }
    let r = truncation_radius(f, dim, 1e-10);
    let integrand = |u: &[f64]| -> f64 {
        match radial_data(f, u) {
            Ok((bp, _grad, jf)) => {
                let n = bp.normal.as_ref().unwrap();
                xi.hat(n) * bp.s * jf
            }
            Err(_) => 0.0,
        }
    };
    match dim {
        1 => {
            // log substitution u = +-(e^v - 1) tames the slow polylog tail
            let vmax = (1.0 + r).ln();
            let half = |sign: f64| {
                adaptive_simpson(
                    &|v: f64| {
                        let u = sign * (v.exp() - 1.0);
                        integrand(&[u]) * v.exp()
                    },
                    0.0,
                    vmax,
                    2.5e-6,
                )
            };
            Ok(half(1.0) + half(-1.0))
        }
        _ => {
            let vmax = (1.0 + r).ln();
            let value = adaptive_simpson(
                &|theta: f64| {
                    let d = [theta.cos(), theta.sin()];
                    adaptive_simpson(
                        &|v: f64| {
                            let rad = v.exp() - 1.0;
                            integrand(&[rad * d[0], rad * d[1]]) * rad * v.exp()
                        },
                        0.0,
                        vmax,
                        2.0e-7,
                    )
                },
                0.0,
                2.0 * std::f64::consts::PI,
                4.0e-6,
            );
            Ok(value)
        }
    }
}

/// Radius where the integrand majorant
/// `C s(u) (( |grad s| |u| + s )^2 + |grad s / s|^2)^{n/2}` — with
/// `s(u) <= C log(1+|u|)/|u|` and the normal inequality bounding the
/// gradient — integrates below `tol` outside.
fn truncation_radius(f: &EpsClassFunction, dim: usize, tol: f64) -> f64 {
    let c = (1.0 / f.witness.a).max((-f.witness.b).exp());
    let m = f.eps.min(0.5);
    let xi_max = 2.0;
    let bound = |r: f64| -> f64 {
        let s = c * (1.0 + r).ln() / r;
        let grad = s * s / m;
        let w = s / m;
        let a_norm = grad * r + s;
        let jf = match dim {
            1 => (a_norm * a_norm + w * w).sqrt(),
            _ => a_norm * a_norm + w * w,
        };
        xi_max * s * jf
    };
    let mut r: f64 = 8.0;
    loop {
        // dyadic tail blocks: measure factor 2 per side in 1D, 2 pi R in 2D
        let mut tail = 0.0;
        let mut rr = r;
        for _ in 0..80 {
            let factor = if dim == 1 { 2.0 } else { 2.0 * std::f64::consts::PI * 2.0 * rr };
            tail += bound(rr) * rr * factor;
            rr *= 2.0;
            if bound(rr) * rr * factor < 1e-18 {
                break;
            }
        }
        if tail <= tol || r > 1e12 {
            return r;
        }
        r *= 4.0;
    }
}

/// Report of the radial-bound lemma check for `psi = a|x| + b`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialBoundReport {
    pub c: f64,
    pub max_ratio: f64,
    pub holds: bool,
}

/// Verifies `s_psi(u) <= C log(1+|u|)/|u|` with `C = max(1/a, e^{-b})` at
/// the sample points.
pub fn radial_bound_check(a: f64, b: f64, sample_us: &[Vec<f64>]) -> Result<RadialBoundReport> {
    if !(a > 0.0) {
        return Err(Error::InvalidInput("cone slope must be positive".into()));
    }
    let dim = sample_us.first().map(|u| u.len()).unwrap_or(1);
    let phi = ConvexFunction::cone(a, b, dim)?;
    let eps = (0.4 / a).min(1.0);
    let f = EpsClassFunction::new(phi, eps)?;
    let c = (1.0 / a).max((-b).exp());
    let mut max_ratio = 0.0f64;
    for u in sample_us {
        let nu = norm(u);
        if nu == 0.0 {
            continue;
        }
        let s = curvilinear_radial(&f, u)?;
        max_ratio = max_ratio.max(s * nu / (1.0 + nu).ln());
    }
    Ok(RadialBoundReport { c, max_ratio, holds: max_ratio <= c * (1.0 + 1e-12) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex::BaseSet;
    use crate::poly2d::Polygon;

    fn eps_fn(phi: ConvexFunction, eps: f64) -> EpsClassFunction {
        EpsClassFunction::new(phi, eps).unwrap()
    }

    fn abs_1d() -> EpsClassFunction {
        eps_fn(
            ConvexFunction::polyhedral(vec![(vec![1.0], 0.0), (vec![-1.0], 0.0)], None).unwrap(),
            0.4,
        )
    }

    #[test]
    fn radial_of_quadratic_at_origin() {
        let f = eps_fn(ConvexFunction::gaussian_potential(1), 0.9);
        let s = curvilinear_radial(&f, &[0.0]).unwrap();
        assert!((s - 1.0).abs() < 1e-12, "s = {s}");
    }

    #[test]
    fn radial_of_abs_at_e() {
        // log(1/s) = s|u| at |u| = e gives s = 1/e
        let f = abs_1d();
        let s = curvilinear_radial(&f, &[std::f64::consts::E]).unwrap();
        assert!((s - 1.0 / std::f64::consts::E).abs() < 1e-12, "s = {s}");
    }

    #[test]
    fn radial_of_interval_indicator() {
        // vertical boundary at x = 1: s * u = 1 at u = 2
        let f = eps_fn(ConvexFunction::indicator_interval(-1.0, 1.0), 0.9);
        let s = curvilinear_radial(&f, &[2.0]).unwrap();
        assert!((s - 0.5).abs() < 1e-12, "s = {s}");
    }

    #[test]
    fn bisection_bracket_has_single_sign_change() {
        // scan the margin at 1000 points: exactly one sign change
        let f = abs_1d();
        for &u in &[0.3, 1.0, 5.0, 40.0] {
            let s_star = curvilinear_radial(&f, &[u]).unwrap();
            let mut changes = 0;
            let mut prev = f64::NAN;
            for k in 1..=1000 {
                let s = s_star * 4.0 * k as f64 / 1000.0;
                let m = (1.0 / s).ln() - f.phi().eval_with_tol(&[s * u], 0.0);
                if !prev.is_nan() && m.signum() != prev.signum() {
                    changes += 1;
                }
                prev = m.signum();
            }
            assert_eq!(changes, 1, "margin changes sign {changes} times at u={u}");
        }
    }

    #[test]
    fn bijection_round_trip() {
        let phi = ConvexFunction::polyhedral(
            vec![(vec![1.0, 0.2], 0.0), (vec![-0.7, 0.5], 0.1), (vec![0.1, -1.1], 0.2)],
            None,
        )
        .unwrap();
        let (_, f) = EpsClassFunction::from_translate(&phi).unwrap();
        let mut rng_state = 1u64;
        let mut next = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1);
            (rng_state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let u = vec![20.0 * next() - 10.0, 20.0 * next() - 10.0];
            let bp = boundary_param(&f, &u).unwrap();
            let back = inverse_param(&bp.point);
            assert!(numeric::dist(&back, &u) <= 1e-9 * (1.0 + norm(&u)), "G(F(u)) != u at {u:?}");
            // F(G(x,t)) returns to the same boundary point
            let bp2 = boundary_param(&f, &back).unwrap();
            assert!(numeric::dist(&bp2.point.x, &bp.point.x) <= 1e-9 * (1.0 + norm(&bp.point.x)));
        }
    }

    #[test]
    fn normal_inequality_on_boundary_points() {
        let f = eps_fn(
            ConvexFunction::indicator_polygon(Polygon::square(1.0)),
            0.9,
        );
        for k in 0..200 {
            let th = 2.0 * std::f64::consts::PI * k as f64 / 200.0;
            let u = [3.0 * th.cos(), 3.0 * th.sin()];
            if let Ok((bp, _, _)) = radial_data(&f, &u) {
                let n = bp.normal.as_ref().unwrap();
                let pairing = n[0] * bp.point.x[0] + n[1] * bp.point.x[1] + n[2] * (-1.0f64).signum() * 1.0 * (-1.0);
                let pairing = pairing + 0.0;
                let direct = n[0] * bp.point.x[0] + n[1] * bp.point.x[1] - n[2];
                assert!(
                    direct >= f.eps().min(0.5) - 1e-9,
                    "normal inequality fails: {direct} at u = {u:?}"
                );
                let _ = pairing;
            }
        }
    }

    #[test]
    fn gradient_closed_form_and_fd() {
        // phi = |x| in 1D at u = e: grad s = -1/(2 e^2)
        let f = abs_1d();
        let e = std::f64::consts::E;
        let g = radial_gradient(&f, &[e]).unwrap();
        assert!((g[0] + 1.0 / (2.0 * e * e)).abs() < 1e-12, "grad = {}", g[0]);
        // central differences
        let h = 1e-5;
        let fd = (curvilinear_radial(&f, &[e + h]).unwrap()
            - curvilinear_radial(&f, &[e - h]).unwrap())
            / (2.0 * h);
        assert!((g[0] - fd).abs() <= 1e-6 * g[0].abs(), "fd {fd} vs {}", g[0]);
        // quadratic at the origin: grad s = 0
        let q = eps_fn(ConvexFunction::gaussian_potential(2), 0.9);
        let gq = radial_gradient(&q, &[0.0, 0.0]).unwrap();
        assert!(norm(&gq) < 1e-12);
    }

    #[test]
    fn gradient_matches_fd_on_2d_cone_cells() {
        let phi = ConvexFunction::polyhedral(
            vec![
                (vec![1.0, 0.0], 0.0),
                (vec![-1.0, 0.0], 0.0),
                (vec![0.0, 1.0], 0.0),
                (vec![0.0, -1.0], 0.0),
            ],
            None,
        )
        .unwrap();
        let f = eps_fn(phi, 0.4);
        // u strictly inside a gradient cell
        for &u in &[[2.0, 0.5], [-1.0, 0.3], [0.2, -3.0]] {
            let g = radial_gradient(&f, &u).unwrap();
            let h = 1e-5;
            for k in 0..2 {
                let mut up = u;
                let mut um = u;
                up[k] += h;
                um[k] -= h;
                let fd = (curvilinear_radial(&f, &up).unwrap()
                    - curvilinear_radial(&f, &um).unwrap())
                    / (2.0 * h);
                assert!(
                    (g[k] - fd).abs() <= 1e-6 * (1.0 + g[k].abs()),
                    "u={u:?} axis {k}: {} vs fd {fd}",
                    g[k]
                );
            }
        }
        // on a cell boundary the normal is reported non-unique
        assert!(radial_gradient(&f, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn boundary_integral_matches_atom_sums_1d() {
        // f = e^{-|x|}: mu = delta_1 + delta_{-1}, nu = 0
        let f = abs_1d();
        let density = crate::LogConcaveDensity::new(f.phi().clone()).unwrap();
        let sm = crate::surface::surface_measures_exact(&density).unwrap();
        for xi in crate::measures::dictionary(1) {
            let atoms = xi.pair(&sm.pair);
            let integral = boundary_integral(&f, &xi).unwrap();
            assert!(
                (integral - atoms).abs() < 1e-4,
                "{xi:?}: boundary {integral} vs atoms {atoms}"
            );
        }
    }

    #[test]
    fn boundary_integral_matches_atom_sums_square() {
        let f = eps_fn(
            ConvexFunction::indicator_polygon(Polygon::square(1.0)),
            0.9,
        );
        let density = crate::LogConcaveDensity::new(f.phi().clone()).unwrap();
        let sm = crate::surface::surface_measures_exact(&density).unwrap();
        let xi = TestFn::SmoothNorm;
        let atoms = xi.pair(&sm.pair);
        let integral = boundary_integral(&f, &xi).unwrap();
        assert!(
            (integral - atoms).abs() < 1e-4,
            "boundary {integral} vs atoms {atoms}"
        );
    }

    #[test]
    fn radial_bound_lemma() {
        let us: Vec<Vec<f64>> = (1..=1000).map(|k| vec![0.05 * k as f64]).collect();
        let r = radial_bound_check(1.0, 0.0, &us).unwrap();
        assert!(r.holds, "{r:?}");
        // the ratio at |u| = e is 1/log(1+e)
        let e = std::f64::consts::E;
        let ratio_at_e = {
            let f = eps_fn(ConvexFunction::cone(1.0, 0.0, 1).unwrap(), 0.4);
            curvilinear_radial(&f, &[e]).unwrap() * e / (1.0 + e).ln()
        };
        assert!((ratio_at_e - 1.0 / (1.0f64 + e).ln()).abs() < 1e-10);
        assert!(radial_bound_check(2.0, 0.0, &us).unwrap().holds);
        assert!(radial_bound_check(0.5, 3.0, &us).unwrap().holds);
    }

    #[test]
    fn radial_continuity_on_example_family() {
        // phi_k = max(k|x| - k, 0) -> indicator of [-1, 1]
        let limit = eps_fn(ConvexFunction::indicator_interval(-1.0, 1.0), 0.9);
        let us: Vec<f64> = (0..20).map(|k| -3.0 + 6.0 * k as f64 / 19.0).collect();
        let mut prev_err = f64::INFINITY;
        for k in [1.0f64, 4.0, 16.0, 64.0] {
            let phi_k = ConvexFunction::polyhedral(
                vec![(vec![k], k), (vec![-k], k), (vec![0.0], 0.0)],
                None,
            )
            .unwrap();
            let fk = eps_fn(phi_k, 0.9);
            let err = us
                .iter()
                .map(|&u| {
                    (curvilinear_radial(&fk, &[u]).unwrap()
                        - curvilinear_radial(&limit, &[u]).unwrap())
                    .abs()
                })
                .fold(0.0f64, f64::max);
            assert!(err < prev_err + 1e-12, "pointwise error not improving at k={k}");
            prev_err = err;
        }
        assert!(prev_err < 2e-2, "s_k still {prev_err} away at k=64");
    }
}
