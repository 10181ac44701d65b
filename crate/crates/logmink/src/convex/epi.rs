//! Epigraph predicates, the ball-truncated epigraph pseudometric, and the
//! translation into the eps-class on which the curvilinear radial function
//! is defined.

use super::{BaseSet, ConvexFunction};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Free point of R^{n+1}, tested against epigraphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpiPoint {
    pub x: Vec<f64>,
    pub t: f64,
}

/// `phi(x) <= t`, together with the signed margin `t - phi(x)` used by
/// bisection callers (`-inf` outside the domain).
pub fn epi_contains(phi: &ConvexFunction, p: &EpiPoint) -> Result<(bool, f64)> {
    let v = phi.evaluate(&p.x)?;
    let margin = p.t - v;
    Ok((margin >= 0.0, margin))
}

/// `sum_R 2^{-R} min(1, d_H(epi(phi) ∩ B_R, epi(psi) ∩ B_R))`, with the
/// truncated Hausdorff distances approximated by support-function sampling
/// of dense boundary clouds.
pub fn epi_distance(phi: &ConvexFunction, psi: &ConvexFunction, radii: &[f64]) -> Result<f64> {
    Ok(epi_distance_detailed(phi, psi, radii)?.0)
}

/// Returns `(distance, resolution_bound)`; the bound covers cloud spacing
/// and direction-sampling gaps, and is small compared to O(1) distances but
/// not compared to the near-zero distances of matching functions (which the
/// shared sampling grid measures far more accurately).
pub fn epi_distance_detailed(
    phi: &ConvexFunction,
    psi: &ConvexFunction,
    radii: &[f64],
) -> Result<(f64, f64)> {
    if radii.is_empty() {
        return Err(Error::InvalidInput("epi_distance needs at least one radius".into()));
    }
    let dim = phi.dim();
    if psi.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: psi.dim() });
    }
    if dim > 2 {
        return Err(Error::Unsupported("epi_distance in dimension > 2".into()));
    }
    let mut total = 0.0;
    let mut bound = 0.0;
    for &r in radii {
        let w = 2.0f64.powf(-r);
        let ca = truncated_cloud(phi, r);
        let cb = truncated_cloud(psi, r);
        let (d, res) = match (ca.is_empty(), cb.is_empty()) {
            (true, true) => (0.0, 0.0),
            (true, false) | (false, true) => (f64::INFINITY, 0.0),
            _ => {
                let dirs = sphere_directions(dim + 1, if dim == 1 { 512 } else { 1024 });
                let mut dmax = 0.0f64;
                for d in &dirs {
                    let ha = ca.iter().map(|p| dotn(p, d)).fold(f64::NEG_INFINITY, f64::max);
                    let hb = cb.iter().map(|p| dotn(p, d)).fold(f64::NEG_INFINITY, f64::max);
                    dmax = dmax.max((ha - hb).abs());
                }
                let spacing = 2.0 * r / if dim == 1 { 600.0 } else { 72.0 };
                (dmax, 2.0 * spacing + 4.0 * r / dirs.len() as f64)
            }
        };
        total += w * d.min(1.0);
        bound += w * res;
    }
    Ok((total, bound))
}

fn dotn(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Boundary cloud of `epi(phi) ∩ B_r`: for each grid abscissa inside the
/// ball, the lowest and highest feasible ordinates.
fn truncated_cloud(phi: &ConvexFunction, r: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    match phi.dim() {
        1 => {
            let m = 601;
            for k in 0..m {
                let x = -r + 2.0 * r * k as f64 / (m - 1) as f64;
                let top = (r * r - x * x).max(0.0).sqrt();
                let v = phi.eval_with_tol(&[x], 0.0);
                if v <= top {
                    out.push(vec![x, v.max(-top)]);
                    out.push(vec![x, top]);
                }
            }
        }
        _ => {
            let m = 73;
            for i in 0..m {
                for j in 0..m {
                    let x = -r + 2.0 * r * i as f64 / (m - 1) as f64;
                    let y = -r + 2.0 * r * j as f64 / (m - 1) as f64;
                    let rho2 = r * r - x * x - y * y;
                    if rho2 < 0.0 {
                        continue;
                    }
                    let top = rho2.sqrt();
                    let v = phi.eval_with_tol(&[x, y], 0.0);
                    if v <= top {
                        out.push(vec![x, y, v.max(-top)]);
                        out.push(vec![x, y, top]);
                    }
                }
            }
        }
    }
    out
}

/// Unit directions covering S^{d-1}: exact circle samples for d = 2,
/// a Fibonacci sphere plus the coordinate axes for d = 3.
fn sphere_directions(d: usize, n: usize) -> Vec<Vec<f64>> {
    match d {
        2 => (0..n)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        _ => {
            let mut out: Vec<Vec<f64>> = Vec::with_capacity(n + 6);
            let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
            for k in 0..n {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
                let rho = (1.0 - z * z).sqrt();
                let th = golden * k as f64;
                out.push(vec![rho * th.cos(), rho * th.sin(), z]);
            }
            for a in 0..3 {
                for s in [-1.0, 1.0] {
                    let mut v = vec![0.0; 3];
                    v[a] = s;
                    out.push(v);
                }
            }
            out
        }
    }
}

/// Interior clearance of `x` in the domain of `phi` (`+inf` for full-domain
/// functions, negative when there is no interior at all).
pub(crate) fn interior_margin(phi: &ConvexFunction, x: &[f64]) -> f64 {
    match phi {
        ConvexFunction::Polyhedral(p) => p
            .domain
            .as_ref()
            .map(|dom| {
                dom.iter()
                    .map(|h| h.height - dotn(&h.normal, x))
                    .fold(f64::INFINITY, f64::min)
            })
            .unwrap_or(f64::INFINITY),
        ConvexFunction::Grid(g) => {
            let mut m = f64::INFINITY;
            for k in 0..g.dim() {
                let hi = g.lo[k] + g.step[k] * (g.shape[k] - 1) as f64;
                m = m.min(x[k] - g.lo[k]).min(hi - x[k]);
            }
            m
        }
        ConvexFunction::Quadratic(_) | ConvexFunction::Cone(_) | ConvexFunction::DistCone(_) => {
            f64::INFINITY
        }
        ConvexFunction::Indicator { set } => match set {
            BaseSet::Interval { lo, hi } => (x[0] - lo).min(hi - x[0]),
            BaseSet::Polygon(p) => p
                .edges()
                .iter()
                .map(|e| e.height - (e.normal[0] * x[0] + e.normal[1] * x[1]))
                .fold(f64::INFINITY, f64::min),
            BaseSet::Ball { center, radius } => radius - crate::numeric::dist(x, center),
            BaseSet::Point(_) => f64::NEG_INFINITY,
        },
        ConvexFunction::Shifted(s) => interior_margin(&s.inner, x),
    }
}

pub(crate) fn domain_inner_point(phi: &ConvexFunction) -> Vec<f64> {
    match phi {
        ConvexFunction::Polyhedral(p) => super::domain_point(p),
        ConvexFunction::Indicator { set } | ConvexFunction::DistCone(super::DistCone { core: set, .. }) => {
            set.inner_point()
        }
        ConvexFunction::Grid(g) => g
            .lo
            .iter()
            .zip(&g.step)
            .zip(&g.shape)
            .map(|((lo, st), sh)| lo + 0.5 * st * (*sh as f64 - 1.0))
            .collect(),
        ConvexFunction::Shifted(s) => domain_inner_point(&s.inner),
        other => other.min_value().map(|(_, x)| x).unwrap_or_else(|_| vec![0.0; other.dim()]),
    }
}

/// Deterministic ball sample: golden-angle spiral in 2D, uniform in 1D.
pub(crate) fn ball_samples(dim: usize, eps: f64, count: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => (0..count)
            .map(|k| vec![eps * (2.0 * k as f64 / (count - 1) as f64 - 1.0)])
            .collect(),
        _ => {
            let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
            let mut out: Vec<Vec<f64>> = (0..count)
                .map(|k| {
                    let r = eps * (((k + 1) as f64) / count as f64).sqrt();
                    let th = golden * k as f64;
                    vec![r * th.cos(), r * th.sin()]
                })
                .collect();
            for a in 0..dim {
                for s in [-1.0, 1.0] {
                    let mut v = vec![0.0; dim];
                    v[a] = s * eps;
                    out.push(v);
                }
            }
            out
        }
    }
}

/// Finds `v` and `eps > 0` with `phi(x + v) < min(phi) + 1/2` on `|x| <= eps`:
/// locates an interior near-minimizer and shrinks `eps` until the sampled sup
/// clears the margin 0.45 (the 0.05 headroom absorbs sampling error).
pub fn translate_to_eps_class(
    phi: &ConvexFunction,
) -> Result<(Vec<f64>, f64, ConvexFunction)> {
    let dim = phi.dim();
    let (min_val, argmin) = phi.min_value()?;
    let inner = domain_inner_point(phi);
    let mut chosen: Option<Vec<f64>> = None;
    let mut blend = 0.0f64;
    for _ in 0..16 {
        let v: Vec<f64> = argmin
            .iter()
            .zip(&inner)
            .map(|(a, c)| a + blend * (c - a))
            .collect();
        let val = phi.eval_with_tol(&v, 0.0);
        let margin = interior_margin(phi, &v);
        if val <= min_val + 0.2 && margin > 1e-9 {
            chosen = Some(v);
            break;
        }
        blend = if blend == 0.0 { 1.0 / 1024.0 } else { blend * 2.0 };
        if blend > 1.0 {
            break;
        }
    }
    let v = chosen.ok_or_else(|| {
        Error::Numerical(format!(
            "no interior near-minimizer found (min {min_val:.6} at {argmin:?}, domain clearance {:.3e})",
            interior_margin(phi, &argmin)
        ))
    })?;
    let clearance = interior_margin(phi, &v);
    let mut eps = if clearance.is_finite() { (0.9 * clearance).min(1.0) } else { 1.0 };
    for _ in 0..90 {
        let sup = ball_samples(dim, eps, 1000 * dim)
            .iter()
            .map(|p| {
                let x: Vec<f64> = v.iter().zip(p).map(|(a, b)| a + b).collect();
                phi.eval_with_tol(&x, 0.0)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        if sup < min_val + 0.45 {
            return Ok((v.clone(), eps, phi.translate(&v)));
        }
        eps *= 0.6;
        if eps < 1e-9 {
            break;
        }
    }
    Err(Error::Numerical(
        "could not certify any eps-ball below the min + 0.45 margin".into(),
    ))
}
