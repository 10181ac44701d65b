//! Surface area measures `(mu_f, nu_f)` of a log-concave density — exact in
//! one and two dimensions for polyhedral potentials, Monte Carlo otherwise —
//! together with four independent evaluations of the first variation
//! `delta(f, g)` and the related integral identities.

use crate::convex::line::{self, Line1};
use crate::convex::{BaseSet, ConvexFunction, LogConcaveDensity};
use crate::error::{Error, Result};
use crate::measures::MeasurePair;
use crate::numeric::{self, adaptive_simpson, dot, norm};
use crate::poly2d::{self, Polygon, Region};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// How a [`SurfaceMeasures`] value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    MonteCarlo { samples: u64, seed: u64, mass_std_error: f64 },
}

/// The pair `(mu_f, nu_f)` with provenance and the total mass
/// `mu_f(R^n) = int f`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceMeasures {
    pub pair: MeasurePair,
    pub provenance: Provenance,
    pub f_integral: f64,
}

/// Exact `(mu_f, nu_f)` for polyhedral potentials in dimension 1 or 2:
/// cell masses under the gradient pushforward, facet masses under the Gauss
/// map, unbounded domains truncated with a certified tail bound.
pub fn surface_measures_exact(f: &LogConcaveDensity) -> Result<SurfaceMeasures> {
    let phi = f
        .phi()
        .to_polyhedral()
        .ok_or_else(|| Error::Unsupported("exact surface measures need a polyhedral potential".into()))?;
    match phi.dim() {
        1 => exact_1d(f, &phi),
        2 => exact_2d(f, &phi),
        d => Err(Error::Unsupported(format!("exact surface measures in dimension {d}"))),
    }
}

fn exact_1d(f: &LogConcaveDensity, phi: &crate::convex::Polyhedral) -> Result<SurfaceMeasures> {
    let l = Line1::from_polyhedral(phi)?;
    let (min_val, _) = l.min_value()?;
    let tol = 1e-16 * (-min_val).exp().max(1e-300);
    let r = f.witness().tail_radius(1, tol);
    let mut mu: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut total = 0.0;
    for c in l.cells(-r, r) {
        let (s, o) = l.pieces[c.piece];
        let mass = line::exp_interval(c.x0, c.x1, s, o);
        total += mass;
        if mass > 0.0 {
            mu.push((vec![s], mass));
        }
    }
    let mut nu: Vec<(Vec<f64>, f64)> = Vec::new();
    if let Some(lo) = l.lo {
        let m = (-l.value(lo)).exp();
        if m > 0.0 {
            nu.push((vec![-1.0], m));
        }
    }
    if let Some(hi) = l.hi {
        let m = (-l.value(hi)).exp();
        if m > 0.0 {
            nu.push((vec![1.0], m));
        }
    }
    Ok(SurfaceMeasures {
        pair: MeasurePair::new(mu, nu)?,
        provenance: Provenance::Exact,
        f_integral: total,
    })
}

fn exact_2d(f: &LogConcaveDensity, phi: &crate::convex::Polyhedral) -> Result<SurfaceMeasures> {
    let (min_val, _) = f.phi().min_value()?;
    let tol = 1e-15 * (-min_val).exp().max(1e-300);
    let r = f.witness().tail_radius(2, tol);
    let trunc = Polygon::square(r);
    let pieces = phi.pieces_2d();
    let domain = phi.domain_2d();
    let cx = poly2d::cell_decomposition(&pieces, &domain, &trunc);
    let mut mu: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut total = 0.0;
    for (i, cell) in cx.cells.iter().enumerate() {
        if let Some(cell) = cell {
            let (y, c) = pieces[i];
            let mass = poly2d::exp_affine_polygon_integral(cell, y, -c);
            total += mass;
            if mass > 0.0 {
                mu.push((y.to_vec(), mass));
            }
        }
    }
    let mut nu: Vec<(Vec<f64>, f64)> = Vec::new();
    for (j, facet) in cx.facets.iter().enumerate() {
        if let Some(seg) = facet {
            let mass = facet_mass(seg, &pieces);
            if mass > 0.0 {
                nu.push((domain[j].normal.to_vec(), mass));
            }
        }
    }
    Ok(SurfaceMeasures {
        pair: MeasurePair::new(mu, nu)?,
        provenance: Provenance::Exact,
        f_integral: total,
    })
}

/// `int_seg e^{-phi} dH^1` where `phi = max_i (<y_i, x> - c_i)` may switch
/// active pieces along the segment: reduce to a 1D envelope in the segment
/// parameter.
fn facet_mass(seg: &[poly2d::Point2; 2], pieces: &[([f64; 2], f64)]) -> f64 {
    let [a, b] = *seg;
    let d = poly2d::sub2(b, a);
    let len = poly2d::norm2(d);
    let l = Line1 {
        pieces: pieces
            .iter()
            .map(|(y, c)| (poly2d::dot2(*y, d), c - poly2d::dot2(*y, a)))
            .collect(),
        lo: Some(0.0),
        hi: Some(1.0),
    };
    len * l
        .cells(0.0, 1.0)
        .iter()
        .map(|cell| {
            let (s, o) = l.pieces[cell.piece];
            line::exp_interval(cell.x0, cell.x1, s, o)
        })
        .sum::<f64>()
}

/// Gradient of the potential where defined (a.e.).
pub(crate) fn gradient(phi: &ConvexFunction, x: &[f64]) -> Vec<f64> {
    match phi {
        ConvexFunction::Polyhedral(p) => {
            let mut best = 0usize;
            let mut bv = f64::NEG_INFINITY;
            for (i, pc) in p.pieces.iter().enumerate() {
                let v = dot(&pc.slope, x) - pc.offset;
                if v > bv {
                    bv = v;
                    best = i;
                }
            }
            p.pieces[best].slope.clone()
        }
        ConvexFunction::Quadratic(q) => {
            let d = numeric::sub(x, &q.center);
            q.matrix.iter().map(|row| dot(row, &d)).collect()
        }
        ConvexFunction::Cone(c) => {
            let n = norm(x);
            if n == 0.0 {
                vec![0.0; c.dim]
            } else {
                x.iter().map(|v| c.slope * v / n).collect()
            }
        }
        ConvexFunction::DistCone(d) => {
            let dist = d.core.distance(x);
            if dist <= 0.0 {
                return vec![0.0; d.core.dim()];
            }
            // direction away from the projection onto the core
            match &d.core {
                BaseSet::Ball { center, .. } => {
                    let diff = numeric::sub(x, center);
                    let n = norm(&diff);
                    diff.iter().map(|v| d.slope * v / n).collect()
                }
                BaseSet::Point(p) => {
                    let diff = numeric::sub(x, p);
                    let n = norm(&diff);
                    diff.iter().map(|v| d.slope * v / n).collect()
                }
                BaseSet::Interval { lo, hi } => {
                    let g = if x[0] > *hi { d.slope } else if x[0] < *lo { -d.slope } else { 0.0 };
                    vec![g]
                }
                BaseSet::Polygon(p) => {
                    let q = [x[0], x[1]];
                    let mut best = f64::INFINITY;
                    let mut proj = q;
                    for e in p.edges() {
                        let ab = poly2d::sub2(e.end, e.start);
                        let t = (poly2d::dot2(poly2d::sub2(q, e.start), ab)
                            / poly2d::dot2(ab, ab))
                        .clamp(0.0, 1.0);
                        let cand = [e.start[0] + t * ab[0], e.start[1] + t * ab[1]];
                        let dd = poly2d::norm2(poly2d::sub2(q, cand));
                        if dd < best {
                            best = dd;
                            proj = cand;
                        }
                    }
                    let diff = [q[0] - proj[0], q[1] - proj[1]];
                    let n = poly2d::norm2(diff);
                    vec![d.slope * diff[0] / n, d.slope * diff[1] / n]
                }
            }
        }
        ConvexFunction::Indicator { set } => vec![0.0; set.dim()],
        ConvexFunction::Shifted(s) => numeric::add(&gradient(&s.inner, x), &s.linear),
        ConvexFunction::Grid(_) => {
            // central differences at the interpolation scale
            let dim = phi.dim();
            let h = 1e-5;
            (0..dim)
                .map(|k| {
                    let mut xp = x.to_vec();
                    let mut xm = x.to_vec();
                    xp[k] += h;
                    xm[k] -= h;
                    (phi.eval_with_tol(&xp, 0.0) - phi.eval_with_tol(&xm, 0.0)) / (2.0 * h)
                })
                .collect()
        }
    }
}

/// Monte Carlo `(mu_f, nu_f)`: rejection sampling from the product-Laplace
/// envelope of the coercivity witness, gradients pushed forward, atoms
/// clustered within 1e-6. The `nu` part needs a polyhedral support (per-facet
/// stratified 1D sampling) or full support (`nu = 0`).
pub fn surface_measures_mc(
    f: &LogConcaveDensity,
    n_samples: u64,
    seed: u64,
) -> Result<SurfaceMeasures> {
    let dim = f.dim();
    let w = f.witness();
    let a1 = w.a / (dim as f64).sqrt();
    let phi = f.phi();

    // support classification
    let support = support_kind(phi)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted: Vec<Vec<f64>> = Vec::new();
    let mut proposals: u64 = 0;
    let mut x = vec![0.0; dim];
    while (accepted.len() as u64) < n_samples {
        proposals += 1;
        for xk in x.iter_mut() {
            let u: f64 = rng.random_range(-1.0f64..1.0);
            *xk = -u.signum() * (1.0 - u.abs()).ln() / a1;
        }
        // accept with probability f(x) / envelope(x)
        let log_ratio = -phi.eval_with_tol(&x, 0.0) + a1 * x.iter().map(|v| v.abs()).sum::<f64>() + w.b;
        debug_assert!(log_ratio <= 1e-9, "envelope violated: {log_ratio}");
        if rng.random_range(0.0f64..1.0) < log_ratio.exp() {
            accepted.push(x.clone());
        }
        if proposals >= 20_000 && (accepted.len() as f64) < 1e-3 * proposals as f64 {
            return Err(Error::Numerical(format!(
                "rejection acceptance rate {:.2e} below 1e-3; translate f toward its minimum first",
                accepted.len() as f64 / proposals as f64
            )));
        }
    }
    // integral estimate from the acceptance rate
    let envelope_mass = (-w.b).exp() * (2.0 / a1).powi(dim as i32);
    let p = accepted.len() as f64 / proposals as f64;
    let f_integral = envelope_mass * p;
    let mass_se = envelope_mass * (p * (1.0 - p) / proposals as f64).sqrt();

    // mu: gradient pushforward, clustered within 1e-6 via grid snapping
    let atom_mass = f_integral / accepted.len() as f64;
    let mut buckets: std::collections::HashMap<Vec<i64>, usize> = std::collections::HashMap::new();
    let mut clusters: Vec<(Vec<f64>, f64)> = Vec::new();
    for s in &accepted {
        let g = gradient(phi, s);
        let key: Vec<i64> = g.iter().map(|v| (v / 1e-6).round() as i64).collect();
        match buckets.get(&key) {
            Some(&idx) => clusters[idx].1 += atom_mass,
            None => {
                buckets.insert(key, clusters.len());
                clusters.push((g, atom_mass));
            }
        }
    }
    drop(buckets);

    // nu: per-facet stratified sampling on polyhedral supports
    let mut nu: Vec<(Vec<f64>, f64)> = Vec::new();
    match support {
        SupportKind::Full => {}
        SupportKind::PolyhedralFacets(facets) => {
            let strata = 256usize;
            for (normal, seg) in facets {
                let len = numeric::dist(&seg.1, &seg.0);
                let mut acc = 0.0;
                for k in 0..strata {
                    let t = (k as f64 + rng.random_range(0.0f64..1.0)) / strata as f64;
                    let pt: Vec<f64> = seg
                        .0
                        .iter()
                        .zip(&seg.1)
                        .map(|(a, b)| a + t * (b - a))
                        .collect();
                    acc += (-phi.eval_with_tol(&pt, 1e-9)).exp();
                }
                let mass = len * acc / strata as f64;
                if mass > 0.0 {
                    nu.push((normal, mass));
                }
            }
        }
    }

    Ok(SurfaceMeasures {
        pair: MeasurePair::new_premerged(clusters, nu)?,
        provenance: Provenance::MonteCarlo { samples: n_samples, seed, mass_std_error: mass_se },
        f_integral,
    })
}

enum SupportKind {
    /// `supp f = R^n`, so `nu_f = 0`.
    Full,
    /// Polyhedral support: facets as (outward normal, segment endpoints).
    PolyhedralFacets(Vec<(Vec<f64>, (Vec<f64>, Vec<f64>))>),
}

fn support_kind(phi: &ConvexFunction) -> Result<SupportKind> {
    match phi {
        ConvexFunction::Quadratic(_) | ConvexFunction::Cone(_) | ConvexFunction::DistCone(_) => {
            Ok(SupportKind::Full)
        }
        ConvexFunction::Indicator { set } => match set {
            BaseSet::Ball { .. } => Err(Error::Unsupported(
                "smooth support with boundary mass: nu is not Monte Carlo sampleable".into(),
            )),
            _ => facets_of_polyhedral(phi),
        },
        ConvexFunction::Polyhedral(p) => {
            if p.domain.is_none() {
                Ok(SupportKind::Full)
            } else {
                facets_of_polyhedral(phi)
            }
        }
        ConvexFunction::Shifted(s) => support_kind(&s.inner),
        ConvexFunction::Grid(_) => Err(Error::Unsupported(
            "grid support boundary is not polyhedral; nu is not Monte Carlo sampleable".into(),
        )),
    }
}

fn facets_of_polyhedral(phi: &ConvexFunction) -> Result<SupportKind> {
    let p = phi
        .to_polyhedral()
        .ok_or_else(|| Error::Unsupported("support is not polyhedral".into()))?;
    match p.dim() {
        1 => {
            let l = Line1::from_polyhedral(&p)?;
            let mut facets = Vec::new();
            if let Some(lo) = l.lo {
                facets.push((vec![-1.0], (vec![lo], vec![lo])));
            }
            if let Some(hi) = l.hi {
                facets.push((vec![1.0], (vec![hi], vec![hi])));
            }
            Ok(SupportKind::PolyhedralFacets(facets))
        }
        2 => {
            let domain = p.domain_2d();
            let r = 1e4;
            let cx = poly2d::cell_decomposition(&p.pieces_2d(), &domain, &Polygon::square(r));
            let mut facets = Vec::new();
            for (j, seg) in cx.facets.iter().enumerate() {
                if let Some([a, b]) = seg {
                    facets.push((domain[j].normal.to_vec(), (a.to_vec(), b.to_vec())));
                }
            }
            Ok(SupportKind::PolyhedralFacets(facets))
        }
        d => Err(Error::Unsupported(format!("MC nu sampling in dimension {d}"))),
    }
}

/// 1D facet mass is the point value `f(endpoint)` (counting measure of the
/// boundary); used by the exact engine, kept here for reference in tests.
#[allow(dead_code)]
fn facet_point_mass(f: &LogConcaveDensity, x: f64) -> f64 {
    (-f.phi().eval_with_tol(&[x], 1e-9)).exp()
}

// ---------------------------------------------------------------------------
// first variation, four ways
// ---------------------------------------------------------------------------

/// Evaluates `int h_g d mu_f + int horizon(h_g) d nu_f` as a finite atom sum
/// (exact measures when available, analytic radial quadrature for the
/// rotation-invariant potentials, Monte Carlo otherwise). Returns `+inf`
/// when `h_g` is infinite on an atom of positive mass.
pub fn delta_via_measures(f: &LogConcaveDensity, g: &LogConcaveDensity) -> Result<f64> {
    let h_g = g.support_function()?;
    let horizon_of_h = |theta: &[f64]| h_g.horizon(theta);
    // exact path
    if f.phi().to_polyhedral().is_some() && f.dim() <= 2 {
        let sm = surface_measures_exact(f)?;
        return pair_measures(&sm.pair, &h_g, &horizon_of_h);
    }
    // analytic radial paths (full support: nu = 0)
    if let Some(v) = analytic_mu_pairing(f, &|x: &[f64]| h_g.eval_with_tol(x, 1e-9))? {
        return Ok(v);
    }
    // Monte Carlo fallback
    let sm = surface_measures_mc(f, 200_000, 17)?;
    pair_measures(&sm.pair, &h_g, &horizon_of_h)
}

fn pair_measures(
    pair: &MeasurePair,
    h_g: &ConvexFunction,
    horizon: &dyn Fn(&[f64]) -> Result<f64>,
) -> Result<f64> {
    let mut acc = 0.0;
    for a in pair.mu() {
        let v = h_g.eval_with_tol(&a.x, 1e-9 * (1.0 + norm(&a.x)));
        if v.is_infinite() {
            return Ok(f64::INFINITY);
        }
        acc += a.m * v;
    }
    for a in pair.nu() {
        let v = horizon(&a.theta)?;
        if v.is_infinite() {
            return Ok(f64::INFINITY);
        }
        acc += a.w * v;
    }
    Ok(acc)
}

/// `int xi(grad phi) f dx` for the closed-form rotation-invariant densities
/// (isotropic Gaussians, cones, distance cones over centered balls), by
/// radial/angular quadrature. `Ok(None)` when `f` is not of this shape.
fn analytic_mu_pairing(f: &LogConcaveDensity, xi: &dyn Fn(&[f64]) -> f64) -> Result<Option<f64>> {
    let (phi, constant) = match f.phi() {
        ConvexFunction::Shifted(s) if s.linear.iter().all(|&v| v == 0.0) => (&s.inner, s.constant),
        other => (other, 0.0),
    };
    let weight = (-constant).exp();
    let dim = phi.dim();
    match (dim, phi) {
        (2, ConvexFunction::Quadratic(q)) => {
            let lam = match (q.matrix[0][1].abs() < 1e-15, (q.matrix[0][0] - q.matrix[1][1]).abs() < 1e-15) {
                (true, true) => q.matrix[0][0],
                _ => return Ok(None),
            };
            // grad phi = lam (x - c); substitute z = x - c
            let c = q.center.clone();
            let _ = c;
            let rmax = (2.0 * 90.0 / lam).sqrt();
            let val = adaptive_simpson(
                &|theta: f64| {
                    let d = [theta.cos(), theta.sin()];
                    adaptive_simpson(
                        &|r: f64| {
                            let z = [r * d[0], r * d[1]];
                            let grad = [lam * z[0], lam * z[1]];
                            xi(&grad) * (-lam * r * r / 2.0).exp() * r
                        },
                        0.0,
                        rmax,
                        1e-11,
                    )
                },
                0.0,
                2.0 * std::f64::consts::PI,
                1e-9,
            );
            Ok(Some(weight * val))
        }
        (1, ConvexFunction::Quadratic(q)) => {
            let lam = q.matrix[0][0];
            let rmax = (2.0 * 90.0 / lam).sqrt();
            let val = adaptive_simpson(
                &|z: f64| xi(&[lam * z]) * (-lam * z * z / 2.0).exp(),
                -rmax,
                rmax,
                1e-11,
            );
            Ok(Some(weight * val))
        }
        (2, ConvexFunction::Cone(c)) => {
            // grad phi = a x/|x|: radial mass integral is 1/a^2
            let (a, b) = (c.slope, c.offset);
            let angular = adaptive_simpson(
                &|theta: f64| xi(&[a * theta.cos(), a * theta.sin()]),
                0.0,
                2.0 * std::f64::consts::PI,
                1e-9,
            );
            Ok(Some(weight * (-b).exp() / (a * a) * angular))
        }
        (1, ConvexFunction::Cone(c)) => {
            let (a, b) = (c.slope, c.offset);
            Ok(Some(weight * (-b).exp() / a * (xi(&[a]) + xi(&[-a]))))
        }
        (2, ConvexFunction::DistCone(d)) => match &d.core {
            BaseSet::Ball { center, radius } if center.iter().all(|&v| v == 0.0) => {
                let (a, b, r0) = (d.slope, d.offset, *radius);
                let core_area = std::f64::consts::PI * r0 * r0;
                let radial = r0 / a + 1.0 / (a * a);
                let angular = adaptive_simpson(
                    &|theta: f64| xi(&[a * theta.cos(), a * theta.sin()]),
                    0.0,
                    2.0 * std::f64::consts::PI,
                    1e-9,
                );
                Ok(Some(weight * (-b).exp() * (core_area * xi(&[0.0, 0.0]) + radial * angular)))
            }
            _ => Ok(None),
        },
        _ => Ok(None),
    }
}

/// Result of a difference-quotient evaluation of the first variation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub value: f64,
    pub error: f64,
    pub right: f64,
    pub left: Option<f64>,
}

/// Default Richardson steps.
pub const DELTA_STEPS: [f64; 3] = [1e-1, 3.1622776601683794e-3, 1e-4];

/// `delta(f, g)` as a Richardson-extrapolated difference quotient of
/// `t -> int f * (t . g)`. The two-sided mode (indicator `g` only) adds the
/// left quotient through level-set erosion.
pub fn delta_numeric(
    f: &LogConcaveDensity,
    g: &LogConcaveDensity,
    steps: &[f64],
    two_sided: bool,
) -> Result<DeltaEstimate> {
    if steps.len() < 2 {
        return Err(Error::InvalidInput("need at least two step sizes".into()));
    }
    let scale = (sublevel_diameter(f)? / sublevel_diameter(g)?.max(1e-9)).clamp(1e-3, 1e3);
    let ts: Vec<f64> = steps.iter().map(|t| t * scale).collect();
    let q0 = f.integral()?;
    let mut quotients = Vec::with_capacity(ts.len());
    for &t in &ts {
        let ft = f.sup_convolution(&g.dilate(t)?)?;
        quotients.push((ft.integral()? - q0) / t);
    }
    let right = extrapolate_to_zero(&ts, &quotients);
    let right_2pt = extrapolate_to_zero(&ts[ts.len() - 2..], &quotients[quotients.len() - 2..]);
    let mut est = DeltaEstimate {
        value: right,
        error: (right - right_2pt).abs(),
        right,
        left: None,
    };
    if two_sided {
        let Some((set, _)) = indicator_set(g.phi()) else {
            return Err(Error::Unsupported(
                "two-sided quotients need an indicator g (erosion of level sets)".into(),
            ));
        };
        let BaseSet::Polygon(l_poly) = &set else {
            return Err(Error::Unsupported("two-sided quotients: 2D polygonal g only".into()));
        };
        let mut left_q = Vec::with_capacity(ts.len());
        for &t in &ts {
            let qm = eroded_integral(f, l_poly, t)?;
            left_q.push((q0 - qm) / t);
        }
        let left = extrapolate_to_zero(&ts, &left_q);
        est.left = Some(left);
        est.value = 0.5 * (left + right);
        est.error += 0.5 * (left - right).abs();
    }
    Ok(est)
}

/// Diameter of the sublevel set `{phi <= min phi + 1}` (the step-size
/// heuristic of the difference quotients).
fn sublevel_diameter(f: &LogConcaveDensity) -> Result<f64> {
    let phi = f.phi();
    match phi {
        ConvexFunction::Quadratic(q) => {
            let lam = crate::convex::Quadratic { matrix: q.matrix.clone(), center: q.center.clone() };
            let _ = lam;
            // 1/2 lam_min r^2 = 1 -> r = sqrt(2/lam_min); use the witness slope as proxy
            Ok(2.0 * (2.0f64).sqrt() / f.witness().a.sqrt().max(1e-9))
        }
        ConvexFunction::Cone(c) => Ok(2.0 / c.slope),
        ConvexFunction::DistCone(d) => Ok(d.core.max_norm() * 2.0 + 2.0 / d.slope),
        ConvexFunction::Indicator { set } => Ok((2.0 * set.max_norm()).max(1e-3)),
        _ => {
            if let Some(p) = phi.to_polyhedral() {
                if p.dim() == 2 {
                    let (min_val, _) = phi.min_value()?;
                    if let Region::Polygon(k) = sublevel_region(&p, min_val + 1.0, &f.witness()) {
                        return Ok(k.diameter());
                    }
                }
                if p.dim() == 1 {
                    let l = Line1::from_polyhedral(&p)?;
                    let (min_val, _) = l.min_value()?;
                    let r = f.witness().tail_radius(1, 1e-10);
                    let cells = l.cells(-r, r);
                    let xs: Vec<f64> = cells
                        .iter()
                        .flat_map(|c| [c.x0, c.x1])
                        .filter(|&x| l.value(x) <= min_val + 1.0)
                        .collect();
                    if xs.len() >= 2 {
                        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
                        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                        return Ok((hi - lo).max(1e-3));
                    }
                }
            }
            Ok(1.0)
        }
    }
}

fn indicator_set(phi: &ConvexFunction) -> Option<(BaseSet, f64)> {
    match phi {
        ConvexFunction::Indicator { set } => Some((set.clone(), 0.0)),
        ConvexFunction::Shifted(s) => match &s.inner {
            ConvexFunction::Indicator { set } if s.linear.iter().all(|&v| v == 0.0) => {
                Some((set.clone(), s.constant))
            }
            _ => None,
        },
        _ => None,
    }
}

/// Polynomial extrapolation of `(t_k, d_k)` to `t = 0` (Lagrange).
fn extrapolate_to_zero(ts: &[f64], ds: &[f64]) -> f64 {
    let n = ts.len();
    let mut acc = 0.0;
    for k in 0..n {
        let mut w = 1.0;
        for j in 0..n {
            if j != k {
                w *= -ts[j] / (ts[k] - ts[j]);
            }
        }
        acc += w * ds[k];
    }
    acc
}

/// `int f_{-t}` where `[f_{-t} >= u] = [f >= u] eroded by tL`, by layer-cake
/// quadrature over the potential level.
fn eroded_integral(f: &LogConcaveDensity, l: &Polygon, t: f64) -> Result<f64> {
    let phi = f
        .phi()
        .to_polyhedral()
        .ok_or_else(|| Error::Unsupported("erosion route needs a polyhedral f".into()))?;
    if phi.dim() != 2 {
        return Err(Error::Unsupported("erosion route is 2D".into()));
    }
    let (min_val, _) = f.phi().min_value()?;
    let w = f.witness();
    let lmax = level_cutoff(&w, min_val, 1e-13);
    let lt = l.scale(t)?;
    let integrand = |lev: f64| -> f64 {
        match sublevel_region(&phi, lev, &w) {
            Region::Polygon(k) => match poly2d::minkowski_difference(&k, &lt) {
                Region::Polygon(e) => e.area() * (-lev).exp(),
                _ => 0.0,
            },
            _ => 0.0,
        }
    };
    // integral over u = e^{-lev}: int_0^{max f} |K_u erode tL| du
    Ok(adaptive_simpson(&integrand, min_val, lmax, 1e-10))
}

fn level_cutoff(w: &crate::convex::Witness, min_val: f64, tol: f64) -> f64 {
    // area of {phi <= l} <= pi ((l - b)/a)^2; tail of area * e^{-l}
    let mut l = min_val + 5.0;
    while ((l - w.b) / w.a).powi(2) * std::f64::consts::PI * (-l).exp() > tol && l < min_val + 800.0 {
        l += 5.0;
    }
    l
}

/// `{phi <= level}` as a polygon (level sets of a 2D polyhedral potential).
pub fn sublevel_region(
    phi: &crate::convex::Polyhedral,
    level: f64,
    witness: &crate::convex::Witness,
) -> Region {
    let mut constraints: Vec<poly2d::Halfspace2> = Vec::new();
    for pc in &phi.pieces {
        let n = norm(&pc.slope);
        if n <= 1e-14 {
            if -pc.offset > level {
                return Region::Empty;
            }
            continue;
        }
        constraints.push(poly2d::Halfspace2 {
            normal: [pc.slope[0] / n, pc.slope[1] / n],
            height: (pc.offset + level) / n,
        });
    }
    if let Some(dom) = &phi.domain {
        for h in dom {
            constraints.push(poly2d::Halfspace2 {
                normal: [h.normal[0], h.normal[1]],
                height: h.height,
            });
        }
    }
    let r = ((level - witness.b) / witness.a).abs() + 1.0;
    let bbox = Polygon::square(r);
    poly2d::halfplane_intersection(&constraints, Some(&bbox)).unwrap_or(Region::Empty)
}

/// `delta(f, 1_L) = n int_0^inf V1(F_s, L) ds` by adaptive quadrature over
/// the level (2D, polygonal level sets).
pub fn delta_via_levelsets(f: &LogConcaveDensity, l: &Region) -> Result<f64> {
    let phi = f
        .phi()
        .to_polyhedral()
        .ok_or_else(|| Error::Unsupported("level-set route needs polyhedral level sets".into()))?;
    if phi.dim() != 2 {
        return Err(Error::Unsupported("level-set route is 2D".into()));
    }
    let (min_val, _) = f.phi().min_value()?;
    let w = f.witness();
    let lmax = level_cutoff(&w, min_val, 1e-13);
    let integrand = |lev: f64| -> f64 {
        match sublevel_region(&phi, lev, &w) {
            Region::Polygon(k) => 2.0 * poly2d::mixed_volume_v1(&k, l) * (-lev).exp(),
            _ => 0.0,
        }
    };
    Ok(adaptive_simpson(&integrand, min_val, lmax, 1e-10))
}

/// `int f log f`: exact for polyhedral cells (closed-form weighted
/// exp-affine integrals), closed forms for the analytic variants,
/// quadrature otherwise.
pub fn entropy_integral(f: &LogConcaveDensity) -> Result<f64> {
    let phi = f.phi();
    let dim = f.dim();
    // int f log f = -int phi e^{-phi}
    match phi {
        ConvexFunction::Quadratic(_) => return Ok(-(dim as f64 / 2.0) * f.integral()?),
        ConvexFunction::Cone(c) => {
            let (a, b) = (c.slope, c.offset);
            let v = match dim {
                1 => 2.0 * (-b).exp() * (1.0 + b) / a,
                2 => 2.0 * std::f64::consts::PI * (-b).exp() * (2.0 + b) / (a * a),
                _ => return Err(Error::Unsupported("entropy in dimension > 2".into())),
            };
            return Ok(-v);
        }
        ConvexFunction::Indicator { .. } => return Ok(0.0),
        ConvexFunction::Shifted(s) => {
            if let ConvexFunction::Indicator { set } = &s.inner {
                match set {
                    BaseSet::Polygon(p) => {
                        return Ok(-poly2d::exp_affine_polygon_weighted(
                            p,
                            [s.linear[0], s.linear[1]],
                            s.constant,
                        ))
                    }
                    BaseSet::Interval { lo, hi } => {
                        return Ok(-line::exp_interval_weighted(*lo, *hi, s.linear[0], -s.constant))
                    }
                    _ => {}
                }
            }
        }
        _ => {}
    }
    if let Some(p) = phi.to_polyhedral() {
        match dim {
            1 => {
                let l = Line1::from_polyhedral(&p)?;
                let (min_val, _) = l.min_value()?;
                let r = f.witness().tail_radius(1, 1e-16 * (-min_val).exp().max(1e-300));
                let v: f64 = l
                    .cells(-r, r)
                    .iter()
                    .map(|c| {
                        let (s, o) = l.pieces[c.piece];
                        line::exp_interval_weighted(c.x0, c.x1, s, o)
                    })
                    .sum();
                return Ok(-v);
            }
            2 => {
                let (min_val, _) = f.phi().min_value()?;
                let r = f.witness().tail_radius(2, 1e-15 * (-min_val).exp().max(1e-300));
                let cx = poly2d::cell_decomposition(&p.pieces_2d(), &p.domain_2d(), &Polygon::square(r));
                let mut v = 0.0;
                for (i, cell) in cx.cells.iter().enumerate() {
                    if let Some(cell) = cell {
                        let (y, c) = p.pieces_2d()[i];
                        v += poly2d::exp_affine_polygon_weighted(cell, y, -c);
                    }
                }
                return Ok(-v);
            }
            _ => {}
        }
    }
    // quadrature fallback (phi e^{-phi} -> 0 where phi = +inf)
    match dim {
        1 => {
            let r = f.witness().tail_radius(1, 1e-14);
            Ok(adaptive_simpson(
                &|x: f64| {
                    let v = phi.eval_with_tol(&[x], 0.0);
                    if v.is_finite() {
                        -v * (-v).exp()
                    } else {
                        0.0
                    }
                },
                -r,
                r,
                1e-11,
            ))
        }
        2 => {
            let r = f.witness().tail_radius(2, 1e-13);
            Ok(adaptive_simpson(
                &|theta: f64| {
                    let d = [theta.cos(), theta.sin()];
                    adaptive_simpson(
                        &|rad: f64| {
                            let v = phi.eval_with_tol(&[rad * d[0], rad * d[1]], 0.0);
                            if v.is_finite() {
                                -v * (-v).exp() * rad
                            } else {
                                0.0
                            }
                        },
                        0.0,
                        r,
                        1e-11,
                    )
                },
                0.0,
                2.0 * std::f64::consts::PI,
                1e-9,
            ))
        }
        _ => Err(Error::Unsupported("entropy in dimension > 2".into())),
    }
}

/// Both sides of the self-variation identity
/// `delta(f, f) = n int f + int f log f`.
pub fn delta_self_check(f: &LogConcaveDensity) -> Result<(f64, f64)> {
    let lhs = delta_via_measures(f, f)?;
    let rhs = f.dim() as f64 * f.integral()? + entropy_integral(f)?;
    Ok((lhs, rhs))
}

/// Number of sides used to approximate the unit disk in 2D.
pub const BALL_POLYGON_SIDES: usize = 128;

/// `delta(f, 1_B) / ((max f)^{1/n} (int f)^{1-1/n})`; the sharp lower bound
/// is attained by `e^{-|x|}`. The 2D unit ball is a 128-gon (its polygonal
/// defect is within the documented tolerance of the acceptance checks).
pub fn isoperimetric_ratio(f: &LogConcaveDensity) -> Result<f64> {
    let n = f.dim();
    let ball = match n {
        1 => LogConcaveDensity::new(ConvexFunction::indicator_interval(-1.0, 1.0))?,
        2 => LogConcaveDensity::new(ConvexFunction::indicator_polygon(Polygon::regular(
            BALL_POLYGON_SIDES,
            1.0,
        )))?,
        d => return Err(Error::Unsupported(format!("isoperimetric ratio in dimension {d}"))),
    };
    let delta = delta_via_measures(f, &ball)?;
    let max_f = f.max_density()?;
    let mass = f.integral()?;
    Ok(delta / (max_f.powf(1.0 / n as f64) * mass.powf(1.0 - 1.0 / n as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn density(phi: ConvexFunction) -> LogConcaveDensity {
        LogConcaveDensity::new(phi).unwrap()
    }

    fn square_density() -> LogConcaveDensity {
        density(ConvexFunction::indicator_polygon(Polygon::square(1.0)))
    }

    fn abs_1d() -> LogConcaveDensity {
        density(ConvexFunction::polyhedral(vec![(vec![1.0], 0.0), (vec![-1.0], 0.0)], None).unwrap())
    }

    const TAU: f64 = 2.0 * std::f64::consts::PI;

    #[test]
    fn exact_measures_of_square() {
        let sm = surface_measures_exact(&square_density()).unwrap();
        assert!((sm.f_integral - 4.0).abs() < 1e-12);
        assert_eq!(sm.pair.mu().len(), 1);
        assert!(numeric::norm(&sm.pair.mu()[0].x) < 1e-12);
        assert!((sm.pair.mu()[0].m - 4.0).abs() < 1e-12);
        assert_eq!(sm.pair.nu().len(), 4);
        for a in sm.pair.nu() {
            assert!((a.w - 2.0).abs() < 1e-12, "facet mass {}", a.w);
        }
    }

    #[test]
    fn exact_measures_of_abs_1d() {
        let sm = surface_measures_exact(&abs_1d()).unwrap();
        assert!((sm.f_integral - 2.0).abs() < 1e-13);
        assert_eq!(sm.pair.nu().len(), 0);
        let mut atoms: Vec<(f64, f64)> = sm.pair.mu().iter().map(|a| (a.x[0], a.m)).collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!((atoms[0].0 + 1.0).abs() < 1e-14 && (atoms[0].1 - 1.0).abs() < 1e-13);
        assert!((atoms[1].0 - 1.0).abs() < 1e-14 && (atoms[1].1 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn exact_measure_mass_conservation() {
        // polyhedral cone with offsets: masses must sum to the integral
        let phi = ConvexFunction::polyhedral(
            vec![
                (vec![1.0, 0.4], 0.2),
                (vec![-0.8, 0.7], 0.0),
                (vec![0.1, -1.2], -0.3),
                (vec![-0.3, -0.5], 0.1),
            ],
            None,
        )
        .unwrap();
        let f = density(phi);
        let sm = surface_measures_exact(&f).unwrap();
        assert!(
            (sm.pair.mu_mass() - f.integral().unwrap()).abs() < 1e-10,
            "{} vs {}",
            sm.pair.mu_mass(),
            f.integral().unwrap()
        );
        // centering: computed pairs satisfy the necessary conditions
        let report = crate::measures::validate_pair(&sm.pair);
        assert!(report.valid, "{report:?}");
    }

    #[test]
    fn translation_equivariance_of_measures() {
        let phi = ConvexFunction::polyhedral(
            vec![(vec![1.0, 0.0], 0.0), (vec![-1.0, 0.1], 0.3), (vec![0.0, -1.0], 0.1)],
            Some(vec![(vec![0.0, 1.0], 1.5)]),
        )
        .unwrap();
        let f = density(phi);
        let g = f.translate(&[0.7, -0.3]).unwrap();
        let sa = surface_measures_exact(&f).unwrap();
        let sb = surface_measures_exact(&g).unwrap();
        let d = crate::measures::cosmic_distance(&sa.pair, &sb.pair).unwrap();
        assert!(d < 1e-9, "translation changed the measures by {d}");
    }

    #[test]
    fn delta_via_measures_square_self() {
        // f = g = 1_square: h_g(0) = 0, horizon term = 4 facets * 2 * 1 = 8
        let f = square_density();
        let d = delta_via_measures(&f, &f).unwrap();
        assert!((d - 8.0).abs() < 1e-10, "delta = {d}");
    }

    #[test]
    fn delta_via_measures_gaussian_self() {
        let f = density(ConvexFunction::gaussian_potential(2));
        let d = delta_via_measures(&f, &f).unwrap();
        assert!((d - TAU).abs() < 1e-7, "delta = {d} vs {TAU}");
    }

    #[test]
    fn delta_via_measures_exponential_against_ball() {
        // f = e^{-|x|} in 2D, g = unit-ball indicator: delta = 2 pi
        let f = density(ConvexFunction::cone(1.0, 0.0, 2).unwrap());
        let g = density(ConvexFunction::Indicator {
            set: BaseSet::Ball { center: vec![0.0, 0.0], radius: 1.0 },
        });
        let d = delta_via_measures(&f, &g).unwrap();
        assert!((d - TAU).abs() < 1e-8, "delta = {d} vs {TAU}");
    }

    #[test]
    fn delta_numeric_square_matches_area_polynomial() {
        let f = square_density();
        let est = delta_numeric(&f, &f, &DELTA_STEPS, false).unwrap();
        assert!((est.value - 8.0).abs() < 1e-6, "{est:?}");
        let two = delta_numeric(&f, &f, &DELTA_STEPS, true).unwrap();
        assert!((two.value - 8.0).abs() < 1e-6, "{two:?}");
        let left = two.left.unwrap();
        assert!((left - two.right).abs() < 1e-5, "left {left} right {}", two.right);
    }

    #[test]
    fn delta_numeric_gaussians() {
        let f = density(ConvexFunction::gaussian_potential(2));
        let est = delta_numeric(&f, &f, &DELTA_STEPS, false).unwrap();
        assert!((est.value - TAU).abs() < 1e-6, "{est:?}");
    }

    #[test]
    fn delta_levelsets_examples() {
        let f = square_density();
        let k = Polygon::square(1.0);
        let d = delta_via_levelsets(&f, &Region::Polygon(k)).unwrap();
        assert!((d - 8.0).abs() < 1e-8, "delta = {d}");
        assert!(delta_via_levelsets(&f, &Region::Point([0.0, 0.0])).unwrap().abs() < 1e-12);
        let seg = delta_via_levelsets(&f, &Region::Segment([[-1.0, 0.0], [1.0, 0.0]])).unwrap();
        assert!((seg - 4.0).abs() < 1e-8, "segment delta = {seg}");
    }

    #[test]
    fn self_check_fixtures() {
        // Gaussian R^2: both sides 2 pi
        let (l, r) = delta_self_check(&density(ConvexFunction::gaussian_potential(2))).unwrap();
        assert!((l - TAU).abs() < 1e-7 && (r - TAU).abs() < 1e-10, "({l}, {r})");
        // square: both sides 8
        let (l, r) = delta_self_check(&square_density()).unwrap();
        assert!((l - 8.0).abs() < 1e-10 && (r - 8.0).abs() < 1e-10, "({l}, {r})");
        // e^{-|x|} 1D: both sides 0
        let (l, r) = delta_self_check(&abs_1d()).unwrap();
        assert!(l.abs() < 1e-10 && r.abs() < 1e-10, "({l}, {r})");
    }

    #[test]
    fn isoperimetric_values() {
        let sqrt_tau = TAU.sqrt();
        // e^{-|x|} attains the bound
        let f = density(ConvexFunction::cone(1.0, 0.0, 2).unwrap());
        let r = isoperimetric_ratio(&f).unwrap();
        assert!((r - sqrt_tau).abs() < 1e-2, "extremal ratio {r} vs {sqrt_tau}");
        // Gaussian: ratio = pi
        let g = density(ConvexFunction::gaussian_potential(2));
        let rg = isoperimetric_ratio(&g).unwrap();
        assert!((rg - std::f64::consts::PI).abs() < 1e-4, "gaussian ratio {rg}");
        // square: 8 / sqrt(4) = 4
        let rs = isoperimetric_ratio(&square_density()).unwrap();
        assert!((rs - 4.0).abs() < 1e-3, "square ratio {rs}");
        assert!(rg >= sqrt_tau && rs >= sqrt_tau);
    }

    #[test]
    fn mc_measures_of_gaussian_moments() {
        let f = density(ConvexFunction::gaussian_potential(2));
        let sm = surface_measures_mc(&f, 200_000, 11).unwrap();
        let mass = sm.pair.mu_mass();
        let Provenance::MonteCarlo { mass_std_error, .. } = sm.provenance else {
            panic!("wrong provenance")
        };
        assert!((mass - TAU).abs() <= 4.0 * mass_std_error, "mass {mass} +- {mass_std_error}");
        // second moment of mu_f = int |x|^2 e^{-|x|^2/2} = 4 pi
        let m2: f64 = sm.pair.mu().iter().map(|a| a.m * dot(&a.x, &a.x)).sum();
        assert!((m2 - 2.0 * TAU).abs() < 0.15, "second moment {m2} vs {}", 2.0 * TAU);
        assert_eq!(sm.pair.nu().len(), 0, "full support has nu = 0");
    }

    #[test]
    fn mc_measures_of_exponential_are_angularly_uniform() {
        // grad phi = x/|x|: mu_f is uniform on the circle with mass 2 pi
        let f = density(ConvexFunction::cone(1.0, 0.0, 2).unwrap());
        let sm = surface_measures_mc(&f, 100_000, 5).unwrap();
        assert!((sm.pair.mu_mass() - TAU).abs() < 0.1);
        // angular histogram uniform within 3 sigma
        let bins = 8usize;
        let mut hist = vec![0.0f64; bins];
        for a in sm.pair.mu() {
            let th = a.x[1].atan2(a.x[0]).rem_euclid(TAU);
            hist[(th / TAU * bins as f64) as usize % bins] += a.m;
        }
        let expect = sm.pair.mu_mass() / bins as f64;
        let sigma = expect / (100_000f64 / bins as f64).sqrt() * 3.0;
        for h in hist {
            assert!((h - expect).abs() < 3.0 * sigma + 0.05, "bin {h} vs {expect}");
        }
    }

    #[test]
    fn mc_square_indicator_recovers_atom() {
        let f = square_density();
        let sm = surface_measures_mc(&f, 50_000, 9).unwrap();
        // mu collapses to a single atom at the origin
        assert_eq!(sm.pair.mu().len(), 1);
        assert!(numeric::norm(&sm.pair.mu()[0].x) < 1e-9);
        assert!((sm.pair.mu_mass() - 4.0).abs() < 0.1);
        // nu: four facets with mass about 2 each
        assert_eq!(sm.pair.nu().len(), 4);
        for a in sm.pair.nu() {
            assert!((a.w - 2.0).abs() < 1e-6, "stratified facet mass {}", a.w);
        }
    }

    #[test]
    fn matheron_bracket_is_monotone() {
        // (beta(t) - beta(0))/t nondecreasing in t for indicators
        let k = Polygon::square(1.0);
        let mut prev = f64::NEG_INFINITY;
        for i in 1..=20 {
            let t = -0.45 + 0.07 * i as f64;
            if t.abs() < 1e-9 {
                continue;
            }
            let q = (poly2d::matheron_beta(&k, &k, t).unwrap() - 4.0) / t;
            assert!(q >= prev - 1e-9, "bracket not monotone at t={t}: {q} < {prev}");
            prev = q;
        }
    }
}
