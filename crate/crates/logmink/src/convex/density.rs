//! Log-concave densities `f = e^{-phi}` with certified finite positive mass,
//! and the operations that stay inside the class: dilation, sup-convolution,
//! translation, support function, and the integral.

use super::legendre::{polyhedral_sum, to_grid};
use super::line::{self, Line1};
use super::{BaseSet, ConvexFunction, DistCone, Witness};
use crate::error::{Error, Result};
use crate::numeric::{self, adaptive_simpson};
use crate::poly2d::{self, Polygon};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralMethod {
    Exact,
    ClosedForm,
    Quadrature,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    /// Standard error for Monte Carlo; absolute error bound otherwise.
    pub error: f64,
    pub method: IntegralMethod,
}

/// `f = e^{-phi}` with `0 < int f < inf`, certified at construction by a
/// coercivity witness and a finite value on a full-dimensional domain.
#[derive(Debug)]
pub struct LogConcaveDensity {
    phi: ConvexFunction,
    witness: Witness,
    integral_cache: OnceLock<IntegralEstimate>,
}

impl Clone for LogConcaveDensity {
    fn clone(&self) -> Self {
        LogConcaveDensity {
            phi: self.phi.clone(),
            witness: self.witness,
            integral_cache: self.integral_cache.clone(),
        }
    }
}

impl LogConcaveDensity {
    /// Certifies membership in the log-concave class: a coercivity witness
    /// `phi >= a|x| + b` must exist and `phi` must be finite on a set with
    /// interior.
    pub fn new(phi: ConvexFunction) -> Result<Self> {
        let witness = phi.witness()?;
        let (min_val, _) = phi.min_value()?;
        if !min_val.is_finite() {
            return Err(Error::Improper("potential has no finite values".into()));
        }
        if let ConvexFunction::Indicator { set } = &phi {
            let degenerate = match set {
                BaseSet::Point(_) => true,
                BaseSet::Interval { lo, hi } => hi <= lo,
                BaseSet::Ball { radius, .. } => *radius <= 0.0,
                BaseSet::Polygon(_) => false,
            };
            if degenerate {
                return Err(Error::Improper(
                    "indicator of a lower-dimensional set has zero mass (use new_relaxed)".into(),
                ));
            }
        }
        Ok(LogConcaveDensity { phi, witness, integral_cache: OnceLock::new() })
    }

    /// Skips the positive-mass certificate: admits degenerate densities such
    /// as point indicators, which act as sup-convolution identities.
    pub fn new_relaxed(phi: ConvexFunction) -> Result<Self> {
        let witness = phi.witness()?;
        Ok(LogConcaveDensity { phi, witness, integral_cache: OnceLock::new() })
    }

    pub fn phi(&self) -> &ConvexFunction {
        &self.phi
    }

    pub fn into_phi(self) -> ConvexFunction {
        self.phi
    }

    pub fn dim(&self) -> usize {
        self.phi.dim()
    }

    pub fn witness(&self) -> Witness {
        self.witness
    }

    /// `f(x) = e^{-phi(x)}`.
    pub fn density(&self, x: &[f64]) -> Result<f64> {
        Ok((-self.phi.evaluate(x)?).exp())
    }

    pub fn max_density(&self) -> Result<f64> {
        Ok((-self.phi.min_value()?.0).exp())
    }

    pub fn translate(&self, v: &[f64]) -> Result<Self> {
        LogConcaveDensity::new_relaxed(self.phi.translate(v))
    }

    /// `(lambda . f)(x) = f(x/lambda)^lambda`.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        LogConcaveDensity::new_relaxed(self.phi.dilate(lambda)?)
    }

    /// `h_f = (-log f)*`.
    pub fn support_function(&self) -> Result<ConvexFunction> {
        self.phi.legendre()
    }

    /// `int e^{-phi}` (cached write-once).
    pub fn integral(&self) -> Result<f64> {
        Ok(self.integral_detailed()?.value)
    }

    pub fn integral_detailed(&self) -> Result<IntegralEstimate> {
        if let Some(est) = self.integral_cache.get() {
            return Ok(*est);
        }
        let est = integrate(&self.phi, &self.witness)?;
        let _ = self.integral_cache.set(est);
        Ok(est)
    }

    /// `(f * g)(x) = sup_y f(y) g(x - y)`, through `(phi* + psi*)*`.
    /// Exact for polyhedral/indicator/quadratic/cone-with-indicator
    /// combinations; grid-based otherwise.
    pub fn sup_convolution(&self, other: &LogConcaveDensity) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        let phi = sup_conv_phi(&self.phi, &other.phi)?;
        LogConcaveDensity::new_relaxed(phi)
    }
}

/// Serializable view: a density is its potential.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityData {
    pub phi: ConvexFunction,
}

impl Serialize for LogConcaveDensity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DensityData { phi: self.phi.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LogConcaveDensity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let data = DensityData::deserialize(d)?;
        LogConcaveDensity::new(data.phi).map_err(D::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// sup-convolution dispatch
// ---------------------------------------------------------------------------

fn as_point_indicator(phi: &ConvexFunction) -> Option<(Vec<f64>, f64)> {
    match phi {
        ConvexFunction::Indicator { set: BaseSet::Point(p) } => Some((p.clone(), 0.0)),
        ConvexFunction::Shifted(s) => match &s.inner {
            ConvexFunction::Indicator { set: BaseSet::Point(p) } if s.linear.iter().all(|&v| v == 0.0) => {
                Some((p.clone(), s.constant))
            }
            _ => None,
        },
        _ => None,
    }
}

fn as_indicator(phi: &ConvexFunction) -> Option<(BaseSet, f64)> {
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

fn as_quadratic(phi: &ConvexFunction) -> Option<(super::Quadratic, f64)> {
    match phi {
        ConvexFunction::Quadratic(q) => Some((q.clone(), 0.0)),
        ConvexFunction::Shifted(s) => match &s.inner {
            ConvexFunction::Quadratic(q) if s.linear.iter().all(|&v| v == 0.0) => {
                Some((q.clone(), s.constant))
            }
            _ => None,
        },
        _ => None,
    }
}

fn as_cone_like(phi: &ConvexFunction) -> Option<(f64, f64, BaseSet)> {
    match phi {
        ConvexFunction::Cone(c) => Some((c.slope, c.offset, BaseSet::Point(vec![0.0; c.dim]))),
        ConvexFunction::DistCone(d) => Some((d.slope, d.offset, d.core.clone())),
        ConvexFunction::Shifted(s) if s.linear.iter().all(|&v| v == 0.0) => {
            as_cone_like(&s.inner).map(|(a, b, core)| (a, b + s.constant, core))
        }
        _ => None,
    }
}

pub(crate) fn sup_conv_phi(a: &ConvexFunction, b: &ConvexFunction) -> Result<ConvexFunction> {
    // identity element: sup-convolution with a point mass translates
    if let Some((p, c)) = as_point_indicator(b) {
        let neg: Vec<f64> = p.iter().map(|v| -v).collect();
        return Ok(a.translate(&neg).plus_constant(c));
    }
    if let Some((p, c)) = as_point_indicator(a) {
        let neg: Vec<f64> = p.iter().map(|v| -v).collect();
        return Ok(b.translate(&neg).plus_constant(c));
    }
    // indicator + indicator: Minkowski sum of the sets
    if let (Some((sa, ca)), Some((sb, cb))) = (as_indicator(a), as_indicator(b)) {
        let sum = sa.minkowski_sum(&sb)?;
        return Ok(ConvexFunction::Indicator { set: sum }.plus_constant(ca + cb));
    }
    // gaussian + gaussian: inf-convolution of quadratics in closed form
    if let (Some((qa, ca)), Some((qb, cb))) = (as_quadratic(a), as_quadratic(b)) {
        let ia = super::invert_spd(&qa.matrix).ok_or_else(|| Error::Improper("singular quadratic".into()))?;
        let ib = super::invert_spd(&qb.matrix).ok_or_else(|| Error::Improper("singular quadratic".into()))?;
        let sum: Vec<Vec<f64>> = ia
            .iter()
            .zip(&ib)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
            .collect();
        let m = super::invert_spd(&sum).ok_or_else(|| Error::Improper("singular quadratic sum".into()))?;
        let center = numeric::add(&qa.center, &qb.center);
        return Ok(ConvexFunction::Quadratic(super::Quadratic { matrix: m, center })
            .plus_constant(ca + cb));
    }
    // cone-like + indicator: distance cone around the grown core
    if let (Some((slope, off, core)), Some((set, c))) = (as_cone_like(a), as_indicator(b)) {
        let grown = core.minkowski_sum(&set)?;
        return Ok(dist_cone_or_cone(slope, off + c, grown));
    }
    if let (Some((slope, off, core)), Some((set, c))) = (as_cone_like(b), as_indicator(a)) {
        let grown = core.minkowski_sum(&set)?;
        return Ok(dist_cone_or_cone(slope, off + c, grown));
    }
    // polyhedral + polyhedral (and indicators of polytopes): exact conjugacy
    if a.to_polyhedral().is_some() && b.to_polyhedral().is_some() && a.dim() <= 2 {
        let ca = a.legendre()?;
        let cb = b.legendre()?;
        if let (Some(pa), Some(pb)) = (ca.to_polyhedral(), cb.to_polyhedral()) {
            let sum = polyhedral_sum(&pa, &pb)?;
            return ConvexFunction::Polyhedral(sum).legendre();
        }
    }
    grid_sup_conv(a, b)
}

fn dist_cone_or_cone(slope: f64, offset: f64, core: BaseSet) -> ConvexFunction {
    let origin_point = matches!(&core, BaseSet::Point(p) if p.iter().all(|&v| v == 0.0));
    if origin_point {
        ConvexFunction::Cone(super::Cone { slope, offset, dim: core.dim() })
    } else {
        ConvexFunction::DistCone(DistCone { slope, offset, core })
    }
}

/// Grid fallback: sample both conjugates on a common slope grid, add, and
/// conjugate back. Resolution-limited; exact paths are preferred wherever
/// the representations allow.
fn grid_sup_conv(a: &ConvexFunction, b: &ConvexFunction) -> Result<ConvexFunction> {
    let dim = a.dim();
    if dim > 2 {
        return Err(Error::Unsupported("sup-convolution fallback in dimension > 2".into()));
    }
    let wa = a.witness()?;
    let wb = b.witness()?;
    let ra = wa.tail_radius(dim, 1e-12);
    let rb = wb.tail_radius(dim, 1e-12);
    let nodes = if dim == 1 { 513 } else { 129 };
    let ga = to_grid(a, ra, nodes)?;
    let gb = to_grid(b, rb, nodes)?;
    let ca = ConvexFunction::Grid(ga).legendre()?;
    let cb = ConvexFunction::Grid(gb).legendre()?;
    // common slope box: intersection of the two conjugate grids
    let (ba, bb) = (grid_box(&ca)?, grid_box(&cb)?);
    let lo: Vec<f64> = ba.0.iter().zip(&bb.0).map(|(x, y)| x.max(*y)).collect();
    let hi: Vec<f64> = ba.1.iter().zip(&bb.1).map(|(x, y)| x.min(*y)).collect();
    if lo.iter().zip(&hi).any(|(l, h)| l >= h) {
        return Err(Error::Numerical("conjugate slope ranges do not overlap".into()));
    }
    let m = if dim == 1 { 513 } else { 129 };
    let mut values = Vec::new();
    let mut shape = Vec::new();
    match dim {
        1 => {
            shape.push(m);
            for k in 0..m {
                let y = lo[0] + (hi[0] - lo[0]) * k as f64 / (m - 1) as f64;
                values.push(super::ExtReal(
                    ca.eval_with_tol(&[y], 0.0) + cb.eval_with_tol(&[y], 0.0),
                ));
            }
        }
        _ => {
            shape = vec![m, m];
            for i in 0..m {
                for j in 0..m {
                    let y = [
                        lo[0] + (hi[0] - lo[0]) * i as f64 / (m - 1) as f64,
                        lo[1] + (hi[1] - lo[1]) * j as f64 / (m - 1) as f64,
                    ];
                    values.push(super::ExtReal(
                        ca.eval_with_tol(&y, 0.0) + cb.eval_with_tol(&y, 0.0),
                    ));
                }
            }
        }
    }
    let step: Vec<f64> = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| (h - l) / (m - 1) as f64)
        .collect();
    ConvexFunction::Grid(super::GridFn { lo, step, shape, values }).legendre()
}

fn grid_box(phi: &ConvexFunction) -> Result<(Vec<f64>, Vec<f64>)> {
    match phi {
        ConvexFunction::Grid(g) => {
            let hi: Vec<f64> = g
                .lo
                .iter()
                .zip(&g.step)
                .zip(&g.shape)
                .map(|((l, s), n)| l + s * (*n as f64 - 1.0))
                .collect();
            Ok((g.lo.clone(), hi))
        }
        _ => Err(Error::Numerical("expected a grid conjugate".into())),
    }
}

// ---------------------------------------------------------------------------
// integrals
// ---------------------------------------------------------------------------

fn integrate(phi: &ConvexFunction, witness: &Witness) -> Result<IntegralEstimate> {
    let dim = phi.dim();
    // closed forms first
    match phi {
        ConvexFunction::Quadratic(q) => {
            let det = super::det_spd(&q.matrix);
            let value = (2.0 * std::f64::consts::PI).powf(dim as f64 / 2.0) / det.sqrt();
            return Ok(IntegralEstimate { value, error: 0.0, method: IntegralMethod::ClosedForm });
        }
        ConvexFunction::Cone(c) => {
            let value = match dim {
                1 => 2.0 * (-c.offset).exp() / c.slope,
                2 => 2.0 * std::f64::consts::PI * (-c.offset).exp() / (c.slope * c.slope),
                _ => return mc_integral(phi, witness, 1_000_000, 7),
            };
            return Ok(IntegralEstimate { value, error: 0.0, method: IntegralMethod::ClosedForm });
        }
        ConvexFunction::DistCone(d) => {
            let value = match dim {
                1 => (-d.offset).exp() * (d.core.volume() + 2.0 / d.slope),
                2 => {
                    // outer parallel volume: |K| + per(K)/a + 2 pi / a^2
                    (-d.offset).exp()
                        * (d.core.volume()
                            + d.core.perimeter() / d.slope
                            + 2.0 * std::f64::consts::PI / (d.slope * d.slope))
                }
                _ => return mc_integral(phi, witness, 1_000_000, 7),
            };
            return Ok(IntegralEstimate { value, error: 0.0, method: IntegralMethod::ClosedForm });
        }
        ConvexFunction::Indicator { set } => {
            return Ok(IntegralEstimate {
                value: set.volume(),
                error: 0.0,
                method: IntegralMethod::ClosedForm,
            })
        }
        ConvexFunction::Shifted(s) => {
            // exp-affine over a polygon/interval is exact
            if let ConvexFunction::Indicator { set } = &s.inner {
                match set {
                    BaseSet::Polygon(p) => {
                        let value = poly2d::exp_affine_polygon_integral(
                            p,
                            [s.linear[0], s.linear[1]],
                            s.constant,
                        );
                        return Ok(IntegralEstimate { value, error: 0.0, method: IntegralMethod::Exact });
                    }
                    BaseSet::Interval { lo, hi } => {
                        let value = line::exp_interval(*lo, *hi, s.linear[0], -s.constant);
                        return Ok(IntegralEstimate { value, error: 0.0, method: IntegralMethod::Exact });
                    }
                    _ => {}
                }
            }
            if s.linear.iter().all(|&v| v == 0.0) {
                let base = integrate(&s.inner, witness)?;
                return Ok(IntegralEstimate {
                    value: base.value * (-s.constant).exp(),
                    error: base.error * (-s.constant).exp(),
                    method: base.method,
                });
            }
        }
        _ => {}
    }
    if let Some(p) = phi.to_polyhedral() {
        match dim {
            1 => return exact_integral_1d(&p, witness),
            2 => return exact_integral_2d(&p, witness),
            _ => {}
        }
    }
    match (dim, phi) {
        (_, ConvexFunction::Grid(_)) if dim >= 2 => mc_integral(phi, witness, 1_000_000, 7),
        (1, _) => quadrature_integral_1d(phi, witness),
        (2, _) => quadrature_integral_2d(phi, witness),
        _ => mc_integral(phi, witness, 1_000_000, 7),
    }
}

fn exact_integral_1d(p: &super::Polyhedral, witness: &Witness) -> Result<IntegralEstimate> {
    let l = Line1::from_polyhedral(p)?;
    let (min_val, _) = l.min_value()?;
    let tol = 1e-16 * (-min_val).exp().max(1e-300);
    let r = witness.tail_radius(1, tol);
    let value: f64 = l
        .cells(-r, r)
        .iter()
        .map(|c| {
            let (s, o) = l.pieces[c.piece];
            line::exp_interval(c.x0, c.x1, s, o)
        })
        .sum();
    Ok(IntegralEstimate { value, error: tol, method: IntegralMethod::Exact })
}

/// Exact in 2D through the gradient cells; unbounded domains are truncated
/// at a radius where the witness bounds the discarded tail.
fn exact_integral_2d(p: &super::Polyhedral, witness: &Witness) -> Result<IntegralEstimate> {
    let (min_val, _) = super::polyhedral_min(p)?;
    let tol = 1e-14 * (-min_val).exp().max(1e-300);
    let r = witness.tail_radius(2, tol);
    let trunc = Polygon::square(r);
    let cx = poly2d::cell_decomposition(&p.pieces_2d(), &p.domain_2d(), &trunc);
    let mut value = 0.0;
    for (i, cell) in cx.cells.iter().enumerate() {
        if let Some(cell) = cell {
            let (slope, offset) = (&p.pieces[i].slope, p.pieces[i].offset);
            value += poly2d::exp_affine_polygon_integral(cell, [slope[0], slope[1]], -offset);
        }
    }
    Ok(IntegralEstimate { value, error: tol, method: IntegralMethod::Exact })
}

fn quadrature_integral_1d(phi: &ConvexFunction, witness: &Witness) -> Result<IntegralEstimate> {
    let r = witness.tail_radius(1, 1e-14);
    let tol = 1e-12;
    let value = adaptive_simpson(
        &|x: f64| (-phi.eval_with_tol(&[x], 0.0)).exp(),
        -r,
        r,
        tol,
    );
    Ok(IntegralEstimate { value, error: 10.0 * tol, method: IntegralMethod::Quadrature })
}

fn quadrature_integral_2d(phi: &ConvexFunction, witness: &Witness) -> Result<IntegralEstimate> {
    let r = witness.tail_radius(2, 1e-13);
    let tol = 1e-10;
    let value = adaptive_simpson(
        &|theta: f64| {
            let d = [theta.cos(), theta.sin()];
            adaptive_simpson(
                &|rad: f64| rad * (-phi.eval_with_tol(&[rad * d[0], rad * d[1]], 0.0)).exp(),
                0.0,
                r,
                tol / 20.0,
            )
        },
        0.0,
        2.0 * std::f64::consts::PI,
        tol,
    );
    Ok(IntegralEstimate { value, error: 100.0 * tol, method: IntegralMethod::Quadrature })
}

/// Importance sampling from the product-Laplace envelope implied by the
/// coercivity witness; deterministic for a given seed.
pub(crate) fn mc_integral(
    phi: &ConvexFunction,
    witness: &Witness,
    samples: u64,
    seed: u64,
) -> Result<IntegralEstimate> {
    let dim = phi.dim();
    let a1 = witness.a / (dim as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let mut x = vec![0.0; dim];
    for _ in 0..samples {
        for xk in x.iter_mut() {
            // Laplace(1/a1) via inverse CDF
            let u: f64 = rng.random_range(-1.0f64..1.0);
            *xk = -u.signum() * (1.0 - u.abs()).ln() / a1;
        }
        let log_q = x.iter().map(|v| -a1 * v.abs()).sum::<f64>() + dim as f64 * (a1 / 2.0).ln();
        let v = (-phi.eval_with_tol(&x, 0.0) - log_q).exp();
        sum += v;
        sumsq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sumsq / n - mean * mean).max(0.0);
    Ok(IntegralEstimate {
        value: mean,
        error: (var / n).sqrt(),
        method: IntegralMethod::MonteCarlo { samples, seed },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(dim: usize) -> LogConcaveDensity {
        LogConcaveDensity::new(ConvexFunction::gaussian_potential(dim)).unwrap()
    }

    #[test]
    fn gaussian_integral_2d() {
        let f = gaussian(2);
        let est = f.integral_detailed().unwrap();
        assert!((est.value - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn exponential_integral_2d() {
        // e^{-|x|} in R^2 integrates to 2 pi
        let f = LogConcaveDensity::new(ConvexFunction::cone(1.0, 0.0, 2).unwrap()).unwrap();
        assert!((f.integral().unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn square_indicator_integral() {
        let f = LogConcaveDensity::new(ConvexFunction::indicator_polygon(Polygon::square(1.0)))
            .unwrap();
        assert!((f.integral().unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn polyhedral_abs_integral_1d() {
        let phi = ConvexFunction::polyhedral(vec![(vec![1.0], 0.0), (vec![-1.0], 0.0)], None).unwrap();
        let f = LogConcaveDensity::new(phi).unwrap();
        assert!((f.integral().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn polyhedral_l1_cone_integral_2d() {
        // e^{-max(+-x1, +-x2)}: cells are quadrant cones
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
        let f = LogConcaveDensity::new(phi).unwrap();
        // int e^{-max|xi|}: by symmetry 8 * int_{0<y<x} e^{-x} = 8 * int_0^inf x/ ... = 4
        // brute force check instead of a closed form
        let brute = adaptive_simpson(
            &|x: f64| {
                adaptive_simpson(&|y: f64| (-(x.abs().max(y.abs()))).exp(), -40.0, 40.0, 1e-10)
            },
            -40.0,
            40.0,
            1e-8,
        );
        assert!(
            (f.integral().unwrap() - brute).abs() < 1e-6,
            "{} vs {}",
            f.integral().unwrap(),
            brute
        );
    }

    #[test]
    fn sup_convolution_intervals() {
        // 1_[0,1] * 1_[0,2] = 1_[0,3]
        let f = LogConcaveDensity::new(ConvexFunction::indicator_interval(0.0, 1.0)).unwrap();
        let g = LogConcaveDensity::new(ConvexFunction::indicator_interval(0.0, 2.0)).unwrap();
        let h = f.sup_convolution(&g).unwrap();
        assert!((h.integral().unwrap() - 3.0).abs() < 1e-12);
        assert!(h.density(&[2.9]).unwrap() > 0.5);
        assert!(h.density(&[3.1]).unwrap() < 0.5);
    }

    #[test]
    fn sup_convolution_gaussians() {
        // e^{-x^2/2} * e^{-x^2/2} = e^{-x^2/4}
        let f = gaussian(1);
        let h = f.sup_convolution(&f).unwrap();
        for &x in &[0.0f64, 0.5, 1.0, 2.0, -1.3] {
            let expect = (-(x * x) / 4.0).exp();
            let got = h.density(&[x]).unwrap();
            assert!((got - expect).abs() < 1e-12, "x={x}: {got} vs {expect}");
        }
        // dense-grid oracle for the integral: int e^{-x^2/4} = 2 sqrt(pi)
        assert!((h.integral().unwrap() - 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn sup_convolution_with_point_mass_is_identity() {
        let f = gaussian(2);
        let delta = LogConcaveDensity::new_relaxed(ConvexFunction::Indicator {
            set: BaseSet::Point(vec![0.0, 0.0]),
        })
        .unwrap();
        let h = f.sup_convolution(&delta).unwrap();
        for &x in &[[0.0, 0.0], [1.0, -0.5], [2.0, 2.0]] {
            assert!((h.density(&x).unwrap() - f.density(&x).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn dilation_of_gaussian() {
        // lambda = 2: e^{-x^2/2} -> e^{-x^2/4}
        let f = gaussian(1);
        let d = f.dilate(2.0).unwrap();
        for &x in &[0.0, 1.0, -2.5] {
            assert!((d.density(&[x]).unwrap() - (-(x * x) / 4.0).exp()).abs() < 1e-13);
        }
        assert!(f.dilate(0.0).is_err());
        // lambda = 1 is the identity
        let one = f.dilate(1.0).unwrap();
        assert!((one.density(&[0.7]).unwrap() - f.density(&[0.7]).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn cone_indicator_sup_conv_is_distance_cone() {
        let f = LogConcaveDensity::new(ConvexFunction::cone(1.0, 0.0, 2).unwrap()).unwrap();
        let g = LogConcaveDensity::new(ConvexFunction::indicator_polygon(Polygon::square(1.0)))
            .unwrap();
        let h = f.sup_convolution(&g).unwrap();
        // integral = |K| + per/a + 2pi/a^2 = 4 + 8 + 2pi
        let expect = 4.0 + 8.0 + 2.0 * std::f64::consts::PI;
        assert!((h.integral().unwrap() - expect).abs() < 1e-12);
        // density at a point 1 away from the square
        assert!((h.density(&[2.0, 0.0]).unwrap() - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn mc_integral_matches_exact() {
        let f = gaussian(2);
        let est = mc_integral(f.phi(), &f.witness(), 200_000, 3).unwrap();
        let exact = 2.0 * std::f64::consts::PI;
        assert!(
            (est.value - exact).abs() <= 4.0 * est.error,
            "mc {} +- {} vs {}",
            est.value,
            est.error,
            exact
        );
    }
}
