//! Discrete measure pairs `(mu, nu)`, the admissibility checks of the
//! Minkowski problem, the gnomonic embedding onto the closed lower
//! half-sphere, and computable metrics for convergence of the pairs.

pub mod transport;

use crate::error::{Error, Result};
use crate::numeric::{self, dot, norm};
use serde::{Deserialize, Serialize};

/// Mass atom of `mu` at a point of R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuAtom {
    pub x: Vec<f64>,
    pub m: f64,
}

/// Mass atom of `nu` at a unit direction of S^{n-1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuAtom {
    pub theta: Vec<f64>,
    pub w: f64,
}

/// A finite discrete measure on R^n paired with one on S^{n-1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PairData", into = "PairData")]
pub struct MeasurePair {
    mu: Vec<MuAtom>,
    nu: Vec<NuAtom>,
}

#[derive(Serialize, Deserialize)]
struct PairData {
    mu: Vec<MuAtom>,
    nu: Vec<NuAtom>,
}

impl TryFrom<PairData> for MeasurePair {
    type Error = Error;
    fn try_from(d: PairData) -> Result<Self> {
        MeasurePair::new(
            d.mu.into_iter().map(|a| (a.x, a.m)).collect(),
            d.nu.into_iter().map(|a| (a.theta, a.w)).collect(),
        )
    }
}

impl From<MeasurePair> for PairData {
    fn from(p: MeasurePair) -> Self {
        PairData { mu: p.mu, nu: p.nu }
    }
}

impl MeasurePair {
    /// Builds a pair: strictly positive masses, unit `nu` directions
    /// (tolerance 1e-12), coincident atoms merged by adding masses.
    pub fn new(mu: Vec<(Vec<f64>, f64)>, nu: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if mu.is_empty() && nu.is_empty() {
            return Err(Error::InvalidInput("measure pair with no atoms".into()));
        }
        let dim = mu.first().map(|a| a.0.len()).or_else(|| nu.first().map(|a| a.0.len())).unwrap();
        let mut mu_atoms: Vec<MuAtom> = Vec::new();
        for (x, m) in mu {
            if x.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: x.len() });
            }
            if !(m > 0.0) {
                return Err(Error::InvalidInput(format!("mu mass must be positive, got {m}")));
            }
            match mu_atoms
                .iter_mut()
                .find(|a| numeric::dist(&a.x, &x) <= 1e-12 * (1.0 + norm(&x)))
            {
                Some(a) => a.m += m,
                None => mu_atoms.push(MuAtom { x, m }),
            }
        }
        let mut nu_atoms: Vec<NuAtom> = Vec::new();
        for (theta, w) in nu {
            if theta.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: theta.len() });
            }
            if !(w > 0.0) {
                return Err(Error::InvalidInput(format!("nu mass must be positive, got {w}")));
            }
            let n = norm(&theta);
            if (n - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "nu direction must be unit length (|theta| = {n})"
                )));
            }
            match nu_atoms
                .iter_mut()
                .find(|a| numeric::dist(&a.theta, &theta) <= 1e-12)
            {
                Some(a) => a.w += w,
                None => nu_atoms.push(NuAtom { theta, w }),
            }
        }
        Ok(MeasurePair { mu: mu_atoms, nu: nu_atoms })
    }

    /// Fast path for large Monte Carlo atom clouds: checks positivity and
    /// unit directions but trusts the caller to have merged coincident atoms.
    pub fn new_premerged(mu: Vec<(Vec<f64>, f64)>, nu: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if mu.is_empty() && nu.is_empty() {
            return Err(Error::InvalidInput("measure pair with no atoms".into()));
        }
        for (x, m) in &mu {
            if !(*m > 0.0) || x.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("mu atoms need positive mass and finite points".into()));
            }
        }
        for (theta, w) in &nu {
            if !(*w > 0.0) || (norm(theta) - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput("nu atoms need positive mass and unit directions".into()));
            }
        }
        Ok(MeasurePair {
            mu: mu.into_iter().map(|(x, m)| MuAtom { x, m }).collect(),
            nu: nu.into_iter().map(|(theta, w)| NuAtom { theta, w }).collect(),
        })
    }

    pub fn mu(&self) -> &[MuAtom] {
        &self.mu
    }

    pub fn nu(&self) -> &[NuAtom] {
        &self.nu
    }

    pub fn dim(&self) -> usize {
        self.mu
            .first()
            .map(|a| a.x.len())
            .or_else(|| self.nu.first().map(|a| a.theta.len()))
            .unwrap_or(0)
    }

    pub fn mu_mass(&self) -> f64 {
        self.mu.iter().map(|a| a.m).sum()
    }

    pub fn nu_mass(&self) -> f64 {
        self.nu.iter().map(|a| a.w).sum()
    }

    /// `sum m_i x_i + sum w_j theta_j`; the centering condition asks this to vanish.
    pub fn centering_vector(&self) -> Vec<f64> {
        let dim = self.dim();
        let mut v = vec![0.0; dim];
        for a in &self.mu {
            for k in 0..dim {
                v[k] += a.m * a.x[k];
            }
        }
        for a in &self.nu {
            for k in 0..dim {
                v[k] += a.w * a.theta[k];
            }
        }
        v
    }

    /// Translates the `mu` atoms (the gauge freedom of the inverse problem);
    /// `nu` directions are translation-blind.
    pub fn translate_mu(&self, v: &[f64]) -> MeasurePair {
        MeasurePair {
            mu: self
                .mu
                .iter()
                .map(|a| MuAtom { x: numeric::add(&a.x, v), m: a.m })
                .collect(),
            nu: self.nu.clone(),
        }
    }

    /// Moves the pair onto the centered manifold by translating `mu`.
    pub fn recenter(&self) -> MeasurePair {
        let d = self.centering_vector();
        let m = self.mu_mass();
        let shift: Vec<f64> = d.iter().map(|v| -v / m).collect();
        self.translate_mu(&shift)
    }

    pub fn scale_masses(&self, c: f64) -> MeasurePair {
        MeasurePair {
            mu: self.mu.iter().map(|a| MuAtom { x: a.x.clone(), m: c * a.m }).collect(),
            nu: self.nu.iter().map(|a| NuAtom { theta: a.theta.clone(), w: c * a.w }).collect(),
        }
    }
}

/// Discrete measure on the closed lower half-sphere of R^{n+1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HemisphereMeasure {
    pub atoms: Vec<(Vec<f64>, f64)>,
}

impl HemisphereMeasure {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }
}

/// `x -> (x, -1)/sqrt(1+|x|^2)`: the inverse gnomonic chart of R^n into the
/// open lower half-sphere.
pub fn gnomonic(x: &[f64]) -> Vec<f64> {
    let s = (1.0 + dot(x, x)).sqrt();
    let mut out: Vec<f64> = x.iter().map(|v| v / s).collect();
    out.push(-1.0 / s);
    out
}

/// `(x, t) -> x/|t|`, the chart back to R^n (last coordinate < 0).
pub fn inverse_gnomonic(p: &[f64]) -> Result<Vec<f64>> {
    let t = *p.last().ok_or_else(|| Error::InvalidInput("empty point".into()))?;
    if t >= 0.0 {
        return Err(Error::InvalidInput("point is not on the open lower half-sphere".into()));
    }
    Ok(p[..p.len() - 1].iter().map(|v| v / t.abs()).collect())
}

/// Identifies the pair with a single hemisphere measure: a `mu` atom `(x, m)`
/// maps to mass `m sqrt(1+|x|^2)` at the gnomonic image, a `nu` atom to mass
/// `w` on the equator.
pub fn hat_embed(pair: &MeasurePair) -> HemisphereMeasure {
    let mut atoms = Vec::with_capacity(pair.mu().len() + pair.nu().len());
    for a in pair.mu() {
        let scale = (1.0 + dot(&a.x, &a.x)).sqrt();
        atoms.push((gnomonic(&a.x), a.m * scale));
    }
    for a in pair.nu() {
        let mut p = a.theta.clone();
        p.push(0.0);
        atoms.push((p, a.w));
    }
    HemisphereMeasure { atoms }
}

// ---------------------------------------------------------------------------
// test-function dictionary
// ---------------------------------------------------------------------------

/// Version tag of the fixed dictionary (discrepancy values are reproducible
/// per version).
pub const DICTIONARY_VERSION: u32 = 1;

/// Cosmically continuous test function with a closed-form horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFn {
    /// Constant 1 (horizon 0).
    One,
    /// `sqrt(1 + |x|^2)` (horizon 1).
    SmoothNorm,
    /// `sign * x_k` (horizon `sign * theta_k`).
    Coord { axis: usize, sign: f64 },
    /// `max(sign * x_k, 0)` (horizon `max(sign * theta_k, 0)`).
    CoordPos { axis: usize, sign: f64 },
    /// `max(<x, dir>, 0)` for a unit direction (its own horizon).
    Cone { dir: Vec<f64> },
    /// `exp(-|x - p|^2)` (horizon 0).
    Bump { center: Vec<f64> },
}

impl TestFn {
    pub fn xi(&self, x: &[f64]) -> f64 {
        match self {
            TestFn::One => 1.0,
            TestFn::SmoothNorm => (1.0 + dot(x, x)).sqrt(),
            TestFn::Coord { axis, sign } => sign * x[*axis],
            TestFn::CoordPos { axis, sign } => (sign * x[*axis]).max(0.0),
            TestFn::Cone { dir } => dot(dir, x).max(0.0),
            TestFn::Bump { center } => {
                let d2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2).exp()
            }
        }
    }

    /// `lim xi(t theta)/t` for unit `theta`.
    pub fn horizon(&self, theta: &[f64]) -> f64 {
        match self {
            TestFn::One | TestFn::Bump { .. } => 0.0,
            TestFn::SmoothNorm => norm(theta),
            TestFn::Coord { axis, sign } => sign * theta[*axis],
            TestFn::CoordPos { axis, sign } => (sign * theta[*axis]).max(0.0),
            TestFn::Cone { dir } => dot(dir, theta).max(0.0),
        }
    }

    /// The 1-homogeneous extension to the closed lower half-sphere:
    /// `|t| xi(x/|t|)` below the equator, the horizon on it.
    pub fn hat(&self, p: &[f64]) -> f64 {
        let t = p[p.len() - 1];
        let x = &p[..p.len() - 1];
        if t < -1e-9 {
            let scaled: Vec<f64> = x.iter().map(|v| v / t.abs()).collect();
            t.abs() * self.xi(&scaled)
        } else {
            self.horizon(x)
        }
    }

    /// Pairing `int xi d mu + int horizon(xi) d nu`.
    pub fn pair(&self, pair: &MeasurePair) -> f64 {
        let mu: f64 = pair.mu().iter().map(|a| a.m * self.xi(&a.x)).sum();
        let nu: f64 = pair.nu().iter().map(|a| a.w * self.horizon(&a.theta)).sum();
        mu + nu
    }
}

/// The fixed dictionary of 2 + 4n + 8 test functions (constant, smoothed
/// norm, signed coordinates, their positive parts, four cones, four bumps).
pub fn dictionary(dim: usize) -> Vec<TestFn> {
    let mut out = vec![TestFn::One, TestFn::SmoothNorm];
    for axis in 0..dim {
        for sign in [1.0, -1.0] {
            out.push(TestFn::Coord { axis, sign });
            out.push(TestFn::CoordPos { axis, sign });
        }
    }
    // four cone directions: diagonals in 2D, scaled +-1 pattern in 1D
    let dirs: Vec<Vec<f64>> = match dim {
        1 => vec![vec![1.0], vec![-1.0], vec![1.0], vec![-1.0]],
        2 => (0..4)
            .map(|k| {
                let th = std::f64::consts::FRAC_PI_4 + std::f64::consts::FRAC_PI_2 * k as f64;
                vec![th.cos(), th.sin()]
            })
            .collect(),
        d => (0..4)
            .map(|k| {
                let mut v = vec![0.0; d];
                v[k % d] = if k < 2 { 1.0 } else { -1.0 };
                v
            })
            .collect(),
    };
    for dir in dirs {
        out.push(TestFn::Cone { dir });
    }
    // four bumps off the origin
    for k in 0..4usize {
        let mut c = vec![0.0; dim];
        let axis = k % dim.max(1);
        c[axis] = if k < 2 { 0.7 } else { -0.7 } * (1.0 + (k / 2) as f64 * 0.5);
        out.push(TestFn::Bump { center: c });
    }
    out
}

/// `max over the dictionary of |pairing(a) - pairing(b)|`: a weak-convergence
/// surrogate for noisy (Monte Carlo) pairs where the flow solve is too noisy.
pub fn dictionary_discrepancy(a: &MeasurePair, b: &MeasurePair, dict: &[TestFn]) -> f64 {
    dict.iter()
        .map(|f| (f.pair(a) - f.pair(b)).abs())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// admissibility
// ---------------------------------------------------------------------------

/// Certificates for the three admissibility conditions of the inverse
/// problem: nonzero `mu`, centering, and atoms not concentrated on a common
/// hyperplane through the origin (the norm floor `c`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub mu_nonzero: bool,
    /// `|sum m_i x_i + sum w_j theta_j|`.
    pub centering_defect: f64,
    pub centering_ok: bool,
    /// Certified lower bound for `min_{|y|=1} sum m_i |<x_i,y>| + sum w_j |<theta_j,y>|`.
    pub norm_floor: f64,
    pub norm_floor_ok: bool,
    /// Smallest singular value of the centered atom matrix (affine-hyperplane
    /// diagnostic; acceptance keys on `norm_floor` only).
    pub affine_residual: f64,
    pub centering_tolerance: f64,
    pub valid: bool,
}

impl ValidationReport {
    pub fn failing_condition(&self) -> Option<&'static str> {
        if !self.mu_nonzero {
            Some("mu is identically zero")
        } else if !self.centering_ok {
            Some("mu + nu is not centered")
        } else if !self.norm_floor_ok {
            Some("atoms are supported on a common hyperplane")
        } else {
            None
        }
    }
}

/// Default absolute tolerance for the centering defect.
pub const CENTERING_TOL: f64 = 1e-8;

pub fn validate_pair(pair: &MeasurePair) -> ValidationReport {
    validate_pair_with_tol(pair, CENTERING_TOL)
}

pub fn validate_pair_with_tol(pair: &MeasurePair, centering_tol: f64) -> ValidationReport {
    let dim = pair.dim();
    let mu_nonzero = pair.mu_mass() > 0.0;
    let defect = norm(&pair.centering_vector());
    let centering_ok = defect <= centering_tol;

    let p = |y: &[f64]| -> f64 {
        pair.mu().iter().map(|a| a.m * dot(&a.x, y).abs()).sum::<f64>()
            + pair.nu().iter().map(|a| a.w * dot(&a.theta, y).abs()).sum::<f64>()
    };
    let lipschitz: f64 = pair.mu().iter().map(|a| a.m * norm(&a.x)).sum::<f64>()
        + pair.nu().iter().map(|a| a.w).sum::<f64>();
    let norm_floor = match dim {
        1 => p(&[1.0]),
        2 => {
            let grid = 4096usize;
            let mut min_p = f64::INFINITY;
            for k in 0..grid {
                let th = std::f64::consts::PI * k as f64 / grid as f64; // antipodal symmetry
                min_p = min_p.min(p(&[th.cos(), th.sin()]));
            }
            let step = std::f64::consts::PI / grid as f64;
            min_p - lipschitz * step / 2.0
        }
        _ => {
            // coarse certificate in higher dimensions: sampled directions only
            let mut min_p = f64::INFINITY;
            let n = 4096;
            let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
            for k in 0..n {
                let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
                let rho = (1.0f64 - z * z).sqrt();
                let th = golden * k as f64;
                let mut y = vec![0.0; dim];
                y[0] = rho * th.cos();
                y[1] = rho * th.sin();
                y[2] = z;
                min_p = min_p.min(p(&y));
            }
            min_p - lipschitz * (4.0 / (n as f64).sqrt())
        }
    };
    let norm_floor_ok = norm_floor > 0.0;

    let affine_residual = affine_residual(pair);

    ValidationReport {
        mu_nonzero,
        centering_defect: defect,
        centering_ok,
        norm_floor,
        norm_floor_ok,
        affine_residual,
        centering_tolerance: centering_tol,
        valid: mu_nonzero && centering_ok && norm_floor_ok,
    }
}

/// Smallest singular value of the stacked `[x_i - mean(mu); theta_j]` rows.
fn affine_residual(pair: &MeasurePair) -> f64 {
    let dim = pair.dim();
    if dim > 2 {
        return f64::NAN;
    }
    let mmass = pair.mu_mass();
    let mean: Vec<f64> = {
        let mut v = vec![0.0; dim];
        for a in pair.mu() {
            for k in 0..dim {
                v[k] += a.m * a.x[k] / mmass;
            }
        }
        v
    };
    // Gram matrix of the rows; sigma_min = sqrt(lambda_min)
    let mut gram = vec![vec![0.0; dim]; dim];
    let mut push = |row: &[f64]| {
        for i in 0..dim {
            for j in 0..dim {
                gram[i][j] += row[i] * row[j];
            }
        }
    };
    for a in pair.mu() {
        push(&numeric::sub(&a.x, &mean));
    }
    for a in pair.nu() {
        push(&a.theta);
    }
    match dim {
        1 => gram[0][0].sqrt(),
        _ => {
            let tr = gram[0][0] + gram[1][1];
            let det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
            let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
            (tr / 2.0 - disc).max(0.0).sqrt()
        }
    }
}

// ---------------------------------------------------------------------------
// cosmic metric
// ---------------------------------------------------------------------------

/// Cosmic distance between pairs:
/// `|M_a - M_b| + W_1(hat(a)/M_a, hat(b)/M_b)` with the 1-Wasserstein
/// distance taken under the chordal metric on the closed lower half-sphere.
/// Metrizes weak convergence of the hat measures for mass-bounded sequences.
pub fn cosmic_distance(a: &MeasurePair, b: &MeasurePair) -> Result<f64> {
    let ha = hat_embed(a);
    let hb = hat_embed(b);
    let ma = ha.total_mass();
    let mb = hb.total_mass();
    if ma <= 0.0 || mb <= 0.0 {
        return Err(Error::InvalidPair {
            condition: "mu is identically zero".into(),
            detail: "cosmic distance needs positive total mass".into(),
        });
    }
    let supply: Vec<f64> = ha.atoms.iter().map(|(_, m)| m / ma).collect();
    let demand: Vec<f64> = hb.atoms.iter().map(|(_, m)| m / mb).collect();
    let w1 = transport::transport_cost(&supply, &demand, &|i, j| {
        numeric::dist(&ha.atoms[i].0, &hb.atoms[j].0)
    })?;
    Ok((ma - mb).abs() + w1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_1d(mu: Vec<(f64, f64)>, nu: Vec<(f64, f64)>) -> MeasurePair {
        MeasurePair::new(
            mu.into_iter().map(|(x, m)| (vec![x], m)).collect(),
            nu.into_iter().map(|(t, w)| (vec![t], w)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn gnomonic_basics() {
        assert_eq!(gnomonic(&[0.0, 0.0]), vec![0.0, 0.0, -1.0]);
        let p = gnomonic(&[1.0]);
        let s = 2.0f64.sqrt();
        assert!((p[0] - 1.0 / s).abs() < 1e-15);
        assert!((p[1] + 1.0 / s).abs() < 1e-15);
        // inverse round-trip
        for &x in &[0.0, 0.3, -7.0, 123.0] {
            let back = inverse_gnomonic(&gnomonic(&[x])).unwrap();
            assert!((back[0] - x).abs() <= 1e-12 * (1.0 + x.abs()));
        }
        // equator limit
        let far = gnomonic(&[1e9]);
        assert!(far[1].abs() < 1e-8);
        assert!((far[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn hat_embed_defining_identity() {
        // int xi d mu + int horizon d nu = sum over hat atoms of mass * hat(xi)
        let pair = pair_1d(vec![(0.0, 2.0), (3.0, 0.5), (-1.5, 1.0)], vec![(1.0, 0.7), (-1.0, 0.7)]);
        let hat = hat_embed(&pair);
        for f in dictionary(1) {
            let lhs = f.pair(&pair);
            let rhs: f64 = hat.atoms.iter().map(|(p, m)| m * f.hat(p)).sum();
            assert!((lhs - rhs).abs() < 1e-9, "{f:?}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn hat_embed_masses() {
        // mu atom at x = k with mass 1/k gets hat mass sqrt(1+k^2)/k -> 1
        let k = 64.0;
        let pair = pair_1d(vec![(k, 1.0 / k)], vec![]);
        let hat = hat_embed(&pair);
        let expect = (1.0 + k * k).sqrt() / k;
        assert!((hat.atoms[0].1 - expect).abs() < 1e-15);
    }

    #[test]
    fn validate_examples() {
        // mu = delta_1 + delta_{-1}: valid, defect 0, c = 2
        let r = validate_pair(&pair_1d(vec![(1.0, 1.0), (-1.0, 1.0)], vec![]));
        assert!(r.valid);
        assert!(r.centering_defect < 1e-15);
        assert!((r.norm_floor - 2.0).abs() < 1e-12);

        // mu = 2 delta_0, nu = delta_{+1} + delta_{-1}: valid, c = 2 from nu
        let r = validate_pair(&pair_1d(vec![(0.0, 2.0)], vec![(1.0, 1.0), (-1.0, 1.0)]));
        assert!(r.valid);
        assert!((r.norm_floor - 2.0).abs() < 1e-12);

        // single off-center atom in 2D: fails centering and the norm floor
        let p = MeasurePair::new(vec![(vec![1.0, 0.0], 1.0)], vec![]).unwrap();
        let r = validate_pair(&p);
        assert!(!r.valid);
        assert!((r.centering_defect - 1.0).abs() < 1e-15);
        assert!(r.norm_floor <= 1e-3, "p(e2) = 0 must be detected, got {}", r.norm_floor);
        assert_eq!(r.failing_condition(), Some("mu + nu is not centered"));
    }

    #[test]
    fn cosmic_distance_metric_axioms() {
        let a = pair_1d(vec![(0.0, 2.0)], vec![(1.0, 1.0), (-1.0, 1.0)]);
        let b = pair_1d(vec![(1.0, 1.0), (-1.0, 1.0)], vec![]);
        let c = pair_1d(vec![(0.5, 1.5), (-0.5, 1.5)], vec![(1.0, 0.25)]);
        assert!(cosmic_distance(&a, &a).unwrap() < 1e-12);
        let dab = cosmic_distance(&a, &b).unwrap();
        let dba = cosmic_distance(&b, &a).unwrap();
        assert!((dab - dba).abs() < 1e-10);
        let dac = cosmic_distance(&a, &c).unwrap();
        let dcb = cosmic_distance(&c, &b).unwrap();
        assert!(dab <= dac + dcb + 1e-10, "triangle: {dab} > {dac} + {dcb}");
        assert!(dab > 0.0);
    }

    #[test]
    fn cosmic_distance_pure_mass_defect() {
        let a = pair_1d(vec![(0.0, 1.0)], vec![]);
        let b = pair_1d(vec![(0.0, 2.0)], vec![]);
        assert!((cosmic_distance(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn example_family_converges_in_cosmic_distance() {
        // mu_k = 2 delta_0 + (1/k)(delta_k + delta_{-k}), nu_k = 0, against
        // the limit (2 delta_0, delta_1 + delta_{-1})
        let limit = pair_1d(vec![(0.0, 2.0)], vec![(1.0, 1.0), (-1.0, 1.0)]);
        let mut prev = f64::INFINITY;
        for k in [1.0f64, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
            let pk = pair_1d(vec![(0.0, 2.0), (k, 1.0 / k), (-k, 1.0 / k)], vec![]);
            let d = cosmic_distance(&pk, &limit).unwrap();
            assert!(d < prev, "not decreasing at k={k}: {d} >= {prev}");
            assert!(d <= 2.0 / k, "rate: d({k}) = {d}");
            prev = d;
        }
        assert!(prev <= 1e-2, "d at k=64 is {prev}");
    }

    #[test]
    fn dictionary_size_and_discrepancy() {
        assert_eq!(dictionary(1).len(), 2 + 4 + 8);
        assert_eq!(dictionary(2).len(), 2 + 8 + 8);
        let a = pair_1d(vec![(0.0, 1.0)], vec![]);
        let b = pair_1d(vec![(0.0, 3.0)], vec![]);
        // constant test function sees the mass difference
        let d = dictionary_discrepancy(&a, &b, &dictionary(1));
        assert!(d >= 2.0 - 1e-12);
    }

    #[test]
    fn atom_merging() {
        let p = pair_1d(vec![(1.0, 1.0), (1.0, 2.0)], vec![]);
        assert_eq!(p.mu().len(), 1);
        assert!((p.mu()[0].m - 3.0).abs() < 1e-15);
        assert!(MeasurePair::new(vec![(vec![0.0], -1.0)], vec![]).is_err());
        assert!(MeasurePair::new(vec![], vec![(vec![0.5, 0.5], 1.0)]).is_err());
    }
}
