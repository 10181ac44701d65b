//! Exact 1D engine for max-affine functions on an interval: upper envelope,
//! gradient cells, and closed-form exponential integrals. The 1D counterpart
//! of the polygon engine.

use super::{Halfspace, Piece, Polyhedral};
use crate::error::{Error, Result};
use crate::numeric::{e1, e2, GEOM_EPS};

/// `x -> max_i (slope_i x - offset_i)` on `[lo, hi]` (either side may be open).
#[derive(Debug, Clone)]
pub struct Line1 {
    pub pieces: Vec<(f64, f64)>,
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

/// One gradient cell: piece `piece` is active on `[x0, x1]`.
#[derive(Debug, Clone, Copy)]
pub struct Cell1 {
    pub piece: usize,
    pub x0: f64,
    pub x1: f64,
}

impl Line1 {
    pub fn from_polyhedral(p: &Polyhedral) -> Result<Self> {
        if p.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: p.dim() });
        }
        let pieces = p.pieces.iter().map(|pc| (pc.slope[0], pc.offset)).collect();
        let mut lo: Option<f64> = None;
        let mut hi: Option<f64> = None;
        if let Some(dom) = &p.domain {
            for h in dom {
                if h.normal[0] > 0.0 {
                    let v = h.height / h.normal[0];
                    hi = Some(hi.map_or(v, |cur: f64| cur.min(v)));
                } else {
                    let v = -h.height / h.normal[0].abs();
                    lo = Some(lo.map_or(v, |cur: f64| cur.max(v)));
                }
            }
        }
        if let (Some(l), Some(h)) = (lo, hi) {
            if l > h + GEOM_EPS {
                return Err(Error::Improper("empty 1D domain".into()));
            }
        }
        Ok(Line1 { pieces, lo, hi })
    }

    pub fn to_polyhedral(&self) -> Polyhedral {
        let mut domain = Vec::new();
        if let Some(h) = self.hi {
            domain.push(Halfspace { normal: vec![1.0], height: h });
        }
        if let Some(l) = self.lo {
            domain.push(Halfspace { normal: vec![-1.0], height: -l });
        }
        Polyhedral {
            pieces: self
                .pieces
                .iter()
                .map(|&(s, o)| Piece { slope: vec![s], offset: o })
                .collect(),
            domain: if domain.is_empty() { None } else { Some(domain) },
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        if let Some(l) = self.lo {
            if x < l - GEOM_EPS * (1.0 + x.abs()) {
                return f64::INFINITY;
            }
        }
        if let Some(h) = self.hi {
            if x > h + GEOM_EPS * (1.0 + x.abs()) {
                return f64::INFINITY;
            }
        }
        self.pieces
            .iter()
            .map(|&(s, o)| s * x - o)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Maximizing piece at `x` (lowest index on ties).
    pub fn argmax(&self, x: f64) -> usize {
        let mut best = 0;
        let mut bv = f64::NEG_INFINITY;
        for (i, &(s, o)) in self.pieces.iter().enumerate() {
            let v = s * x - o;
            if v > bv + GEOM_EPS * (1.0 + v.abs()) {
                best = i;
                bv = v;
            }
        }
        best
    }

    /// Gradient cells over `[max(lo, l), min(hi, u)]`.
    pub fn cells(&self, l: f64, u: f64) -> Vec<Cell1> {
        let left = self.lo.map_or(l, |v| v.max(l));
        let right = self.hi.map_or(u, |v| v.min(u));
        if left >= right {
            return vec![];
        }
        let mut cuts = vec![left, right];
        for i in 0..self.pieces.len() {
            for j in i + 1..self.pieces.len() {
                let (si, oi) = self.pieces[i];
                let (sj, oj) = self.pieces[j];
                if (si - sj).abs() > GEOM_EPS {
                    let x = (oi - oj) / (si - sj);
                    if x > left && x < right {
                        cuts.push(x);
                    }
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= GEOM_EPS * (1.0 + a.abs()));
        let mut cells: Vec<Cell1> = Vec::new();
        for w in cuts.windows(2) {
            let piece = self.argmax(0.5 * (w[0] + w[1]));
            match cells.last_mut() {
                Some(last) if last.piece == piece => last.x1 = w[1],
                _ => cells.push(Cell1 { piece, x0: w[0], x1: w[1] }),
            }
        }
        cells
    }

    /// Envelope breakpoints and finite endpoints with their values.
    pub fn vertices(&self, l: f64, u: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for c in self.cells(l, u) {
            out.push((c.x0, self.value(c.x0)));
            out.push((c.x1, self.value(c.x1)));
        }
        out.dedup_by(|a, b| (a.0 - b.0).abs() <= GEOM_EPS * (1.0 + a.0.abs()));
        out
    }

    pub fn min_value(&self) -> Result<(f64, Vec<f64>)> {
        let min_slope = self.pieces.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let max_slope = self.pieces.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        if self.lo.is_none() && min_slope > GEOM_EPS {
            return Err(Error::Improper("1D function unbounded below on the left".into()));
        }
        if self.hi.is_none() && max_slope < -GEOM_EPS {
            return Err(Error::Improper("1D function unbounded below on the right".into()));
        }
        // candidates live within the breakpoint span (plus one step beyond
        // where a flat piece extends to infinity)
        let mut span = 1.0f64;
        for i in 0..self.pieces.len() {
            for j in i + 1..self.pieces.len() {
                let (si, oi) = self.pieces[i];
                let (sj, oj) = self.pieces[j];
                if (si - sj).abs() > GEOM_EPS {
                    span = span.max(((oi - oj) / (si - sj)).abs() + 1.0);
                }
            }
        }
        let l = self.lo.unwrap_or(-span);
        let u = self.hi.unwrap_or(span);
        let mut best = f64::INFINITY;
        let mut arg = l;
        for (x, v) in self.vertices(l.min(u), u.max(l)) {
            if v < best {
                best = v;
                arg = x;
            }
        }
        if !best.is_finite() {
            return Err(Error::Improper("1D polyhedral function has no finite values".into()));
        }
        Ok((best, vec![arg]))
    }
}

/// `int_{x0}^{x1} e^{-(s x - o)} dx`, anchored at the endpoint with the
/// smaller exponent.
pub fn exp_interval(x0: f64, x1: f64, s: f64, o: f64) -> f64 {
    if x1 <= x0 {
        return 0.0;
    }
    let len = x1 - x0;
    if s >= 0.0 {
        len * (-(s * x0 - o)).exp() * e1(s * len)
    } else {
        len * (-(s * x1 - o)).exp() * e1(-s * len)
    }
}

/// `int_{x0}^{x1} x e^{-(s x - o)} dx`.
pub fn exp_interval_moment(x0: f64, x1: f64, s: f64, o: f64) -> f64 {
    if x1 <= x0 {
        return 0.0;
    }
    let (p, d, sign) = if s >= 0.0 {
        (x0, x1 - x0, 1.0)
    } else {
        (x1, x0 - x1, -1.0)
    };
    let z = s * d;
    sign * d * (-(s * p - o)).exp() * (p * e1(z) + d * e2(z))
}

/// `int_{x0}^{x1} (s x - o) e^{-(s x - o)} dx` (the entropy kernel on a cell).
pub fn exp_interval_weighted(x0: f64, x1: f64, s: f64, o: f64) -> f64 {
    if x1 <= x0 {
        return 0.0;
    }
    let (p, d, sign) = if s >= 0.0 {
        (x0, x1 - x0, 1.0)
    } else {
        (x1, x0 - x1, -1.0)
    };
    let g0 = s * p - o;
    let z = s * d;
    sign * d * (-g0).exp() * (g0 * e1(z) + z * e2(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::adaptive_simpson;

    fn abs_line() -> Line1 {
        Line1 {
            pieces: vec![(1.0, 0.0), (-1.0, 0.0)],
            lo: None,
            hi: None,
        }
    }

    #[test]
    fn envelope_of_abs() {
        let l = abs_line();
        let cells = l.cells(-5.0, 5.0);
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[0].piece, 1);
        assert_eq!(cells[1].piece, 0);
        assert!((cells[0].x1 - 0.0).abs() < 1e-14);
        let (m, arg) = l.min_value().unwrap();
        assert!((m - 0.0).abs() < 1e-14);
        assert!(arg[0].abs() < 1e-12);
    }

    #[test]
    fn integrals_match_quadrature() {
        for &(x0, x1, s, o) in &[(0.0, 1.0, 1.0, 0.0), (-2.0, 3.0, -0.7, 0.4), (1.0, 4.0, 0.0, -1.0)] {
            let i = exp_interval(x0, x1, s, o);
            let b = adaptive_simpson(&|x: f64| (-(s * x - o)).exp(), x0, x1, 1e-13);
            assert!((i - b).abs() < 1e-11, "exp_interval {i} vs {b}");
            let m = exp_interval_moment(x0, x1, s, o);
            let bm = adaptive_simpson(&|x: f64| x * (-(s * x - o)).exp(), x0, x1, 1e-13);
            assert!((m - bm).abs() < 1e-11, "moment {m} vs {bm}");
            let w = exp_interval_weighted(x0, x1, s, o);
            let bw = adaptive_simpson(&|x: f64| (s * x - o) * (-(s * x - o)).exp(), x0, x1, 1e-13);
            assert!((w - bw).abs() < 1e-11, "weighted {w} vs {bw}");
        }
    }

    #[test]
    fn exp_abs_integral_is_two() {
        let l = abs_line();
        let total: f64 = l
            .cells(-40.0, 40.0)
            .iter()
            .map(|c| {
                let (s, o) = l.pieces[c.piece];
                exp_interval(c.x0, c.x1, s, o)
            })
            .sum();
        assert!((total - 2.0).abs() < 1e-12);
    }
}
