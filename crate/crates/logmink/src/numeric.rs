//! Small numeric kernels shared across the crate: stable exponential
//! integrals over simplices, adaptive quadrature, and vector helpers.

/// Geometric predicate tolerance (relative to coordinate scale).
pub const GEOM_EPS: f64 = 1e-12;
/// Switch point below which exponential integrals use series expansions.
pub const SERIES_EPS: f64 = 1e-8;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|x| x * c).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `e1(z) = (1 - e^{-z}) / z`, the mean of `e^{-zs}` over `s in [0,1]`.
pub fn e1(z: f64) -> f64 {
    if z.abs() < 1e-12 {
        1.0 - z / 2.0 + z * z / 6.0
    } else {
        -f64::exp_m1(-z) / z
    }
}

/// `e2(z) = int_0^1 s e^{-zs} ds = (1 - (1+z)e^{-z}) / z^2`.
pub fn e2(z: f64) -> f64 {
    if z.abs() < 0.5 {
        // sum_k (-z)^k / (k! (k+2))
        let mut term = 1.0;
        let mut acc = 0.5;
        for k in 1..30 {
            term *= -z / k as f64;
            let contrib = term / (k + 2) as f64;
            acc += contrib;
            if contrib.abs() < 1e-18 * acc.abs().max(1.0) {
                break;
            }
        }
        acc
    } else {
        (1.0 - (1.0 + z) * (-z).exp()) / (z * z)
    }
}

/// `int over {s,t >= 0, s+t <= 1} of e^{-s a - t b}` (unit-simplex exponential mass).
///
/// Symmetric in `(a, b)`. Callers anchoring at the minimizing vertex pass
/// nonnegative exponents, which keeps every branch overflow-free.
pub fn simplex_exp(a: f64, b: f64) -> f64 {
    if a.abs() < 0.5 && b.abs() < 0.5 {
        return simplex_series(a, b, 0);
    }
    let (lo, hi) = if a.abs() <= b.abs() { (a, b) } else { (b, a) };
    (e1(lo) - (-hi).exp() * e1(lo - hi)) / hi
}

/// `int over the unit simplex of s * e^{-s a - t b}` (first barycentric moment).
pub fn simplex_exp_s(a: f64, b: f64) -> f64 {
    if a.abs() < 0.5 && b.abs() < 0.5 {
        return simplex_series(a, b, 1);
    }
    if b.abs() >= a.abs() {
        (e2(a) - (-b).exp() * e2(a - b)) / b
    } else {
        // integrate out s first; divisor a is the large exponent
        (-b).exp() * (e1(-b) - e1(a - b) - a * e2(a - b)) / (a * a)
    }
}

/// Taylor series for the simplex integrals near the origin.
/// `moment = 0` gives `simplex_exp`, `moment = 1` the s-weighted variant:
/// `int s^m t^n = m! n! / (m+n+2)!` turns the double exponential series into
/// `sum (-a)^m (-b)^n / (m+n+2)!` (and `(m+1)/(m+n+3)!` for the s-moment).
fn simplex_series(a: f64, b: f64, moment: usize) -> f64 {
    const N: usize = 26;
    let mut inv_fact = [0.0f64; N + 4];
    inv_fact[0] = 1.0;
    for k in 1..N + 4 {
        inv_fact[k] = inv_fact[k - 1] / k as f64;
    }
    let mut pow_a = [0.0f64; N];
    let mut pow_b = [0.0f64; N];
    pow_a[0] = 1.0;
    pow_b[0] = 1.0;
    for k in 1..N {
        pow_a[k] = pow_a[k - 1] * (-a);
        pow_b[k] = pow_b[k - 1] * (-b);
    }
    let mut acc = 0.0;
    for m in 0..N {
        for n in 0..N - m {
            let term = match moment {
                0 => pow_a[m] * pow_b[n] * inv_fact[m + n + 2],
                _ => (m + 1) as f64 * pow_a[m] * pow_b[n] * inv_fact[m + n + 3],
            };
            acc += term;
        }
    }
    acc
}

/// Adaptive Simpson quadrature with a global absolute tolerance.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    simpson_rec(f, a, b, fa, fm, fb, simpson_rule(a, b, fa, fm, fb), tol, 48)
}

fn simpson_rule(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_rule(a, m, fa, flm, fm);
    let right = simpson_rule(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// 16-point Gauss-Legendre nodes/weights on [-1, 1].
pub const GL16: [(f64, f64); 16] = [
    (-0.9894009349916499, 0.027152459411754096),
    (-0.9445750230732326, 0.06225352393864789),
    (-0.8656312023878318, 0.09515851168249279),
    (-0.755404408355003, 0.12462897125553388),
    (-0.6178762444026438, 0.14959598881657674),
    (-0.45801677765722737, 0.16915651939500254),
    (-0.2816035507792589, 0.18260341504492358),
    (-0.09501250983763744, 0.1894506104550685),
    (0.09501250983763744, 0.1894506104550685),
    (0.2816035507792589, 0.18260341504492358),
    (0.45801677765722737, 0.16915651939500254),
    (0.6178762444026438, 0.14959598881657674),
    (0.755404408355003, 0.12462897125553388),
    (0.8656312023878318, 0.09515851168249279),
    (0.9445750230732326, 0.06225352393864789),
    (0.9894009349916499, 0.027152459411754096),
];

/// Gauss-Legendre integral of `f` over `[a, b]`.
pub fn gauss16(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    GL16.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Bisection for the unique sign change of `margin` on `[lo, hi]`.
/// `margin(lo) > 0 > margin(hi)` is required; returns the crossing abscissa.
pub fn bisect(margin: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: u32) -> f64 {
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if margin(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solve a 2x2 linear system; `None` when the determinant is below `tol`.
pub fn solve2(a: [[f64; 2]; 2], rhs: [f64; 2], tol: f64) -> Option<[f64; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det.abs() <= tol {
        return None;
    }
    Some([
        (rhs[0] * a[1][1] - rhs[1] * a[0][1]) / det,
        (a[0][0] * rhs[1] - a[1][0] * rhs[0]) / det,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e1_matches_direct() {
        assert!((e1(1.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((e1(1e-13) - 1.0).abs() < 1e-12);
        assert!((e1(-2.0) - ((2.0f64).exp() - 1.0) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn simplex_exp_zero_is_half() {
        assert!((simplex_exp(0.0, 0.0) - 0.5).abs() < 1e-15);
        assert!((simplex_exp_s(0.0, 0.0) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn simplex_exp_against_quadrature() {
        for &(a, b) in &[(0.3, 0.1), (2.0, 0.0), (5.0, 5.0), (0.0, 7.5), (10.0, 0.2)] {
            let brute = adaptive_simpson(
                &|s: f64| {
                    let inner = (1.0 - s) * e1(b * (1.0 - s));
                    (-s * a).exp() * inner
                },
                0.0,
                1.0,
                1e-13,
            );
            let got = simplex_exp(a, b);
            assert!(
                (got - brute).abs() < 1e-11,
                "simplex_exp({a},{b}) = {got}, brute {brute}"
            );
            let brute_s = adaptive_simpson(
                &|s: f64| {
                    let inner = (1.0 - s) * e1(b * (1.0 - s));
                    s * (-s * a).exp() * inner
                },
                0.0,
                1.0,
                1e-13,
            );
            let got_s = simplex_exp_s(a, b);
            assert!(
                (got_s - brute_s).abs() < 1e-11,
                "simplex_exp_s({a},{b}) = {got_s}, brute {brute_s}"
            );
        }
    }

    #[test]
    fn simpson_integrates_exp() {
        let v = adaptive_simpson(&|x: f64| (-x).exp(), 0.0, 10.0, 1e-12);
        assert!((v - (1.0 - (-10.0f64).exp())).abs() < 1e-10);
    }
}
