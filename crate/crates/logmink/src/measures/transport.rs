//! Exact optimal transport between small discrete distributions by the
//! transportation simplex (potentials / MODI), used for the 1-Wasserstein
//! term of the cosmic metric.

use crate::error::{Error, Result};

/// Minimum cost of moving `supply` onto `demand` (equal totals) under the
/// given unit costs. Dense simplex, exact arithmetic on the flows.
pub fn transport_cost(
    supply: &[f64],
    demand: &[f64],
    cost: &dyn Fn(usize, usize) -> f64,
) -> Result<f64> {
    let m = supply.len();
    let n = demand.len();
    if m == 0 || n == 0 {
        return Err(Error::InvalidInput("transport with empty marginals".into()));
    }
    let total_s: f64 = supply.iter().sum();
    let total_d: f64 = demand.iter().sum();
    if (total_s - total_d).abs() > 1e-9 * total_s.max(total_d).max(1.0) {
        return Err(Error::InvalidInput(format!(
            "transport marginals differ: {total_s} vs {total_d}"
        )));
    }
    // tiny graded perturbation keeps the simplex nondegenerate
    let scale = total_s.max(1.0);
    let eps = 1e-13 * scale;
    let mut s: Vec<f64> = supply.iter().enumerate().map(|(i, v)| v + eps * (i + 1) as f64).collect();
    let mut d: Vec<f64> = demand.to_vec();
    let extra: f64 = eps * (m * (m + 1) / 2) as f64 + (total_s - total_d);
    d[n - 1] += extra;

    let c: Vec<f64> = (0..m * n).map(|k| cost(k / n, k % n)).collect();
    let mut flow = vec![0.0f64; m * n];
    let mut basic = vec![false; m * n];

    // northwest-corner initial basis
    {
        let (mut i, mut j) = (0usize, 0usize);
        let mut rs = s.clone();
        let mut rd = d.clone();
        while i < m && j < n {
            let q = rs[i].min(rd[j]);
            flow[i * n + j] = q;
            basic[i * n + j] = true;
            rs[i] -= q;
            rd[j] -= q;
            if i + 1 == m && j + 1 == n {
                break;
            }
            if rs[i] <= rd[j] {
                i += 1;
            } else {
                j += 1;
            }
        }
    }
    let _ = (&mut s, &mut d);

    let cost_tol = 1e-12
        * (1.0 + c.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs())));
    for _round in 0..20_000 {
        // potentials: u_i + v_j = c_ij on the basis tree
        let mut u = vec![f64::NAN; m];
        let mut v = vec![f64::NAN; n];
        u[0] = 0.0;
        let mut stack: Vec<(bool, usize)> = vec![(true, 0)];
        while let Some((is_row, idx)) = stack.pop() {
            if is_row {
                for j in 0..n {
                    if basic[idx * n + j] && v[j].is_nan() {
                        v[j] = c[idx * n + j] - u[idx];
                        stack.push((false, j));
                    }
                }
            } else {
                for i in 0..m {
                    if basic[i * n + idx] && u[i].is_nan() {
                        u[i] = c[i * n + idx] - v[idx];
                        stack.push((true, i));
                    }
                }
            }
        }
        if u.iter().any(|x| x.is_nan()) || v.iter().any(|x| x.is_nan()) {
            // disconnected basis (can happen after exact-degenerate pivots):
            // connect with a zero-flow arc of minimal cost
            let mut best: Option<(usize, f64)> = None;
            for i in 0..m {
                for j in 0..n {
                    let connects = u[i].is_nan() != v[j].is_nan();
                    if connects && !basic[i * n + j] {
                        let key = c[i * n + j];
                        if best.map_or(true, |(_, bk)| key < bk) {
                            best = Some((i * n + j, key));
                        }
                    }
                }
            }
            match best {
                Some((k, _)) => {
                    basic[k] = true;
                    continue;
                }
                None => return Err(Error::Numerical("transport basis disconnected".into())),
            }
        }
        // entering arc: most negative reduced cost
        let mut enter: Option<(usize, f64)> = None;
        for i in 0..m {
            for j in 0..n {
                if basic[i * n + j] {
                    continue;
                }
                let r = c[i * n + j] - u[i] - v[j];
                if r < -cost_tol && enter.map_or(true, |(_, br)| r < br) {
                    enter = Some((i * n + j, r));
                }
            }
        }
        let Some((enter_k, _)) = enter else {
            let total: f64 = (0..m * n).map(|k| flow[k] * c[k]).sum();
            return Ok(total);
        };
        let (ei, ej) = (enter_k / n, enter_k % n);
        // cycle: path from row ei to col ej in the basis tree
        let path = tree_path(&basic, m, n, ei, ej)
            .ok_or_else(|| Error::Numerical("no cycle for entering arc".into()))?;
        // arcs alternate -,+,-,... starting from the arc out of row ei
        let mut theta = f64::INFINITY;
        let mut leave = usize::MAX;
        for (pos, &k) in path.iter().enumerate() {
            if pos % 2 == 0 && flow[k] < theta {
                theta = flow[k];
                leave = k;
            }
        }
        for (pos, &k) in path.iter().enumerate() {
            if pos % 2 == 0 {
                flow[k] -= theta;
            } else {
                flow[k] += theta;
            }
        }
        flow[enter_k] += theta;
        basic[enter_k] = true;
        basic[leave] = false;
        flow[leave] = 0.0;
    }
    Err(Error::Numerical("transportation simplex did not converge".into()))
}

/// Alternating row/col path of basic arcs from `row start` to `col target`.
/// Returned arcs alternate (row-leaving, col-leaving, ...) so even positions
/// lose flow when the entering arc gains.
fn tree_path(basic: &[bool], m: usize, n: usize, start_row: usize, target_col: usize) -> Option<Vec<usize>> {
    // nodes: rows 0..m, cols m..m+n
    let node_count = m + n;
    let mut prev_arc = vec![usize::MAX; node_count];
    let mut prev_node = vec![usize::MAX; node_count];
    let mut visited = vec![false; node_count];
    let start = start_row;
    let target = m + target_col;
    visited[start] = true;
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(start);
    while let Some(node) = queue.pop_front() {
        if node == target {
            break;
        }
        if node < m {
            let i = node;
            for j in 0..n {
                let col_node = m + j;
                if basic[i * n + j] && !visited[col_node] {
                    visited[col_node] = true;
                    prev_arc[col_node] = i * n + j;
                    prev_node[col_node] = node;
                    queue.push_back(col_node);
                }
            }
        } else {
            let j = node - m;
            for i in 0..m {
                if basic[i * n + j] && !visited[i] {
                    visited[i] = true;
                    prev_arc[i] = i * n + j;
                    prev_node[i] = node;
                    queue.push_back(i);
                }
            }
        }
    }
    if !visited[target] {
        return None;
    }
    let mut arcs = Vec::new();
    let mut node = target;
    while node != start {
        arcs.push(prev_arc[node]);
        node = prev_node[node];
    }
    arcs.reverse();
    Some(arcs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_marginals_cost_zero() {
        let s = [0.3, 0.7];
        let cost = |i: usize, j: usize| if i == j { 0.0 } else { 1.0 };
        let c = transport_cost(&s, &s, &cost).unwrap();
        assert!(c.abs() < 1e-10, "cost {c}");
    }

    #[test]
    fn two_point_shift() {
        // all mass moves distance 1
        let s = [1.0];
        let d = [1.0];
        let c = transport_cost(&s, &d, &|_, _| 1.0).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn split_and_merge() {
        // supply (0.5, 0.5) at positions 0 and 2; demand 1.0 at position 1
        let pos_s = [0.0f64, 2.0];
        let pos_d = [1.0];
        let c = transport_cost(&[0.5, 0.5], &[1.0], &|i, j| (pos_s[i] - pos_d[j]).abs()).unwrap();
        assert!((c - 1.0).abs() < 1e-10);
    }

    #[test]
    fn matches_brute_force_on_1d_lines() {
        // 1D optimal transport cost equals the CDF-difference integral
        let xs = [0.0f64, 1.0, 2.0, 3.5];
        let ys = [0.5, 1.5, 2.5];
        let a = [0.1, 0.4, 0.3, 0.2];
        let b = [0.3, 0.3, 0.4];
        let got = transport_cost(&a, &b, &|i, j| (xs[i] - ys[j]).abs()).unwrap();
        // brute: integrate |F_a - F_b| over a fine grid
        let mut brute = 0.0;
        let step = 1e-4;
        let mut t = -0.5;
        while t < 4.0 {
            let fa: f64 = xs.iter().zip(&a).filter(|(x, _)| **x <= t).map(|(_, w)| w).sum();
            let fb: f64 = ys.iter().zip(&b).filter(|(y, _)| **y <= t).map(|(_, w)| w).sum();
            brute += (fa - fb).abs() * step;
            t += step;
        }
        assert!((got - brute).abs() < 1e-3, "simplex {got} vs cdf {brute}");
    }
}
