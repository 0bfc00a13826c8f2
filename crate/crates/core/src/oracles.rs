//! Exact branch-and-bound values for small instances: packing number, transversal number
//! and the minimum weight of a cover whose edge weights are multiples of `1/k`.

use num_rational::Ratio;
use thiserror::Error;

use crate::graph::{EdgeId, Graph};

pub const TRIANGLE_CAP: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {triangles} triangles, above the exact-search cap of {cap}")]
    InstanceTooLarge { triangles: usize, cap: usize },
    #[error("order must be at least 1")]
    BadOrder,
}

fn check_size(g: &Graph) -> Result<(), OracleError> {
    let t = g.triangles().len();
    if t > TRIANGLE_CAP {
        return Err(OracleError::InstanceTooLarge {
            triangles: t,
            cap: TRIANGLE_CAP,
        });
    }
    Ok(())
}

/// Maximum number of edge-disjoint triangles.
pub fn nu_exact(g: &Graph) -> Result<usize, OracleError> {
    check_size(g)?;
    let mut s = NuSearch {
        g,
        alive: vec![true; g.m()],
        best: 0,
    };
    s.rec(0);
    Ok(s.best)
}

struct NuSearch<'a> {
    g: &'a Graph,
    alive: Vec<bool>,
    best: usize,
}

impl NuSearch<'_> {
    fn live(&self, t: &crate::graph::Triangle) -> bool {
        t.edges.iter().all(|&e| self.alive[e as usize])
    }

    fn rec(&mut self, count: usize) {
        let g = self.g;
        let mut live_on_edge = vec![0usize; g.m()];
        let mut n_live = 0;
        for t in g.triangles() {
            if self.live(t) {
                n_live += 1;
                for &e in &t.edges {
                    live_on_edge[e as usize] += 1;
                }
            }
        }
        if n_live == 0 {
            self.best = self.best.max(count);
            return;
        }
        let useful = live_on_edge.iter().filter(|&&c| c > 0).count();
        let mut deg = vec![0usize; g.n()];
        for (e, &c) in live_on_edge.iter().enumerate() {
            if c > 0 {
                let (u, v) = g.endpoints(e as EdgeId);
                deg[u as usize] += 1;
                deg[v as usize] += 1;
            }
        }
        let vertex_bound = deg.iter().map(|d| d / 2).sum::<usize>() / 3;
        let bound = n_live.min(useful / 3).min(vertex_bound);
        if count + bound <= self.best {
            return;
        }
        let e = (0..g.m())
            .filter(|&e| live_on_edge[e] > 0)
            .min_by_key(|&e| live_on_edge[e])
            .unwrap() as EdgeId;
        let on_e: Vec<_> = g
            .triangles_on_edge(e)
            .iter()
            .filter(|&&t| self.live(g.triangle(t)))
            .copied()
            .collect();
        for t in on_e {
            let edges = g.triangle(t).edges;
            for f in edges {
                self.alive[f as usize] = false;
            }
            self.rec(count + 1);
            for f in edges {
                self.alive[f as usize] = true;
            }
        }
        self.alive[e as usize] = false;
        self.rec(count);
        self.alive[e as usize] = true;
    }
}

/// Minimum number of edges meeting every triangle.
pub fn tau_exact(g: &Graph) -> Result<usize, OracleError> {
    check_size(g)?;
    let mut s = TauSearch {
        g,
        chosen: vec![false; g.m()],
        forbidden: vec![false; g.m()],
        best: usize::MAX,
    };
    s.rec(0);
    Ok(if g.triangles().is_empty() { 0 } else { s.best })
}

struct TauSearch<'a> {
    g: &'a Graph,
    chosen: Vec<bool>,
    forbidden: Vec<bool>,
    best: usize,
}

impl TauSearch<'_> {
    fn rec(&mut self, count: usize) {
        let g = self.g;
        let mut open = Vec::new();
        for t in g.triangles() {
            if !t.edges.iter().any(|&e| self.chosen[e as usize]) {
                let free = t.edges.iter().filter(|&&e| !self.forbidden[e as usize]).count();
                if free == 0 {
                    return;
                }
                open.push((free, t.edges));
            }
        }
        if open.is_empty() {
            self.best = self.best.min(count);
            return;
        }
        open.sort_by_key(|&(free, _)| free);
        let mut used = vec![false; g.m()];
        let mut lb = 0;
        for (_, edges) in &open {
            let fresh = edges
                .iter()
                .filter(|&&e| !self.forbidden[e as usize])
                .all(|&e| !used[e as usize]);
            if fresh {
                lb += 1;
                for &e in edges {
                    used[e as usize] = true;
                }
            }
        }
        if count + lb >= self.best {
            return;
        }
        let edges = open[0].1;
        let mut banned = Vec::new();
        for e in edges {
            if self.forbidden[e as usize] {
                continue;
            }
            self.chosen[e as usize] = true;
            self.rec(count + 1);
            self.chosen[e as usize] = false;
            self.forbidden[e as usize] = true;
            banned.push(e);
        }
        for e in banned {
            self.forbidden[e as usize] = false;
        }
    }
}

/// Minimum total weight of a cover with weights in `{0, 1/k, ..., 1}`.
pub fn tau_star_k_exact(g: &Graph, k: u32) -> Result<Ratio<i64>, OracleError> {
    Ok(Ratio::new(tau_star_k_numerator(g, k)? as i64, k as i64))
}

/// The optimum of [`tau_star_k_exact`] scaled by `k`.
pub fn tau_star_k_numerator(g: &Graph, k: u32) -> Result<u64, OracleError> {
    check_size(g)?;
    if k == 0 {
        return Err(OracleError::BadOrder);
    }
    let tri_deg: Vec<usize> = (0..g.m() as EdgeId)
        .map(|e| g.triangles_on_edge(e).len())
        .collect();
    let mut order: Vec<EdgeId> = (0..g.m() as EdgeId)
        .filter(|&e| tri_deg[e as usize] > 0)
        .collect();
    order.sort_by_key(|&e| std::cmp::Reverse(tri_deg[e as usize]));
    let mut s = StarSearch {
        g,
        k,
        order,
        value: vec![0; g.m()],
        assigned: vec![false; g.m()],
        best: k as u64 * g.m() as u64 + 1,
    };
    s.rec(0, 0);
    Ok(if g.triangles().is_empty() { 0 } else { s.best })
}

struct StarSearch<'a> {
    g: &'a Graph,
    k: u32,
    order: Vec<EdgeId>,
    value: Vec<u32>,
    assigned: Vec<bool>,
    best: u64,
}

impl StarSearch<'_> {
    fn deficit(&self, edges: &[EdgeId; 3]) -> u32 {
        let have: u32 = edges
            .iter()
            .filter(|&&e| self.assigned[e as usize])
            .map(|&e| self.value[e as usize])
            .sum();
        self.k.saturating_sub(have)
    }

    /// Open triangles with their deficits, or `None` if some deficit can no longer be met.
    fn open(&self) -> Option<Vec<(u32, Vec<EdgeId>)>> {
        let mut open = Vec::new();
        for t in self.g.triangles() {
            let d = self.deficit(&t.edges);
            if d == 0 {
                continue;
            }
            let free: Vec<EdgeId> = t
                .edges
                .into_iter()
                .filter(|&e| !self.assigned[e as usize])
                .collect();
            if d > free.len() as u32 * self.k {
                return None;
            }
            open.push((d, free));
        }
        Some(open)
    }

    fn greedy_bound(&self, open: &mut [(u32, Vec<EdgeId>)]) -> u64 {
        open.sort_by_key(|(d, _)| std::cmp::Reverse(*d));
        let mut used = vec![false; self.g.m()];
        let mut lb = 0u64;
        for (d, free) in open.iter() {
            if free.iter().all(|&e| !used[e as usize]) {
                lb += *d as u64;
                for &e in free {
                    used[e as usize] = true;
                }
            }
        }
        lb
    }

    /// Any `y >= 0` with per-edge load at most one certifies `sum(d * y)` as a bound.
    fn lp_bound(&self, open: &[(u32, Vec<EdgeId>)]) -> u64 {
        let mut row_of = vec![usize::MAX; self.g.m()];
        let mut rows = 0;
        for (_, free) in open {
            for &e in free {
                if row_of[e as usize] == usize::MAX {
                    row_of[e as usize] = rows;
                    rows += 1;
                }
            }
        }
        let cols: Vec<(f64, Vec<usize>)> = open
            .iter()
            .map(|(d, free)| (*d as f64, free.iter().map(|&e| row_of[e as usize]).collect()))
            .collect();
        let y = packing_lp(rows, &cols);
        let mut load = vec![0.0; rows];
        for (j, (_, rs)) in cols.iter().enumerate() {
            for &r in rs {
                load[r] += y[j];
            }
        }
        let scale = load.iter().cloned().fold(1.0f64, f64::max);
        let value: f64 = cols.iter().zip(&y).map(|((d, _), y)| d * y).sum::<f64>() / scale;
        (value - 1e-6).ceil().max(0.0) as u64
    }

    fn rec(&mut self, depth: usize, sum: u64) {
        let Some(mut open) = self.open() else {
            return;
        };
        if open.is_empty() {
            self.best = self.best.min(sum);
            return;
        }
        if sum + self.greedy_bound(&mut open) >= self.best || sum + self.lp_bound(&open) >= self.best {
            return;
        }
        if depth == self.order.len() {
            return;
        }
        let e = self.order[depth];
        let mut lo = 0;
        let mut hi = 0;
        for &t in self.g.triangles_on_edge(e) {
            let edges = self.g.triangle(t).edges;
            let d = self.deficit(&edges);
            hi = hi.max(d);
            let others_open = edges.iter().any(|&f| f != e && !self.assigned[f as usize]);
            if !others_open {
                lo = lo.max(d);
            }
        }
        self.assigned[e as usize] = true;
        for v in (lo..=hi.min(self.k)).rev() {
            self.value[e as usize] = v;
            self.rec(depth + 1, sum + v as u64);
        }
        self.value[e as usize] = 0;
        self.assigned[e as usize] = false;
    }
}

/// Maximises `sum(c_j y_j)` subject to `sum_{j : r in rows_j} y_j <= 1`, `y >= 0`,
/// by the simplex method with Bland's rule on a dense tableau.
fn packing_lp(rows: usize, cols: &[(f64, Vec<usize>)]) -> Vec<f64> {
    const EPS: f64 = 1e-9;
    let n = cols.len();
    let width = n + rows + 1;
    let mut tab = vec![vec![0.0; width]; rows + 1];
    for (j, (c, rs)) in cols.iter().enumerate() {
        for &r in rs {
            tab[r][j] = 1.0;
        }
        tab[rows][j] = -c;
    }
    for r in 0..rows {
        tab[r][n + r] = 1.0;
        tab[r][width - 1] = 1.0;
    }
    let mut basis: Vec<usize> = (n..n + rows).collect();
    for _ in 0..10_000 {
        let Some(enter) = (0..n + rows).find(|&j| tab[rows][j] < -EPS) else {
            break;
        };
        let mut leave = None;
        let mut best = f64::INFINITY;
        for r in 0..rows {
            let a = tab[r][enter];
            if a > EPS {
                let ratio = tab[r][width - 1] / a;
                if ratio < best - EPS
                    || (ratio < best + EPS && leave.is_none_or(|l: usize| basis[r] < basis[l]))
                {
                    best = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(l) = leave else {
            break;
        };
        let piv = tab[l][enter];
        for x in tab[l].iter_mut() {
            *x /= piv;
        }
        let prow = tab[l].clone();
        for (r, row) in tab.iter_mut().enumerate() {
            if r != l {
                let f = row[enter];
                if f.abs() > EPS {
                    for (x, p) in row.iter_mut().zip(&prow) {
                        *x -= f * p;
                    }
                }
            }
        }
        basis[l] = enter;
    }
    let mut y = vec![0.0; n];
    for (r, &b) in basis.iter().enumerate() {
        if b < n {
            y[b] = tab[r][width - 1].max(0.0);
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{bowtie, complete, glued_k4};

    #[test]
    fn complete_graphs() {
        let k4 = complete(4);
        let k6 = complete(6);
        assert_eq!(nu_exact(&k4), Ok(1));
        assert_eq!(nu_exact(&k6), Ok(4));
        assert_eq!(tau_exact(&k4), Ok(2));
        assert_eq!(tau_exact(&k6), Ok(6));
        assert_eq!(tau_star_k_exact(&k4, 2), Ok(Ratio::from_integer(2)));
        assert_eq!(tau_star_k_exact(&k6, 2), Ok(Ratio::from_integer(6)));
        assert_eq!(tau_star_k_exact(&k6, 3), Ok(Ratio::from_integer(5)));
    }

    #[test]
    fn small_families() {
        let b = bowtie();
        assert_eq!(nu_exact(&b), Ok(2));
        assert_eq!(tau_exact(&b), Ok(2));
        assert_eq!(tau_star_k_numerator(&b, 3), Ok(6));
        let g = glued_k4(2);
        assert_eq!(nu_exact(&g), Ok(2));
        let c5 = crate::graph::build_graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        assert_eq!(nu_exact(&c5), Ok(0));
        assert_eq!(tau_exact(&c5), Ok(0));
        assert_eq!(tau_star_k_numerator(&c5, 2), Ok(0));
    }

    #[test]
    fn cap() {
        assert!(matches!(
            nu_exact(&complete(12)),
            Err(OracleError::InstanceTooLarge { triangles: 220, .. })
        ));
    }
}
