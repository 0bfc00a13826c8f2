//! Rounding third-integral covers to integral ones, and building covers of any order from the
//! order-2 and order-3 covers.

use thiserror::Error;

use crate::charge::ChargeAssignment;
use crate::graph::{EdgeId, Graph, TriId, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoundingError {
    #[error("triangle {0} is not covered")]
    NotACover(TriId),
    #[error("weights are not multiples of one third")]
    NotThirdIntegral,
    #[error("order {0} needs a cover that was not supplied")]
    MissingInput(u32),
    #[error("order must be at least 2, got {0}")]
    BadOrder(u32),
}

/// Two-colours the vertices so that at least half of `edges` join different colours: each vertex
/// goes opposite the majority of its already coloured neighbours, then one pass moves any vertex
/// whose move enlarges the cut.
fn max_cut(n: usize, edges: &[(VertexId, VertexId)]) -> Vec<bool> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u as usize].push(v as usize);
        adj[v as usize].push(u as usize);
    }
    let mut side: Vec<Option<bool>> = vec![None; n];
    for v in 0..n {
        let (mut t, mut f) = (0, 0);
        for &w in &adj[v] {
            match side[w] {
                Some(true) => t += 1,
                Some(false) => f += 1,
                None => {}
            }
        }
        side[v] = Some(t < f);
    }
    let mut side: Vec<bool> = side.into_iter().map(Option::unwrap).collect();
    for v in 0..n {
        let same = adj[v].iter().filter(|&&w| side[w] == side[v]).count();
        if 2 * same > adj[v].len() {
            side[v] = !side[v];
        }
    }
    side
}

/// Integral cover from a cover with weights in thirds: every edge of weight at least two thirds,
/// plus the edges of weight one third left uncut by [`max_cut`]. Returns sorted edge ids.
pub fn round_third_integral(g: &Graph, f: &ChargeAssignment) -> Result<Vec<EdgeId>, RoundingError> {
    if !matches!(f.order, 1 | 3) || f.num.len() != g.m() || f.num.iter().any(|&x| x > f.order) {
        return Err(RoundingError::NotThirdIntegral);
    }
    let scale = 3 / f.order;
    if let Some(t) = (0..g.triangles().len() as TriId).find(|&t| !f.covers(g, t)) {
        return Err(RoundingError::NotACover(t));
    }
    let mut out: Vec<EdgeId> = (0..g.m() as EdgeId)
        .filter(|&e| f.num[e as usize] * scale >= 2)
        .collect();
    let thirds: Vec<EdgeId> = (0..g.m() as EdgeId)
        .filter(|&e| f.num[e as usize] * scale == 1)
        .collect();
    let pairs: Vec<(VertexId, VertexId)> = thirds.iter().map(|&e| g.endpoints(e)).collect();
    let side = max_cut(g.n(), &pairs);
    out.extend(thirds.into_iter().filter(|&e| {
        let (u, v) = g.endpoints(e);
        side[u as usize] == side[v as usize]
    }));
    out.sort_unstable();
    Ok(out)
}

/// A cover of order `k`: `k / 2` copies of `f2` for even `k`, `f3` for `k = 3`, and
/// `(k - 3) / 2` copies of `f2` plus one of `f3` for odd `k > 3`.
pub fn compose_order_k(
    f2: Option<&ChargeAssignment>,
    f3: Option<&ChargeAssignment>,
    k: u32,
) -> Result<ChargeAssignment, RoundingError> {
    if k < 2 {
        return Err(RoundingError::BadOrder(k));
    }
    let need2 = k != 3;
    let need3 = k % 2 == 1;
    let f2 = match f2 {
        Some(f) if f.order == 2 => Some(f),
        _ if need2 => return Err(RoundingError::MissingInput(k)),
        _ => None,
    };
    let f3 = match f3 {
        Some(f) if f.order == 3 => Some(f),
        _ if need3 => return Err(RoundingError::MissingInput(k)),
        _ => None,
    };
    let q = if need3 { (k - 3) / 2 } else { k / 2 };
    let m = f2.or(f3).map_or(0, |f| f.num.len());
    let mut num = vec![0; m];
    for (e, x) in num.iter_mut().enumerate() {
        if let Some(f2) = f2.filter(|_| need2) {
            *x += q * f2.num[e];
        }
        if let Some(f3) = f3.filter(|_| need3) {
            *x += f3.num[e];
        }
    }
    Ok(ChargeAssignment {
        order: k,
        num,
        spent: Default::default(),
    })
}
