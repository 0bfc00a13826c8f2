//! Independent check of a fractional cover against a packing-size budget.

use serde::Serialize;

use crate::charge::ChargeAssignment;
use crate::graph::{Graph, TriId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    /// Triangles whose weight sum is below one.
    pub failing: Vec<TriId>,
    /// Total weight is at most twice the packing size.
    pub budget_ok: bool,
    /// Every weight lies in `[0, 1]` and the weight vector matches the edge count.
    pub integrality_ok: bool,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.failing.is_empty() && self.budget_ok && self.integrality_ok
    }
}

pub fn verify_cover(g: &Graph, f: &ChargeAssignment, packing_size: usize) -> Report {
    let integrality_ok = f.order > 0 && f.num.len() == g.m() && f.num.iter().all(|&x| x <= f.order);
    if f.num.len() != g.m() {
        return Report {
            failing: (0..g.triangles().len() as TriId).collect(),
            budget_ok: false,
            integrality_ok,
        };
    }
    let failing = (0..g.triangles().len() as TriId)
        .filter(|&t| !f.covers(g, t))
        .collect();
    let budget_ok = f.total_num() <= 2 * f.order as u64 * packing_size as u64;
    Report {
        failing,
        budget_ok,
        integrality_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::complete;

    #[test]
    fn c4_of_k4_is_a_cover() {
        let g = complete(4);
        let mut f = ChargeAssignment::zero(&g, 2);
        for (u, v) in [(0, 1), (1, 2), (2, 3), (0, 3)] {
            f.num[g.edge_id(u, v).unwrap() as usize] = 1;
        }
        assert!(verify_cover(&g, &f, 1).ok());
    }

    #[test]
    fn detects_failures() {
        let g = complete(4);
        let mut f = ChargeAssignment::zero(&g, 2);
        f.num[0] = 3;
        let r = verify_cover(&g, &f, 1);
        assert!(!r.integrality_ok);
        assert_eq!(r.failing.len(), 2);
        assert!(r.budget_ok);
        f.num = vec![2; 6];
        assert!(!verify_cover(&g, &f, 1).budget_ok);
    }
}
