//! Edge weights that are multiples of `1/order`, stored as integer numerators, together with
//! how much each packed triangle spent. Also the order-6 and order-3 charging schemes.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, Graph, TriId, VertexId};
use crate::structure::SolutionStructure;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChargeError {
    #[error("packed triangle {0} has a type the scheme cannot charge")]
    InvalidStructure(TriId),
    #[error("edge {edge} received {num}/{order}, more than one unit")]
    Excess { edge: EdgeId, num: u32, order: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeAssignment {
    pub order: u32,
    /// Numerator per edge id.
    pub num: Vec<u32>,
    /// Numerators contributed by each packed triangle.
    #[serde(skip)]
    pub spent: BTreeMap<TriId, u32>,
}

impl ChargeAssignment {
    pub fn zero(g: &Graph, order: u32) -> Self {
        ChargeAssignment {
            order,
            num: vec![0; g.m()],
            spent: BTreeMap::new(),
        }
    }

    pub fn add(&mut self, e: EdgeId, amount: u32, by: TriId) {
        self.num[e as usize] += amount;
        *self.spent.entry(by).or_default() += amount;
    }

    pub fn value(&self, e: EdgeId) -> Ratio<i64> {
        Ratio::new(self.num[e as usize] as i64, self.order as i64)
    }

    pub fn total_num(&self) -> u64 {
        self.num.iter().map(|&x| x as u64).sum()
    }

    pub fn total(&self) -> Ratio<i64> {
        Ratio::new(self.total_num() as i64, self.order as i64)
    }

    pub fn triangle_num(&self, g: &Graph, t: TriId) -> u32 {
        g.triangle(t).edges.iter().map(|&e| self.num[e as usize]).sum()
    }

    pub fn covers(&self, g: &Graph, t: TriId) -> bool {
        self.triangle_num(g, t) >= self.order
    }

    /// Nonzero weights as `(edge, numerator)` in edge order.
    pub fn support(&self) -> Vec<(EdgeId, u32)> {
        self.num
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0)
            .map(|(e, &x)| (e as EdgeId, x))
            .collect()
    }

    pub fn check_excess(&self) -> Result<(), ChargeError> {
        match self.num.iter().position(|&x| x > self.order) {
            Some(e) => Err(ChargeError::Excess {
                edge: e as EdgeId,
                num: self.num[e],
                order: self.order,
            }),
            None => Ok(()),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "order": self.order, "weights": self.support() })
    }
}

/// The six edges spanned by a packed triangle and its anchor.
pub(crate) fn k4_edges(g: &Graph, psi: TriId, anchor: VertexId) -> [EdgeId; 6] {
    let t = g.triangle(psi);
    let spoke = |v| {
        g.edge_id(v, anchor)
            .expect("anchor is adjacent to the whole triangle")
    };
    [
        t.edges[0],
        t.edges[1],
        t.edges[2],
        spoke(t.verts[0]),
        spoke(t.verts[1]),
        spoke(t.verts[2]),
    ]
}

/// The edge of `psi` at `u` other than `base`.
pub(crate) fn non_base_at(g: &Graph, psi: TriId, base: EdgeId, u: VertexId) -> EdgeId {
    let t = g.triangle(psi);
    *t.edges
        .iter()
        .find(|&&e| {
            e != base && {
                let (a, b) = g.endpoints(e);
                a == u || b == u
            }
        })
        .unwrap()
}

pub(crate) fn leg_at(g: &Graph, s: &SolutionStructure, w: TriId, u: VertexId) -> EdgeId {
    *s.legs(g, w)
        .iter()
        .find(|&&e| {
            let (a, b) = g.endpoints(e);
            a == u || b == u
        })
        .unwrap()
}

fn charge_type03(
    g: &Graph,
    s: &SolutionStructure,
    f: &mut ChargeAssignment,
    unit: u32,
) -> Result<(), ChargeError> {
    for (&psi, info) in &s.packed {
        match info.ty {
            0 => {
                for e in g.triangle(psi).edges {
                    f.add(e, 2 * unit, psi);
                }
            }
            3 => {
                let a = info.anchor.ok_or(ChargeError::InvalidStructure(psi))?;
                for e in k4_edges(g, psi, a) {
                    f.add(e, unit, psi);
                }
            }
            1 => {}
            _ => return Err(ChargeError::InvalidStructure(psi)),
        }
    }
    Ok(())
}

/// Order 6: every packed triangle spends exactly two units.
pub fn charge_order6(g: &Graph, s: &SolutionStructure) -> Result<ChargeAssignment, ChargeError> {
    let mut f = ChargeAssignment::zero(g, 6);
    charge_type03(g, s, &mut f, 2)?;
    for (&psi, info) in s.packed.iter().filter(|(_, i)| i.ty == 1) {
        let base = info.base[0];
        let sole = info.cl_sin.len() == 1;
        f.add(base, if sole { 4 } else { 6 }, psi);
        for e in g.triangle(psi).edges.into_iter().filter(|&e| e != base) {
            f.add(e, 3, psi);
        }
        if sole {
            for leg in s.legs(g, info.cl_sin[0]) {
                f.add(leg, 1, psi);
            }
        }
    }
    f.check_excess()?;
    Ok(f)
}

/// Order 3: type-1 triangles with one single are charged in ascending id order so that a
/// leg already carrying weight is not charged twice.
pub fn charge_order3(g: &Graph, s: &SolutionStructure) -> Result<ChargeAssignment, ChargeError> {
    let mut f = ChargeAssignment::zero(g, 3);
    charge_type03(g, s, &mut f, 1)?;
    for (&psi, info) in s.packed.iter().filter(|(_, i)| i.ty == 1 && i.cl_sin.len() > 1) {
        let base = info.base[0];
        f.add(base, 3, psi);
        for e in g.triangle(psi).edges.into_iter().filter(|&e| e != base) {
            f.add(e, 1, psi);
        }
    }
    for (&psi, info) in s.packed.iter().filter(|(_, i)| i.ty == 1 && i.cl_sin.len() == 1) {
        let base = info.base[0];
        let w = info.cl_sin[0];
        f.add(base, 2, psi);
        let (u, v) = g.endpoints(base);
        for x in [u, v] {
            let leg = leg_at(g, s, w, x);
            let side = non_base_at(g, psi, base, x);
            if f.num[leg as usize] == 0 {
                f.add(leg, 1, psi);
                f.add(side, 1, psi);
            } else {
                f.add(side, 2, psi);
            }
        }
    }
    f.check_excess()?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{bowtie, complete};
    use crate::packing::{local_search_packing, Packing};
    use crate::structure::build_structure;

    fn all_covered(g: &Graph, f: &ChargeAssignment) -> bool {
        (0..g.triangles().len() as TriId).all(|t| f.covers(g, t))
    }

    #[test]
    fn k4_order6_and_order3() {
        let g = complete(4);
        let p = Packing::from_triangles(&g, &[0]).unwrap();
        let s = build_structure(&g, &p);
        let f6 = charge_order6(&g, &s).unwrap();
        assert!(f6.num.iter().all(|&x| x == 2));
        assert!(all_covered(&g, &f6));
        let f3 = charge_order3(&g, &s).unwrap();
        assert!(f3.num.iter().all(|&x| x == 1));
        assert_eq!(f3.total(), Ratio::from_integer(2));
    }

    #[test]
    fn bowtie_type0() {
        let g = bowtie();
        let p = Packing::from_triangles(&g, &[0, 1]).unwrap();
        let s = build_structure(&g, &p);
        let f = charge_order3(&g, &s).unwrap();
        assert!(f.num.iter().all(|&x| x == 2));
        assert_eq!(f.total(), Ratio::from_integer(4));
    }

    #[test]
    fn k6_both_orders_cover() {
        let g = complete(6);
        let p = local_search_packing(&g, 3, 5);
        let s = build_structure(&g, &p);
        for f in [charge_order6(&g, &s).unwrap(), charge_order3(&g, &s).unwrap()] {
            assert!(all_covered(&g, &f));
            assert!(f.total() <= Ratio::from_integer(2 * p.len() as i64));
        }
    }
}
