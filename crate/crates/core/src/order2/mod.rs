//! Half-integral covers: every packed triangle spends at most two units in steps of one half.
//!
//! Numerators are in halves. The pipeline is [`initial_half_charge`], [`build_lend`],
//! [`build_chains`], [`compute_demanding`], [`check_demand_lemma`] and [`discharge_and_pin`].

mod chains;
mod demand;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::charge::{k4_edges, ChargeAssignment};
use crate::graph::{EdgeId, Graph, TriId};
use crate::structure::{check_structure, violation_to_focus, SolutionStructure, StructureViolation};

pub use chains::{build_chains, build_lend, Chain, ChainSet, ChainStatus, LendArc, LendRelation, TailNaming};
pub use demand::{
    check_demand_lemma, compute_demanding, discharge, discharge_and_pin, pin, DemandState, Operation,
};

/// One half, as a numerator.
pub const HALF: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Order2Error {
    #[error("packing does not have the required local structure: {0:?}")]
    StructureInvalid(StructureViolation),
    #[error("demanding triangles around a type-0 triangle have an unexpected shape")]
    DemandShape { edges: Vec<EdgeId> },
    #[error("no free triangle left to cover the remaining demanding triangles")]
    ExistenceInAViolated { edges: Vec<EdgeId> },
    #[error("triangle {0} already discharged its extra half")]
    AlreadySpent(TriId),
    #[error("edge {edge} is the base of triangle {tri}")]
    PinBaseEdge { tri: TriId, edge: EdgeId },
    #[error("triangle {0} was already pinned")]
    AlreadyPinned(TriId),
    #[error("triangle {0} is not free")]
    NotFree(TriId),
    #[error("edge {edge} received {num} halves")]
    Excess { edge: EdgeId, num: u32 },
}

impl Order2Error {
    /// Edges around the failure, for a targeted packing repair.
    pub fn focus(&self, g: &Graph) -> Vec<EdgeId> {
        match self {
            Order2Error::StructureInvalid(v) => violation_to_focus(g, v),
            Order2Error::DemandShape { edges } | Order2Error::ExistenceInAViolated { edges } => edges.clone(),
            Order2Error::Excess { edge, .. } => {
                let mut out: Vec<EdgeId> = g
                    .triangles_on_edge(*edge)
                    .iter()
                    .flat_map(|&t| g.triangle(t).edges)
                    .collect();
                out.sort_unstable();
                out.dedup();
                out
            }
            Order2Error::AlreadySpent(t)
            | Order2Error::AlreadyPinned(t)
            | Order2Error::NotFree(t)
            | Order2Error::PinBaseEdge { tri: t, .. } => g.triangle(*t).edges.to_vec(),
        }
    }
}

/// Per-triangle contributions, split into fixed charge and charge that may still rotate.
#[derive(Debug, Clone)]
pub struct ChargeState {
    fixed: BTreeMap<TriId, Vec<(EdgeId, u32)>>,
    flexible: BTreeMap<TriId, Vec<(EdgeId, u32)>>,
    fixed_num: Vec<u32>,
}

impl ChargeState {
    pub fn new(g: &Graph) -> Self {
        ChargeState {
            fixed: BTreeMap::new(),
            flexible: BTreeMap::new(),
            fixed_num: vec![0; g.m()],
        }
    }

    pub(crate) fn fix(&mut self, by: TriId, e: EdgeId, amount: u32) {
        self.fixed.entry(by).or_default().push((e, amount));
        self.fixed_num[e as usize] += amount;
    }

    pub(crate) fn set_flexible(&mut self, by: TriId, charge: Vec<(EdgeId, u32)>) {
        self.flexible.insert(by, charge);
    }

    pub(crate) fn clear_flexible(&mut self, by: TriId) {
        self.flexible.remove(&by);
    }

    /// Turns the flexible charge of `by` into fixed charge.
    pub(crate) fn freeze(&mut self, by: TriId) {
        for (e, x) in self.flexible.remove(&by).unwrap_or_default() {
            self.fix(by, e, x);
        }
    }

    pub(crate) fn fixed_by(&self, by: TriId) -> &[(EdgeId, u32)] {
        self.fixed.get(&by).map_or(&[], |v| v.as_slice())
    }

    /// Fixed numerator on `e`.
    pub fn fixed_value(&self, e: EdgeId) -> u32 {
        self.fixed_num[e as usize]
    }

    pub fn is_flexible(&self, t: TriId) -> bool {
        self.flexible.contains_key(&t)
    }

    pub fn flexible_triangles(&self) -> impl Iterator<Item = TriId> + '_ {
        self.flexible.keys().copied()
    }

    /// Total numerator spent by a packed triangle.
    pub fn spent(&self, t: TriId) -> u32 {
        let sum =
            |m: &BTreeMap<TriId, Vec<(EdgeId, u32)>>| m.get(&t).map_or(0, |v| v.iter().map(|x| x.1).sum());
        sum(&self.fixed) + sum(&self.flexible)
    }

    /// The fixed charge alone; flexible regions carry nothing here.
    pub fn f_fix(&self, g: &Graph) -> ChargeAssignment {
        let mut f = ChargeAssignment::zero(g, 2);
        for (&t, v) in &self.fixed {
            for &(e, x) in v {
                f.add(e, x, t);
            }
        }
        f
    }

    /// Fixed plus flexible charge.
    pub fn f(&self, g: &Graph) -> ChargeAssignment {
        let mut f = self.f_fix(g);
        for (&t, v) in &self.flexible {
            for &(e, x) in v {
                f.add(e, x, t);
            }
        }
        f
    }
}

/// The C4 of the K4 on `psi` and `anchor` that avoids the spoke at the smallest vertex of
/// `psi` and the edge of `psi` opposite to it.
pub(crate) fn default_c4(g: &Graph, psi: TriId, anchor: u32) -> Vec<(EdgeId, u32)> {
    let t = g.triangle(psi);
    let skip_spoke = g.edge_id(t.verts[0], anchor).unwrap();
    let skip_side = t.opposite_edge(t.verts[0]);
    k4_edges(g, psi, anchor)
        .into_iter()
        .filter(|&e| e != skip_spoke && e != skip_side)
        .map(|e| (e, HALF))
        .collect()
}

/// Type 0 gets a half on each edge. Type 1 gets one unit on the base and a half on the other two
/// edges. Type 3 gets a half on each edge of [`default_c4`]. Type-1 triangles with one single
/// and type-3 triangles start flexible. Only violations that leave a type undefined are fatal.
pub fn initial_half_charge(g: &Graph, s: &SolutionStructure) -> Result<ChargeState, Order2Error> {
    if let Some(v) = check_structure(g, s)
        .into_iter()
        .find(|v| v.kind.blocks_charging())
    {
        return Err(Order2Error::StructureInvalid(v));
    }
    let mut cs = ChargeState::new(g);
    for (&psi, info) in &s.packed {
        let edges = g.triangle(psi).edges;
        match info.ty {
            0 => edges.iter().for_each(|&e| cs.fix(psi, e, HALF)),
            1 => {
                let base = info.base[0];
                let charge: Vec<_> = edges
                    .iter()
                    .map(|&e| (e, if e == base { 2 * HALF } else { HALF }))
                    .collect();
                if info.cl_sin.len() == 1 {
                    cs.set_flexible(psi, charge);
                } else {
                    charge.into_iter().for_each(|(e, x)| cs.fix(psi, e, x));
                }
            }
            _ => cs.set_flexible(psi, default_c4(g, psi, info.anchor.unwrap())),
        }
    }
    Ok(cs)
}

#[derive(Debug, Clone)]
pub struct Order2Run {
    pub f: ChargeAssignment,
    pub f_fix: ChargeAssignment,
    pub lend: LendRelation,
    pub chains: ChainSet,
    pub demand: DemandState,
}

/// Runs the whole half-integral pipeline on a packing whose structure has been built.
pub fn charge_order2(g: &Graph, s: &SolutionStructure, naming: TailNaming) -> Result<Order2Run, Order2Error> {
    let cs = initial_half_charge(g, s)?;
    let lend = build_lend(g, s);
    let (chains, mut cs) = build_chains(g, s, &lend, cs, naming);
    let f_fix = cs.f_fix(g);
    let mut demand = compute_demanding(g, s, &chains);
    if let Some(edges) = check_demand_lemma(g, s, &demand) {
        return Err(Order2Error::DemandShape { edges });
    }
    discharge_and_pin(g, s, &mut cs, &mut demand)?;
    let f = cs.f(g);
    if let Some(e) = f.num.iter().position(|&x| x > 2) {
        return Err(Order2Error::Excess {
            edge: e as EdgeId,
            num: f.num[e],
        });
    }
    Ok(Order2Run {
        f,
        f_fix,
        lend,
        chains,
        demand,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{complete, lend_chain};
    use crate::graph::build_graph;
    use crate::packing::{local_search_packing, Packing};
    use crate::structure::build_structure;
    use crate::verify::verify_cover;

    fn run(g: &Graph, tris: &[TriId]) -> Order2Run {
        let p = Packing::from_triangles(g, tris).unwrap();
        let s = build_structure(g, &p);
        charge_order2(g, &s, TailNaming::default()).unwrap()
    }

    #[test]
    fn single_triangle_gets_three_halves() {
        let g = complete(3);
        let r = run(&g, &[0]);
        assert_eq!(r.f.num, vec![1, 1, 1]);
    }

    #[test]
    fn k4_gets_a_c4() {
        let g = complete(4);
        let p = Packing::from_triangles(&g, &[0]).unwrap();
        let s = build_structure(&g, &p);
        let cs = initial_half_charge(&g, &s).unwrap();
        let f = cs.f(&g);
        assert_eq!(f.total_num(), 4);
        assert!(f.num.iter().all(|&x| x <= 1));
        assert!(verify_cover(&g, &f, 1).ok());
        assert_eq!(f.num[g.edge_id(0, 3).unwrap() as usize], 0);
        assert_eq!(f.num[g.edge_id(1, 2).unwrap() as usize], 0);
    }

    #[test]
    fn pendant_type1() {
        // Triangle 012 with a pendant single 013; base 01.
        let g = build_graph(4, &[(0, 1), (1, 2), (0, 2), (0, 3), (1, 3)]).unwrap();
        let t = g.triangle_id(0, 1, 2).unwrap();
        let r = run(&g, &[t]);
        assert_eq!(r.f.num[g.edge_id(0, 1).unwrap() as usize], 2);
        assert_eq!(r.f.num[g.edge_id(1, 2).unwrap() as usize], 1);
        assert_eq!(r.f.num[g.edge_id(0, 2).unwrap() as usize], 1);
        assert_eq!(r.f.total_num(), 4);
    }

    #[test]
    fn k6_verifies() {
        let g = complete(6);
        let p = local_search_packing(&g, 0, 5);
        assert_eq!(p.len(), 4);
        let s = build_structure(&g, &p);
        let r = charge_order2(&g, &s, TailNaming::default()).unwrap();
        assert!(verify_cover(&g, &r.f, p.len()).ok());
    }

    #[test]
    fn lend_chains_verify() {
        for len in 1..=5 {
            let lc = lend_chain(len);
            let p = Packing::from_triangles(&lc.graph, &lc.packing).unwrap();
            let s = build_structure(&lc.graph, &p);
            for naming in [TailNaming::SmallerFirst, TailNaming::LargerFirst] {
                let r = charge_order2(&lc.graph, &s, naming).unwrap();
                assert!(verify_cover(&lc.graph, &r.f, p.len()).ok(), "len {len}");
                for &t in &lc.packing {
                    assert!(r.f.spent.get(&t).copied().unwrap_or(0) <= 4);
                }
            }
        }
    }
}
