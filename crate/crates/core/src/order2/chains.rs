//! Lending between packed triangles and the chains built from it.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{ChargeState, HALF};
use crate::charge::{k4_edges, leg_at};
use crate::graph::{EdgeId, Graph, TriId, VertexId};
use crate::structure::SolutionStructure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LendArc {
    pub target: TriId,
    /// The edge of `target` joining the lender's off-base vertex to its anchor.
    pub gain: EdgeId,
    /// The lender's vertex on the gain edge.
    pub common: VertexId,
}

/// Each type-1 triangle with one single lends to at most one packed triangle of type 1 or 3.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LendRelation {
    pub arcs: BTreeMap<TriId, LendArc>,
}

impl LendRelation {
    /// Lenders to `target` in id order.
    pub fn lenders_to(&self, target: TriId) -> Vec<TriId> {
        self.arcs
            .iter()
            .filter(|(_, a)| a.target == target)
            .map(|(&t, _)| t)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }
}

pub fn build_lend(g: &Graph, s: &SolutionStructure) -> LendRelation {
    let mut arcs = BTreeMap::new();
    for (&psi, info) in &s.packed {
        if !s.has_sole_single(psi) {
            continue;
        }
        let a = info.anchor.expect("a sole single defines an anchor");
        let c = g.triangle(psi).apex(g, info.base[0]);
        let Some(gain) = g.edge_id(c, a) else { continue };
        let Some(target) = s.owner(gain) else { continue };
        if matches!(s.ty(target), 1 | 3) {
            arcs.insert(
                psi,
                LendArc {
                    target,
                    gain,
                    common: c,
                },
            );
        }
    }
    LendRelation { arcs }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainStatus {
    Satisfied,
    Unsatisfied,
}

/// Which off-base edge of an unsatisfied tail keeps its half.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum TailNaming {
    #[default]
    SmallerFirst,
    LargerFirst,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Chain {
    /// The head first; `members[i]` lends to `members[i - 1]`. A lone type-3 triangle forms a
    /// chain of size zero.
    pub members: Vec<TriId>,
    /// `gains[i]` is the gain edge of `members[i + 1]`.
    pub gains: Vec<EdgeId>,
    /// Non-solution edges fixed at one half along the chain, tail excluded.
    pub half_edges: Vec<EdgeId>,
    pub status: ChainStatus,
    /// For an unsatisfied tail, the off-base edge carrying a half and the one left empty.
    pub tail_split: Option<(EdgeId, EdgeId)>,
}

impl Chain {
    pub fn size(&self) -> usize {
        self.members.len() - 1
    }

    pub fn head(&self) -> TriId {
        self.members[0]
    }

    pub fn tail(&self) -> TriId {
        *self.members.last().unwrap()
    }
}

#[derive(Debug, Clone, Default)]
pub struct ChainSet {
    pub chains: Vec<Chain>,
    member_of: BTreeMap<TriId, usize>,
}

impl ChainSet {
    pub fn chain_of(&self, t: TriId) -> Option<&Chain> {
        self.member_of.get(&t).map(|&i| &self.chains[i])
    }

    pub fn heads(&self) -> BTreeSet<TriId> {
        self.chains
            .iter()
            .filter(|c| c.size() > 0)
            .map(Chain::head)
            .collect()
    }

    pub fn unsatisfied_tails(&self) -> BTreeSet<TriId> {
        self.chains
            .iter()
            .filter(|c| c.status == ChainStatus::Unsatisfied)
            .map(Chain::tail)
            .collect()
    }

    /// Every recorded half non-solution edge.
    pub fn half_edges(&self) -> BTreeSet<EdgeId> {
        self.chains
            .iter()
            .flat_map(|c| c.half_edges.iter().copied())
            .collect()
    }
}

struct Builder<'a> {
    g: &'a Graph,
    s: &'a SolutionStructure,
    lend: &'a LendRelation,
    cs: ChargeState,
    set: ChainSet,
}

impl Builder<'_> {
    fn base(&self, psi: TriId) -> EdgeId {
        self.s.info(psi).base[0]
    }

    fn single(&self, psi: TriId) -> TriId {
        self.s.info(psi).cl_sin[0]
    }

    fn legs(&self, psi: TriId) -> [EdgeId; 2] {
        self.s.legs(self.g, self.single(psi))
    }

    fn off_base(&self, psi: TriId) -> [EdgeId; 2] {
        let b = self.base(psi);
        let mut out = self.g.triangle(psi).edges.into_iter().filter(|&e| e != b);
        [out.next().unwrap(), out.next().unwrap()]
    }

    fn fully_satisfied(&self, psi: TriId) -> bool {
        self.legs(psi).iter().all(|&e| self.cs.fixed_value(e) >= HALF)
    }

    fn candidate(&self, target: TriId, skip_gain: Option<EdgeId>) -> Option<TriId> {
        self.lend.lenders_to(target).into_iter().find(|&t| {
            !self.set.member_of.contains_key(&t)
                && Some(self.lend.arcs[&t].gain) != skip_gain
                && !self.fully_satisfied(t)
        })
    }

    fn push_chain(&mut self, chain: Chain) -> usize {
        let i = self.set.chains.len();
        for &t in &chain.members {
            self.set.member_of.insert(t, i);
        }
        self.set.chains.push(chain);
        i
    }

    fn satisfy_tail(&mut self, ci: usize, fresh: &mut Vec<EdgeId>) {
        let tail = self.set.chains[ci].tail();
        self.cs.clear_flexible(tail);
        for e in self.off_base(tail) {
            self.cs.fix(tail, e, HALF);
            fresh.push(e);
        }
        let c = &mut self.set.chains[ci];
        c.status = ChainStatus::Satisfied;
        c.tail_split = None;
    }

    /// Propagates newly fixed edges to unsatisfied tails and unsatisfied type-3 triangles.
    fn settle(&mut self, mut fresh: Vec<EdgeId>, current: usize) {
        while let Some(e) = fresh.pop() {
            for ci in 0..self.set.chains.len() {
                let c = &self.set.chains[ci];
                if ci != current && c.status == ChainStatus::Unsatisfied && self.legs(c.tail()).contains(&e) {
                    self.satisfy_tail(ci, &mut fresh);
                }
            }
            if self.s.is_solution_edge(e) {
                continue;
            }
            let waiting: Vec<TriId> = self
                .s
                .packed
                .iter()
                .filter(|(t, i)| i.ty == 3 && !self.set.member_of.contains_key(t))
                .map(|(&t, _)| t)
                .collect();
            for psi in waiting {
                let a = self.s.info(psi).anchor.unwrap();
                let k4 = k4_edges(self.g, psi, a);
                if !k4[3..].contains(&e) {
                    continue;
                }
                self.cs.clear_flexible(psi);
                for &x in &k4[..3] {
                    self.cs.fix(psi, x, HALF);
                }
                let spoke = *k4[3..].iter().filter(|&&x| x != e).min().unwrap();
                self.cs.fix(psi, spoke, HALF);
                fresh.push(spoke);
                self.push_chain(Chain {
                    members: vec![psi],
                    gains: Vec::new(),
                    half_edges: Vec::new(),
                    status: ChainStatus::Satisfied,
                    tail_split: None,
                });
            }
        }
    }

    /// Satisfies the tail early when its single already has a half on a non-solution edge.
    fn truncate(&mut self, ci: usize) -> bool {
        let tail = self.set.chains[ci].tail();
        if self.legs(tail).iter().any(|&e| self.cs.fixed_value(e) >= HALF) {
            let mut fresh = Vec::new();
            self.satisfy_tail(ci, &mut fresh);
            self.settle(fresh, ci);
            true
        } else {
            false
        }
    }

    fn start(&mut self, head: TriId, first: TriId, naming: TailNaming) {
        let g = self.g;
        let arc = self.lend.arcs[&first];
        let a0 = self.s.info(head).anchor.unwrap();
        self.cs.clear_flexible(head);
        self.cs.clear_flexible(first);
        let mut fresh = Vec::new();
        for e in g.triangle(head).edges {
            if e != arc.gain {
                self.cs.fix(head, e, HALF);
            }
            fresh.push(e);
        }
        self.cs.fix(first, arc.gain, HALF);
        let mut half_edges = Vec::new();
        for v in g.triangle(head).verts {
            if v != arc.common {
                let spoke = g.edge_id(v, a0).unwrap();
                self.cs.fix(head, spoke, HALF);
                half_edges.push(spoke);
                fresh.push(spoke);
            }
        }
        let b1 = self.base(first);
        self.cs.fix(first, b1, HALF);
        fresh.push(b1);
        let ci = self.push_chain(Chain {
            members: vec![head, first],
            gains: vec![arc.gain],
            half_edges,
            status: ChainStatus::Unsatisfied,
            tail_split: None,
        });
        self.settle(fresh, ci);
        if self.truncate(ci) {
            return;
        }
        loop {
            let prev = self.set.chains[ci].tail();
            let b_prev = self.base(prev);
            let Some(next) = self.candidate(prev, Some(b_prev)) else {
                self.leave_unsatisfied(ci, naming);
                return;
            };
            let gain = self.lend.arcs[&next].gain;
            let third = *self.off_base(prev).iter().find(|&&e| e != gain).unwrap();
            let (x, y) = g.endpoints(b_prev);
            let (p, q) = g.endpoints(third);
            let u = if p == x || q == x { x } else { y };
            let e1 = leg_at(g, self.s, self.single(prev), u);
            let b_next = self.base(next);
            self.cs.clear_flexible(next);
            self.cs.fix(prev, third, HALF);
            self.cs.fix(prev, e1, HALF);
            self.cs.fix(next, b_next, HALF);
            self.cs.fix(next, gain, HALF);
            {
                let c = &mut self.set.chains[ci];
                c.members.push(next);
                c.gains.push(gain);
                c.half_edges.push(e1);
            }
            self.set.member_of.insert(next, ci);
            self.settle(vec![b_next, third, gain, e1], ci);
            if self.truncate(ci) {
                return;
            }
        }
    }

    /// The tail keeps a half on one off-base edge and on the leg of its single away from it.
    fn leave_unsatisfied(&mut self, ci: usize, naming: TailNaming) {
        let tail = self.set.chains[ci].tail();
        let [lo, hi] = self.off_base(tail);
        let (keep, empty) = match naming {
            TailNaming::SmallerFirst => (lo.min(hi), lo.max(hi)),
            TailNaming::LargerFirst => (lo.max(hi), lo.min(hi)),
        };
        let (p, q) = self.g.endpoints(keep);
        let far = *self
            .legs(tail)
            .iter()
            .find(|&&leg| {
                let (a, b) = self.g.endpoints(leg);
                a != p && a != q && b != p && b != q
            })
            .unwrap();
        self.cs.set_flexible(tail, vec![(keep, HALF), (far, HALF)]);
        let c = &mut self.set.chains[ci];
        c.status = ChainStatus::Unsatisfied;
        c.tail_split = Some((keep, empty));
    }
}

/// Builds chains from type-3 heads in id order and settles all fixed charge. On return the only
/// flexible triangles are unsatisfied tails and type-3 triangles outside every chain.
pub fn build_chains(
    g: &Graph,
    s: &SolutionStructure,
    lend: &LendRelation,
    cs: ChargeState,
    naming: TailNaming,
) -> (ChainSet, ChargeState) {
    let mut b = Builder {
        g,
        s,
        lend,
        cs,
        set: ChainSet::default(),
    };
    let type3: Vec<TriId> = s
        .packed
        .iter()
        .filter(|(_, i)| i.ty == 3)
        .map(|(&t, _)| t)
        .collect();
    loop {
        let start = type3
            .iter()
            .filter(|t| !b.set.member_of.contains_key(t))
            .find_map(|&head| b.candidate(head, None).map(|first| (head, first)));
        match start {
            Some((head, first)) => b.start(head, first, naming),
            None => break,
        }
    }
    let tails = b.set.unsatisfied_tails();
    let flexible: Vec<TriId> = b.cs.flexible_triangles().collect();
    for t in flexible {
        let free_type3 = s.ty(t) == 3 && !b.set.member_of.contains_key(&t);
        if !tails.contains(&t) && !free_type3 {
            b.cs.freeze(t);
        }
    }
    (b.set, b.cs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{bowtie, lend_chain};
    use crate::order2::initial_half_charge;
    use crate::packing::Packing;
    use crate::structure::build_structure;

    fn setup(lc: &crate::generate::LendChain) -> SolutionStructure {
        let p = Packing::from_triangles(&lc.graph, &lc.packing).unwrap();
        build_structure(&lc.graph, &p)
    }

    #[test]
    fn lend_arcs_follow_the_chain() {
        let lc = lend_chain(3);
        let g = &lc.graph;
        let s = setup(&lc);
        let lend = build_lend(g, &s);
        assert_eq!(lend.len(), 3);
        for i in 1..=3 {
            assert_eq!(lend.arcs[&lc.packing[i]].target, lc.packing[i - 1]);
        }
        // Gain of the first member is v0 c1.
        assert_eq!(lend.arcs[&lc.packing[1]].gain, g.edge_id(1, 3).unwrap());
    }

    #[test]
    fn no_arcs_without_bridges() {
        let g = bowtie();
        let p = Packing::from_triangles(&g, &[0, 1]).unwrap();
        assert!(build_lend(&g, &build_structure(&g, &p)).is_empty());
    }

    #[test]
    fn chain_of_each_length() {
        for len in 1..=5 {
            let lc = lend_chain(len);
            let g = &lc.graph;
            let s = setup(&lc);
            let lend = build_lend(g, &s);
            let cs = initial_half_charge(g, &s).unwrap();
            let (set, cs) = build_chains(g, &s, &lend, cs, TailNaming::default());
            assert_eq!(set.chains.len(), 1);
            let c = &set.chains[0];
            assert_eq!(c.members, lc.packing);
            assert_eq!(c.size(), len);
            assert_eq!(c.status, ChainStatus::Unsatisfied);
            // Head edges all carry a half.
            for e in g.triangle(lc.packing[0]).edges {
                assert_eq!(cs.fixed_value(e), HALF);
            }
            // Each gain edge carries a half, and the tail leaves one off-base edge empty.
            for &e in &c.gains {
                assert_eq!(cs.fixed_value(e), HALF);
            }
            let (keep, empty) = c.tail_split.unwrap();
            let f_fix = cs.f_fix(g);
            assert_eq!(f_fix.num[keep as usize], 0);
            assert_eq!(f_fix.num[empty as usize], 0);
            assert_eq!(cs.f(g).num[keep as usize], HALF);
            assert_eq!(cs.f(g).num[empty as usize], 0);
            let tail = lc.packing[len];
            assert_eq!(f_fix.num[s.info(tail).base[0] as usize], HALF);
            for &t in &lc.packing {
                assert_eq!(cs.spent(t), 4);
            }
        }
    }
}
