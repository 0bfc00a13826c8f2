//! Demanding triangles and the greedy discharge and pin pass that covers them.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{ChainSet, ChargeState, Order2Error, HALF};
use crate::charge::k4_edges;
use crate::graph::{EdgeId, Graph, TriId};
use crate::structure::{Attachment, SolutionStructure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Operation {
    Discharge { from: TriId, edge: EdgeId },
    Pin { tri: TriId, edge: EdgeId },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DemandState {
    /// Demanding triangles not yet covered.
    pub demanding: BTreeSet<TriId>,
    /// The demanding set as first computed.
    pub initial: BTreeSet<TriId>,
    /// Type-0 triangles with an unspent extra half, unsatisfied tails and unsatisfied type-3
    /// triangles outside every chain, minus those already used.
    pub free: BTreeSet<TriId>,
    pub log: Vec<Operation>,
    used: BTreeSet<TriId>,
}

impl DemandState {
    /// Demanding triangles through `e`.
    pub fn through(&self, g: &Graph, e: EdgeId) -> Vec<TriId> {
        self.demanding
            .iter()
            .copied()
            .filter(|&t| g.triangle(t).has_edge(e))
            .collect()
    }

    fn around(&self, g: &Graph, psi: TriId) -> BTreeSet<TriId> {
        g.triangle(psi)
            .edges
            .iter()
            .flat_map(|&e| self.through(g, e))
            .collect()
    }
}

fn free_13(s: &SolutionStructure, chains: &ChainSet) -> BTreeSet<TriId> {
    let mut out = chains.unsatisfied_tails();
    out.extend(
        s.packed
            .iter()
            .filter(|(t, i)| i.ty == 3 && chains.chain_of(**t).is_none())
            .map(|(&t, _)| t),
    );
    out
}

pub fn compute_demanding(g: &Graph, s: &SolutionStructure, chains: &ChainSet) -> DemandState {
    let free13 = free_13(s, chains);
    let half_edges = chains.half_edges();
    let demanding: BTreeSet<TriId> = s
        .nonsol
        .keys()
        .copied()
        .filter(|&t| {
            let edges = g.triangle(t).edges;
            let mut type0 = 0;
            for e in edges {
                if half_edges.contains(&e) {
                    return false;
                }
                let Some(o) = s.owner(e) else { continue };
                let info = s.info(o);
                match info.ty {
                    0 => type0 += 1,
                    1 if info.base.contains(&e) => return false,
                    _ if !free13.contains(&o) => return false,
                    _ => {}
                }
            }
            type0 == 1
        })
        .collect();
    let mut free = free13;
    free.extend(s.packed.iter().filter(|(_, i)| i.ty == 0).map(|(&t, _)| t));
    DemandState {
        initial: demanding.clone(),
        demanding,
        free,
        log: Vec::new(),
        used: BTreeSet::new(),
    }
}

/// For every type-0 triangle, its demanding triangles either share one of its edges, or are the
/// three other faces of a K4 with two doubly attached and one hollow, or three hollow.
/// Returns the edges around the first type-0 triangle where this fails.
pub fn check_demand_lemma(g: &Graph, s: &SolutionStructure, ds: &DemandState) -> Option<Vec<EdgeId>> {
    for (&psi, _) in s.packed.iter().filter(|(_, i)| i.ty == 0) {
        let around: Vec<TriId> = ds.around(g, psi).into_iter().collect();
        if around.len() < 2 || shape_ok(g, s, psi, &around) {
            continue;
        }
        let mut edges: Vec<EdgeId> = around
            .iter()
            .chain(std::iter::once(&psi))
            .flat_map(|&t| g.triangle(t).edges)
            .collect();
        edges.sort_unstable();
        edges.dedup();
        return Some(edges);
    }
    None
}

fn shape_ok(g: &Graph, s: &SolutionStructure, psi: TriId, around: &[TriId]) -> bool {
    let shared = |a: TriId, b: TriId| {
        let tb = g.triangle(b);
        g.triangle(a).edges.iter().filter(|&&e| tb.has_edge(e)).count()
    };
    for (i, &a) in around.iter().enumerate() {
        if around[i + 1..].iter().any(|&b| shared(a, b) != 1) {
            return false;
        }
    }
    let on_psi: BTreeSet<EdgeId> = around
        .iter()
        .flat_map(|&t| g.triangle(t).edges)
        .filter(|&e| g.triangle(psi).has_edge(e))
        .collect();
    if on_psi.len() == 1 {
        return true;
    }
    let verts: BTreeSet<u32> = around.iter().flat_map(|&t| g.triangle(t).verts).collect();
    if around.len() != 3 || on_psi.len() != 3 || verts.len() != 4 {
        return false;
    }
    let hollow = around
        .iter()
        .filter(|&&t| s.nonsol[&t].attachment == Attachment::Hollow)
        .count();
    let doubly = around
        .iter()
        .filter(|&&t| s.nonsol[&t].attachment == Attachment::Doubly)
        .count();
    (hollow, doubly) == (1, 2) || hollow == 3
}

fn drop_covered(
    g: &Graph,
    cs: &ChargeState,
    ds: &mut DemandState,
    candidates: impl IntoIterator<Item = TriId>,
) {
    let f = cs.f(g);
    for t in candidates {
        if f.covers(g, t) {
            ds.demanding.remove(&t);
        }
    }
}

/// Spends the extra half of a type-0 triangle on `e` and drops the demanding triangles through
/// `e` that are now covered.
pub fn discharge(
    g: &Graph,
    s: &SolutionStructure,
    cs: &mut ChargeState,
    ds: &mut DemandState,
    psi: TriId,
    e: EdgeId,
) -> Result<(), Order2Error> {
    if s.packed.get(&psi).map(|i| i.ty) != Some(0) {
        return Err(Order2Error::NotFree(psi));
    }
    if !ds.free.remove(&psi) {
        return Err(Order2Error::AlreadySpent(psi));
    }
    cs.fix(psi, e, HALF);
    ds.used.insert(psi);
    ds.log.push(Operation::Discharge { from: psi, edge: e });
    let through = ds.through(g, e);
    drop_covered(g, cs, ds, through);
    Ok(())
}

/// Rotates the K4 charge of a free type-1 or type-3 triangle so that `e` and the spoke opposite
/// to it carry nothing, then drops the covered demanding triangles around the triangle that
/// avoid `e`.
pub fn pin(
    g: &Graph,
    s: &SolutionStructure,
    cs: &mut ChargeState,
    ds: &mut DemandState,
    psi: TriId,
    e: EdgeId,
) -> Result<(), Order2Error> {
    let info = s.packed.get(&psi).ok_or(Order2Error::NotFree(psi))?;
    if info.ty == 1 && info.base.contains(&e) {
        return Err(Order2Error::PinBaseEdge { tri: psi, edge: e });
    }
    if ds.used.contains(&psi) {
        return Err(Order2Error::AlreadyPinned(psi));
    }
    let tri = g.triangle(psi);
    if info.ty == 0 || !ds.free.contains(&psi) || !tri.has_edge(e) {
        return Err(Order2Error::NotFree(psi));
    }
    let anchor = info.anchor.ok_or(Order2Error::NotFree(psi))?;
    let (x, y) = g.endpoints(e);
    let v = *tri.verts.iter().find(|&&v| v != x && v != y).unwrap();
    let opposite = g.edge_id(v, anchor).unwrap();
    let already: Vec<EdgeId> = cs.fixed_by(psi).iter().map(|x| x.0).collect();
    cs.clear_flexible(psi);
    for k in k4_edges(g, psi, anchor) {
        if k != e && k != opposite && !already.contains(&k) {
            cs.fix(psi, k, HALF);
        }
    }
    ds.free.remove(&psi);
    ds.used.insert(psi);
    ds.log.push(Operation::Pin { tri: psi, edge: e });
    let skip: BTreeSet<TriId> = ds.through(g, e).into_iter().collect();
    let others: Vec<TriId> = ds.around(g, psi).difference(&skip).copied().collect();
    drop_covered(g, cs, ds, others);
    Ok(())
}

fn pin_candidates(g: &Graph, s: &SolutionStructure, psi: TriId) -> Vec<EdgeId> {
    let info = s.info(psi);
    g.triangle(psi)
        .edges
        .into_iter()
        .filter(|e| info.ty != 1 || !info.base.contains(e))
        .collect()
}

fn stuck(g: &Graph, ds: &DemandState) -> Order2Error {
    let mut edges: Vec<EdgeId> = ds.demanding.iter().flat_map(|&t| g.triangle(t).edges).collect();
    edges.sort_unstable();
    edges.dedup();
    Order2Error::ExistenceInAViolated { edges }
}

/// Covers every demanding triangle by discharging type-0 triangles and pinning free type-1 and
/// type-3 triangles, each at most once.
pub fn discharge_and_pin(
    g: &Graph,
    s: &SolutionStructure,
    cs: &mut ChargeState,
    ds: &mut DemandState,
) -> Result<(), Order2Error> {
    let owner_free = |ds: &DemandState, e: EdgeId| s.owner(e).filter(|o| ds.free.contains(o));
    while !ds.demanding.is_empty() {
        let single = ds.free.iter().copied().filter(|&t| s.ty(t) == 0).find_map(|t| {
            let hit: Vec<EdgeId> = g
                .triangle(t)
                .edges
                .into_iter()
                .filter(|&e| !ds.through(g, e).is_empty())
                .collect();
            (hit.len() == 1).then(|| (t, hit[0]))
        });
        if let Some((t, e)) = single {
            discharge(g, s, cs, ds, t, e)?;
            continue;
        }
        let Some(mut psi) = ds
            .free
            .iter()
            .copied()
            .find(|&t| s.ty(t) != 0 && !ds.around(g, t).is_empty())
        else {
            return Err(stuck(g, ds));
        };
        let mut critical: Option<EdgeId> = None;
        loop {
            let options: Vec<EdgeId> = pin_candidates(g, s, psi)
                .into_iter()
                .filter(|&e| Some(e) != critical)
                .collect();
            if let Some(&e) = options.iter().find(|&&e| ds.through(g, e).is_empty()) {
                pin(g, s, cs, ds, psi, e)?;
                break;
            }
            let e = *options.first().ok_or_else(|| stuck(g, ds))?;
            pin(g, s, cs, ds, psi, e)?;
            let Some(&t) = ds.through(g, e).first() else { break };
            let Some(&e0) = g
                .triangle(t)
                .edges
                .iter()
                .find(|&&x| s.owner(x).is_some_and(|o| s.ty(o) == 0))
            else {
                return Err(stuck(g, ds));
            };
            let psi0 = s.owner(e0).unwrap();
            if !ds.free.contains(&psi0) {
                return Err(stuck(g, ds));
            }
            discharge(g, s, cs, ds, psi0, e)?;
            let tri0 = g.triangle(psi0);
            let Some(&w) = tri0.verts.iter().find(|&&v| g.triangle(psi).has_vertex(v)) else {
                break;
            };
            let far = tri0.opposite_edge(w);
            let Some(&next_t) = ds.through(g, far).first() else {
                break;
            };
            let Some(p) = g
                .triangle(next_t)
                .edges
                .into_iter()
                .filter(|&x| s.owner(x).is_some_and(|o| s.ty(o) != 0))
                .find(|&x| owner_free(ds, x).is_some())
            else {
                return Err(stuck(g, ds));
            };
            critical = Some(p);
            psi = s.owner(p).unwrap();
        }
    }
    Ok(())
}
