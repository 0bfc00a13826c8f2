//! Edge-disjoint triangle packings and improving-swap local search.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, Graph, TriId};

pub const DEFAULT_MAX_SWAP: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PackingError {
    #[error("triangle {0} is not a triangle of the graph")]
    UnknownTriangle(TriId),
    #[error("triangles {0} and {1} share an edge")]
    Overlap(TriId, TriId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packing {
    tris: BTreeSet<TriId>,
    owner: Vec<Option<TriId>>,
}

/// Removing `removed` and inserting `added` yields a packing one triangle larger.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapCertificate {
    pub removed: Vec<TriId>,
    pub added: Vec<TriId>,
}

impl Packing {
    pub fn empty(g: &Graph) -> Self {
        Packing {
            tris: BTreeSet::new(),
            owner: vec![None; g.m()],
        }
    }

    pub fn from_triangles(g: &Graph, ids: &[TriId]) -> Result<Self, PackingError> {
        let mut p = Packing::empty(g);
        for &t in ids {
            if t as usize >= g.triangles().len() {
                return Err(PackingError::UnknownTriangle(t));
            }
            if let Some(o) = g.triangle(t).edges.iter().find_map(|&e| p.owner(e)) {
                return Err(PackingError::Overlap(o, t));
            }
            p.insert(g, t);
        }
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.tris.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tris.is_empty()
    }

    pub fn contains(&self, t: TriId) -> bool {
        self.tris.contains(&t)
    }

    /// Packed triangles in ascending id order.
    pub fn triangles(&self) -> impl Iterator<Item = TriId> + '_ {
        self.tris.iter().copied()
    }

    pub fn owner(&self, e: EdgeId) -> Option<TriId> {
        self.owner[e as usize]
    }

    pub fn is_used(&self, e: EdgeId) -> bool {
        self.owner[e as usize].is_some()
    }

    pub fn is_free_triangle(&self, g: &Graph, t: TriId) -> bool {
        g.triangle(t).edges.iter().all(|&e| !self.is_used(e))
    }

    fn insert(&mut self, g: &Graph, t: TriId) {
        for &e in &g.triangle(t).edges {
            debug_assert!(self.owner[e as usize].is_none());
            self.owner[e as usize] = Some(t);
        }
        self.tris.insert(t);
    }

    fn remove(&mut self, g: &Graph, t: TriId) {
        for &e in &g.triangle(t).edges {
            self.owner[e as usize] = None;
        }
        self.tris.remove(&t);
    }

    pub fn apply(&mut self, g: &Graph, swap: &SwapCertificate) -> Result<(), PackingError> {
        let mut next = self.clone();
        for &t in &swap.removed {
            if !next.contains(t) {
                return Err(PackingError::UnknownTriangle(t));
            }
            next.remove(g, t);
        }
        for &t in &swap.added {
            if let Some(o) = g.triangle(t).edges.iter().find_map(|&e| next.owner(e)) {
                return Err(PackingError::Overlap(o, t));
            }
            next.insert(g, t);
        }
        *self = next;
        Ok(())
    }
}

/// A maximal packing built by scanning triangles in a seeded random order.
pub fn greedy_packing(g: &Graph, seed: u64) -> Packing {
    let mut order: Vec<TriId> = (0..g.triangles().len() as TriId).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut p = Packing::empty(g);
    for t in order {
        if p.is_free_triangle(g, t) {
            p.insert(g, t);
        }
    }
    p
}

/// Packed triangles indexed densely, with adjacency when some triangle shares an edge with both.
struct ConflictGraph {
    nodes: Vec<TriId>,
    adj: Vec<Vec<usize>>,
}

impl ConflictGraph {
    fn new(g: &Graph, p: &Packing) -> Self {
        let nodes: Vec<TriId> = p.triangles().collect();
        let pos = |t: TriId| nodes.binary_search(&t).unwrap();
        let mut sets = vec![BTreeSet::new(); nodes.len()];
        for t in g.triangles() {
            let owners: BTreeSet<usize> = t.edges.iter().filter_map(|&e| p.owner(e)).map(pos).collect();
            for &a in &owners {
                for &b in &owners {
                    if a != b {
                        sets[a].insert(b);
                    }
                }
            }
        }
        ConflictGraph {
            nodes,
            adj: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    fn within(&self, seeds: &[usize], radius: usize) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut frontier: Vec<usize> = seeds.to_vec();
        for &s in seeds {
            seen[s] = true;
        }
        for _ in 0..radius {
            let mut next = Vec::new();
            for u in frontier {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        seen
    }
}

struct Searcher<'a> {
    g: &'a Graph,
    p: &'a Packing,
    cg: &'a ConflictGraph,
    allowed: &'a [bool],
    size: usize,
}

impl Searcher<'_> {
    /// Enumerates each connected node subset of exactly `self.size` nodes once.
    fn run(&self) -> Option<SwapCertificate> {
        for v in 0..self.cg.nodes.len() {
            if !self.allowed[v] {
                continue;
            }
            let ext: Vec<usize> = self.cg.adj[v]
                .iter()
                .copied()
                .filter(|&u| u > v && self.allowed[u])
                .collect();
            let mut sub = vec![v];
            if let Some(c) = self.extend(&mut sub, ext, v) {
                return Some(c);
            }
        }
        None
    }

    fn extend(&self, sub: &mut Vec<usize>, mut ext: Vec<usize>, v: usize) -> Option<SwapCertificate> {
        if sub.len() == self.size {
            return self.try_subset(sub);
        }
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            for &u in &self.cg.adj[w] {
                if u > v
                    && self.allowed[u]
                    && !sub.contains(&u)
                    && !next.contains(&u)
                    && !sub.iter().any(|&s| self.cg.adj[s].contains(&u))
                {
                    next.push(u);
                }
            }
            sub.push(w);
            let found = self.extend(sub, next, v);
            sub.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }

    fn try_subset(&self, sub: &[usize]) -> Option<SwapCertificate> {
        let removed: Vec<TriId> = sub.iter().map(|&i| self.cg.nodes[i]).collect();
        let in_s = |e: EdgeId| match self.p.owner(e) {
            None => true,
            Some(o) => removed.contains(&o),
        };
        let mut cands = BTreeSet::new();
        for &s in &removed {
            for &e in &self.g.triangle(s).edges {
                for &t in self.g.triangles_on_edge(e) {
                    if !self.p.contains(t) && self.g.triangle(t).edges.iter().all(|&f| in_s(f)) {
                        cands.insert(t);
                    }
                }
            }
        }
        let cands: Vec<TriId> = cands.into_iter().collect();
        let need = removed.len() + 1;
        if cands.len() < need {
            return None;
        }
        let mut chosen = Vec::new();
        let mut used = HashSet::new();
        if pick(self.g, &cands, 0, need, &mut chosen, &mut used) {
            let mut removed = removed;
            removed.sort_unstable();
            chosen.sort_unstable();
            Some(SwapCertificate {
                removed,
                added: chosen,
            })
        } else {
            None
        }
    }
}

fn pick(
    g: &Graph,
    cands: &[TriId],
    from: usize,
    need: usize,
    chosen: &mut Vec<TriId>,
    used: &mut HashSet<EdgeId>,
) -> bool {
    if chosen.len() == need {
        return true;
    }
    for i in from..cands.len() {
        if chosen.len() + (cands.len() - i) < need {
            return false;
        }
        let t = g.triangle(cands[i]);
        if t.edges.iter().any(|e| used.contains(e)) {
            continue;
        }
        chosen.push(cands[i]);
        used.extend(t.edges);
        if pick(g, cands, i + 1, need, chosen, used) {
            return true;
        }
        for e in &t.edges {
            used.remove(e);
        }
        chosen.pop();
    }
    false
}

fn free_triangle(g: &Graph, p: &Packing) -> Option<SwapCertificate> {
    (0..g.triangles().len() as TriId)
        .find(|&t| !p.contains(t) && p.is_free_triangle(g, t))
        .map(|t| SwapCertificate {
            removed: vec![],
            added: vec![t],
        })
}

fn search(
    g: &Graph,
    p: &Packing,
    cg: &ConflictGraph,
    allowed: &[bool],
    max_swap: usize,
) -> Option<SwapCertificate> {
    (1..=max_swap).find_map(|size| {
        Searcher {
            g,
            p,
            cg,
            allowed,
            size,
        }
        .run()
    })
}

/// Finds a swap removing at most `max_swap` packed triangles that enlarges the packing.
pub fn improve_packing(g: &Graph, p: &Packing, max_swap: usize) -> Option<SwapCertificate> {
    if let Some(c) = free_triangle(g, p) {
        return Some(c);
    }
    let cg = ConflictGraph::new(g, p);
    let allowed = vec![true; cg.nodes.len()];
    search(g, p, &cg, &allowed, max_swap)
}

/// Like [`improve_packing`], restricted to packed triangles within two conflict hops of `focus`.
pub fn targeted_swap(g: &Graph, p: &Packing, focus: &[EdgeId], max_swap: usize) -> Option<SwapCertificate> {
    if focus.is_empty() {
        return None;
    }
    if let Some(c) = free_triangle(g, p) {
        return Some(c);
    }
    let cg = ConflictGraph::new(g, p);
    let seeds: Vec<usize> = focus_owners(g, p, focus)
        .into_iter()
        .map(|o| cg.nodes.binary_search(&o).unwrap())
        .collect();
    let allowed = cg.within(&seeds, 2);
    search(g, p, &cg, &allowed, max_swap)
}

fn focus_owners(g: &Graph, p: &Packing, focus: &[EdgeId]) -> BTreeSet<TriId> {
    let mut out = BTreeSet::new();
    for &e in focus {
        let near = g.triangles_on_edge(e).iter().flat_map(|&t| g.triangle(t).edges);
        out.extend(std::iter::once(e).chain(near).filter_map(|f| p.owner(f)));
    }
    out
}

fn collect_picks(
    g: &Graph,
    cands: &[TriId],
    from: usize,
    need: usize,
    chosen: &mut Vec<TriId>,
    out: &mut Vec<Vec<TriId>>,
    limit: usize,
) {
    if chosen.len() == need {
        out.push(chosen.clone());
        return;
    }
    for i in from..cands.len() {
        if out.len() >= limit {
            return;
        }
        let t = g.triangle(cands[i]);
        if chosen
            .iter()
            .any(|&c| g.triangle(c).edges.iter().any(|e| t.has_edge(*e)))
        {
            continue;
        }
        chosen.push(cands[i]);
        collect_picks(g, cands, i + 1, need, chosen, out, limit);
        chosen.pop();
    }
}

/// Swaps near `focus` that trade `r <= max_swap` packed triangles for `r` others, keeping the
/// packing size. At most `limit` swaps are listed per removed set.
pub fn sideways_swaps(
    g: &Graph,
    p: &Packing,
    focus: &[EdgeId],
    max_swap: usize,
    limit: usize,
) -> Vec<SwapCertificate> {
    let owners: Vec<TriId> = focus_owners(g, p, focus).into_iter().collect();
    let mut out = Vec::new();
    let mut subsets: Vec<Vec<TriId>> = owners.iter().map(|&t| vec![t]).collect();
    for size in 1..=max_swap {
        for removed in &subsets {
            let in_s = |e: EdgeId| p.owner(e).is_none_or(|o| removed.contains(&o));
            let cands: BTreeSet<TriId> = removed
                .iter()
                .flat_map(|&r| g.triangle(r).edges)
                .flat_map(|e| g.triangles_on_edge(e).iter().copied())
                .filter(|&t| !p.contains(t) && g.triangle(t).edges.iter().all(|&f| in_s(f)))
                .collect();
            let cands: Vec<TriId> = cands.into_iter().collect();
            let mut picks = Vec::new();
            collect_picks(g, &cands, 0, size, &mut Vec::new(), &mut picks, limit);
            out.extend(picks.into_iter().map(|added| SwapCertificate {
                removed: removed.clone(),
                added,
            }));
        }
        subsets = subsets
            .iter()
            .flat_map(|s| {
                let last = *s.last().unwrap();
                owners.iter().filter(move |&&o| o > last).map(move |&o| {
                    let mut n = s.clone();
                    n.push(o);
                    n
                })
            })
            .collect();
    }
    out
}

/// Greedy packing followed by improving swaps until none of size at most `max_swap` remains.
pub fn local_search_packing(g: &Graph, seed: u64, max_swap: usize) -> Packing {
    let mut p = greedy_packing(g, seed);
    improve_to_local_optimum(g, &mut p, max_swap);
    p
}

pub fn improve_to_local_optimum(g: &Graph, p: &mut Packing, max_swap: usize) -> usize {
    let mut steps = 0;
    while let Some(c) = improve_packing(g, p, max_swap) {
        p.apply(g, &c).expect("search yields valid swaps");
        steps += 1;
    }
    steps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{bowtie, complete};

    #[test]
    fn bowtie_free_triangle() {
        let g = bowtie();
        let t = g.triangle_id(0, 1, 2).unwrap();
        let p = Packing::from_triangles(&g, &[t]).unwrap();
        let c = improve_packing(&g, &p, 5).unwrap();
        assert!(c.removed.is_empty());
        assert_eq!(c.added, vec![g.triangle_id(0, 3, 4).unwrap()]);
    }

    #[test]
    fn k4_single_is_locally_optimal() {
        let g = complete(4);
        let p = Packing::from_triangles(&g, &[g.triangle_id(0, 1, 2).unwrap()]).unwrap();
        assert_eq!(improve_packing(&g, &p, 5), None);
    }

    #[test]
    fn k6_maximal_pair_improves_to_four() {
        let g = complete(6);
        let ids = [g.triangle_id(0, 1, 2).unwrap(), g.triangle_id(3, 4, 5).unwrap()];
        let mut p = Packing::from_triangles(&g, &ids).unwrap();
        assert_eq!(free_triangle(&g, &p), None);
        let c = improve_packing(&g, &p, 5).unwrap();
        assert_eq!(c.added.len(), c.removed.len() + 1);
        p.apply(&g, &c).unwrap();
        assert_eq!(p.len(), 3);
        improve_to_local_optimum(&g, &mut p, 5);
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn overlap_rejected() {
        let g = complete(4);
        let a = g.triangle_id(0, 1, 2).unwrap();
        let b = g.triangle_id(0, 1, 3).unwrap();
        assert_eq!(
            Packing::from_triangles(&g, &[a, b]),
            Err(PackingError::Overlap(a, b))
        );
    }

    #[test]
    fn empty_focus() {
        let g = complete(6);
        let p = greedy_packing(&g, 1);
        assert_eq!(targeted_swap(&g, &p, &[], 5), None);
    }

    #[test]
    fn greedy_is_deterministic_and_maximal() {
        let g = complete(7);
        let a = greedy_packing(&g, 9);
        assert_eq!(a, greedy_packing(&g, 9));
        assert_eq!(free_triangle(&g, &a), None);
    }

    #[test]
    fn sideways_keeps_size() {
        let g = complete(4);
        let p = Packing::from_triangles(&g, &[0]).unwrap();
        let swaps = sideways_swaps(&g, &p, &g.triangle(0).edges, 2, 10);
        assert_eq!(swaps.len(), 3);
        for c in swaps {
            let mut q = p.clone();
            q.apply(&g, &c).unwrap();
            assert_eq!(q.len(), 1);
            assert!(!q.contains(0));
        }
    }
}
