//! Classification of triangles relative to a packing, and checks of the local-optimality
//! properties the charging schemes rely on.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::graph::{EdgeId, Graph, TriId, VertexId};
use crate::packing::Packing;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Attachment {
    Singly,
    Doubly,
    Hollow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedInfo {
    /// Number of base edges; 2 only in packings that are not locally optimal.
    pub ty: u8,
    pub base: Vec<EdgeId>,
    /// Common apex of the singles for type 3, the apex of the only single otherwise.
    pub anchor: Option<VertexId>,
    pub cl_sin: Vec<TriId>,
    pub cl_dou: Vec<TriId>,
    pub cl_hol: Vec<TriId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonSolutionInfo {
    pub attachment: Attachment,
    /// Owning packed triangles, ordered to match `signature`.
    pub owners: Vec<TriId>,
    pub signature: Vec<u8>,
}

/// Two type-1 triangles meeting at `common` whose singles share exactly the stem `common`-`anchor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pair {
    pub first: TriId,
    pub second: TriId,
    pub defining: TriId,
    pub common: VertexId,
    pub anchor: VertexId,
    pub stem: EdgeId,
}

#[derive(Debug, Clone)]
pub struct SolutionStructure {
    pub packed: BTreeMap<TriId, PackedInfo>,
    pub nonsol: BTreeMap<TriId, NonSolutionInfo>,
    /// Triangles sharing no edge with the packing.
    pub unattached: Vec<TriId>,
    pub pairs: Vec<Pair>,
    owner: Vec<Option<TriId>>,
}

pub fn build_structure(g: &Graph, p: &Packing) -> SolutionStructure {
    let owner: Vec<Option<TriId>> = (0..g.m() as EdgeId).map(|e| p.owner(e)).collect();
    let mut packed: BTreeMap<TriId, PackedInfo> = p
        .triangles()
        .map(|t| {
            (
                t,
                PackedInfo {
                    ty: 0,
                    base: Vec::new(),
                    anchor: None,
                    cl_sin: Vec::new(),
                    cl_dou: Vec::new(),
                    cl_hol: Vec::new(),
                },
            )
        })
        .collect();
    let mut raw = Vec::new();
    let mut unattached = Vec::new();
    for (i, t) in g.triangles().iter().enumerate() {
        let id = i as TriId;
        if p.contains(id) {
            continue;
        }
        let owners: Vec<TriId> = t.edges.iter().filter_map(|&e| owner[e as usize]).collect();
        let attachment = match owners.len() {
            0 => {
                unattached.push(id);
                continue;
            }
            1 => Attachment::Singly,
            2 => Attachment::Doubly,
            _ => Attachment::Hollow,
        };
        for &o in &owners {
            let info = packed.get_mut(&o).unwrap();
            match attachment {
                Attachment::Singly => info.cl_sin.push(id),
                Attachment::Doubly => info.cl_dou.push(id),
                Attachment::Hollow => info.cl_hol.push(id),
            }
        }
        raw.push((id, attachment, owners));
    }
    for info in packed.values_mut() {
        let base: BTreeSet<EdgeId> = info.cl_sin.iter().map(|&w| single_base(g, &owner, w)).collect();
        info.base = base.into_iter().collect();
        info.ty = info.base.len() as u8;
        let apexes: BTreeSet<VertexId> = info
            .cl_sin
            .iter()
            .map(|&w| g.triangle(w).apex(g, single_base(g, &owner, w)))
            .collect();
        info.anchor = match info.ty {
            1 if info.cl_sin.len() == 1 => apexes.first().copied(),
            3 if apexes.len() == 1 => apexes.first().copied(),
            _ => None,
        };
    }
    let mut nonsol = BTreeMap::new();
    for (id, attachment, mut owners) in raw {
        owners.sort_by_key(|o| (packed[o].ty, *o));
        let signature = owners.iter().map(|o| packed[o].ty).collect();
        nonsol.insert(
            id,
            NonSolutionInfo {
                attachment,
                owners,
                signature,
            },
        );
    }
    let mut s = SolutionStructure {
        packed,
        nonsol,
        unattached,
        pairs: Vec::new(),
        owner,
    };
    s.pairs = s
        .nonsol
        .iter()
        .filter(|(_, n)| n.attachment == Attachment::Doubly && n.signature == [1, 1])
        .filter_map(|(&t, _)| s.pair_shape(g, t))
        .collect();
    s
}

fn single_base(g: &Graph, owner: &[Option<TriId>], w: TriId) -> EdgeId {
    *g.triangle(w)
        .edges
        .iter()
        .find(|&&e| owner[e as usize].is_some())
        .expect("a single has one solution edge")
}

impl SolutionStructure {
    pub fn info(&self, psi: TriId) -> &PackedInfo {
        &self.packed[&psi]
    }

    pub fn owner(&self, e: EdgeId) -> Option<TriId> {
        self.owner[e as usize]
    }

    pub fn is_solution_edge(&self, e: EdgeId) -> bool {
        self.owner[e as usize].is_some()
    }

    pub fn ty(&self, psi: TriId) -> u8 {
        self.packed[&psi].ty
    }

    /// Type-1 triangles with exactly one single.
    pub fn has_sole_single(&self, psi: TriId) -> bool {
        let i = &self.packed[&psi];
        i.ty == 1 && i.cl_sin.len() == 1
    }

    /// The anchor if defined, else the smallest apex among the singles.
    pub fn some_anchor(&self, g: &Graph, psi: TriId) -> Option<VertexId> {
        let i = &self.packed[&psi];
        i.anchor.or_else(|| {
            i.cl_sin
                .iter()
                .map(|&w| g.triangle(w).apex(g, single_base(g, &self.owner, w)))
                .min()
        })
    }

    /// The two non-solution edges of a single, ordered by edge id.
    pub fn legs(&self, g: &Graph, w: TriId) -> [EdgeId; 2] {
        let mut legs = g
            .triangle(w)
            .edges
            .iter()
            .copied()
            .filter(|&e| !self.is_solution_edge(e));
        let mut out = [legs.next().unwrap(), legs.next().unwrap()];
        out.sort_unstable();
        out
    }

    fn pair_shape(&self, g: &Graph, t: TriId) -> Option<Pair> {
        let n = &self.nonsol[&t];
        let (p1, p2) = (n.owners[0], n.owners[1]);
        let tri = g.triangle(t);
        if [p1, p2]
            .iter()
            .any(|&p| self.info(p).base.iter().any(|&b| tri.has_edge(b)))
        {
            return None;
        }
        if [p1, p2]
            .iter()
            .any(|&p| self.has_sole_single(p) && tri.has_vertex(self.info(p).anchor.unwrap()))
        {
            return None;
        }
        if !self.has_sole_single(p1) || !self.has_sole_single(p2) {
            return None;
        }
        let common = *g
            .triangle(p1)
            .verts
            .iter()
            .find(|&&v| g.triangle(p2).has_vertex(v))?;
        let (a1, a2) = (self.info(p1).anchor?, self.info(p2).anchor?);
        if a1 != a2 {
            return None;
        }
        let stem = g.edge_id(common, a1)?;
        let w1 = g.triangle(self.info(p1).cl_sin[0]);
        let w2 = g.triangle(self.info(p2).cl_sin[0]);
        let shared: Vec<EdgeId> = w1.edges.iter().copied().filter(|&e| w2.has_edge(e)).collect();
        if shared != [stem] {
            return None;
        }
        Some(Pair {
            first: p1.min(p2),
            second: p1.max(p2),
            defining: t,
            common,
            anchor: a1,
            stem,
        })
    }

    /// JSON view of the classification for debugging.
    pub fn debug_json(&self, g: &Graph) -> serde_json::Value {
        let edge = |e: &EdgeId| g.endpoints(*e);
        let packed: Vec<_> = self
            .packed
            .iter()
            .map(|(&t, i)| {
                serde_json::json!({
                    "vertices": g.triangle(t).verts,
                    "type": i.ty,
                    "base_edges": i.base.iter().map(edge).collect::<Vec<_>>(),
                    "anchor": i.anchor,
                    "singles": i.cl_sin.len(),
                    "doubles": i.cl_dou.len(),
                    "hollows": i.cl_hol.len(),
                })
            })
            .collect();
        let nonsol: Vec<_> = self
            .nonsol
            .iter()
            .map(|(&t, n)| {
                serde_json::json!({
                    "vertices": g.triangle(t).verts,
                    "attachment": n.attachment,
                    "signature": n.signature,
                })
            })
            .collect();
        serde_json::json!({ "packed": packed, "non_solution": nonsol })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    /// A non-packed triangle shares no edge with the packing.
    Unattached,
    Type2,
    Type3NotK4,
    DoublyAttached33,
    PairStructure,
    Hollow333,
    HollowType1Structure,
}

impl ViolationKind {
    /// The charging engines cannot run at all. Other kinds leave the verdict to verification.
    pub fn blocks_charging(self) -> bool {
        matches!(
            self,
            ViolationKind::Unattached | ViolationKind::Type2 | ViolationKind::Type3NotK4
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureViolation {
    pub kind: ViolationKind,
    pub triangles: Vec<TriId>,
}

fn singles_pair_with_distinct_apex(g: &Graph, s: &SolutionStructure, psi: TriId) -> Vec<TriId> {
    let sin = &s.info(psi).cl_sin;
    for (i, &x) in sin.iter().enumerate() {
        for &y in &sin[i + 1..] {
            let bx = single_base(g, &s.owner, x);
            let by = single_base(g, &s.owner, y);
            if bx != by && g.triangle(x).apex(g, bx) != g.triangle(y).apex(g, by) {
                return vec![x, y];
            }
        }
    }
    Vec::new()
}

pub fn check_structure(g: &Graph, s: &SolutionStructure) -> Vec<StructureViolation> {
    let mut out = Vec::new();
    for &t in &s.unattached {
        out.push(StructureViolation {
            kind: ViolationKind::Unattached,
            triangles: vec![t],
        });
    }
    for (&psi, info) in &s.packed {
        let kind = match info.ty {
            2 => ViolationKind::Type2,
            3 if info.anchor.is_none() => ViolationKind::Type3NotK4,
            _ => continue,
        };
        let mut triangles = vec![psi];
        triangles.extend(singles_pair_with_distinct_apex(g, s, psi));
        out.push(StructureViolation { kind, triangles });
    }
    for (&t, n) in &s.nonsol {
        let tri = g.triangle(t);
        let has_base = |p: TriId| s.info(p).base.iter().any(|&b| tri.has_edge(b));
        let anchored_in_t = |p: TriId| s.has_sole_single(p) && tri.has_vertex(s.info(p).anchor.unwrap());
        let kind = match (n.attachment, n.signature.as_slice()) {
            (Attachment::Doubly, [3, 3]) => Some(ViolationKind::DoublyAttached33),
            (Attachment::Doubly, [1, 3]) => {
                let p1 = n.owners[0];
                (!has_base(p1) && !anchored_in_t(p1)).then_some(ViolationKind::PairStructure)
            }
            (Attachment::Doubly, [1, 1]) => {
                let ok = n.owners.iter().any(|&p| has_base(p) || anchored_in_t(p))
                    || s.pairs.iter().any(|pr| pr.defining == t);
                (!ok).then_some(ViolationKind::PairStructure)
            }
            (Attachment::Hollow, [3, 3, 3]) => Some(ViolationKind::Hollow333),
            (Attachment::Hollow, [1, _, _]) => {
                let ones: Vec<TriId> = n.owners.iter().copied().filter(|&p| s.ty(p) == 1).collect();
                let base_hit = ones.iter().any(|&p| has_base(p));
                let shared_anchor = ones.iter().enumerate().any(|(i, &a)| {
                    ones[i + 1..].iter().any(|&b| {
                        s.has_sole_single(a) && s.has_sole_single(b) && s.info(a).anchor == s.info(b).anchor
                    })
                });
                (!base_hit && !shared_anchor).then_some(ViolationKind::HollowType1Structure)
            }
            _ => None,
        };
        if let Some(kind) = kind {
            let mut triangles = vec![t];
            triangles.extend(&n.owners);
            out.push(StructureViolation { kind, triangles });
        }
    }
    out
}

/// Edges of every witness triangle.
pub fn violation_to_focus(g: &Graph, v: &StructureViolation) -> Vec<EdgeId> {
    let set: BTreeSet<EdgeId> = v.triangles.iter().flat_map(|&t| g.triangle(t).edges).collect();
    set.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{bowtie, complete};
    use crate::graph::build_graph;
    use crate::packing::local_search_packing;

    fn packing(g: &Graph, tris: &[[VertexId; 3]]) -> Packing {
        let ids: Vec<_> = tris
            .iter()
            .map(|t| g.triangle_id(t[0], t[1], t[2]).unwrap())
            .collect();
        Packing::from_triangles(g, &ids).unwrap()
    }

    #[test]
    fn k4_single_packed_is_type3() {
        let g = complete(4);
        let p = packing(&g, &[[0, 1, 2]]);
        let s = build_structure(&g, &p);
        let i = s.info(g.triangle_id(0, 1, 2).unwrap());
        assert_eq!((i.ty, i.anchor, i.cl_sin.len()), (3, Some(3), 3));
        assert!(check_structure(&g, &s).is_empty());
    }

    #[test]
    fn bowtie_all_type0() {
        let g = bowtie();
        let p = packing(&g, &[[0, 1, 2], [0, 3, 4]]);
        let s = build_structure(&g, &p);
        for i in s.packed.values() {
            assert_eq!(i.ty, 0);
            assert!(i.cl_sin.is_empty() && i.cl_dou.is_empty() && i.cl_hol.is_empty());
        }
    }

    #[test]
    fn pendant_gives_type1() {
        let g = build_graph(4, &[(0, 1), (1, 2), (0, 2), (0, 3), (1, 3)]).unwrap();
        let p = packing(&g, &[[0, 1, 2]]);
        let s = build_structure(&g, &p);
        let i = s.info(g.triangle_id(0, 1, 2).unwrap());
        assert_eq!(i.ty, 1);
        assert_eq!(i.base, vec![g.edge_id(0, 1).unwrap()]);
        assert_eq!(i.anchor, Some(3));
    }

    #[test]
    fn type2_detected() {
        let g = build_graph(5, &[(0, 1), (1, 2), (0, 2), (0, 3), (1, 3), (1, 4), (2, 4)]).unwrap();
        let p = packing(&g, &[[0, 1, 2]]);
        let s = build_structure(&g, &p);
        let v = check_structure(&g, &s);
        assert_eq!(
            v.iter().map(|v| v.kind).collect::<Vec<_>>(),
            vec![ViolationKind::Type2]
        );
        assert_eq!(violation_to_focus(&g, &v[0]).len(), 7);
    }

    #[test]
    fn doubly_attached_33() {
        // Two K4s sharing vertex 0, packed on {0,1,2} and {0,4,5}, plus bridge {0,1,4}.
        let e = [
            (0, 1),
            (0, 2),
            (1, 2),
            (0, 3),
            (1, 3),
            (2, 3),
            (0, 4),
            (0, 5),
            (4, 5),
            (0, 6),
            (4, 6),
            (5, 6),
            (1, 4),
        ];
        let g = build_graph(7, &e).unwrap();
        let p = packing(&g, &[[0, 1, 2], [0, 4, 5]]);
        let s = build_structure(&g, &p);
        let kinds: Vec<_> = check_structure(&g, &s).iter().map(|v| v.kind).collect();
        assert_eq!(kinds, vec![ViolationKind::DoublyAttached33]);
    }

    #[test]
    fn k6_locally_optimal_clean() {
        let g = complete(6);
        for seed in 0..5 {
            let p = local_search_packing(&g, seed, 5);
            let s = build_structure(&g, &p);
            assert!(check_structure(&g, &s).is_empty());
        }
    }
}
