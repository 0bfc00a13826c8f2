//! Simple undirected graphs with cached triangle incidence.

use std::collections::HashMap;

use thiserror::Error;

pub type VertexId = u32;
pub type EdgeId = u32;
pub type TriId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: VertexId, n: usize },
}

/// A triangle with sorted vertices `[a, b, c]` and edge ids in the order `ab, bc, ac`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triangle {
    pub verts: [VertexId; 3],
    pub edges: [EdgeId; 3],
}

impl Triangle {
    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.verts.contains(&v)
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.edges.contains(&e)
    }

    /// The vertex not on edge `e`, which must belong to the triangle.
    pub fn apex(&self, g: &Graph, e: EdgeId) -> VertexId {
        let (u, v) = g.endpoints(e);
        *self
            .verts
            .iter()
            .find(|&&x| x != u && x != v)
            .expect("edge belongs to triangle")
    }

    /// The edge opposite vertex `v`, which must belong to the triangle.
    pub fn opposite_edge(&self, v: VertexId) -> EdgeId {
        let [a, b, _] = self.verts;
        if v == a {
            self.edges[1]
        } else if v == b {
            self.edges[2]
        } else {
            self.edges[0]
        }
    }
}

#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
    adj: Vec<Vec<VertexId>>,
    index: HashMap<(VertexId, VertexId), EdgeId>,
    triangles: Vec<Triangle>,
    tri_index: HashMap<[VertexId; 3], TriId>,
    on_edge: Vec<Vec<TriId>>,
}

fn key(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Builds a graph; edge ids follow input order after canonicalising each pair to `(min, max)`.
pub fn build_graph(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Graph, GraphError> {
    let mut canon = Vec::with_capacity(edges.len());
    let mut index = HashMap::with_capacity(edges.len());
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        for x in [u, v] {
            if x as usize >= n {
                return Err(GraphError::VertexOutOfRange { vertex: x, n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let k = key(u, v);
        if index.insert(k, canon.len() as EdgeId).is_some() {
            return Err(GraphError::DuplicateEdge(k.0, k.1));
        }
        canon.push(k);
        adj[u as usize].push(v);
        adj[v as usize].push(u);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let mut g = Graph {
        n,
        edges: canon,
        adj,
        index,
        triangles: Vec::new(),
        tri_index: HashMap::new(),
        on_edge: Vec::new(),
    };
    g.triangles = enumerate_triangles(&g);
    g.on_edge = vec![Vec::new(); g.edges.len()];
    for (i, t) in g.triangles.iter().enumerate() {
        g.tri_index.insert(t.verts, i as TriId);
        for &e in &t.edges {
            g.on_edge[e as usize].push(i as TriId);
        }
    }
    Ok(g)
}

/// All triangles in lexicographic vertex order, found by intersecting sorted neighbourhoods.
pub fn enumerate_triangles(g: &Graph) -> Vec<Triangle> {
    let mut out = Vec::new();
    for u in 0..g.n as VertexId {
        let nu = &g.adj[u as usize];
        for &v in nu.iter().filter(|&&v| v > u) {
            let nv = &g.adj[v as usize];
            let (mut i, mut j) = (0, 0);
            while i < nu.len() && j < nv.len() {
                match nu[i].cmp(&nv[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        let w = nu[i];
                        if w > v {
                            out.push(Triangle {
                                verts: [u, v, w],
                                edges: [g.index[&(u, v)], g.index[&(v, w)], g.index[&(u, w)]],
                            });
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    out
}

impl Graph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e as usize]
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v as usize]
    }

    pub fn edge_id(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.index.get(&key(u, v)).copied()
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn triangle(&self, t: TriId) -> &Triangle {
        &self.triangles[t as usize]
    }

    pub fn triangle_id(&self, a: VertexId, b: VertexId, c: VertexId) -> Option<TriId> {
        let mut v = [a, b, c];
        v.sort_unstable();
        self.tri_index.get(&v).copied()
    }

    /// Ids of the triangles containing edge `e`, in ascending order.
    pub fn triangles_on_edge(&self, e: EdgeId) -> &[TriId] {
        &self.on_edge[e as usize]
    }

    /// Edge ids with both endpoints in `vs`.
    pub fn induced_edges(&self, vs: &[VertexId]) -> Vec<EdgeId> {
        let mut out = Vec::new();
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                if let Some(e) = self.edge_id(u, v) {
                    out.push(e);
                }
            }
        }
        out.sort_unstable();
        out
    }
}
