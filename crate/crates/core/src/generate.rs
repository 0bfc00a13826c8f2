//! Instance families used by tests, benchmarks and the CLI.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{build_graph, Graph, TriId, VertexId};

fn graph(n: usize, edges: &[(VertexId, VertexId)]) -> Graph {
    build_graph(n, edges).expect("generated edge lists are simple")
}

pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in u + 1..n as VertexId {
            edges.push((u, v));
        }
    }
    graph(n, &edges)
}

/// Erdős–Rényi graph; each pair is an edge independently with probability `p`.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in u + 1..n as VertexId {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    graph(n, &edges)
}

/// Two triangles sharing vertex 0.
pub fn bowtie() -> Graph {
    graph(5, &[(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (0, 4)])
}

/// `len` copies of K4 where consecutive copies share one edge.
pub fn glued_k4(len: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..len as VertexId {
        let b = 2 * i;
        let vs = [b, b + 1, b + 2, b + 3];
        for (j, &u) in vs.iter().enumerate() {
            for &v in &vs[j + 1..] {
                if i == 0 || (u, v) != (b, b + 1) {
                    edges.push((u, v));
                }
            }
        }
    }
    graph(2 * len + 2, &edges)
}

/// A lending chain of `len` type-1 triangles ending at a type-3 head.
#[derive(Debug, Clone)]
pub struct LendChain {
    pub graph: Graph,
    /// The head first, then the chain members in order.
    pub packing: Vec<TriId>,
}

/// Vertex layout: `c0 = 0, v0 = 1, a0 = 2, c1 = 3`, then `v_i = 2i + 2` and `c_{i+1} = 2i + 3`.
///
/// The head `{c1, v0, c0}` spans a K4 with apex `a0`. Member `i` is `{c_{i+1}, v_i, c_i}` with
/// base `c_{i+1} v_i`, and its one single goes through `v0` for `i = 1` and through `c_{i-1}` after.
pub fn lend_chain(len: usize) -> LendChain {
    let (c0, v0, a0, c1) = (0, 1, 2, 3);
    let v = |i: usize| (2 * i + 2) as VertexId;
    let c = |i: usize| match i {
        0 => c0,
        1 => c1,
        _ => (2 * i + 1) as VertexId,
    };
    let mut edges = vec![(c0, v0), (c0, a0), (c0, c1), (v0, a0), (v0, c1), (a0, c1)];
    for i in 1..=len {
        let anchor = if i == 1 { v0 } else { c(i - 1) };
        edges.extend([(c(i + 1), v(i)), (v(i), c(i)), (c(i), c(i + 1))]);
        edges.extend([(anchor, c(i + 1)), (anchor, v(i))]);
    }
    let g = graph(2 * len + 4, &edges);
    let mut packing = vec![g.triangle_id(c1, v0, c0).unwrap()];
    for i in 1..=len {
        packing.push(g.triangle_id(c(i + 1), v(i), c(i)).unwrap());
    }
    LendChain { graph: g, packing }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Complete,
    Gnp,
    Bowtie,
    GluedK4,
    LendChain,
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "complete" => Family::Complete,
            "gnp" => Family::Gnp,
            "bowtie" => Family::Bowtie,
            "glued_k4" => Family::GluedK4,
            "lend_chain" => Family::LendChain,
            _ => return Err(format!("unknown family {s:?}")),
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Complete => "complete",
            Family::Gnp => "gnp",
            Family::Bowtie => "bowtie",
            Family::GluedK4 => "glued_k4",
            Family::LendChain => "lend_chain",
        })
    }
}

/// `size` is the vertex count for `complete`/`gnp` and the length for the chain families.
pub fn family(f: Family, size: usize, p: f64, seed: u64) -> Graph {
    match f {
        Family::Complete => complete(size),
        Family::Gnp => gnp(size, p, seed),
        Family::Bowtie => bowtie(),
        Family::GluedK4 => glued_k4(size),
        Family::LendChain => lend_chain(size).graph,
    }
}

/// A named instance of a fixed benchmark suite.
#[derive(Debug, Clone)]
pub struct Instance {
    pub family: Family,
    pub size: usize,
    pub p: f64,
    pub seed: u64,
    pub graph: Graph,
}

impl Instance {
    fn new(family: Family, size: usize, p: f64, seed: u64) -> Self {
        Instance {
            family,
            size,
            p,
            seed,
            graph: self::family(family, size, p, seed),
        }
    }

    pub fn name(&self) -> String {
        match self.family {
            Family::Gnp => format!("gnp({}, {}, {})", self.size, self.p, self.seed),
            Family::Bowtie => "bowtie".to_string(),
            f => format!("{f}({})", self.size),
        }
    }
}

/// K4 to K8, the bowtie, chains and glued K4s of length 1 to 4, and 100 random graphs where
/// graph `i` has `6 + 2 (i mod 4)` vertices, edge probability 0.3, 0.5 or 0.7 by `(i / 4) mod 3`,
/// and seed `i`.
pub fn desk_suite() -> Vec<Instance> {
    let mut out: Vec<Instance> = (4..=8)
        .map(|n| Instance::new(Family::Complete, n, 0.0, 0))
        .collect();
    out.push(Instance::new(Family::Bowtie, 0, 0.0, 0));
    for len in 1..=4 {
        out.push(Instance::new(Family::LendChain, len, 0.0, 0));
    }
    for len in 1..=4 {
        out.push(Instance::new(Family::GluedK4, len, 0.0, 0));
    }
    for i in 0..100u64 {
        let n = 6 + 2 * (i as usize % 4);
        let p = [0.3, 0.5, 0.7][(i as usize / 4) % 3];
        out.push(Instance::new(Family::Gnp, n, p, i));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing::Packing;

    #[test]
    fn sizes() {
        assert_eq!(complete(6).m(), 15);
        assert_eq!(bowtie().triangles().len(), 2);
        let g = glued_k4(3);
        assert_eq!((g.n(), g.m(), g.triangles().len()), (8, 16, 12));
        assert_eq!(gnp(10, 0.5, 3).edges(), gnp(10, 0.5, 3).edges());
    }

    #[test]
    fn lend_chain_shape() {
        let lc = lend_chain(1);
        assert_eq!(lc.graph.n(), 6);
        assert_eq!(lc.graph.m(), 11);
        for len in 1..=4 {
            let lc = lend_chain(len);
            assert_eq!(lc.packing.len(), len + 1);
            Packing::from_triangles(&lc.graph, &lc.packing).unwrap();
        }
    }
}
