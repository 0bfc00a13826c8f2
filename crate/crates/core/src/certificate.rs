//! Self-contained JSON certificates for a cover. Triangles and edges are stored by their
//! vertices so a certificate can be checked against any copy of the graph.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::charge::ChargeAssignment;
use crate::cover::{CoverOutcome, RepairStep};
use crate::graph::{Graph, TriId, VertexId};
use crate::io::write_edge_list;
use crate::packing::{Packing, PackingError};
use crate::verify::{verify_cover, Report};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("certificate was issued for a different graph")]
    GraphMismatch,
    #[error("{0:?} is not a triangle of the graph")]
    UnknownTriangle([VertexId; 3]),
    #[error("({0}, {1}) is not an edge of the graph")]
    UnknownEdge(VertexId, VertexId),
    #[error("edge ({0}, {1}) appears twice")]
    DuplicateEdge(VertexId, VertexId),
    #[error("packing is not edge-disjoint: {0}")]
    Packing(PackingError),
    #[error("bad certificate JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoggedSwap {
    pub reason: String,
    pub removed: Vec<[VertexId; 3]>,
    pub added: Vec<[VertexId; 3]>,
    pub sideways: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub failing: Vec<[VertexId; 3]>,
    pub budget_ok: bool,
    pub integrality_ok: bool,
}

impl Verdict {
    pub fn ok(&self) -> bool {
        self.failing.is_empty() && self.budget_ok && self.integrality_ok
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// Lowercase hex SHA-256 of the canonical edge list.
    pub graph_hash: String,
    pub n: usize,
    pub m: usize,
    pub packing: Vec<[VertexId; 3]>,
    pub order: u32,
    /// Nonzero weights as `(u, v, numerator)` with `u < v`.
    pub weights: Vec<(VertexId, VertexId, u32)>,
    pub repair_log: Vec<LoggedSwap>,
    pub verdict: Verdict,
}

pub fn graph_hash(g: &Graph) -> String {
    Sha256::digest(write_edge_list(g).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn verts(g: &Graph, t: TriId) -> [VertexId; 3] {
    g.triangle(t).verts
}

fn verdict(g: &Graph, r: &Report) -> Verdict {
    Verdict {
        failing: r.failing.iter().map(|&t| verts(g, t)).collect(),
        budget_ok: r.budget_ok,
        integrality_ok: r.integrality_ok,
    }
}

impl Certificate {
    pub fn new(g: &Graph, p: &Packing, f: &ChargeAssignment, log: &[RepairStep]) -> Self {
        let report = verify_cover(g, f, p.len());
        Certificate {
            graph_hash: graph_hash(g),
            n: g.n(),
            m: g.m(),
            packing: p.triangles().map(|t| verts(g, t)).collect(),
            order: f.order,
            weights: f
                .support()
                .into_iter()
                .map(|(e, x)| {
                    let (u, v) = g.endpoints(e);
                    (u, v, x)
                })
                .collect(),
            repair_log: log
                .iter()
                .map(|s| LoggedSwap {
                    reason: s.reason.clone(),
                    removed: s.swap.removed.iter().map(|&t| verts(g, t)).collect(),
                    added: s.swap.added.iter().map(|&t| verts(g, t)).collect(),
                    sideways: s.sideways,
                })
                .collect(),
            verdict: verdict(g, &report),
        }
    }

    pub fn from_outcome(g: &Graph, out: &CoverOutcome) -> Self {
        Certificate::new(g, &out.packing, &out.f, &out.log)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates contain no maps with non-string keys")
    }

    pub fn from_json(s: &str) -> Result<Self, CertificateError> {
        serde_json::from_str(s).map_err(|e| CertificateError::Json(e.to_string()))
    }
}

/// Rebuilds the packing and weights from `cert` and checks them from scratch. The stored verdict
/// is ignored.
pub fn verify_certificate(g: &Graph, cert: &Certificate) -> Result<Report, CertificateError> {
    if cert.graph_hash != graph_hash(g) || cert.n != g.n() || cert.m != g.m() {
        return Err(CertificateError::GraphMismatch);
    }
    let ids = cert
        .packing
        .iter()
        .map(|&[a, b, c]| {
            g.triangle_id(a, b, c)
                .ok_or(CertificateError::UnknownTriangle([a, b, c]))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let p = Packing::from_triangles(g, &ids).map_err(CertificateError::Packing)?;
    let mut f = ChargeAssignment::zero(g, cert.order);
    let mut seen = vec![false; g.m()];
    for &(u, v, x) in &cert.weights {
        let e = g.edge_id(u, v).ok_or(CertificateError::UnknownEdge(u, v))? as usize;
        if std::mem::replace(&mut seen[e], true) {
            return Err(CertificateError::DuplicateEdge(u, v));
        }
        f.num[e] = x;
    }
    Ok(verify_cover(g, &f, p.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{cover, CoverOptions};
    use crate::generate::complete;

    #[test]
    fn k4_round_trip() {
        let g = complete(4);
        let out = cover(&g, 2, &CoverOptions::default()).unwrap();
        let cert = Certificate::from_outcome(&g, &out);
        assert!(cert.verdict.ok());
        let back = Certificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(back, cert);
        assert!(verify_certificate(&g, &back).unwrap().ok());
    }

    #[test]
    fn tampering_is_caught() {
        let g = complete(4);
        let out = cover(&g, 2, &CoverOptions::default()).unwrap();
        let mut cert = Certificate::from_outcome(&g, &out);
        cert.weights.remove(0);
        let r = verify_certificate(&g, &cert).unwrap();
        assert!(!r.failing.is_empty());

        let mut cert = Certificate::from_outcome(&g, &out);
        cert.weights = (0..6).map(|e| g.endpoints(e)).map(|(u, v)| (u, v, 2)).collect();
        let r = verify_certificate(&g, &cert).unwrap();
        assert!(r.failing.is_empty() && !r.budget_ok);

        assert_eq!(
            verify_certificate(&complete(5), &cert),
            Err(CertificateError::GraphMismatch)
        );
    }
}
