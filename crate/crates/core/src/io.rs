//! Plain-text edge lists: a header line `n m`, then one `u v` pair per line.
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::graph::{build_graph, Graph, GraphError, VertexId};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("missing header line")]
    MissingHeader,
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("header announced {expected} edges, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn numbers(line: &str, lineno: usize) -> Result<(u64, u64), ParseError> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<u64, ParseError> {
        let tok = it.next().ok_or_else(|| ParseError::Malformed {
            line: lineno,
            msg: "expected two integers".into(),
        })?;
        tok.parse().map_err(|_| ParseError::Malformed {
            line: lineno,
            msg: format!("not an integer: {tok:?}"),
        })
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(ParseError::Malformed {
            line: lineno,
            msg: "trailing tokens".into(),
        });
    }
    Ok((a, b))
}

pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or(ParseError::MissingHeader)?;
    let (n, m) = numbers(header, hl)?;
    let mut edges = Vec::with_capacity(m as usize);
    for (i, l) in lines {
        let (u, v) = numbers(l, i)?;
        if u > VertexId::MAX as u64 || v > VertexId::MAX as u64 {
            return Err(ParseError::Malformed {
                line: i,
                msg: "vertex id too large".into(),
            });
        }
        edges.push((u as VertexId, v as VertexId));
    }
    if edges.len() as u64 != m {
        return Err(ParseError::EdgeCount {
            expected: m as usize,
            found: edges.len(),
        });
    }
    Ok(build_graph(n as usize, &edges)?)
}

pub fn read_edge_list(path: &Path) -> Result<Graph, ParseError> {
    parse_edge_list(&std::fs::read_to_string(path)?)
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut s = format!("{} {}\n", g.n(), g.m());
    for &(u, v) in g.edges() {
        writeln!(s, "{u} {v}").unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blanks() {
        let g = parse_edge_list("# k3\n3 3\n\n0 1\n1 2\n# x\n0 2\n").unwrap();
        assert_eq!(g.m(), 3);
        assert_eq!(g.triangles().len(), 1);
    }

    #[test]
    fn round_trip() {
        let g = parse_edge_list("4 4\n0 1\n2 1\n2 3\n3 0\n").unwrap();
        let h = parse_edge_list(&write_edge_list(&g)).unwrap();
        assert_eq!(g.edges(), h.edges());
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_edge_list(""), Err(ParseError::MissingHeader)));
        assert!(matches!(
            parse_edge_list("3 2\n0 1\n"),
            Err(ParseError::EdgeCount {
                expected: 2,
                found: 1
            })
        ));
        assert!(matches!(
            parse_edge_list("3 1\n0 x\n"),
            Err(ParseError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            parse_edge_list("3 1\n0 0\n"),
            Err(ParseError::Graph(GraphError::SelfLoop(0)))
        ));
    }
}
