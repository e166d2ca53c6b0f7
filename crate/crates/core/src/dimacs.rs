//! DIMACS `.col` reading and writing. Labels are 1-based; vertex `v` of the
//! graph is label `v + 1`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::color::{Color, Coloring};
use crate::graph::{Graph, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: malformed header `{text}`")]
    BadHeader { line: usize, text: String },
    #[error("line {line}: duplicate problem line")]
    DuplicateHeader { line: usize },
    #[error("line {line}: edge before problem line")]
    MissingHeader { line: usize },
    #[error("no problem line")]
    NoHeader,
    #[error("line {line}: malformed edge `{text}`")]
    BadEdge { line: usize, text: String },
    #[error("line {line}: label {label} outside 1..={n}")]
    LabelOutOfRange { line: usize, label: u64, n: u32 },
    #[error("line {line}: self-loop on {label}")]
    SelfLoop { line: usize, label: u64 },
    #[error("line {line}: unrecognized line `{text}`")]
    Unrecognized { line: usize, text: String },
    #[error("line {line}: malformed coloring entry `{text}`")]
    BadColoring { line: usize, text: String },
}

impl DimacsError {
    pub fn line(&self) -> Option<usize> {
        match self {
            Self::BadHeader { line, .. }
            | Self::DuplicateHeader { line }
            | Self::MissingHeader { line }
            | Self::BadEdge { line, .. }
            | Self::LabelOutOfRange { line, .. }
            | Self::SelfLoop { line, .. }
            | Self::Unrecognized { line, .. }
            | Self::BadColoring { line, .. } => Some(*line),
            Self::NoHeader => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimacsGraph {
    pub declared_vertices: u32,
    pub declared_edges: u64,
    pub graph: Graph,
    pub warnings: Vec<String>,
}

pub fn parse_dimacs(text: &str) -> Result<DimacsGraph, DimacsError> {
    let mut header: Option<(u32, u64)> = None;
    let mut graph = Graph::new();
    let mut edge_lines = 0u64;
    let mut warnings = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        let mut fields = trimmed.split_whitespace();
        match fields.next() {
            None | Some("c") => {}
            Some(tok) if tok.starts_with('c') && tok.len() == 1 => {}
            Some("p") => {
                if header.is_some() {
                    return Err(DimacsError::DuplicateHeader { line });
                }
                let bad = || DimacsError::BadHeader { line, text: trimmed.to_string() };
                let kind = fields.next().ok_or_else(bad)?;
                if kind != "edge" && kind != "col" {
                    return Err(bad());
                }
                let n: u32 = fields.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
                let m: u64 = fields.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
                if fields.next().is_some() {
                    return Err(bad());
                }
                graph = Graph::with_vertices(n as usize);
                header = Some((n, m));
            }
            Some("e") => {
                let (n, _) = header.ok_or(DimacsError::MissingHeader { line })?;
                let bad = || DimacsError::BadEdge { line, text: trimmed.to_string() };
                let a: u64 = fields.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
                let b: u64 = fields.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
                if fields.next().is_some() {
                    return Err(bad());
                }
                for label in [a, b] {
                    if label == 0 || label > n as u64 {
                        return Err(DimacsError::LabelOutOfRange { line, label, n });
                    }
                }
                if a == b {
                    return Err(DimacsError::SelfLoop { line, label: a });
                }
                edge_lines += 1;
                let added = graph
                    .add_edge(VertexId(a as u32 - 1), VertexId(b as u32 - 1))
                    .expect("labels checked");
                if !added {
                    warnings.push(format!("line {line}: duplicate edge {a}-{b} ignored"));
                }
            }
            Some(_) => return Err(DimacsError::Unrecognized { line, text: trimmed.to_string() }),
        }
    }
    let (n, m) = header.ok_or(DimacsError::NoHeader)?;
    let actual = graph.edge_count() as u64;
    if m != actual {
        warnings.push(format!("header declares {m} edges, found {actual} distinct ({edge_lines} edge lines)"));
    }
    Ok(DimacsGraph { declared_vertices: n, declared_edges: m, graph, warnings })
}

/// Writes `g` over labels `1..=max id + 1`; ids missing from `g` become
/// isolated vertices.
pub fn write_dimacs(g: &Graph) -> String {
    let n = g.vertices().map(|v| v.0 + 1).max().unwrap_or(0);
    let mut out = String::new();
    writeln!(out, "p edge {n} {}", g.edge_count()).unwrap();
    for (a, b) in g.edges() {
        writeln!(out, "e {} {}", a.0 + 1, b.0 + 1).unwrap();
    }
    out
}

/// One `<label> <color>` line per vertex, colors in {0, 1, 2}.
pub fn write_coloring(coloring: &Coloring) -> String {
    let mut out = String::new();
    for (v, c) in coloring {
        writeln!(out, "{} {}", v.0 + 1, c.value()).unwrap();
    }
    out
}

pub fn parse_coloring(text: &str) -> Result<Coloring, DimacsError> {
    let mut coloring = Coloring::new();
    for (idx, raw) in text.lines().enumerate() {
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('#') {
            continue;
        }
        let bad = || DimacsError::BadColoring { line: idx + 1, text: trimmed.to_string() };
        let mut fields = trimmed.split_whitespace();
        let label: u32 = fields.next().and_then(|s| s.parse().ok()).filter(|&l| l > 0).ok_or_else(bad)?;
        let color = fields.next().and_then(|s| s.parse().ok()).and_then(Color::new).ok_or_else(bad)?;
        if fields.next().is_some() || coloring.insert(VertexId(label - 1), color).is_some() {
            return Err(bad());
        }
    }
    Ok(coloring)
}
