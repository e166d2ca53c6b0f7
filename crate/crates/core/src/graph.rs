//! Undirected simple graphs with stable vertex identities.
//!
//! A [`Graph`] is a plain value: every mutation either happens on an owned
//! instance or produces a new one, so sibling branches of a search never
//! observe each other's edits. Vertex ids are never reused, which keeps
//! [`MergeRecord`]s unambiguous when a reduction trace is replayed.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque vertex identifier. Ids created from an input file are the
/// zero-based position of the vertex in that file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop on {0}")]
    SelfLoop(VertexId),
    #[error("vertex {0} is not in the graph")]
    MissingVertex(VertexId),
    #[error("adjacency of {0} and {1} is not symmetric")]
    Asymmetric(VertexId, VertexId),
}

/// Result of contracting two vertices into one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeRecord {
    pub survivor: VertexId,
    pub absorbed: VertexId,
}

/// Outcome of [`Graph::merge_vertices`]. Merging two adjacent vertices would
/// force them to share a color, which is impossible, so that branch is dead.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MergeOutcome {
    Merged { graph: Graph, record: MergeRecord },
    Contradiction,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    adj: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Graph on vertices `0..n` with no edges.
    pub fn with_vertices(n: usize) -> Self {
        let adj = (0..n as u32).map(|i| (VertexId(i), BTreeSet::new())).collect();
        Self { adj }
    }

    /// Builds a graph on `0..n` from an edge list, rejecting self-loops.
    /// Duplicate edges collapse.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        let mut g = Self::with_vertices(n);
        for &(u, v) in edges {
            g.add_edge(VertexId(u), VertexId(v))?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: VertexId) {
        self.adj.entry(v).or_default();
    }

    /// Adds an undirected edge. Returns `Ok(false)` if it was already present.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<bool, GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        for w in [u, v] {
            if !self.adj.contains_key(&w) {
                return Err(GraphError::MissingVertex(w));
            }
        }
        let fresh = self.adj.get_mut(&u).unwrap().insert(v);
        self.adj.get_mut(&v).unwrap().insert(u);
        Ok(fresh)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    /// Vertices in increasing id order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    /// Each edge once, as `(smaller, larger)`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj
            .iter()
            .flat_map(|(&u, nbrs)| nbrs.range(u..).map(move |&v| (u, v)))
    }

    /// Neighbors of `v`; panics if `v` is absent.
    pub fn neighbors(&self, v: VertexId) -> &BTreeSet<VertexId> {
        &self.adj[&v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj.get(&v).map_or(0, BTreeSet::len)
    }

    pub fn adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.adj.get(&u).is_some_and(|n| n.contains(&v))
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.adj.values().map(BTreeSet::len).min()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.adj.values().map(BTreeSet::len).max()
    }

    /// Removes `v` and its incident edges in place.
    pub fn remove_vertex_mut(&mut self, v: VertexId) -> Option<BTreeSet<VertexId>> {
        let nbrs = self.adj.remove(&v)?;
        for u in &nbrs {
            if let Some(set) = self.adj.get_mut(u) {
                set.remove(&v);
            }
        }
        Some(nbrs)
    }

    pub fn remove_vertex(&self, v: VertexId) -> Graph {
        debug_assert!(self.contains(v));
        let mut g = self.clone();
        g.remove_vertex_mut(v);
        g
    }

    /// In-place contraction. The smaller id survives and inherits the union of
    /// both neighborhoods. Returns `None` when `u` and `v` are adjacent.
    pub fn merge_in_place(&mut self, u: VertexId, v: VertexId) -> Option<MergeRecord> {
        assert!(u != v, "cannot merge a vertex with itself");
        assert!(self.contains(u) && self.contains(v), "merge endpoints must exist");
        if self.adjacent(u, v) {
            return None;
        }
        let (survivor, absorbed) = if u < v { (u, v) } else { (v, u) };
        let moved = self.remove_vertex_mut(absorbed).unwrap();
        for w in moved {
            self.adj.get_mut(&survivor).unwrap().insert(w);
            self.adj.get_mut(&w).unwrap().insert(survivor);
        }
        Some(MergeRecord { survivor, absorbed })
    }

    pub fn merge_vertices(&self, u: VertexId, v: VertexId) -> MergeOutcome {
        let mut graph = self.clone();
        match graph.merge_in_place(u, v) {
            Some(record) => MergeOutcome::Merged { graph, record },
            None => MergeOutcome::Contradiction,
        }
    }

    pub fn induced_subgraph(&self, keep: &BTreeSet<VertexId>) -> Graph {
        let adj = keep
            .iter()
            .filter(|v| self.contains(**v))
            .map(|&v| {
                let nbrs = self.adj[&v].intersection(keep).copied().collect();
                (v, nbrs)
            })
            .collect();
        Graph { adj }
    }

    /// Connected components of the subgraph induced by vertices satisfying
    /// `pred`, ordered by their smallest vertex.
    pub fn components_where<F>(&self, pred: F) -> Vec<BTreeSet<VertexId>>
    where
        F: Fn(VertexId) -> bool,
    {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for start in self.vertices() {
            if seen.contains(&start) || !pred(start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            seen.insert(start);
            while let Some(x) = queue.pop_front() {
                comp.insert(x);
                for &y in &self.adj[&x] {
                    if !seen.contains(&y) && pred(y) {
                        seen.insert(y);
                        queue.push_back(y);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        self.components_where(|_| true)
    }

    /// Checks the structural invariants: symmetric, loop-free adjacency whose
    /// endpoints all belong to the vertex set.
    pub fn validate(&self) -> Result<(), GraphError> {
        for (&u, nbrs) in &self.adj {
            for &v in nbrs {
                if u == v {
                    return Err(GraphError::SelfLoop(u));
                }
                match self.adj.get(&v) {
                    None => return Err(GraphError::MissingVertex(v)),
                    Some(back) if !back.contains(&u) => {
                        return Err(GraphError::Asymmetric(u, v))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}
