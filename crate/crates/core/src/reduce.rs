//! Polynomial preprocessing and the degree-three branching rule.
//!
//! Vertices of degree at most two can always be colored last, since their
//! neighbors use at most two colors. Degree-three vertices that sit on a
//! cycle of degree-three vertices, or inside a degree-three component of
//! nine or more vertices, are eliminated by branching: two of the three
//! neighbors of such a vertex must share a color, so each branch contracts
//! one neighbor pair. Every step is recorded so a coloring of the residual
//! graph can be extended back to the input graph.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::color::{Color, ColorSet, Coloring};
use crate::graph::{Graph, MergeRecord, VertexId};

/// Components of degree-three vertices with at least this many vertices are
/// branched on.
pub const LARGE_DEGREE3_COMPONENT: usize = 9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceStep {
    /// `vertex` was removed while adjacent to `neighbors` (at most two).
    RemovedLowDegree { vertex: VertexId, neighbors: Vec<VertexId> },
    Merged(MergeRecord),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Instance {
    pub graph: Graph,
    pub trace: Vec<TraceStep>,
    pub fixed: Coloring,
}

impl Instance {
    pub fn new(graph: Graph) -> Self {
        Self { graph, trace: Vec::new(), fixed: Coloring::new() }
    }

    /// Removes vertices of degree ≤ 2 until none remain. Fixed vertices are
    /// left in place because their color is already decided.
    pub fn eliminate_low_degree(&mut self) {
        let mut work: BTreeSet<VertexId> = self
            .graph
            .vertices()
            .filter(|&v| self.graph.degree(v) <= 2)
            .collect();
        while let Some(v) = work.pop_first() {
            if !self.graph.contains(v) || self.fixed.contains_key(&v) || self.graph.degree(v) > 2 {
                continue;
            }
            let neighbors: Vec<VertexId> =
                self.graph.remove_vertex_mut(v).unwrap().into_iter().collect();
            for &u in &neighbors {
                if self.graph.degree(u) <= 2 {
                    work.insert(u);
                }
            }
            self.trace.push(TraceStep::RemovedLowDegree { vertex: v, neighbors });
        }
    }

    pub fn eliminated_low_degree(mut self) -> Self {
        self.eliminate_low_degree();
        self
    }

    /// Picks the vertex to branch on, or `None` once every degree-three
    /// component is acyclic and has at most eight vertices.
    pub fn find_branch_target(&self) -> Option<VertexId> {
        let g = &self.graph;
        let is_deg3 = |v: VertexId| g.degree(v) == 3;
        for comp in g.components_where(is_deg3) {
            let internal_edges: usize =
                comp.iter().map(|&v| g.neighbors(v).intersection(&comp).count()).sum::<usize>() / 2;
            if internal_edges >= comp.len() {
                return Some(smallest_cycle_vertex(g, &comp));
            }
            if comp.len() >= LARGE_DEGREE3_COMPONENT {
                let branching = comp
                    .iter()
                    .copied()
                    .find(|&v| g.neighbors(v).intersection(&comp).count() == 3);
                return Some(branching.unwrap_or_else(|| path_median(g, &comp)));
            }
        }
        None
    }

    /// The three neighbor-pair contractions around `v`, in lexicographic pair
    /// order, each followed by removal of `v` and the low-degree cascade.
    /// Adjacent pairs are infeasible and yield no child.
    pub fn branch_on(&self, v: VertexId) -> Vec<Instance> {
        let nbrs: Vec<VertexId> = self.graph.neighbors(v).iter().copied().collect();
        assert_eq!(nbrs.len(), 3, "branch vertex must have exactly three neighbors");
        let pairs = [(nbrs[0], nbrs[1]), (nbrs[0], nbrs[2]), (nbrs[1], nbrs[2])];
        let mut children = Vec::with_capacity(3);
        for (a, b) in pairs {
            let mut child = self.clone();
            let Some(record) = child.graph.merge_in_place(a, b) else {
                continue;
            };
            if let (Some(&ca), Some(&cb)) = (child.fixed.get(&a), child.fixed.get(&b)) {
                if ca != cb {
                    continue;
                }
            }
            if let Some(c) = child.fixed.remove(&record.absorbed) {
                child.fixed.insert(record.survivor, c);
            }
            child.trace.push(TraceStep::Merged(record));
            let neighbors: Vec<VertexId> =
                child.graph.remove_vertex_mut(v).unwrap().into_iter().collect();
            child.trace.push(TraceStep::RemovedLowDegree { vertex: v, neighbors });
            child.eliminate_low_degree();
            children.push(child);
        }
        children
    }
}

/// Smallest vertex of `comp` lying on a cycle of the induced subgraph, found
/// by peeling vertices of induced degree ≤ 1.
fn smallest_cycle_vertex(g: &Graph, comp: &BTreeSet<VertexId>) -> VertexId {
    let mut core = comp.clone();
    loop {
        let peel: Vec<VertexId> = core
            .iter()
            .copied()
            .filter(|&v| g.neighbors(v).intersection(&core).count() <= 1)
            .collect();
        if peel.is_empty() {
            break;
        }
        for v in peel {
            core.remove(&v);
        }
    }
    *core.first().expect("component with a cycle has a non-empty 2-core")
}

/// Vertex of a path component whose removal splits it as evenly as possible;
/// the smaller id wins a tie.
fn path_median(g: &Graph, comp: &BTreeSet<VertexId>) -> VertexId {
    let start = comp
        .iter()
        .copied()
        .find(|&v| g.neighbors(v).intersection(comp).count() <= 1)
        .expect("acyclic component has an endpoint");
    let mut order = vec![start];
    let mut prev = None;
    let mut cur = start;
    loop {
        let next = g
            .neighbors(cur)
            .iter()
            .copied()
            .find(|&w| comp.contains(&w) && Some(w) != prev);
        match next {
            Some(w) => {
                order.push(w);
                prev = Some(cur);
                cur = w;
            }
            None => break,
        }
    }
    debug_assert_eq!(order.len(), comp.len());
    let n = order.len();
    let lo = order[(n - 1) / 2];
    let hi = order[n / 2];
    lo.min(hi)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("no free color for {vertex} during replay")]
    NoFreeColor { vertex: VertexId },
    #[error("{vertex} has no color when replay needs it")]
    Uncolored { vertex: VertexId },
}

/// Extends a coloring of the residual graph to the graph the trace started
/// from by undoing the steps in reverse.
pub fn replay(trace: &[TraceStep], residual: &Coloring) -> Result<Coloring, ReplayError> {
    let mut coloring = residual.clone();
    for step in trace.iter().rev() {
        match step {
            TraceStep::Merged(MergeRecord { survivor, absorbed }) => {
                let c = *coloring
                    .get(survivor)
                    .ok_or(ReplayError::Uncolored { vertex: *survivor })?;
                coloring.insert(*absorbed, c);
            }
            TraceStep::RemovedLowDegree { vertex, neighbors } => {
                let mut free = ColorSet::FULL;
                for u in neighbors {
                    let c = coloring.get(u).ok_or(ReplayError::Uncolored { vertex: *u })?;
                    free.remove(*c);
                }
                let c: Color = free.first().ok_or(ReplayError::NoFreeColor { vertex: *vertex })?;
                coloring.insert(*vertex, c);
            }
        }
    }
    Ok(coloring)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::solver::{brute_force_colorable, verify_coloring};

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn k4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn low_degree_examples() {
        let p5 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let inst = Instance::new(p5).eliminated_low_degree();
        assert!(inst.graph.is_empty());
        assert_eq!(inst.trace.len(), 5);

        let inst = Instance::new(k4()).eliminated_low_degree();
        assert_eq!(inst.graph, k4());
        assert!(inst.trace.is_empty());

        let mut g = k4();
        g.add_vertex(v(4));
        g.add_edge(v(4), v(0)).unwrap();
        let inst = Instance::new(g).eliminated_low_degree();
        assert_eq!(inst.graph, k4());
        assert_eq!(inst.trace.len(), 1);
    }

    #[test]
    fn k4_branch_target_and_children() {
        let inst = Instance::new(k4());
        let t = inst.find_branch_target().unwrap();
        assert!(t.0 < 4);
        assert!(inst.branch_on(t).is_empty());
    }

    #[test]
    fn degree3_tree_hub_is_branch_target() {
        let g = fixtures::figure2();
        let inst = Instance::new(g.clone()).eliminated_low_degree();
        assert_eq!(inst.graph, g);
        assert_eq!(inst.find_branch_target(), Some(fixtures::FIGURE2_CENTER));
    }

    #[test]
    fn hub_children_cover_oracle() {
        let inst = Instance::new(fixtures::figure2());
        let children = inst.branch_on(fixtures::FIGURE2_CENTER);
        assert_eq!(children.len(), 3);
        let parent = brute_force_colorable(&inst.graph).unwrap();
        let any_child = children.iter().any(|c| brute_force_colorable(&c.graph).unwrap());
        assert_eq!(parent, any_child);
        assert!(parent);
    }

    #[test]
    fn independent_neighbors_give_three_children() {
        // v=0 with neighbors 1,2,3; each neighbor tied into a K4-free blob of
        // degree ≥ 3 so nothing cascades away before counting.
        let mut edges = vec![(0, 1), (0, 2), (0, 3)];
        for (i, &a) in [1u32, 2, 3].iter().enumerate() {
            let base = 4 + 3 * i as u32;
            edges.extend([(a, base), (a, base + 1), (base, base + 1), (base, base + 2), (base + 1, base + 2)]);
        }
        let g = Graph::from_edges(13, &edges).unwrap();
        let inst = Instance::new(g);
        let mut children = Vec::new();
        for (a, b) in [(1, 2), (1, 3), (2, 3)] {
            let mut child = inst.clone();
            child.graph.merge_in_place(v(a), v(b)).unwrap();
            child.graph.remove_vertex_mut(v(0));
            children.push(child.graph.vertex_count());
        }
        assert_eq!(children, vec![11, 11, 11]);
        assert_eq!(inst.branch_on(v(0)).len(), 3);
    }

    #[test]
    fn worst_case_component_has_no_branch_target() {
        let g = crate::generate::worst_case_family(2).unwrap();
        let inst = Instance::new(g);
        assert_eq!(inst.find_branch_target(), None);
    }

    #[test]
    fn petersen_has_degree3_cycle() {
        let inst = Instance::new(fixtures::petersen());
        assert!(inst.find_branch_target().is_some());
    }

    #[test]
    fn long_degree3_path_picks_median() {
        // Path 0..9 of degree-3 vertices, each with one edge into a K5 hub
        // (hub vertices have degree ≥ 4). Endpoints get an extra hub edge.
        let mut edges: Vec<(u32, u32)> = (0..9).map(|i| (i, i + 1)).collect();
        let hub: Vec<u32> = (10..15).collect();
        for (i, &a) in hub.iter().enumerate() {
            for &b in &hub[i + 1..] {
                edges.push((a, b));
            }
        }
        for i in 0..10u32 {
            edges.push((i, hub[(i % 5) as usize]));
        }
        edges.push((0, hub[1]));
        edges.push((9, hub[0]));
        let g = Graph::from_edges(15, &edges).unwrap();
        let inst = Instance::new(g);
        // Ten path vertices: positions 4 and 5 tie, smaller id wins.
        assert_eq!(inst.find_branch_target(), Some(v(4)));
    }

    #[test]
    fn replay_p5_and_merge() {
        let p5 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let inst = Instance::new(p5.clone()).eliminated_low_degree();
        let full = replay(&inst.trace, &Coloring::new()).unwrap();
        assert!(verify_coloring(&p5, &full).is_ok());

        let c4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let mut red_green = Coloring::new();
        let trace = vec![TraceStep::Merged(MergeRecord { survivor: v(0), absorbed: v(2) })];
        red_green.insert(v(0), Color::ALL[0]);
        red_green.insert(v(1), Color::ALL[1]);
        red_green.insert(v(3), Color::ALL[1]);
        let full = replay(&trace, &red_green).unwrap();
        assert_eq!(full[&v(2)], Color::ALL[0]);
        assert!(verify_coloring(&c4, &full).is_ok());
    }

    #[test]
    fn replay_detects_corruption() {
        let trace = vec![TraceStep::RemovedLowDegree { vertex: v(9), neighbors: vec![v(0)] }];
        assert_eq!(replay(&trace, &Coloring::new()), Err(ReplayError::Uncolored { vertex: v(0) }));
    }
}
