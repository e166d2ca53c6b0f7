//! Small hand-built graphs used by tests, the acceptance suite and
//! `tricolor gen figure-fixture:<name>`.
//!
//! Vertex ids follow the drawing order of each configuration, starting at 0.

use std::collections::BTreeSet;

use crate::bushy::{BushyForest, Tree};
use crate::graph::{Graph, VertexId};

fn build(n: u32, edges: &[(u32, u32)]) -> Graph {
    Graph::from_edges(n as usize, edges).expect("fixture edges are valid")
}

fn v(i: u32) -> VertexId {
    VertexId(i)
}

/// Names accepted by [`by_name`].
pub const NAMES: &[&str] = &[
    "fig1-left", "fig1-right", "fig2", "fig3", "fig8", "fig10", "petersen", "k4",
];

pub fn by_name(name: &str) -> Option<Graph> {
    Some(match name {
        "fig1-left" => wheel(6),
        "fig1-right" => wheel(5),
        "fig2" => figure2(),
        "fig3" => figure3(),
        "fig8" => figure8(),
        "fig10" => figure10(),
        "petersen" => petersen(),
        "k4" => complete(4),
        _ => return None,
    })
}

/// Hub 0 joined to a cycle on 1..=rim. 3-colorable iff `rim` is even.
pub fn wheel(rim: u32) -> Graph {
    let mut edges = Vec::new();
    for i in 1..=rim {
        edges.push((0, i));
        edges.push((i, if i == rim { 1 } else { i + 1 }));
    }
    build(rim + 1, &edges)
}

pub fn complete(n: u32) -> Graph {
    let edges: Vec<(u32, u32)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    build(n, &edges)
}

pub fn cycle(n: u32) -> Graph {
    let edges: Vec<(u32, u32)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    build(n, &edges)
}

pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    build(10, &edges)
}

/// Center of the nine-vertex degree-3 tree in [`figure2`].
pub const FIGURE2_CENTER: VertexId = VertexId(0);

/// A nine-vertex tree of degree-3 vertices centered at 0 (neighbors 1, 4, 6),
/// hung off a K₄,₄ on 9..=16 so that every other vertex has degree ≥ 4.
pub fn figure2() -> Graph {
    let mut edges = vec![(0, 1), (1, 2), (1, 3), (0, 4), (4, 5), (0, 6), (6, 7), (6, 8)];
    for a in 9..13 {
        for b in 13..17 {
            edges.push((a, b));
        }
    }
    edges.extend([
        (2, 9), (2, 10),
        (3, 11), (3, 12),
        (4, 13),
        (5, 14), (5, 15),
        (7, 16), (7, 13),
        (8, 14), (8, 15),
    ]);
    build(17, &edges)
}

pub const FIGURE3_ROOT: VertexId = VertexId(0);

/// One bushy tree (root 0, internal 1, leaves 2..=7) with eight forest
/// neighbors 8..=15 and four further vertices 16..=19.
pub fn figure3() -> Graph {
    build(
        20,
        &[
            (0, 1), (0, 2), (0, 3), (0, 4), (1, 5), (1, 6), (1, 7),
            (4, 5), (2, 7),
            (2, 8), (2, 9), (3, 9), (3, 13), (4, 13), (4, 12),
            (5, 15), (5, 14), (6, 14), (6, 10), (7, 10), (7, 11),
            (8, 11), (12, 15), (9, 16), (8, 16), (10, 17), (11, 17),
            (13, 18), (12, 18), (14, 19), (15, 19), (16, 17), (18, 19),
        ],
    )
}

pub fn figure3_n() -> BTreeSet<VertexId> {
    (8..16).map(v).collect()
}

pub fn figure3_u() -> BTreeSet<VertexId> {
    (16..20).map(v).collect()
}

pub const FIGURE4_R: VertexId = VertexId(2);
pub const FIGURE4_V: VertexId = VertexId(8);

/// High-magnitude vertex 8 next to leaf 0 of a two-internal tree.
pub fn figure4() -> (Graph, BushyForest) {
    let g = build(
        12,
        &[(0, 1), (1, 2), (1, 4), (1, 6), (2, 3), (2, 5), (2, 7), (0, 8), (8, 9), (8, 10), (8, 11)],
    );
    let mut t = Tree::star(v(2), [v(1), v(3), v(5), v(7)]);
    t.internal.insert(v(1));
    t.leaves.remove(&v(1));
    for l in [0, 4, 6] {
        t.leaves.insert(v(l));
        t.parent.insert(v(l), v(1));
    }
    (g, BushyForest { trees: vec![t] })
}

/// High-magnitude vertex 6 next to leaf 0 of a star with five leaves.
pub fn figure5() -> (Graph, BushyForest) {
    let g = build(10, &[(0, 1), (1, 2), (1, 3), (1, 4), (1, 5), (0, 6), (6, 7), (6, 8), (6, 9)]);
    let t = Tree::star(v(1), [v(0), v(2), v(3), v(4), v(5)]);
    (g, BushyForest { trees: vec![t] })
}

pub const FIGURE6_V: VertexId = VertexId(9);
pub const FIGURE6_W: VertexId = VertexId(5);

/// Two non-adjacent high-magnitude vertices without common neighbors on
/// distinct leaves of one star.
pub fn figure6() -> (Graph, BushyForest) {
    let g = build(
        13,
        &[
            (0, 1), (1, 2), (1, 3), (1, 4),
            (2, 5), (5, 6), (5, 7), (5, 8),
            (0, 9), (9, 10), (9, 11), (9, 12),
        ],
    );
    let t = Tree::star(v(1), [v(0), v(2), v(3), v(4)]);
    (g, BushyForest { trees: vec![t] })
}

pub const FIGURE7_V: VertexId = VertexId(5);
pub const FIGURE7_W: VertexId = VertexId(6);

/// As [`figure6`] but with the two high-magnitude vertices adjacent.
pub fn figure7() -> (Graph, BushyForest) {
    let g = build(
        11,
        &[
            (0, 1), (0, 2), (0, 3), (0, 4),
            (2, 5), (4, 6), (5, 6), (5, 7), (5, 9), (6, 8), (6, 10),
        ],
    );
    let t = Tree::star(v(0), [v(1), v(2), v(3), v(4)]);
    (g, BushyForest { trees: vec![t] })
}

/// K₁,₃ tree (root 0, children 1, 2, 3) whose six candidate grandchildren
/// 4..=9 form a 6-cycle: 4-5-8-9-7-6-4.
pub fn figure8() -> Graph {
    build(10, &FIGURE8_EDGES)
}

const FIGURE8_EDGES: [(u32, u32); 15] = [
    (0, 1), (0, 2), (0, 3),
    (1, 6), (1, 8), (2, 4), (2, 9), (3, 5), (3, 7),
    (4, 5), (5, 8), (8, 9), (9, 7), (7, 6), (4, 6),
];

/// The root of the bushy tree in [`figure10`].
pub const FIGURE10_ROOT: VertexId = VertexId(13);
/// Leaves of the bushy tree in [`figure10`]; each touches two vertices of
/// the [`figure8`] block.
pub const FIGURE10_LEAVES: [VertexId; 3] = [VertexId(10), VertexId(11), VertexId(12)];

/// [`figure8`] plus a bushy tree rooted at 13 whose leaves 10, 11, 12 each
/// touch a child and a grandchild of the block.
pub fn figure10() -> Graph {
    let mut edges = FIGURE8_EDGES.to_vec();
    edges.extend([(10, 9), (10, 2), (11, 5), (11, 3), (12, 6), (12, 1), (13, 10), (13, 11), (13, 12)]);
    build(14, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::brute_force_colorable;

    #[test]
    fn wheels() {
        assert_eq!(brute_force_colorable(&wheel(6)), Some(true));
        assert_eq!(brute_force_colorable(&wheel(5)), Some(false));
    }

    #[test]
    fn degree3_tree_host_shape() {
        let g = figure2();
        let deg3: BTreeSet<VertexId> = g.vertices().filter(|&x| g.degree(x) == 3).collect();
        assert_eq!(deg3, (0..9).map(v).collect());
        assert!(g.vertices().all(|x| g.degree(x) >= 3));
        assert_eq!(brute_force_colorable(&g), Some(true));
    }

    #[test]
    fn two_internal_tree_degrees() {
        let g = figure3();
        assert_eq!(g.edge_count(), 33);
        assert!(g.vertices().all(|x| g.degree(x) >= 3));
    }

    #[test]
    fn six_cycle_block_is_colorable() {
        assert_eq!(brute_force_colorable(&figure10()), Some(true));
        assert_eq!(brute_force_colorable(&figure8()), Some(true));
    }

    #[test]
    fn names_resolve() {
        for name in NAMES {
            assert!(by_name(name).is_some(), "{name}");
        }
        assert!(by_name("nope").is_none());
    }
}
