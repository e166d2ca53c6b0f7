//! Bushy forests: vertex-disjoint trees in which every internal vertex has at
//! least four tree neighbors.
//!
//! [`build_maximal_bushy_forest`] grows such a forest greedily until none of
//! the three maximality clauses can be violated, [`to_low_magnitude`]
//! rewrites trees around high-magnitude vertices (outside vertices adjacent
//! to the forest with exactly three outside neighbors), and [`partition`]
//! classifies every vertex relative to the result.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    pub root: VertexId,
    /// Internal vertices, root included.
    pub internal: BTreeSet<VertexId>,
    pub leaves: BTreeSet<VertexId>,
    /// Parent of every non-root vertex.
    pub parent: BTreeMap<VertexId, VertexId>,
}

impl Tree {
    /// A tree made of `root` and the given leaves.
    pub fn star(root: VertexId, leaves: impl IntoIterator<Item = VertexId>) -> Self {
        let leaves: BTreeSet<VertexId> = leaves.into_iter().collect();
        let parent = leaves.iter().map(|&l| (l, root)).collect();
        Tree { root, internal: BTreeSet::from([root]), leaves, parent }
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.internal.iter().chain(self.leaves.iter()).copied()
    }

    pub fn len(&self) -> usize {
        self.internal.len() + self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.internal.contains(&v) || self.leaves.contains(&v)
    }

    pub fn children(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.parent.iter().filter(move |(_, &p)| p == v).map(|(&c, _)| c)
    }

    pub fn tree_neighbors(&self, v: VertexId) -> BTreeSet<VertexId> {
        let mut out: BTreeSet<VertexId> = self.children(v).collect();
        if let Some(&p) = self.parent.get(&v) {
            out.insert(p);
        }
        out
    }

    /// Turns leaf `l` into an internal vertex with the given new leaves.
    fn internalize(&mut self, l: VertexId, new_leaves: &[VertexId]) {
        self.leaves.remove(&l);
        self.internal.insert(l);
        for &x in new_leaves {
            self.leaves.insert(x);
            self.parent.insert(x, l);
        }
    }

    fn attach_leaf(&mut self, parent: VertexId, leaf: VertexId) {
        self.leaves.insert(leaf);
        self.parent.insert(leaf, parent);
    }

    /// Internal vertices in breadth-first order from the root.
    pub fn internal_bfs(&self) -> Vec<VertexId> {
        let mut order = vec![self.root];
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            order.extend(self.children(x).filter(|c| self.internal.contains(c)));
            i += 1;
        }
        order
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BushyForest {
    pub trees: Vec<Tree>,
}

impl BushyForest {
    pub fn vertex_set(&self) -> BTreeSet<VertexId> {
        self.trees.iter().flat_map(Tree::vertices).collect()
    }

    /// Tree index of every forest vertex.
    pub fn owners(&self) -> BTreeMap<VertexId, usize> {
        self.trees
            .iter()
            .enumerate()
            .flat_map(|(i, t)| t.vertices().map(move |v| (v, i)))
            .collect()
    }

    pub fn internal_count(&self) -> usize {
        self.trees.iter().map(|t| t.internal.len()).sum()
    }

    pub fn is_internal(&self, v: VertexId) -> bool {
        self.trees.iter().any(|t| t.internal.contains(&v))
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.trees.iter().any(|t| t.leaves.contains(&v))
    }

    /// Checks the structural definition: trees are disjoint, connected and
    /// acyclic through `parent`, use graph edges, have an internal vertex,
    /// and every internal vertex has at least four tree neighbors.
    pub fn validate(&self, g: &Graph) -> Result<(), ForestError> {
        let mut seen = BTreeSet::new();
        for (ti, t) in self.trees.iter().enumerate() {
            if !t.internal.contains(&t.root) {
                return Err(ForestError::RootNotInternal(ti));
            }
            if !t.internal.is_disjoint(&t.leaves) {
                return Err(ForestError::Malformed(ti));
            }
            for v in t.vertices() {
                if !seen.insert(v) {
                    return Err(ForestError::Overlap(v));
                }
            }
            if t.parent.contains_key(&t.root) || t.parent.len() + 1 != t.len() {
                return Err(ForestError::Malformed(ti));
            }
            for (&c, &p) in &t.parent {
                if !t.contains(c) || !t.internal.contains(&p) {
                    return Err(ForestError::Malformed(ti));
                }
                if !g.adjacent(c, p) {
                    return Err(ForestError::NotAnEdge(c, p));
                }
            }
            // every vertex reaches the root
            for v in t.vertices() {
                let mut cur = v;
                let mut steps = 0;
                while cur != t.root {
                    cur = t.parent[&cur];
                    steps += 1;
                    if steps > t.len() {
                        return Err(ForestError::Malformed(ti));
                    }
                }
            }
            for &x in &t.internal {
                if t.tree_neighbors(x).len() < 4 {
                    return Err(ForestError::NotBushy(x));
                }
            }
            for &l in &t.leaves {
                if t.children(l).next().is_some() {
                    return Err(ForestError::Malformed(ti));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForestError {
    #[error("tree {0}: root is not internal")]
    RootNotInternal(usize),
    #[error("tree {0} is malformed")]
    Malformed(usize),
    #[error("{0} belongs to more than one tree")]
    Overlap(VertexId),
    #[error("tree edge {0}-{1} is not a graph edge")]
    NotAnEdge(VertexId, VertexId),
    #[error("internal vertex {0} has fewer than four tree neighbors")]
    NotBushy(VertexId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaximalityViolation {
    OutsideWithFourOutside(VertexId),
    LeafWithThreeOutside(VertexId),
    OutsideAdjacentToInternal { outside: VertexId, internal: VertexId },
}

impl fmt::Display for MaximalityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::OutsideWithFourOutside(v) => {
                write!(f, "outside vertex with four outside neighbors: {v}")
            }
            Self::LeafWithThreeOutside(v) => write!(f, "leaf with three outside neighbors: {v}"),
            Self::OutsideAdjacentToInternal { outside, internal } => {
                write!(f, "outside vertex {outside} adjacent to internal vertex {internal}")
            }
        }
    }
}

fn outside_neighbors(g: &Graph, in_forest: &BTreeSet<VertexId>, v: VertexId) -> Vec<VertexId> {
    g.neighbors(v).iter().copied().filter(|u| !in_forest.contains(u)).collect()
}

/// All violated maximality clauses, in vertex order.
pub fn check_maximal(g: &Graph, f: &BushyForest) -> Vec<MaximalityViolation> {
    let in_forest = f.vertex_set();
    let internal: BTreeSet<VertexId> = f.trees.iter().flat_map(|t| t.internal.iter().copied()).collect();
    let mut out = Vec::new();
    for v in g.vertices() {
        let outside = outside_neighbors(g, &in_forest, v).len();
        if !in_forest.contains(&v) {
            if outside >= 4 {
                out.push(MaximalityViolation::OutsideWithFourOutside(v));
            }
            if let Some(&x) = g.neighbors(v).iter().find(|u| internal.contains(u)) {
                out.push(MaximalityViolation::OutsideAdjacentToInternal { outside: v, internal: x });
            }
        } else if f.is_leaf(v) && outside >= 3 {
            out.push(MaximalityViolation::LeafWithThreeOutside(v));
        }
    }
    out
}

/// Grows `f` until it is maximal: outside vertices next to internal vertices
/// become leaves, leaves with three or more outside neighbors become
/// internal, and outside vertices with four or more outside neighbors seed
/// new trees. Scans go by increasing id.
pub fn maximalize(g: &Graph, f: &mut BushyForest) {
    loop {
        let in_forest = f.vertex_set();
        let owners = f.owners();

        let attach = g.vertices().filter(|v| !in_forest.contains(v)).find_map(|v| {
            g.neighbors(v)
                .iter()
                .find(|u| f.trees.get(owners.get(u).copied().unwrap_or(usize::MAX)).is_some_and(|t| t.internal.contains(u)))
                .map(|&x| (v, x))
        });
        if let Some((v, x)) = attach {
            f.trees[owners[&x]].attach_leaf(x, v);
            continue;
        }

        let grow = f
            .trees
            .iter()
            .flat_map(|t| t.leaves.iter().copied())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .find(|&l| outside_neighbors(g, &in_forest, l).len() >= 3);
        if let Some(l) = grow {
            let new_leaves = outside_neighbors(g, &in_forest, l);
            f.trees[owners[&l]].internalize(l, &new_leaves);
            continue;
        }

        let seed = g
            .vertices()
            .filter(|v| !in_forest.contains(v))
            .find(|&v| outside_neighbors(g, &in_forest, v).len() >= 4);
        if let Some(v) = seed {
            let leaves = outside_neighbors(g, &in_forest, v);
            f.trees.push(Tree::star(v, leaves));
            continue;
        }
        break;
    }
}

pub fn build_maximal_bushy_forest(g: &Graph) -> BushyForest {
    let mut f = BushyForest::default();
    maximalize(g, &mut f);
    f
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HighMagnitudeVertex {
    pub vertex: VertexId,
    pub outside_neighbors: [VertexId; 3],
}

/// Outside vertices adjacent to the forest with exactly three outside
/// neighbors.
pub fn high_magnitude_vertices(g: &Graph, f: &BushyForest) -> Vec<HighMagnitudeVertex> {
    let in_forest = f.vertex_set();
    g.vertices()
        .filter(|v| !in_forest.contains(v))
        .filter(|&v| g.neighbors(v).iter().any(|u| in_forest.contains(u)))
        .filter_map(|v| {
            let out = outside_neighbors(g, &in_forest, v);
            let arr: [VertexId; 3] = out.try_into().ok()?;
            Some(HighMagnitudeVertex { vertex: v, outside_neighbors: arr })
        })
        .collect()
}

/// A configuration that keeps a maximal forest from being low-magnitude,
/// tagged with the rewrite that removes it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum LowMagnitudeViolation {
    /// HM vertex `hm` next to leaf `leaf` of a tree with several internal vertices.
    MultiInternal { tree: usize, hm: VertexId, leaf: VertexId },
    /// HM vertex next to leaf `leaf` of a one-internal tree with ≥ 5 leaves.
    ManyLeaves { tree: usize, hm: VertexId, leaf: VertexId },
    /// Two non-adjacent HM vertices on distinct leaves without a common
    /// neighbor among the tree's leaves or outside the forest.
    DisjointPair { tree: usize, v: VertexId, lv: VertexId, w: VertexId, lw: VertexId },
    /// As above, but `v` and `w` are adjacent.
    AdjacentPair { tree: usize, v: VertexId, lv: VertexId, w: VertexId, lw: VertexId },
}

impl LowMagnitudeViolation {
    pub fn case(&self) -> u8 {
        match self {
            Self::MultiInternal { .. } => 1,
            Self::ManyLeaves { .. } => 2,
            Self::DisjointPair { .. } => 3,
            Self::AdjacentPair { .. } => 4,
        }
    }
}

/// Every violation of the low-magnitude conditions, grouped by rewrite case
/// and ordered by witness.
pub fn low_magnitude_violations(g: &Graph, f: &BushyForest) -> Vec<LowMagnitudeViolation> {
    let in_forest = f.vertex_set();
    let hms = high_magnitude_vertices(g, f);
    let mut out = Vec::new();
    // (tree, hm vertex, smallest adjacent leaf of that tree)
    let mut incidences: Vec<(usize, VertexId, VertexId)> = Vec::new();
    for hm in &hms {
        for (ti, t) in f.trees.iter().enumerate() {
            if let Some(&l) = g.neighbors(hm.vertex).iter().find(|u| t.leaves.contains(u)) {
                incidences.push((ti, hm.vertex, l));
            }
        }
    }
    for &(ti, hm, leaf) in &incidences {
        let t = &f.trees[ti];
        if t.internal.len() > 1 {
            out.push(LowMagnitudeViolation::MultiInternal { tree: ti, hm, leaf });
        } else if t.leaves.len() >= 5 {
            out.push(LowMagnitudeViolation::ManyLeaves { tree: ti, hm, leaf });
        }
    }
    for (a, &(ti, v, lv)) in incidences.iter().enumerate() {
        for &(tj, w, lw) in &incidences[a + 1..] {
            if ti != tj {
                continue;
            }
            let t = &f.trees[ti];
            let shares = g
                .neighbors(v)
                .intersection(g.neighbors(w))
                .any(|x| t.leaves.contains(x) || !in_forest.contains(x));
            if shares {
                continue;
            }
            let (v, lv, w, lw) = if v < w { (v, lv, w, lw) } else { (w, lw, v, lv) };
            if g.adjacent(v, w) {
                out.push(LowMagnitudeViolation::AdjacentPair { tree: ti, v, lv, w, lw });
            } else {
                out.push(LowMagnitudeViolation::DisjointPair { tree: ti, v, lv, w, lw });
            }
        }
    }
    out.sort();
    out
}

fn apply_rewrite(g: &Graph, f: &mut BushyForest, violation: &LowMagnitudeViolation) {
    let in_forest = f.vertex_set();
    let outside = |v: VertexId| outside_neighbors(g, &in_forest, v);
    match *violation {
        LowMagnitudeViolation::MultiInternal { tree, hm, leaf } => {
            let old = f.trees.remove(tree);
            let lp = old.parent[&leaf];
            let r = *old.internal.iter().find(|&&x| x != lp).expect("several internal vertices");
            f.trees.push(Tree::star(r, old.tree_neighbors(r)));
            f.trees.push(Tree::star(hm, outside(hm).into_iter().chain([leaf])));
        }
        LowMagnitudeViolation::ManyLeaves { tree, hm, leaf } => {
            let t = &mut f.trees[tree];
            t.leaves.remove(&leaf);
            t.parent.remove(&leaf);
            f.trees.push(Tree::star(hm, outside(hm).into_iter().chain([leaf])));
        }
        LowMagnitudeViolation::DisjointPair { tree, v, lv, w, lw } => {
            let tv = Tree::star(v, outside(v).into_iter().chain([lv]));
            let tw = Tree::star(w, outside(w).into_iter().chain([lw]));
            f.trees.remove(tree);
            f.trees.push(tv);
            f.trees.push(tw);
        }
        LowMagnitudeViolation::AdjacentPair { tree, v, lv, w, lw } => {
            let mut t = Tree::star(v, outside(v).into_iter().chain([lv]));
            let w_leaves: Vec<VertexId> =
                outside(w).into_iter().filter(|&x| x != v).chain([lw]).collect();
            t.internalize(w, &w_leaves);
            f.trees.remove(tree);
            f.trees.push(t);
        }
    }
}

/// Applies the four rewrites, re-maximalizing after each, until the forest
/// is a maximal low-magnitude bushy forest. Every rewrite strictly increases
/// (tree count, internal count) lexicographically.
pub fn to_low_magnitude(g: &Graph, f: &BushyForest) -> BushyForest {
    let mut f = f.clone();
    maximalize(g, &mut f);
    let limit = g.vertex_count() * g.vertex_count() + 1;
    for _ in 0..limit {
        let Some(violation) = low_magnitude_violations(g, &f).into_iter().next() else {
            return f;
        };
        let before = (f.trees.len(), f.internal_count());
        apply_rewrite(g, &mut f, &violation);
        maximalize(g, &mut f);
        let after = (f.trees.len(), f.internal_count());
        assert!(after > before, "rewrite {violation:?} did not make progress");
    }
    unreachable!("low-magnitude rewriting exceeded its n² bound")
}

/// Classification of every vertex relative to a maximal low-magnitude
/// bushy forest.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Partition {
    pub roots: BTreeSet<VertexId>,
    pub internal: BTreeSet<VertexId>,
    pub leaves: BTreeSet<VertexId>,
    pub n1: BTreeSet<VertexId>,
    pub n2: BTreeSet<VertexId>,
    /// High-magnitude vertices keyed by the largest number of HM vertices
    /// on any adjacent tree.
    pub n3: BTreeMap<usize, BTreeSet<VertexId>>,
    /// Forest neighbors fitting none of N₁/N₂/N₃. Empty whenever the forest
    /// is maximal on a graph of minimum degree three.
    pub n_other: BTreeSet<VertexId>,
    /// Non-U′ outside vertices keyed by the number of N₁ vertices in their
    /// component of G[(U − U′) ∪ N₁].
    pub u: BTreeMap<usize, BTreeSet<VertexId>>,
    pub u_prime: BTreeSet<VertexId>,
}

impl Partition {
    pub fn n3_all(&self) -> BTreeSet<VertexId> {
        self.n3.values().flatten().copied().collect()
    }

    pub fn u_all(&self) -> BTreeSet<VertexId> {
        self.u.values().flatten().chain(&self.u_prime).copied().collect()
    }

    pub fn n_all(&self) -> BTreeSet<VertexId> {
        let mut n: BTreeSet<VertexId> = self.n1.union(&self.n2).copied().collect();
        n.extend(self.n3_all());
        n.extend(&self.n_other);
        n
    }

    pub fn n3_i(&self, i: usize) -> usize {
        self.n3.get(&i).map_or(0, BTreeSet::len)
    }

    pub fn u_j(&self, j: usize) -> usize {
        self.u.get(&j).map_or(0, BTreeSet::len)
    }

    /// N₃ vertices adjacent to some U′ vertex.
    pub fn hm_adjacent_to_u_prime(&self, g: &Graph) -> BTreeSet<VertexId> {
        let n3 = self.n3_all();
        self.u_prime
            .iter()
            .flat_map(|&u| g.neighbors(u).iter().copied())
            .filter(|x| n3.contains(x))
            .collect()
    }

    pub fn counts(&self) -> PartitionCounts {
        let mut c = PartitionCounts {
            r: self.roots.len(),
            i: self.internal.len(),
            l: self.leaves.len(),
            n: self.n_all().len(),
            u: self.u_all().len(),
            n1: self.n1.len(),
            n2: self.n2.len(),
            n3: self.n3_all().len(),
            n_other: self.n_other.len(),
            u_prime: self.u_prime.len(),
            ..Default::default()
        };
        for i in 1..=8 {
            c.n3_i[i - 1] = self.n3_i(i);
        }
        for j in 0..8 {
            c.u_j[j] = self.u_j(j);
        }
        c.out_of_range = self.n3.keys().filter(|&&i| !(1..=8).contains(&i)).map(|i| self.n3[i].len()).sum::<usize>()
            + self.u.keys().filter(|&&j| j > 7).map(|j| self.u[j].len()).sum::<usize>();
        c
    }

    /// Constraints (1)–(4) on the class sizes, evaluated in exact integer
    /// arithmetic.
    pub fn check_constraints(&self) -> Result<(), Vec<ConstraintViolation>> {
        self.counts().check_constraints()
    }
}

/// Class sizes of a [`Partition`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PartitionCounts {
    pub r: usize,
    pub i: usize,
    pub l: usize,
    pub n: usize,
    pub u: usize,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    /// `n3_i[k]` is |N₃,ₖ₊₁|.
    pub n3_i: [usize; 8],
    pub u_j: [usize; 8],
    pub u_prime: usize,
    pub n_other: usize,
    /// Vertices whose N₃ or U index fell outside 1..=8 / 0..=7.
    pub out_of_range: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintViolation {
    pub constraint: u8,
    /// Left and right sides scaled to a common integer denominator.
    pub lhs: i64,
    pub rhs: i64,
}

impl fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "constraint ({}) violated: {} > {}", self.constraint, self.lhs, self.rhs)
    }
}

impl PartitionCounts {
    pub fn add(&mut self, other: &PartitionCounts) {
        self.r += other.r;
        self.i += other.i;
        self.l += other.l;
        self.n += other.n;
        self.u += other.u;
        self.n1 += other.n1;
        self.n2 += other.n2;
        self.n3 += other.n3;
        for k in 0..8 {
            self.n3_i[k] += other.n3_i[k];
            self.u_j[k] += other.u_j[k];
        }
        self.u_prime += other.u_prime;
        self.n_other += other.n_other;
        self.out_of_range += other.out_of_range;
    }

    pub fn check_constraints(&self) -> Result<(), Vec<ConstraintViolation>> {
        let z = |x: usize| x as i64;
        let mut bad = Vec::new();
        let mut check = |constraint: u8, lhs: i64, rhs: i64| {
            if lhs > rhs {
                bad.push(ConstraintViolation { constraint, lhs, rhs });
            }
        };
        // (1) 4|R| + 2|I| ≤ |L|
        check(1, 4 * z(self.r) + 2 * z(self.i), z(self.l));
        // (2) |N₁| + 2|N₂| + |N₃| ≤ 2|L|
        check(2, z(self.n1) + 2 * z(self.n2) + z(self.n3), 2 * z(self.l));
        // (3) scaled by 210: 42|N₃,₅| + 70|N₃,₆| + 150|N₃,₇| + 210|N₃,₈| ≤ 210|U′|
        let n3 = |i: usize| z(self.n3_i[i - 1]);
        check(3, 42 * n3(5) + 70 * n3(6) + 150 * n3(7) + 210 * n3(8), 210 * z(self.u_prime));
        // (4) scaled by 840: Σ 840·(10−j)/(8−j)·|Uⱼ| ≤ 840·(2|N₂| + 3|N₃| − 3|U′|)
        let lhs: i64 = (0..8).map(|j| 840 * (10 - j as i64) / (8 - j as i64) * z(self.u_j[j])).sum();
        check(4, lhs, 840 * (2 * z(self.n2) + 3 * z(self.n3) - 3 * z(self.u_prime)));
        if bad.is_empty() {
            Ok(())
        } else {
            Err(bad)
        }
    }
}

/// Classifies every vertex of `g` relative to `f`.
pub fn partition(g: &Graph, f: &BushyForest) -> Partition {
    let in_forest = f.vertex_set();
    let mut p = Partition::default();
    for t in &f.trees {
        p.roots.insert(t.root);
        p.internal.extend(t.internal.iter().filter(|&&x| x != t.root));
        p.leaves.extend(&t.leaves);
    }

    let hms = high_magnitude_vertices(g, f);
    let mut hm_per_tree = vec![0usize; f.trees.len()];
    let owners = f.owners();
    let adjacent_trees = |v: VertexId| -> BTreeSet<usize> {
        g.neighbors(v).iter().filter_map(|u| owners.get(u).copied()).collect()
    };
    for hm in &hms {
        for ti in adjacent_trees(hm.vertex) {
            hm_per_tree[ti] += 1;
        }
    }
    let hm_set: BTreeSet<VertexId> = hms.iter().map(|h| h.vertex).collect();
    for &v in &hm_set {
        let i = adjacent_trees(v).into_iter().map(|ti| hm_per_tree[ti]).max().unwrap_or(0);
        p.n3.entry(i).or_default().insert(v);
    }

    let mut outside_u = BTreeSet::new();
    for v in g.vertices().filter(|v| !in_forest.contains(v)) {
        let leaf_nbrs = g.neighbors(v).iter().filter(|u| p.leaves.contains(u)).count();
        let forest_nbrs = g.neighbors(v).iter().filter(|u| in_forest.contains(u)).count();
        if forest_nbrs == 0 {
            outside_u.insert(v);
        } else if hm_set.contains(&v) {
            // already in N₃
        } else if leaf_nbrs >= 2 {
            p.n2.insert(v);
        } else if leaf_nbrs == 1 && g.degree(v) == 3 {
            p.n1.insert(v);
        } else {
            p.n_other.insert(v);
        }
    }

    for &v in &outside_u {
        let nbrs = g.neighbors(v);
        if nbrs.len() == 3 && nbrs.iter().all(|x| hm_set.contains(x)) {
            p.u_prime.insert(v);
        }
    }
    let rest: BTreeSet<VertexId> = outside_u.difference(&p.u_prime).copied().collect();
    let members: BTreeSet<VertexId> = rest.union(&p.n1).copied().collect();
    for comp in g.components_where(|v| members.contains(&v)) {
        let j = comp.intersection(&p.n1).count();
        let us: Vec<VertexId> = comp.intersection(&rest).copied().collect();
        if !us.is_empty() {
            p.u.entry(j).or_default().extend(us);
        }
    }
    p
}
