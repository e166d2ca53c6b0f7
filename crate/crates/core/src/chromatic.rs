//! Chromatic forests: K₁,₃ trees over the vertices outside the bushy forest,
//! each with at most five attached grandchildren.
//!
//! Coloring a tree's root leaves its children with two colors each and every
//! grandchild with a colored neighbor's color removed, which is what makes
//! the (3,2)-CSP on the remainder cheap. The forest is built greedily,
//! improved by replacing one tree with two where possible, and then every
//! admissible vertex is attached as a grandchild. The single configuration
//! where that can exceed five grandchildren is set aside and colored
//! directly once its boundary is known.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::color::{Color, Coloring};
use crate::graph::{Graph, VertexId};

/// Per-tree grandchild cap, and the per-child cap.
pub const MAX_GRANDCHILDREN: usize = 5;
pub const MAX_GRANDCHILDREN_PER_CHILD: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChromaticTree {
    pub root: VertexId,
    pub children: [VertexId; 3],
    /// Grandchild → the child it hangs from.
    pub grandchildren: BTreeMap<VertexId, VertexId>,
}

impl ChromaticTree {
    fn new(gs: &Graph, root: VertexId) -> Self {
        let ch: Vec<VertexId> = gs.neighbors(root).iter().copied().collect();
        ChromaticTree { root, children: [ch[0], ch[1], ch[2]], grandchildren: BTreeMap::new() }
    }

    /// Root and children.
    pub fn core(&self) -> [VertexId; 4] {
        [self.root, self.children[0], self.children[1], self.children[2]]
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.core().into_iter().chain(self.grandchildren.keys().copied())
    }

    pub fn grandchildren_of(&self, child: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.grandchildren.iter().filter(move |(_, &c)| c == child).map(|(&g, _)| g)
    }

    pub fn grandchild_count(&self) -> usize {
        self.grandchildren.len()
    }

    /// Whether the tree respects the size caps and uses only edges of `gs`.
    pub fn is_valid(&self, gs: &Graph) -> bool {
        let distinct: BTreeSet<VertexId> = self.vertices().collect();
        distinct.len() == 4 + self.grandchildren.len()
            && self.children.iter().all(|&c| gs.adjacent(self.root, c))
            && self.grandchildren.iter().all(|(&g, &c)| self.children.contains(&c) && gs.adjacent(g, c))
            && self.grandchildren.len() <= MAX_GRANDCHILDREN
            && self
                .children
                .iter()
                .all(|&c| self.grandchildren_of(c).count() <= MAX_GRANDCHILDREN_PER_CHILD)
    }
}

/// A K₁,₃ tree whose six candidate grandchildren close into a 6-cycle and
/// which touches the rest of the graph only through `boundary`. Every proper
/// coloring of the boundary extends to it, so it is colored last.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrivialConfiguration {
    pub tree: ChromaticTree,
    pub boundary: BTreeSet<VertexId>,
}

impl TrivialConfiguration {
    pub fn vertices(&self) -> BTreeSet<VertexId> {
        self.tree.vertices().collect()
    }

    /// Colors the configuration given colors for every boundary vertex in
    /// `coloring`. Returns false if no extension exists.
    pub fn color(&self, g: &Graph, coloring: &mut Coloring) -> bool {
        let inner: Vec<VertexId> = self.vertices().into_iter().collect();
        extend_coloring(g, &inner, coloring)
    }
}

/// Backtracking extension of `coloring` to `vertices` (in the given order).
fn extend_coloring(g: &Graph, vertices: &[VertexId], coloring: &mut Coloring) -> bool {
    fn go(g: &Graph, vertices: &[VertexId], i: usize, coloring: &mut Coloring) -> bool {
        let Some(&v) = vertices.get(i) else { return true };
        for c in Color::ALL {
            if g.neighbors(v).iter().any(|u| coloring.get(u) == Some(&c)) {
                continue;
            }
            coloring.insert(v, c);
            if go(g, vertices, i + 1, coloring) {
                return true;
            }
        }
        coloring.remove(&v);
        false
    }
    go(g, vertices, 0, coloring)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ChromaticForest {
    pub trees: Vec<ChromaticTree>,
    pub trivially_colored: Vec<TrivialConfiguration>,
    /// Admissible vertices that had to be attached beyond the caps.
    pub cap_violations: usize,
}

impl ChromaticForest {
    pub fn covered(&self) -> BTreeSet<VertexId> {
        self.trees.iter().flat_map(ChromaticTree::vertices).collect()
    }

    pub fn trivial_vertices(&self) -> BTreeSet<VertexId> {
        self.trivially_colored.iter().flat_map(|t| t.vertices()).collect()
    }

    pub fn schedules(&self) -> Vec<EnumerationSchedule> {
        self.trees.iter().map(schedule).collect()
    }
}

fn closed_neighborhood(gs: &Graph, v: VertexId) -> BTreeSet<VertexId> {
    let mut s = gs.neighbors(v).clone();
    s.insert(v);
    s
}

/// Adds K₁,₃ trees at uncovered vertices with three uncovered neighbors, by id.
fn extend_greedily(gs: &Graph, trees: &mut Vec<ChromaticTree>, covered: &mut BTreeSet<VertexId>) {
    for v in gs.vertices() {
        if !covered.contains(&v) && gs.degree(v) == 3 && gs.neighbors(v).is_disjoint(covered) {
            covered.extend(closed_neighborhood(gs, v));
            trees.push(ChromaticTree::new(gs, v));
        }
    }
}

/// Tries to replace tree `ti` by two disjoint K₁,₃ trees rooted among its
/// vertices and their neighbors.
fn try_split(gs: &Graph, trees: &mut Vec<ChromaticTree>, covered: &mut BTreeSet<VertexId>, ti: usize) -> bool {
    let core = trees[ti].core();
    let mut free = covered.clone();
    for v in core {
        free.remove(&v);
    }
    let mut candidates: BTreeSet<VertexId> = core.into_iter().collect();
    for v in core {
        candidates.extend(gs.neighbors(v));
    }
    let roots: Vec<VertexId> = candidates
        .into_iter()
        .filter(|&r| gs.degree(r) == 3 && closed_neighborhood(gs, r).is_disjoint(&free))
        .collect();
    for (i, &a) in roots.iter().enumerate() {
        let na = closed_neighborhood(gs, a);
        for &b in &roots[i + 1..] {
            if na.is_disjoint(&closed_neighborhood(gs, b)) {
                trees.remove(ti);
                *covered = free;
                for r in [a, b] {
                    covered.extend(closed_neighborhood(gs, r));
                    trees.push(ChromaticTree::new(gs, r));
                }
                return true;
            }
        }
    }
    false
}

/// A maximal K₁,₃ forest over `gs` at a fixpoint of the 1-for-2 move.
/// `gs` must have maximum degree three, so each tree is a closed
/// neighborhood.
pub fn build_k13_forest(gs: &Graph) -> Vec<ChromaticTree> {
    let mut trees = Vec::new();
    let mut covered = BTreeSet::new();
    extend_greedily(gs, &mut trees, &mut covered);
    'improve: loop {
        for ti in 0..trees.len() {
            if try_split(gs, &mut trees, &mut covered, ti) {
                extend_greedily(gs, &mut trees, &mut covered);
                continue 'improve;
            }
        }
        break;
    }
    trees
}

/// Sum over candidates adjacent to the tree of 1/(number of adjacent trees).
pub fn candidate_weight(gs: &Graph, trees: &[ChromaticTree], ti: usize, admissible: &BTreeSet<VertexId>) -> f64 {
    let covered: BTreeSet<VertexId> = trees.iter().flat_map(|t| t.core()).collect();
    let adjacent = |c: VertexId, t: &ChromaticTree| t.children.iter().any(|&x| gs.adjacent(c, x));
    admissible
        .iter()
        .filter(|c| !covered.contains(c) && gs.contains(**c))
        .filter(|&&c| adjacent(c, &trees[ti]))
        .map(|&c| 1.0 / trees.iter().filter(|t| adjacent(c, t)).count() as f64)
        .sum()
}

struct FlowEdge {
    to: usize,
    cap: i32,
    rev: usize,
}

/// Unit-augmenting max-flow for the grandchild assignment.
struct Flow {
    adj: Vec<Vec<FlowEdge>>,
}

impl Flow {
    fn new(n: usize) -> Self {
        Flow { adj: (0..n).map(|_| Vec::new()).collect() }
    }

    fn add(&mut self, a: usize, b: usize, cap: i32) -> (usize, usize) {
        let ia = self.adj[a].len();
        let ib = self.adj[b].len();
        self.adj[a].push(FlowEdge { to: b, cap, rev: ib });
        self.adj[b].push(FlowEdge { to: a, cap: 0, rev: ia });
        (a, ia)
    }

    fn push_path(&mut self, path: &[(usize, usize)]) {
        for &(u, i) in path {
            let (to, rev) = (self.adj[u][i].to, self.adj[u][i].rev);
            self.adj[u][i].cap -= 1;
            self.adj[to][rev].cap += 1;
        }
    }

    /// Breadth-first augmenting path from `s` to `t`, if any; pushes one unit.
    fn augment(&mut self, s: usize, t: usize) -> bool {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for (i, e) in self.adj[u].iter().enumerate() {
                if e.cap > 0 && !seen[e.to] {
                    seen[e.to] = true;
                    prev[e.to] = Some((u, i));
                    queue.push_back(e.to);
                }
            }
        }
        if !seen[t] {
            return false;
        }
        let mut path = Vec::new();
        let mut cur = t;
        while let Some((u, i)) = prev[cur] {
            path.push((u, i));
            cur = u;
        }
        self.push_path(&path);
        true
    }
}

/// Candidates not yet covered, with the (tree, child) slots they may use.
fn candidate_slots(
    gs: &Graph,
    trees: &[ChromaticTree],
    admissible: &BTreeSet<VertexId>,
) -> BTreeMap<VertexId, Vec<(usize, VertexId)>> {
    let covered: BTreeSet<VertexId> = trees.iter().flat_map(|t| t.core()).collect();
    let mut out = BTreeMap::new();
    for &c in admissible {
        if covered.contains(&c) || !gs.contains(c) {
            continue;
        }
        let slots: Vec<(usize, VertexId)> = trees
            .iter()
            .enumerate()
            .flat_map(|(ti, t)| t.children.iter().filter(|&&x| gs.adjacent(c, x)).map(move |&x| (ti, x)))
            .collect();
        out.insert(c, slots);
    }
    out
}

/// Capacity-respecting assignment: greedy toward the tree with the fewest
/// grandchildren, completed by augmenting paths. Returns the candidates
/// left unassigned.
fn assign_with_caps(
    trees: &mut [ChromaticTree],
    slots: &BTreeMap<VertexId, Vec<(usize, VertexId)>>,
) -> Vec<VertexId> {
    for t in trees.iter_mut() {
        t.grandchildren.clear();
    }
    let mut order: Vec<VertexId> = slots.keys().copied().collect();
    order.sort_by_key(|c| {
        let distinct: BTreeSet<usize> = slots[c].iter().map(|s| s.0).collect();
        (distinct.len(), *c)
    });
    let mut pending = Vec::new();
    for &c in &order {
        let choice = slots[&c]
            .iter()
            .filter(|&&(ti, x)| {
                trees[ti].grandchild_count() < MAX_GRANDCHILDREN
                    && trees[ti].grandchildren_of(x).count() < MAX_GRANDCHILDREN_PER_CHILD
            })
            .min_by_key(|&&(ti, x)| (trees[ti].grandchild_count(), ti, x));
        match choice {
            Some(&(ti, x)) => {
                trees[ti].grandchildren.insert(c, x);
            }
            None => pending.push(c),
        }
    }
    if pending.is_empty() {
        return pending;
    }

    // source 0, sink 1, then candidates, then (tree, child) nodes, then trees
    let cands: Vec<VertexId> = order.clone();
    let cand_index: BTreeMap<VertexId, usize> = cands.iter().enumerate().map(|(i, &c)| (c, 2 + i)).collect();
    let mut child_index: BTreeMap<(usize, VertexId), usize> = BTreeMap::new();
    let mut next = 2 + cands.len();
    for (ti, t) in trees.iter().enumerate() {
        for &x in &t.children {
            child_index.insert((ti, x), next);
            next += 1;
        }
    }
    let tree_base = next;
    let mut flow = Flow::new(tree_base + trees.len());
    let mut source_edge = BTreeMap::new();
    let mut slot_edge: BTreeMap<(VertexId, usize, VertexId), (usize, usize)> = BTreeMap::new();
    let mut child_edge = BTreeMap::new();
    let mut tree_edge = Vec::new();
    for &c in &cands {
        source_edge.insert(c, flow.add(0, cand_index[&c], 1));
        for &(ti, x) in &slots[&c] {
            slot_edge.insert((c, ti, x), flow.add(cand_index[&c], child_index[&(ti, x)], 1));
        }
    }
    for (&(ti, x), &node) in &child_index {
        child_edge.insert((ti, x), flow.add(node, tree_base + ti, MAX_GRANDCHILDREN_PER_CHILD as i32));
    }
    for ti in 0..trees.len() {
        tree_edge.push(flow.add(tree_base + ti, 1, MAX_GRANDCHILDREN as i32));
    }
    for (ti, t) in trees.iter().enumerate() {
        for (&c, &x) in &t.grandchildren {
            flow.push_path(&[source_edge[&c], slot_edge[&(c, ti, x)], child_edge[&(ti, x)], tree_edge[ti]]);
        }
    }
    for _ in 0..pending.len() {
        if !flow.augment(0, 1) {
            break;
        }
    }
    for t in trees.iter_mut() {
        t.grandchildren.clear();
    }
    let mut unassigned = Vec::new();
    for &c in &cands {
        let hit = slots[&c].iter().find(|&&(ti, x)| {
            let (u, i) = slot_edge[&(c, ti, x)];
            flow.adj[u][i].cap == 0
        });
        match hit {
            Some(&(ti, x)) => {
                trees[ti].grandchildren.insert(c, x);
            }
            None => unassigned.push(c),
        }
    }
    unassigned
}

/// Checks whether tree `t` with candidate set `cands` is the closed
/// six-grandchild configuration whose every boundary coloring extends.
fn trivial_configuration(
    g: &Graph,
    gs: &Graph,
    t: &ChromaticTree,
    cands: &BTreeSet<VertexId>,
) -> Option<TrivialConfiguration> {
    if cands.len() != 6 {
        return None;
    }
    let mut grandchildren = BTreeMap::new();
    for &x in &t.children {
        let mine: Vec<VertexId> = cands.iter().copied().filter(|&c| gs.adjacent(c, x)).collect();
        if mine.len() != 2 {
            return None;
        }
        for c in mine {
            if grandchildren.insert(c, x).is_some() {
                return None;
            }
        }
    }
    let block: BTreeSet<VertexId> = t.core().into_iter().chain(cands.iter().copied()).collect();
    if block.iter().any(|&v| !gs.neighbors(v).is_subset(&block)) {
        return None;
    }
    // the six grandchildren form a single cycle
    let ring = gs.induced_subgraph(cands);
    if ring.vertices().any(|v| ring.degree(v) != 2) || ring.components().len() != 1 {
        return None;
    }
    let boundary: BTreeSet<VertexId> = block
        .iter()
        .flat_map(|&v| g.neighbors(v).iter().copied())
        .filter(|u| !block.contains(u))
        .collect();
    if boundary.len() > 8 {
        return None;
    }
    let common = {
        let mut it = boundary.iter();
        let first = it.next().map(|&b| g.neighbors(b).clone()).unwrap_or_default();
        it.fold(first, |acc, &b| acc.intersection(g.neighbors(b)).copied().collect())
    };
    let two_colors_suffice = !boundary.is_empty() && common.iter().any(|c| !block.contains(c));
    let bvec: Vec<VertexId> = boundary.iter().copied().collect();
    let inner: Vec<VertexId> = block.iter().copied().collect();
    let total = 3usize.pow(bvec.len() as u32);
    for code in 0..total {
        let mut coloring = Coloring::new();
        let mut k = code;
        for &b in &bvec {
            coloring.insert(b, Color::ALL[k % 3]);
            k /= 3;
        }
        let used: BTreeSet<Color> = coloring.values().copied().collect();
        if two_colors_suffice && used.len() > 2 {
            continue;
        }
        let proper = bvec.iter().all(|&a| {
            g.neighbors(a).iter().all(|b| coloring.get(b).is_none_or(|cb| *cb != coloring[&a]))
        });
        if proper && !extend_coloring(g, &inner, &mut coloring) {
            return None;
        }
    }
    let mut tree = t.clone();
    tree.grandchildren = grandchildren;
    Some(TrivialConfiguration { tree, boundary })
}

/// Builds the chromatic forest over `g` minus `bushy_vertices`, attaching
/// every admissible vertex as a grandchild.
pub fn build_chromatic_forest(
    g: &Graph,
    bushy_vertices: &BTreeSet<VertexId>,
    admissible: &BTreeSet<VertexId>,
) -> ChromaticForest {
    let keep: BTreeSet<VertexId> = g.vertices().filter(|v| !bushy_vertices.contains(v)).collect();
    let mut gs = g.induced_subgraph(&keep);
    let mut trees = build_k13_forest(&gs);
    let mut forest = ChromaticForest::default();
    let mut admissible: BTreeSet<VertexId> = admissible.iter().copied().filter(|v| keep.contains(v)).collect();
    loop {
        let slots = candidate_slots(&gs, &trees, &admissible);
        let unassigned = assign_with_caps(&mut trees, &slots);
        if unassigned.is_empty() {
            break;
        }
        // set aside a closed six-grandchild configuration, then retry
        let routed = unassigned.iter().find_map(|c| {
            slots[c].iter().map(|s| s.0).collect::<BTreeSet<_>>().into_iter().find_map(|ti| {
                let cands: BTreeSet<VertexId> =
                    slots.iter().filter(|(_, s)| s.iter().any(|x| x.0 == ti)).map(|(&c, _)| c).collect();
                trivial_configuration(g, &gs, &trees[ti], &cands).map(|cfg| (ti, cfg))
            })
        });
        if let Some((ti, cfg)) = routed {
            trees.remove(ti);
            let block = cfg.vertices();
            admissible.retain(|v| !block.contains(v));
            let rest: BTreeSet<VertexId> = gs.vertices().filter(|v| !block.contains(v)).collect();
            gs = gs.induced_subgraph(&rest);
            forest.trivially_colored.push(cfg);
            continue;
        }
        // no capacity-respecting assignment: overfill the emptiest adjacent tree
        for c in unassigned {
            if let Some(&(ti, x)) = slots[&c].iter().min_by_key(|&&(ti, x)| (trees[ti].grandchild_count(), ti, x)) {
                trees[ti].grandchildren.insert(c, x);
                forest.cap_violations += 1;
            }
        }
        break;
    }
    forest.trees = trees;
    forest
}

/// How the enumeration colors one chromatic tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum EnumerationSchedule {
    /// Three cases: one per root color.
    RootBranch { root: VertexId },
    /// Nine cases over the two children with two grandchildren each: equal
    /// colors (3 cases) or distinct colors with the root forced to the
    /// third color (6 cases).
    TwoChildBranch { root: VertexId, first: VertexId, second: VertexId },
}

impl EnumerationSchedule {
    /// The fixed colorings this schedule enumerates.
    pub fn cases(&self) -> Vec<Vec<(VertexId, Color)>> {
        match *self {
            Self::RootBranch { root } => Color::ALL.iter().map(|&c| vec![(root, c)]).collect(),
            Self::TwoChildBranch { root, first, second } => {
                let mut out = Vec::with_capacity(9);
                for a in Color::ALL {
                    out.push(vec![(first, a), (second, a)]);
                }
                for a in Color::ALL {
                    for b in Color::ALL.into_iter().filter(|&b| b != a) {
                        out.push(vec![(first, a), (second, b), (root, Color::third(a, b))]);
                    }
                }
                out
            }
        }
    }
}

pub fn schedule(tree: &ChromaticTree) -> EnumerationSchedule {
    if tree.grandchild_count() == MAX_GRANDCHILDREN {
        let full: Vec<VertexId> = tree
            .children
            .iter()
            .copied()
            .filter(|&c| tree.grandchildren_of(c).count() == 2)
            .collect();
        if let [first, second] = full[..] {
            return EnumerationSchedule::TwoChildBranch { root: tree.root, first, second };
        }
    }
    EnumerationSchedule::RootBranch { root: tree.root }
}
