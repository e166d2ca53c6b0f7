//! End-to-end exact 3-coloring.
//!
//! Each connected component is reduced (low-degree elimination, then
//! branching on degree-three structures), after which a maximal
//! low-magnitude bushy forest and a chromatic forest are built over the
//! residual. The solver enumerates colors for the bushy roots, the other
//! internal vertices and the chromatic schedules, and hands each complete
//! assignment to the (3,2)-CSP. The first satisfiable leaf is extended back
//! to the input graph by replaying the reduction trace.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::bushy::{self, PartitionCounts};
use crate::chromatic::{self, ChromaticForest};
use crate::color::{Color, ColorSet, Coloring};
use crate::csp::{CspInstance, CspStats};
use crate::graph::{Graph, VertexId};
use crate::reduce::{replay, Instance};

/// Largest graph the brute-force oracle accepts by default.
pub const DEFAULT_ORACLE_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Colorable(Coloring),
    NotColorable,
}

impl SolveStatus {
    pub fn is_colorable(&self) -> bool {
        matches!(self, SolveStatus::Colorable(_))
    }

    pub fn coloring(&self) -> Option<&Coloring> {
        match self {
            SolveStatus::Colorable(c) => Some(c),
            SolveStatus::NotColorable => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub stats: SearchStats,
}

fn as_secs<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

/// Counters gathered during one solve. All counts only grow while solving.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SearchStats {
    /// Instances visited by the degree-three branching, root included.
    pub branch_nodes: u64,
    pub components: u64,
    pub csp_calls: u64,
    pub csp_nodes: u64,
    /// Complete enumeration assignments handed to the CSP.
    pub enumerated_assignments: u64,
    /// Sum over planned components of 3^|R|·2^|I|·Π(cases per chromatic tree).
    pub enumeration_bound: f64,
    /// Class sizes summed over every planned component.
    pub partition: PartitionCounts,
    pub chromatic_trees: u64,
    pub trivial_configurations: u64,
    pub cap_violations: u64,
    /// Planned components whose partition violated one of constraints (1)–(4).
    pub constraint_diagnostics: u64,
    #[serde(serialize_with = "as_secs")]
    pub wall_time: Duration,
}

impl SearchStats {
    pub fn add(&mut self, other: &SearchStats) {
        self.branch_nodes += other.branch_nodes;
        self.components += other.components;
        self.csp_calls += other.csp_calls;
        self.csp_nodes += other.csp_nodes;
        self.enumerated_assignments += other.enumerated_assignments;
        self.enumeration_bound += other.enumeration_bound;
        self.partition.add(&other.partition);
        self.chromatic_trees += other.chromatic_trees;
        self.trivial_configurations += other.trivial_configurations;
        self.cap_violations += other.cap_violations;
        self.constraint_diagnostics += other.constraint_diagnostics;
    }

    /// The stats with timing zeroed, for run-to-run comparisons.
    pub fn without_timing(&self) -> SearchStats {
        SearchStats { wall_time: Duration::ZERO, ..self.clone() }
    }
}

/// Receives solver progress. Implementations must be cheap; the solver
/// calls them from worker threads.
pub trait StatsSink: Send + Sync {
    /// A component was planned: its partition and chromatic forest are known.
    fn component_planned(&self, _counts: &PartitionCounts, _forest: &ChromaticForest) {}
    fn finished(&self, _stats: &SearchStats) {}
}

/// Keeps every finished [`SearchStats`].
#[derive(Default)]
pub struct CollectingSink {
    pub runs: Mutex<Vec<SearchStats>>,
    pub plans: Mutex<Vec<PartitionCounts>>,
}

impl StatsSink for CollectingSink {
    fn component_planned(&self, counts: &PartitionCounts, _forest: &ChromaticForest) {
        self.plans.lock().unwrap().push(*counts);
    }

    fn finished(&self, stats: &SearchStats) {
        self.runs.lock().unwrap().push(stats.clone());
    }
}

#[derive(Clone)]
pub struct SolverConfig {
    /// Explore every branch and enumeration leaf instead of stopping at the
    /// first coloring found.
    pub exhaustive: bool,
    /// Worker threads for the enumeration; 1 keeps runs deterministic.
    pub jobs: usize,
    pub sink: Option<Arc<dyn StatsSink>>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { exhaustive: false, jobs: 1, sink: None }
    }
}

impl std::fmt::Debug for SolverConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolverConfig")
            .field("exhaustive", &self.exhaustive)
            .field("jobs", &self.jobs)
            .field("sink", &self.sink.is_some())
            .finish()
    }
}

pub fn solve_3coloring(g: &Graph) -> SolveResult {
    solve_with_config(g, &SolverConfig::default())
}

pub fn solve_with_config(g: &Graph, config: &SolverConfig) -> SolveResult {
    let start = Instant::now();
    let mut stats = SearchStats::default();
    let mut coloring = Some(Coloring::new());
    for comp in g.components() {
        stats.components += 1;
        let inst = Instance::new(g.induced_subgraph(&comp)).eliminated_low_degree();
        let found = search(&inst, config, &mut stats);
        match (found, coloring.as_mut()) {
            (Some(c), Some(acc)) => acc.extend(c),
            (None, _) => {
                coloring = None;
                if !config.exhaustive {
                    break;
                }
            }
            (Some(_), None) => {}
        }
    }
    stats.wall_time = start.elapsed();
    if let Some(sink) = &config.sink {
        sink.finished(&stats);
    }
    let status = match coloring {
        Some(c) => {
            debug_assert!(verify_coloring(g, &c).is_ok());
            SolveStatus::Colorable(c)
        }
        None => SolveStatus::NotColorable,
    };
    SolveResult { status, stats }
}

fn search(inst: &Instance, config: &SolverConfig, stats: &mut SearchStats) -> Option<Coloring> {
    stats.branch_nodes += 1;
    if let Some(v) = inst.find_branch_target() {
        let mut found = None;
        for child in inst.branch_on(v) {
            if let Some(c) = search(&child, config, stats) {
                if !config.exhaustive {
                    return Some(c);
                }
                found.get_or_insert(c);
            }
        }
        return found;
    }
    let mut residual = Coloring::new();
    for comp in inst.graph.components() {
        let sub = inst.graph.induced_subgraph(&comp);
        residual.extend(solve_residual_component(&sub, config, stats)?);
    }
    Some(replay(&inst.trace, &residual).expect("replay of a proper residual coloring succeeds"))
}

/// One enumeration step: a set of alternatives, each fixing some vertices.
enum Step {
    Fixed(Vec<Vec<(VertexId, Color)>>),
    /// Two colors different from the (already fixed) parent.
    Internal { vertex: VertexId, parent: VertexId },
}

struct Plan {
    graph: Graph,
    steps: Vec<Step>,
    forest: ChromaticForest,
    /// Residual minus the set-aside configurations.
    csp_graph: Graph,
}

fn plan_component(h: &Graph, stats: &mut SearchStats, config: &SolverConfig) -> Plan {
    let bushy = bushy::to_low_magnitude(h, &bushy::build_maximal_bushy_forest(h));
    let partition = bushy::partition(h, &bushy);
    let counts = partition.counts();
    if partition.check_constraints().is_err() {
        stats.constraint_diagnostics += 1;
    }
    let mut admissible = partition.u_all();
    admissible.extend(partition.hm_adjacent_to_u_prime(h));
    let forest = chromatic::build_chromatic_forest(h, &bushy.vertex_set(), &admissible);

    let mut steps = Vec::new();
    let mut bound = 1.0f64;
    for t in &bushy.trees {
        steps.push(Step::Fixed(Color::ALL.iter().map(|&c| vec![(t.root, c)]).collect()));
        bound *= 3.0;
        for x in t.internal_bfs().into_iter().skip(1) {
            steps.push(Step::Internal { vertex: x, parent: t.parent[&x] });
            bound *= 2.0;
        }
    }
    for s in forest.schedules() {
        let cases = s.cases();
        bound *= cases.len() as f64;
        steps.push(Step::Fixed(cases));
    }
    stats.enumeration_bound += bound;
    stats.partition.add(&counts);
    stats.chromatic_trees += forest.trees.len() as u64;
    stats.trivial_configurations += forest.trivially_colored.len() as u64;
    stats.cap_violations += forest.cap_violations as u64;
    if let Some(sink) = &config.sink {
        sink.component_planned(&counts, &forest);
    }
    let trivial = forest.trivial_vertices();
    let keep: BTreeSet<VertexId> = h.vertices().filter(|v| !trivial.contains(v)).collect();
    Plan { csp_graph: h.induced_subgraph(&keep), graph: h.clone(), steps, forest }
}

fn solve_residual_component(h: &Graph, config: &SolverConfig, stats: &mut SearchStats) -> Option<Coloring> {
    if h.vertex_count() <= 2 {
        stats.csp_calls += 1;
        let csp = CspInstance::from_partial_coloring(&Instance::new(h.clone()));
        let mut cs = CspStats::default();
        let sol = csp.solve_with_stats(&mut cs);
        stats.csp_nodes += cs.nodes;
        return sol.map(|s| s.into_coloring());
    }
    let plan = plan_component(h, stats, config);
    if config.jobs <= 1 {
        let mut fixed = Coloring::new();
        let mut found = None;
        enumerate(&plan, 0, &mut fixed, config, stats, &AtomicBool::new(false), &mut found);
        found
    } else {
        enumerate_parallel(&plan, config, stats)
    }
}

/// Whether fixing `v` to `c` keeps the partial coloring proper and leaves
/// every uncolored neighbor a color.
fn consistent(g: &Graph, fixed: &Coloring, v: VertexId, c: Color) -> bool {
    if let Some(&old) = fixed.get(&v) {
        return old == c;
    }
    for &u in g.neighbors(v) {
        match fixed.get(&u) {
            Some(&cu) if cu == c => return false,
            Some(_) => {}
            None => {
                let mut dom = ColorSet::FULL.without(c);
                for w in g.neighbors(u) {
                    if let Some(&cw) = fixed.get(w) {
                        dom.remove(cw);
                    }
                }
                if dom.is_empty() {
                    return false;
                }
            }
        }
    }
    true
}

fn alternatives(plan: &Plan, step: usize, fixed: &Coloring) -> Vec<Vec<(VertexId, Color)>> {
    match &plan.steps[step] {
        Step::Fixed(cases) => cases.clone(),
        Step::Internal { vertex, parent } => {
            let pc = fixed[parent];
            Color::ALL.iter().filter(|&&c| c != pc).map(|&c| vec![(*vertex, c)]).collect()
        }
    }
}

/// Applies `case` to `fixed`, returning the vertices newly fixed, or `None`
/// (with `fixed` restored) if the case conflicts.
fn apply_case(g: &Graph, fixed: &mut Coloring, case: &[(VertexId, Color)]) -> Option<Vec<VertexId>> {
    let mut added = Vec::new();
    for &(v, c) in case {
        if !consistent(g, fixed, v, c) {
            for a in added {
                fixed.remove(&a);
            }
            return None;
        }
        if fixed.insert(v, c).is_none() {
            added.push(v);
        }
    }
    Some(added)
}

fn solve_leaf(plan: &Plan, fixed: &Coloring, stats: &mut SearchStats) -> Option<Coloring> {
    stats.enumerated_assignments += 1;
    stats.csp_calls += 1;
    let inst = Instance { graph: plan.csp_graph.clone(), trace: Vec::new(), fixed: fixed.clone() };
    let mut cs = CspStats::default();
    let sol = CspInstance::from_partial_coloring(&inst).solve_with_stats(&mut cs);
    stats.csp_nodes += cs.nodes;
    let mut coloring = fixed.clone();
    coloring.extend(sol?.assignment);
    let mut ok = true;
    for cfg in &plan.forest.trivially_colored {
        ok &= cfg.color(&plan.graph, &mut coloring);
    }
    if ok {
        return Some(coloring);
    }
    // a set-aside configuration failed to extend: solve it together with the rest
    stats.csp_calls += 1;
    let inst = Instance { graph: plan.graph.clone(), trace: Vec::new(), fixed: fixed.clone() };
    let sol = CspInstance::from_partial_coloring(&inst).solve_with_stats(&mut cs)?;
    let mut coloring = fixed.clone();
    coloring.extend(sol.assignment);
    Some(coloring)
}

fn enumerate(
    plan: &Plan,
    step: usize,
    fixed: &mut Coloring,
    config: &SolverConfig,
    stats: &mut SearchStats,
    stop: &AtomicBool,
    found: &mut Option<Coloring>,
) {
    if stop.load(Ordering::Relaxed) {
        return;
    }
    if step == plan.steps.len() {
        if let Some(c) = solve_leaf(plan, fixed, stats) {
            found.get_or_insert(c);
            if !config.exhaustive {
                stop.store(true, Ordering::Relaxed);
            }
        }
        return;
    }
    for case in alternatives(plan, step, fixed) {
        let Some(added) = apply_case(&plan.graph, fixed, &case) else { continue };
        enumerate(plan, step + 1, fixed, config, stats, stop, found);
        for v in added {
            fixed.remove(&v);
        }
        if found.is_some() && !config.exhaustive {
            return;
        }
    }
}

/// Expands consistent prefixes of the enumeration breadth-first until there
/// are enough to share among the workers.
fn prefixes(plan: &Plan, want: usize) -> (Vec<Coloring>, usize) {
    let mut frontier = vec![Coloring::new()];
    let mut depth = 0;
    while depth < plan.steps.len() && frontier.len() < want {
        let mut next = Vec::new();
        for fixed in &frontier {
            for case in alternatives(plan, depth, fixed) {
                let mut f = fixed.clone();
                if apply_case(&plan.graph, &mut f, &case).is_some() {
                    next.push(f);
                }
            }
        }
        frontier = next;
        depth += 1;
    }
    (frontier, depth)
}

fn enumerate_parallel(plan: &Plan, config: &SolverConfig, stats: &mut SearchStats) -> Option<Coloring> {
    let (work, depth) = prefixes(plan, config.jobs * 4);
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let best: Mutex<Option<(usize, Coloring)>> = Mutex::new(None);
    let totals = Mutex::new(SearchStats::default());
    std::thread::scope(|scope| {
        for _ in 0..config.jobs {
            scope.spawn(|| {
                let mut local = SearchStats::default();
                loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= work.len() || stop.load(Ordering::Relaxed) {
                        break;
                    }
                    let mut fixed = work[i].clone();
                    let mut found = None;
                    enumerate(plan, depth, &mut fixed, config, &mut local, &stop, &mut found);
                    if let Some(c) = found {
                        let mut b = best.lock().unwrap();
                        if b.as_ref().is_none_or(|(j, _)| i < *j) {
                            *b = Some((i, c));
                        }
                    }
                }
                totals.lock().unwrap().add(&local);
            });
        }
    });
    stats.add(&totals.into_inner().unwrap());
    best.into_inner().unwrap().map(|(_, c)| c)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringViolation {
    #[error("edge {0}-{1} is monochromatic")]
    Edge(VertexId, VertexId),
    #[error("{0} has no color")]
    Uncolored(VertexId),
}

/// Checks that every vertex is colored and every edge is bichromatic.
pub fn verify_coloring(g: &Graph, coloring: &Coloring) -> Result<(), ColoringViolation> {
    if let Some(v) = g.vertices().find(|v| !coloring.contains_key(v)) {
        return Err(ColoringViolation::Uncolored(v));
    }
    match g.edges().find(|(u, v)| coloring[u] == coloring[v]) {
        Some((u, v)) => Err(ColoringViolation::Edge(u, v)),
        None => Ok(()),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("brute force refuses {n} vertices (cap {cap})")]
pub struct OracleRefused {
    pub n: usize,
    pub cap: usize,
}

/// Exhaustive backtracking; the first vertex of each component is fixed to
/// color 0.
pub fn brute_force_with_cap(g: &Graph, cap: usize) -> Result<Option<Coloring>, OracleRefused> {
    let n = g.vertex_count();
    if n > cap {
        return Err(OracleRefused { n, cap });
    }
    let mut order = Vec::with_capacity(n);
    let mut firsts = BTreeSet::new();
    for comp in g.components() {
        firsts.insert(*comp.first().unwrap());
        order.extend(comp);
    }
    fn go(g: &Graph, order: &[VertexId], firsts: &BTreeSet<VertexId>, i: usize, col: &mut Coloring) -> bool {
        let Some(&v) = order.get(i) else { return true };
        let options: &[Color] = if firsts.contains(&v) { &Color::ALL[..1] } else { &Color::ALL };
        for &c in options {
            if g.neighbors(v).iter().any(|u| col.get(u) == Some(&c)) {
                continue;
            }
            col.insert(v, c);
            if go(g, order, firsts, i + 1, col) {
                return true;
            }
            col.remove(&v);
        }
        false
    }
    let mut col = Coloring::new();
    Ok(go(g, &order, &firsts, 0, &mut col).then_some(col))
}

pub fn brute_force(g: &Graph) -> Result<Option<Coloring>, OracleRefused> {
    brute_force_with_cap(g, DEFAULT_ORACLE_CAP)
}

/// Oracle answer, or `None` above the default cap.
pub fn brute_force_colorable(g: &Graph) -> Option<bool> {
    brute_force(g).ok().map(|c| c.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::generate::{gnp, worst_case_family};

    fn check(g: &Graph) -> SolveResult {
        let r = solve_3coloring(g);
        if let SolveStatus::Colorable(c) = &r.status {
            verify_coloring(g, c).unwrap();
        }
        if let Some(expected) = brute_force_colorable(g) {
            assert_eq!(r.status.is_colorable(), expected);
        }
        r
    }

    #[test]
    fn small_named_graphs() {
        assert!(!check(&fixtures::complete(4)).status.is_colorable());
        assert!(check(&fixtures::cycle(5)).status.is_colorable());
        assert!(check(&fixtures::petersen()).status.is_colorable());
        assert!(!check(&fixtures::wheel(5)).status.is_colorable());
        assert!(check(&fixtures::wheel(6)).status.is_colorable());
        assert!(check(&Graph::new()).status.is_colorable());
    }

    #[test]
    fn named_fixtures_match_oracle() {
        for name in fixtures::NAMES {
            check(&fixtures::by_name(name).unwrap());
        }
    }

    #[test]
    fn worst_case_family_plans_forests() {
        for t in 1..=3 {
            let g = worst_case_family(t).unwrap();
            let r = check(&g);
            assert_eq!(r.stats.partition.r, t);
            assert!(r.stats.enumerated_assignments as f64 <= r.stats.enumeration_bound);
        }
    }

    #[test]
    fn disconnected_graph_fails_if_one_part_fails() {
        let mut edges: Vec<(u32, u32)> = vec![(0, 1), (1, 2), (0, 2)];
        edges.extend([(3, 4), (3, 5), (3, 6), (4, 5), (4, 6), (5, 6)]);
        let g = Graph::from_edges(7, &edges).unwrap();
        assert!(!check(&g).status.is_colorable());
    }

    #[test]
    fn random_graphs_match_oracle() {
        for seed in 0..150 {
            let n = 8 + (seed % 10) as u32;
            let p = [0.2, 0.3, 0.45][seed as usize % 3];
            check(&gnp(n, p, seed));
        }
    }

    #[test]
    fn parallel_and_exhaustive_agree() {
        for seed in 0..30 {
            let g = crate::generate::random_min_degree3(18, 0.15, seed).unwrap();
            let serial = solve_3coloring(&g);
            let par = solve_with_config(&g, &SolverConfig { jobs: 4, ..Default::default() });
            let exh = solve_with_config(&g, &SolverConfig { exhaustive: true, ..Default::default() });
            assert_eq!(serial.status.is_colorable(), par.status.is_colorable());
            assert_eq!(serial.status.is_colorable(), exh.status.is_colorable());
            if let Some(c) = par.status.coloring() {
                verify_coloring(&g, c).unwrap();
            }
            assert!(exh.stats.enumerated_assignments >= serial.stats.enumerated_assignments);
        }
    }

    #[test]
    fn stats_are_deterministic() {
        let g = crate::generate::random_min_degree3(24, 0.1, 3).unwrap();
        let a = solve_3coloring(&g);
        let b = solve_3coloring(&g);
        assert_eq!(a.stats.without_timing(), b.stats.without_timing());
        assert_eq!(a.status, b.status);
    }

    #[test]
    fn sink_sees_plans() {
        let sink = Arc::new(CollectingSink::default());
        let config = SolverConfig { sink: Some(sink.clone()), ..Default::default() };
        solve_with_config(&worst_case_family(2).unwrap(), &config);
        assert_eq!(sink.runs.lock().unwrap().len(), 1);
        assert!(!sink.plans.lock().unwrap().is_empty());
    }

    #[test]
    fn verifier_reports_edges() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let mono: Coloring = [(VertexId(0), Color::ALL[0]), (VertexId(1), Color::ALL[0])].into();
        assert_eq!(verify_coloring(&g, &mono), Err(ColoringViolation::Edge(VertexId(0), VertexId(1))));
        let partial: Coloring = [(VertexId(0), Color::ALL[0])].into();
        assert_eq!(verify_coloring(&g, &partial), Err(ColoringViolation::Uncolored(VertexId(1))));
    }

    #[test]
    fn oracle_cap() {
        assert!(brute_force(&Graph::with_vertices(21)).is_err());
        assert_eq!(brute_force_colorable(&fixtures::complete(3)), Some(true));
        assert_eq!(brute_force_colorable(&fixtures::complete(4)), Some(false));
    }
}
