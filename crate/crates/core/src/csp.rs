//! (3,2)-constraint satisfaction: variables with at most three colors and
//! binary conflicts between variable-color pairs.
//!
//! The backend solver applies the small-domain rule before every branch.
//! A variable with one color is committed and unit-propagated. A variable
//! with two colors `{a, b}` is eliminated by resolution: it can take `a`
//! unless some pair conflicting with `(v, a)` is selected, and `b` likewise,
//! so every pair blocking `a` becomes directly conflicting with every pair
//! blocking `b`. The instance shrinks while staying equisatisfiable, and the
//! recorded eliminations recover `v`'s color from any reduced solution.

use std::collections::{BTreeMap, BTreeSet};

use crate::color::{Color, ColorSet, Coloring};
use crate::graph::VertexId;
use crate::reduce::Instance;

pub type VarId = VertexId;

/// A variable together with one of its colors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarColor {
    pub var: VarId,
    pub color: Color,
}

impl VarColor {
    pub fn new(var: VarId, color: Color) -> Self {
        Self { var, color }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CspInstance {
    domains: BTreeMap<VarId, ColorSet>,
    /// Symmetric conflict adjacency between variable-color pairs.
    conflicts: BTreeMap<VarColor, BTreeSet<VarColor>>,
    unsat: bool,
}

/// How an eliminated variable gets its color back.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Elimination {
    Committed { var: VarId, color: Color },
    /// Take `preferred` unless one of `blockers` is selected, else `fallback`.
    Resolved { var: VarId, preferred: Color, blockers: Vec<VarColor>, fallback: Color },
}

/// Record of a run of [`CspInstance::eliminate_small_domains`], applied in
/// reverse to extend a solution of the reduced instance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    steps: Vec<Elimination>,
}

impl Substitution {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn back_substitute(&self, assignment: &mut BTreeMap<VarId, Color>) {
        for step in self.steps.iter().rev() {
            match step {
                Elimination::Committed { var, color } => {
                    assignment.insert(*var, *color);
                }
                Elimination::Resolved { var, preferred, blockers, fallback } => {
                    let blocked = blockers
                        .iter()
                        .any(|p| assignment.get(&p.var) == Some(&p.color));
                    assignment.insert(*var, if blocked { *fallback } else { *preferred });
                }
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CspSolution {
    pub assignment: BTreeMap<VarId, Color>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CspStats {
    pub nodes: u64,
    pub eliminated: u64,
}

impl CspInstance {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable; an empty domain makes the instance unsatisfiable.
    pub fn add_variable(&mut self, var: VarId, domain: ColorSet) {
        if domain.is_empty() {
            self.unsat = true;
        }
        self.domains.insert(var, domain);
    }

    /// Adds the conflict `{a, b}`. A conflict of a pair with itself forbids
    /// that color outright; two colors of the same variable never conflict
    /// meaningfully and are ignored, as are pairs outside current domains.
    pub fn add_conflict(&mut self, a: VarColor, b: VarColor) {
        if !self.is_live(a) || !self.is_live(b) {
            return;
        }
        if a.var == b.var {
            if a.color == b.color {
                self.remove_color(a.var, a.color);
            }
            return;
        }
        self.conflicts.entry(a).or_default().insert(b);
        self.conflicts.entry(b).or_default().insert(a);
    }

    fn is_live(&self, p: VarColor) -> bool {
        self.domains.get(&p.var).is_some_and(|d| d.contains(p.color))
    }

    pub fn is_unsat(&self) -> bool {
        self.unsat
    }

    pub fn variable_count(&self) -> usize {
        self.domains.len()
    }

    pub fn variables(&self) -> impl Iterator<Item = VarId> + '_ {
        self.domains.keys().copied()
    }

    pub fn domain(&self, var: VarId) -> Option<ColorSet> {
        self.domains.get(&var).copied()
    }

    /// Each conflict once, as a normalized `(smaller, larger)` pair.
    pub fn conflicts(&self) -> impl Iterator<Item = (VarColor, VarColor)> + '_ {
        self.conflicts
            .iter()
            .flat_map(|(&a, set)| set.range(a..).map(move |&b| (a, b)))
    }

    pub fn conflict_count(&self) -> usize {
        self.conflicts.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn conflicts_of(&self, p: VarColor) -> impl Iterator<Item = VarColor> + '_ {
        self.conflicts.get(&p).into_iter().flatten().copied()
    }

    fn incident_conflicts(&self, var: VarId) -> usize {
        self.domains[&var]
            .iter()
            .map(|c| self.conflicts.get(&VarColor::new(var, c)).map_or(0, BTreeSet::len))
            .sum()
    }

    /// Drops `color` from `var`'s domain along with its conflicts.
    pub fn remove_color(&mut self, var: VarId, color: Color) {
        let Some(dom) = self.domains.get_mut(&var) else {
            return;
        };
        if !dom.contains(color) {
            return;
        }
        dom.remove(color);
        if dom.is_empty() {
            self.unsat = true;
        }
        self.drop_pair(VarColor::new(var, color));
    }

    fn drop_pair(&mut self, p: VarColor) {
        if let Some(others) = self.conflicts.remove(&p) {
            for q in others {
                if let Some(set) = self.conflicts.get_mut(&q) {
                    set.remove(&p);
                    if set.is_empty() {
                        self.conflicts.remove(&q);
                    }
                }
            }
        }
    }

    fn remove_variable(&mut self, var: VarId) -> Option<ColorSet> {
        let dom = self.domains.remove(&var)?;
        for c in dom.iter() {
            self.drop_pair(VarColor::new(var, c));
        }
        Some(dom)
    }

    /// Restricts `var` to the single color `color`.
    pub fn restrict(&mut self, var: VarId, color: Color) {
        let dom = self.domains[&var];
        for c in dom.iter().filter(|&c| c != color) {
            self.remove_color(var, c);
        }
    }

    /// The (3,2)-CSP for extending the partial coloring `inst.fixed` to the
    /// rest of `inst.graph`: one variable per uncolored vertex whose domain
    /// excludes the colors of fixed neighbors, and for every edge between
    /// uncolored vertices a conflict per shared color.
    pub fn from_partial_coloring(inst: &Instance) -> Self {
        let g = &inst.graph;
        let mut csp = CspInstance::new();
        for v in g.vertices().filter(|v| !inst.fixed.contains_key(v)) {
            let mut dom = ColorSet::FULL;
            for u in g.neighbors(v) {
                if let Some(&c) = inst.fixed.get(u) {
                    dom.remove(c);
                }
            }
            csp.add_variable(v, dom);
        }
        for (u, v) in g.edges() {
            if inst.fixed.contains_key(&u) || inst.fixed.contains_key(&v) {
                continue;
            }
            for c in Color::ALL {
                csp.add_conflict(VarColor::new(u, c), VarColor::new(v, c));
            }
        }
        csp
    }

    /// Removes every variable with at most two colors, returning the record
    /// needed to back-substitute them. Stops early once a domain empties.
    pub fn eliminate_small_domains(&mut self) -> Substitution {
        let mut sub = Substitution::default();
        while !self.unsat {
            let pick = self
                .domains
                .iter()
                .filter(|(_, d)| d.len() <= 1)
                .map(|(&v, _)| v)
                .next()
                .or_else(|| self.domains.iter().find(|(_, d)| d.len() == 2).map(|(&v, _)| v));
            let Some(var) = pick else { break };
            let dom = self.domains[&var];
            match dom.len() {
                0 => self.unsat = true,
                1 => {
                    let color = dom.first().unwrap();
                    let hit: Vec<VarColor> = self.conflicts_of(VarColor::new(var, color)).collect();
                    self.remove_variable(var);
                    for q in hit {
                        self.remove_color(q.var, q.color);
                    }
                    sub.steps.push(Elimination::Committed { var, color });
                }
                _ => {
                    let mut colors = dom.iter();
                    let (a, b) = (colors.next().unwrap(), colors.next().unwrap());
                    let block_a: Vec<VarColor> = self.conflicts_of(VarColor::new(var, a)).collect();
                    let block_b: Vec<VarColor> = self.conflicts_of(VarColor::new(var, b)).collect();
                    self.remove_variable(var);
                    for &x in &block_a {
                        for &y in &block_b {
                            self.add_conflict(x, y);
                        }
                    }
                    sub.steps.push(Elimination::Resolved {
                        var,
                        preferred: a,
                        blockers: block_a,
                        fallback: b,
                    });
                }
            }
        }
        sub
    }

    /// Finds a satisfying assignment, or `None` if none exists.
    pub fn solve(&self) -> Option<CspSolution> {
        self.solve_with_stats(&mut CspStats::default())
    }

    pub fn solve_with_stats(&self, stats: &mut CspStats) -> Option<CspSolution> {
        let mut work = self.clone();
        let assignment = work.search(stats)?;
        Some(CspSolution { assignment })
    }

    fn search(&mut self, stats: &mut CspStats) -> Option<BTreeMap<VarId, Color>> {
        stats.nodes += 1;
        let sub = self.eliminate_small_domains();
        stats.eliminated += sub.len() as u64;
        if self.unsat {
            return None;
        }
        let mut assignment = match self.branch_variable() {
            None => BTreeMap::new(),
            Some(var) => {
                let dom = self.domains[&var];
                let mut found = None;
                for c in dom.iter() {
                    let mut child = self.clone();
                    child.restrict(var, c);
                    if let Some(a) = child.search(stats) {
                        found = Some(a);
                        break;
                    }
                }
                found?
            }
        };
        sub.back_substitute(&mut assignment);
        Some(assignment)
    }

    /// Variable with the most incident conflicts; smallest id breaks ties.
    fn branch_variable(&self) -> Option<VarId> {
        let mut best: Option<(usize, VarId)> = None;
        for &v in self.domains.keys() {
            let k = self.incident_conflicts(v);
            if best.is_none_or(|(bk, _)| k > bk) {
                best = Some((k, v));
            }
        }
        best.map(|(_, v)| v)
    }
}

impl CspSolution {
    /// Independent check: every variable of `csp` gets an in-domain color and
    /// no conflict has both of its pairs selected.
    pub fn satisfies(&self, csp: &CspInstance) -> bool {
        let domains_ok = csp.variables().all(|v| {
            self.assignment
                .get(&v)
                .is_some_and(|&c| csp.domain(v).unwrap().contains(c))
        });
        domains_ok
            && csp.conflicts().all(|(a, b)| {
                !(self.assignment.get(&a.var) == Some(&a.color)
                    && self.assignment.get(&b.var) == Some(&b.color))
            })
    }

    pub fn into_coloring(self) -> Coloring {
        self.assignment
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::graph::Graph;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(i: u32) -> VarId {
        VertexId(i)
    }

    fn c(i: u8) -> Color {
        Color::new(i).unwrap()
    }

    /// Exhaustive backtracking over all domain assignments; shares nothing
    /// with the solver beyond the instance accessors.
    pub(crate) fn oracle_satisfiable(csp: &CspInstance) -> bool {
        if csp.is_unsat() {
            return false;
        }
        let vars: Vec<VarId> = csp.variables().collect();
        let pairs: Vec<(VarColor, VarColor)> = csp.conflicts().collect();
        fn rec(
            i: usize,
            vars: &[VarId],
            csp: &CspInstance,
            pairs: &[(VarColor, VarColor)],
            asg: &mut BTreeMap<VarId, Color>,
        ) -> bool {
            if i == vars.len() {
                return true;
            }
            for col in csp.domain(vars[i]).unwrap().iter() {
                asg.insert(vars[i], col);
                let ok = pairs.iter().all(|(a, b)| {
                    !(asg.get(&a.var) == Some(&a.color) && asg.get(&b.var) == Some(&b.color))
                });
                if ok && rec(i + 1, vars, csp, pairs, asg) {
                    return true;
                }
            }
            asg.remove(&vars[i]);
            false
        }
        rec(0, &vars, csp, &pairs, &mut BTreeMap::new())
    }

    pub(crate) fn random_csp(rng: &mut ChaCha8Rng, max_vars: u32) -> CspInstance {
        let n = rng.gen_range(1..=max_vars);
        let mut csp = CspInstance::new();
        for i in 0..n {
            let dom: ColorSet = loop {
                let d: ColorSet = Color::ALL.into_iter().filter(|_| rng.gen_bool(0.75)).collect();
                if !d.is_empty() {
                    break d;
                }
            };
            csp.add_variable(v(i), dom);
        }
        let density = rng.gen_range(0.05..0.35);
        for a in 0..n {
            for b in a + 1..n {
                for ca in Color::ALL {
                    for cb in Color::ALL {
                        if rng.gen_bool(density / 2.0) {
                            csp.add_conflict(VarColor::new(v(a), ca), VarColor::new(v(b), cb));
                        }
                    }
                }
            }
        }
        csp
    }

    #[test]
    fn triangle_with_fixed_vertex() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let mut inst = Instance::new(g);
        inst.fixed.insert(v(0), c(0));
        let csp = CspInstance::from_partial_coloring(&inst);
        assert_eq!(csp.variable_count(), 2);
        assert_eq!(csp.domain(v(1)).unwrap().len(), 2);
        assert!(!csp.domain(v(1)).unwrap().contains(c(0)));
        assert_eq!(csp.conflict_count(), 2);
    }

    #[test]
    fn isolated_vertex() {
        let inst = Instance::new(Graph::with_vertices(1));
        let csp = CspInstance::from_partial_coloring(&inst);
        assert_eq!(csp.variable_count(), 1);
        assert_eq!(csp.domain(v(0)), Some(ColorSet::FULL));
        assert_eq!(csp.conflict_count(), 0);
    }

    #[test]
    fn k4_with_fixed_vertex_is_unsat() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let mut inst = Instance::new(g);
        inst.fixed.insert(v(0), c(0));
        let csp = CspInstance::from_partial_coloring(&inst);
        assert!(!oracle_satisfiable(&csp));
        let mut reduced = csp.clone();
        reduced.eliminate_small_domains();
        assert!(reduced.is_unsat());
        assert!(csp.solve().is_none());
    }

    #[test]
    fn even_cycle_of_two_domain_variables() {
        // Eight 2-color variables around a cycle, adjacent ones differing.
        let mut csp = CspInstance::new();
        let dom: ColorSet = [c(0), c(1)].into_iter().collect();
        for i in 0..8 {
            csp.add_variable(v(i), dom);
        }
        for i in 0..8 {
            let j = (i + 1) % 8;
            for col in [c(0), c(1)] {
                csp.add_conflict(VarColor::new(v(i), col), VarColor::new(v(j), col));
            }
        }
        assert!(oracle_satisfiable(&csp));
        let mut reduced = csp.clone();
        let sub = reduced.eliminate_small_domains();
        assert!(!reduced.is_unsat());
        assert_eq!(reduced.variable_count(), 0);
        let mut asg = BTreeMap::new();
        sub.back_substitute(&mut asg);
        assert!(CspSolution { assignment: asg }.satisfies(&csp));
    }

    #[test]
    fn odd_cycle_of_two_domain_variables_is_unsat() {
        let mut csp = CspInstance::new();
        let dom: ColorSet = [c(0), c(1)].into_iter().collect();
        for i in 0..7 {
            csp.add_variable(v(i), dom);
        }
        for i in 0..7 {
            for col in [c(0), c(1)] {
                csp.add_conflict(VarColor::new(v(i), col), VarColor::new(v((i + 1) % 7), col));
            }
        }
        assert!(!oracle_satisfiable(&csp));
        assert!(csp.solve().is_none());
    }

    #[test]
    fn unit_propagation_shrinks_neighbor() {
        let mut csp = CspInstance::new();
        csp.add_variable(v(0), ColorSet::single(c(1)));
        csp.add_variable(v(1), ColorSet::FULL);
        csp.add_variable(v(2), ColorSet::FULL);
        csp.add_conflict(VarColor::new(v(0), c(1)), VarColor::new(v(1), c(1)));
        // keep v1 and v2 at three colors apart from the propagated removal
        csp.add_conflict(VarColor::new(v(1), c(0)), VarColor::new(v(2), c(0)));
        let mut after = csp.clone();
        let dom_before = after.domain(v(1)).unwrap().len();
        // only commit v0; v1 then has two colors and is eliminated as well
        let sub = after.eliminate_small_domains();
        assert_eq!(dom_before, 3);
        assert!(matches!(sub.steps[0], Elimination::Committed { var, color } if var == v(0) && color == c(1)));
        assert!(matches!(sub.steps[1], Elimination::Resolved { var, .. } if var == v(1)));
    }

    #[test]
    fn unit_conflict_on_only_colors_is_unsat() {
        let mut csp = CspInstance::new();
        csp.add_variable(v(0), ColorSet::single(c(2)));
        csp.add_variable(v(1), ColorSet::single(c(2)));
        csp.add_conflict(VarColor::new(v(0), c(2)), VarColor::new(v(1), c(2)));
        csp.eliminate_small_domains();
        assert!(csp.is_unsat());
    }

    #[test]
    fn empty_instance_is_sat() {
        let sol = CspInstance::new().solve().unwrap();
        assert!(sol.assignment.is_empty());
    }

    #[test]
    fn c5_and_k4_from_graphs() {
        let c5 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
        let csp = CspInstance::from_partial_coloring(&Instance::new(c5.clone()));
        let sol = csp.solve().unwrap();
        assert!(sol.satisfies(&csp));
        assert!(crate::solver::verify_coloring(&c5, &sol.into_coloring()).is_ok());

        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert!(CspInstance::from_partial_coloring(&Instance::new(k4)).solve().is_none());
    }

    #[test]
    fn deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let csp = random_csp(&mut rng, 10);
            assert_eq!(csp.solve(), csp.solve());
        }
    }

    #[test]
    fn random_instances_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..200 {
            let csp = random_csp(&mut rng, 12);
            let expected = oracle_satisfiable(&csp);
            let mut reduced = csp.clone();
            let sub = reduced.eliminate_small_domains();
            assert_eq!(!reduced.is_unsat() && oracle_satisfiable(&reduced), expected);
            match csp.solve() {
                Some(sol) => {
                    assert!(expected);
                    assert!(sol.satisfies(&csp));
                }
                None => assert!(!expected),
            }
            if expected {
                let mut rest = CspInstance::new();
                std::mem::swap(&mut rest, &mut reduced);
                let mut asg = rest.solve().unwrap().assignment;
                sub.back_substitute(&mut asg);
                assert!(CspSolution { assignment: asg }.satisfies(&csp));
            }
        }
    }
}
