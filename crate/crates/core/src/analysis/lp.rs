//! The linear program over partition class sizes whose optimum bounds the
//! running time, and its report.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use serde::Serialize;

use super::simplex::{simplex, LpOutcome};
use super::{AnalysisError, Scalar};

/// Base of the (3,2)-CSP bound per remaining vertex.
pub const CSP_BASE: f64 = 1.36443;
/// Per-vertex bound for vertices covered by the chromatic forest.
pub const CHROMATIC_BASE: f64 = 1.34004;

/// LP variables, all sizes as fractions of n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LpVar {
    R,
    I,
    L,
    N,
    U,
    N1,
    N2,
    N3,
    /// |N₃,ᵢ| for i in 1..=8.
    N3i(u8),
    /// |Uⱼ| for j in 0..=7.
    Uj(u8),
    UPrime,
    NStar,
    UStar,
}

impl LpVar {
    pub fn all() -> Vec<LpVar> {
        let mut v = vec![LpVar::R, LpVar::I, LpVar::L, LpVar::N, LpVar::U, LpVar::N1, LpVar::N2, LpVar::N3];
        v.extend((1..=8).map(LpVar::N3i));
        v.extend((0..=7).map(LpVar::Uj));
        v.extend([LpVar::UPrime, LpVar::NStar, LpVar::UStar]);
        v
    }

    pub fn index(self) -> usize {
        match self {
            LpVar::R => 0,
            LpVar::I => 1,
            LpVar::L => 2,
            LpVar::N => 3,
            LpVar::U => 4,
            LpVar::N1 => 5,
            LpVar::N2 => 6,
            LpVar::N3 => 7,
            LpVar::N3i(i) => 7 + i as usize,
            LpVar::Uj(j) => 16 + j as usize,
            LpVar::UPrime => 24,
            LpVar::NStar => 25,
            LpVar::UStar => 26,
        }
    }

    /// Row label as used in the results table.
    pub fn label(self) -> String {
        match self {
            LpVar::R => "|R|".into(),
            LpVar::I => "|I|".into(),
            LpVar::L => "|L|".into(),
            LpVar::N => "|N|".into(),
            LpVar::U => "|U|".into(),
            LpVar::N1 => "|N1|".into(),
            LpVar::N2 => "|N2|".into(),
            LpVar::N3 => "|N3|".into(),
            LpVar::N3i(i) => format!("|N3,{i}|"),
            LpVar::Uj(j) => format!("|U{j}|"),
            LpVar::UPrime => "|U'|".into(),
            LpVar::NStar => "|N*|".into(),
            LpVar::UStar => "|U*|".into(),
        }
    }
}

/// Partition and decision variables; `N*` and `U*` are defined by equalities.
pub const DECISION_VARS: usize = 25;
pub const AUXILIARY_VARS: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row<T> {
    pub name: &'static str,
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

impl<T: Scalar> Row<T> {
    fn new(name: &'static str, terms: &[(LpVar, i64, i64)], relation: Relation, rhs: T) -> Self {
        let mut coeffs = vec![T::zero(); DECISION_VARS + AUXILIARY_VARS];
        for &(v, num, den) in terms {
            coeffs[v.index()] = coeffs[v.index()].clone() + T::from_ratio(num, den);
        }
        Row { name, coeffs, relation, rhs }
    }

    pub fn lhs(&self, x: &[T]) -> T {
        self.coeffs.iter().zip(x).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    /// Amount by which `x` violates the row (zero if satisfied).
    pub fn violation(&self, x: &[T]) -> T {
        let diff = self.lhs(x) - self.rhs.clone();
        let zero = T::zero();
        match self.relation {
            Relation::Le => if diff > zero { diff } else { zero },
            Relation::Ge => if diff < zero { -diff } else { zero },
            Relation::Eq => diff.abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpModel<T> {
    pub vars: Vec<LpVar>,
    pub objective: Vec<T>,
    pub rows: Vec<Row<T>>,
}

impl<T: Scalar> LpModel<T> {
    pub fn decision_variable_count(&self) -> usize {
        DECISION_VARS
    }

    pub fn variable_count(&self) -> usize {
        self.vars.len()
    }

    pub fn objective_value(&self, x: &[T]) -> T {
        self.objective.iter().zip(x).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    /// Names of rows `x` violates by more than `tol`, and negative entries.
    pub fn violated_rows(&self, x: &[T], tol: &T) -> Vec<&'static str> {
        let mut out: Vec<&'static str> =
            self.rows.iter().filter(|r| r.violation(x) > *tol).map(|r| r.name).collect();
        if x.iter().any(|v| *v < -tol.clone()) {
            out.push("nonnegativity");
        }
        out
    }

    pub fn is_feasible(&self, x: &[T], tol: &T) -> bool {
        self.violated_rows(x, tol).is_empty()
    }
}

/// The model with n = 1.
pub fn build_lp<T: Scalar>() -> LpModel<T> {
    use LpVar::*;
    use Relation::*;
    let z = T::zero;
    let n3 = |f: fn(i64) -> (i64, i64)| -> Vec<(LpVar, i64, i64)> {
        (1..=8).map(|i| {
            let (a, b) = f(i);
            (N3i(i as u8), a, b)
        })
        .collect()
    };

    let mut rows = Vec::new();
    rows.push(Row::new("bushy leaves (1)", &[(R, 4, 1), (I, 2, 1), (L, -1, 1)], Le, z()));
    rows.push(Row::new("leaf degree (2)", &[(N1, 1, 1), (N2, 2, 1), (N3, 1, 1), (L, -2, 1)], Le, z()));
    rows.push(Row::new(
        "U' supply (3)",
        &[(N3i(5), 1, 5), (N3i(6), 2, 6), (N3i(7), 5, 7), (N3i(8), 1, 1), (UPrime, -1, 1)],
        Le,
        z(),
    ));
    let mut edges: Vec<(LpVar, i64, i64)> = (0..=7).map(|j| (Uj(j as u8), 10 - j, 8 - j)).collect();
    edges.extend([(N2, -2, 1), (UPrime, 3, 1)]);
    edges.extend(n3(|_| (-3, 1)));
    rows.push(Row::new("U edges (4)", &edges, Le, z()));
    rows.push(Row::new(
        "N* definition",
        &[(N, 1, 1), (N3i(5), -3, 5), (N3i(6), -1, 1), (N3i(7), -1, 1), (N3i(8), -1, 1), (NStar, -1, 1)],
        Eq,
        z(),
    ));
    rows.push(Row::new("U* definition", &[(U, 1, 1), (N3i(5), 3, 5), (N3i(6), 1, 1), (UStar, -1, 1)], Eq, z()));
    rows.push(Row::new("vertex total", &[(R, 1, 1), (I, 1, 1), (L, 1, 1), (N, 1, 1), (U, 1, 1)], Eq, T::one()));
    rows.push(Row::new("N split", &[(N1, 1, 1), (N2, 1, 1), (N3, 1, 1), (N, -1, 1)], Eq, z()));
    let mut n3_split = n3(|_| (1, 1));
    n3_split.push((N3, -1, 1));
    rows.push(Row::new("N3 split", &n3_split, Eq, z()));
    let mut u_split: Vec<(LpVar, i64, i64)> = (0..=7).map(|j| (Uj(j), 1, 1)).collect();
    u_split.extend([(UPrime, 1, 1), (U, -1, 1)]);
    rows.push(Row::new("U split", &u_split, Eq, z()));
    let mut hm = n3(|i| (8, i));
    hm.push((R, -8, 1));
    rows.push(Row::new("HM per tree", &hm, Le, z()));

    let vars = LpVar::all();
    let mut objective = vec![T::zero(); vars.len()];
    objective[R.index()] = T::from_f64_value(3f64.ln());
    objective[I.index()] = T::from_f64_value(2f64.ln());
    objective[NStar.index()] = T::from_f64_value(CSP_BASE.ln());
    objective[UStar.index()] = T::from_f64_value(CHROMATIC_BASE.ln());
    LpModel { vars, objective, rows }
}

/// The results-table vector: per tree 1 root, 4 leaves, 1 N₂ vertex, 6
/// N₃,₆ vertices, 11.2 U₀ vertices and 2 U′ vertices, out of 25.2.
pub fn table2_point<T: Scalar>() -> Vec<T> {
    // 25.2 = 126/5, so a count k becomes 5k/126
    let frac = |tenths: i64| T::from_ratio(tenths, 252);
    let mut x = vec![T::zero(); DECISION_VARS + AUXILIARY_VARS];
    let set = |x: &mut Vec<T>, v: LpVar, tenths: i64| x[v.index()] = frac(tenths);
    set(&mut x, LpVar::R, 10);
    set(&mut x, LpVar::L, 40);
    set(&mut x, LpVar::N, 70);
    set(&mut x, LpVar::U, 132);
    set(&mut x, LpVar::N2, 10);
    set(&mut x, LpVar::N3, 60);
    set(&mut x, LpVar::N3i(6), 60);
    set(&mut x, LpVar::Uj(0), 112);
    set(&mut x, LpVar::UPrime, 20);
    set(&mut x, LpVar::NStar, 10);
    set(&mut x, LpVar::UStar, 192);
    x
}

/// Optimum of the LP with the implied base, mirroring the results table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    /// Variable values keyed by table label, in table order.
    pub values: Vec<(String, f64)>,
    /// 2|N₂| + 3|N₃| − 3|U′|: the right-hand side of the U-edge constraint.
    pub edge_budget: f64,
    pub objective: f64,
    pub base: f64,
    pub max_reduced_cost: f64,
    pub pivots: usize,
    /// Whether an exact rational solve reached the same optimum.
    pub exact_verified: Option<bool>,
    pub exact_objective: Option<f64>,
}

impl AnalysisReport {
    pub fn value(&self, label: &str) -> Option<f64> {
        self.values.iter().find(|(l, _)| l == label).map(|(_, v)| *v)
    }

    pub fn value_of(&self, var: LpVar) -> f64 {
        self.value(&var.label()).expect("every variable is reported")
    }

    pub fn as_map(&self) -> BTreeMap<String, f64> {
        let mut m: BTreeMap<String, f64> = self.values.iter().cloned().collect();
        m.insert("|E|".into(), self.edge_budget);
        m.insert("objective".into(), self.objective);
        m.insert("base".into(), self.base);
        m
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut rows: Vec<(String, f64)> = self.values.clone();
        rows.insert(7, ("|E|".into(), self.edge_budget));
        for (label, v) in rows {
            writeln!(f, "{label:<8} {v:.7}")?;
        }
        writeln!(f, "objective {:.9}", self.objective)?;
        write!(f, "base {:.7}", self.base)?;
        if let Some(ok) = self.exact_verified {
            write!(f, "\nexact {}", if ok { "verified" } else { "MISMATCH" })?;
        }
        Ok(())
    }
}

fn report_from(model: &LpModel<f64>, x: &[f64], objective: f64) -> AnalysisReport {
    let order = [LpVar::R, LpVar::I, LpVar::L, LpVar::N, LpVar::U, LpVar::NStar, LpVar::UStar]
        .into_iter()
        .chain([LpVar::N1, LpVar::N2, LpVar::N3])
        .chain((1..=8).map(LpVar::N3i))
        .chain((0..=7).map(LpVar::Uj))
        .chain([LpVar::UPrime]);
    let values = order.map(|v| (v.label(), x[v.index()])).collect();
    let get = |v: LpVar| x[v.index()];
    let edge_budget = 2.0 * get(LpVar::N2) + 3.0 * get(LpVar::N3) - 3.0 * get(LpVar::UPrime);
    let _ = model;
    AnalysisReport {
        values,
        edge_budget,
        objective,
        base: objective.exp(),
        max_reduced_cost: 0.0,
        pivots: 0,
        exact_verified: None,
        exact_objective: None,
    }
}

/// Solves the model in floating point; with `verify_exact` the same model
/// is re-solved over exact rationals and compared.
pub fn solve_lp(model: &LpModel<f64>, verify_exact: bool) -> Result<AnalysisReport, AnalysisError> {
    let rows: Vec<(Vec<f64>, Relation, f64)> =
        model.rows.iter().map(|r| (r.coeffs.clone(), r.relation, r.rhs)).collect();
    let sol = match simplex(&model.objective, &rows) {
        LpOutcome::Optimal(s) => s,
        LpOutcome::Infeasible => return Err(AnalysisError::Infeasible),
        LpOutcome::Unbounded => return Err(AnalysisError::Unbounded),
    };
    let mut report = report_from(model, &sol.x, sol.objective);
    report.max_reduced_cost = sol.max_reduced_cost;
    report.pivots = sol.pivots;
    if verify_exact {
        let exact: LpModel<BigRational> = build_lp();
        let exact_rows: Vec<(Vec<BigRational>, Relation, BigRational)> =
            exact.rows.iter().map(|r| (r.coeffs.clone(), r.relation, r.rhs.clone())).collect();
        match simplex(&exact.objective, &exact_rows) {
            LpOutcome::Optimal(s) => {
                use num_traits::ToPrimitive;
                let obj = s.objective.to_f64().unwrap_or(f64::NAN);
                report.exact_objective = Some(obj);
                let same_point = s
                    .x
                    .iter()
                    .zip(&sol.x)
                    .all(|(e, f)| (e.to_f64().unwrap_or(f64::NAN) - f).abs() < 1e-7);
                report.exact_verified = Some((obj - sol.objective).abs() < 1e-9 && same_point);
            }
            _ => report.exact_verified = Some(false),
        }
    }
    Ok(report)
}
