//! Dense two-phase tableau simplex with Bland's rule.

use super::lp::Relation;
use super::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
    /// Basic column per row at the optimum (columns past `x.len()` are
    /// slack, surplus or artificial).
    pub basis: Vec<usize>,
    /// Largest reduced cost at the optimum; ≤ tolerance certifies optimality.
    pub max_reduced_cost: T,
    pub pivots: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    Optimal(LpSolution<T>),
    Infeasible,
    Unbounded,
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    rhs: Vec<T>,
    basis: Vec<usize>,
    reduced: Vec<T>,
    value: T,
    allowed: Vec<bool>,
    pivots: usize,
}

impl<T: Scalar> Tableau<T> {
    fn set_costs(&mut self, cost: &[T]) {
        let width = cost.len();
        self.reduced = cost.to_vec();
        self.value = T::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b].clone();
            if cb.is_zero() {
                continue;
            }
            for j in 0..width {
                self.reduced[j] = self.reduced[j].clone() - cb.clone() * self.rows[i][j].clone();
            }
            self.value = self.value.clone() + cb * self.rhs[i].clone();
        }
    }

    fn pivot(&mut self, r: usize, s: usize) {
        self.pivots += 1;
        let p = self.rows[r][s].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        self.rhs[r] = self.rhs[r].clone() / p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][s].clone();
            if f.is_zero() {
                continue;
            }
            for (v, pr) in self.rows[i].iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * pr.clone();
            }
            self.rhs[i] = self.rhs[i].clone() - f * pivot_rhs.clone();
        }
        let f = self.reduced[s].clone();
        if !f.is_zero() {
            for (v, pr) in self.reduced.iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * pr.clone();
            }
            self.value = self.value.clone() + f * pivot_rhs;
        }
        self.basis[r] = s;
    }

    /// Runs Bland-rule pivots to optimality; false if unbounded.
    fn optimize(&mut self) -> bool {
        loop {
            let entering = (0..self.reduced.len()).find(|&j| self.allowed[j] && self.reduced[j].is_positive_tol());
            let Some(s) = entering else { return true };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][s];
                if !a.is_positive_tol() {
                    continue;
                }
                let ratio = self.rhs[i].clone() / a.clone();
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, s),
                None => return false,
            }
        }
    }
}

/// Maximizes `objective · x` subject to `rows` and `x ≥ 0`.
pub fn simplex<T: Scalar>(objective: &[T], rows: &[(Vec<T>, Relation, T)]) -> LpOutcome<T> {
    let n = objective.len();
    let m = rows.len();
    let mut normalized: Vec<(Vec<T>, Relation, T)> = rows.to_vec();
    for (coeffs, rel, rhs) in normalized.iter_mut() {
        if rhs.is_negative() {
            for c in coeffs.iter_mut() {
                *c = -c.clone();
            }
            *rhs = -rhs.clone();
            *rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }
    let extra: usize = normalized
        .iter()
        .map(|(_, rel, _)| match rel {
            Relation::Le | Relation::Eq => 1,
            Relation::Ge => 2,
        })
        .sum();
    let width = n + extra;
    let mut tab = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
        reduced: Vec::new(),
        value: T::zero(),
        allowed: vec![true; width],
        pivots: 0,
    };
    let mut artificial = vec![false; width];
    let mut next = n;
    for (coeffs, rel, rhs) in &normalized {
        let mut row = vec![T::zero(); width];
        row[..n].clone_from_slice(coeffs);
        match rel {
            Relation::Le => {
                row[next] = T::one();
                tab.basis.push(next);
                next += 1;
            }
            Relation::Eq => {
                row[next] = T::one();
                artificial[next] = true;
                tab.basis.push(next);
                next += 1;
            }
            Relation::Ge => {
                row[next] = -T::one();
                row[next + 1] = T::one();
                artificial[next + 1] = true;
                tab.basis.push(next + 1);
                next += 2;
            }
        }
        tab.rows.push(row);
        tab.rhs.push(rhs.clone());
    }

    if artificial.iter().any(|&a| a) {
        let phase1: Vec<T> = artificial.iter().map(|&a| if a { -T::one() } else { T::zero() }).collect();
        tab.set_costs(&phase1);
        tab.optimize();
        if tab.value.is_negative_tol() {
            return LpOutcome::Infeasible;
        }
        for i in 0..m {
            if artificial[tab.basis[i]] {
                if let Some(s) = (0..width).find(|&j| !artificial[j] && !tab.rows[i][j].is_zero_tol()) {
                    tab.pivot(i, s);
                }
            }
        }
        for (j, &a) in artificial.iter().enumerate() {
            if a {
                tab.allowed[j] = false;
            }
        }
    }

    let mut cost = vec![T::zero(); width];
    cost[..n].clone_from_slice(objective);
    tab.set_costs(&cost);
    if !tab.optimize() {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![T::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs[i].clone();
        }
    }
    let max_reduced_cost = (0..width)
        .filter(|&j| tab.allowed[j])
        .map(|j| tab.reduced[j].clone())
        .fold(None, |acc: Option<T>, v| match acc {
            Some(a) if a >= v => Some(a),
            _ => Some(v),
        })
        .unwrap_or_else(T::zero);
    LpOutcome::Optimal(LpSolution {
        x,
        objective: tab.value,
        basis: tab.basis,
        max_reduced_cost,
        pivots: tab.pivots,
    })
}
