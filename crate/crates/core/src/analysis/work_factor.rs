//! Work factors of branching rules and per-vertex rates of enumeration
//! schedules.

use std::str::FromStr;

use num_traits::Float;

use super::AnalysisError;

/// The instance-size reductions r₁…r_k of a branching rule.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchVector<T> {
    reductions: Vec<T>,
}

impl<T: Float> BranchVector<T> {
    pub fn new(reductions: Vec<T>) -> Result<Self, AnalysisError> {
        if reductions.is_empty() {
            return Err(AnalysisError::EmptyBranchVector);
        }
        if reductions.iter().any(|r| !r.is_finite() || *r <= T::zero()) {
            return Err(AnalysisError::NonPositiveReduction);
        }
        Ok(BranchVector { reductions })
    }

    pub fn reductions(&self) -> &[T] {
        &self.reductions
    }

    /// 1 − Σ x^(−rᵢ).
    pub fn characteristic(&self, x: T) -> T {
        self.reductions.iter().fold(T::one(), |acc, &r| acc - x.powf(-r))
    }
}

impl<T: Float> FromStr for BranchVector<T> {
    type Err = AnalysisError;

    /// Comma-separated reductions, e.g. `2,6,6`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let reductions = s
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| p.parse::<f64>().ok().and_then(T::from).ok_or(AnalysisError::NonPositiveReduction))
            .collect::<Result<Vec<T>, _>>()?;
        BranchVector::new(reductions)
    }
}

/// The largest zero of 1 − Σ x^(−rᵢ), found by bisection to 1e-9 (or the
/// precision of `T`, whichever is coarser).
pub fn work_factor<T: Float>(bv: &BranchVector<T>) -> T {
    let k = bv.reductions.len();
    if k == 1 {
        return T::one();
    }
    let min_r = bv.reductions.iter().copied().fold(T::infinity(), T::min);
    let kk = T::from(k).expect("branch count fits");
    // f is increasing on (1, ∞), negative near 1 and positive at k^(1/min r) + 1
    let mut lo = T::one();
    let mut hi = kk.powf(min_r.recip()) + T::one();
    let tol = T::from(1e-9).expect("tolerance representable").max(T::epsilon() * hi);
    while hi - lo > tol {
        let mid = (lo + hi) / (T::one() + T::one());
        if mid <= lo || mid >= hi {
            break;
        }
        if bv.characteristic(mid) > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo + hi) / (T::one() + T::one())
}

/// One term c·b^e of a rate expression.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateTerm {
    pub coef: f64,
    pub base: f64,
    pub exp: f64,
}

impl RateTerm {
    pub fn value(&self) -> f64 {
        self.coef * self.base.powf(self.exp)
    }
}

/// A sum of terms divided over a vertex count, e.g. `3*1.36443^4/8`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateExpr {
    pub terms: Vec<RateTerm>,
    pub vertices: f64,
}

impl RateExpr {
    pub fn eval(&self) -> f64 {
        rate(&self.terms, self.vertices)
    }
}

fn parse_term(s: &str) -> Option<RateTerm> {
    let (coef, rest) = match s.split_once('*') {
        Some((c, r)) => (c.trim().parse().ok()?, r),
        None => (1.0, s),
    };
    let (base, exp) = match rest.split_once('^') {
        Some((b, e)) => (b.trim().parse().ok()?, e.trim().parse().ok()?),
        None => (rest.trim().parse().ok()?, 1.0),
    };
    Some(RateTerm { coef, base, exp })
}

/// Grammar: `term(+term)*/vertices` with `term = [c*]b[^e]`.
impl FromStr for RateExpr {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AnalysisError::BadRateExpr(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (sum, vertices) = compact.rsplit_once('/').ok_or_else(bad)?;
        let vertices: f64 = vertices.parse().map_err(|_| bad())?;
        let terms = sum.split('+').map(parse_term).collect::<Option<Vec<_>>>().ok_or_else(bad)?;
        let positive = |t: &RateTerm| t.coef > 0.0 && t.base > 0.0 && t.exp.is_finite();
        if terms.is_empty() || !terms.iter().all(positive) || vertices.is_nan() || vertices <= 0.0 {
            return Err(bad());
        }
        Ok(RateExpr { terms, vertices })
    }
}

/// (Σ cᵢ·bᵢ^eᵢ)^(1/vertices).
pub fn rate(terms: &[RateTerm], vertices: f64) -> f64 {
    terms.iter().map(RateTerm::value).sum::<f64>().powf(vertices.recip())
}
