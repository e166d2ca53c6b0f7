//! Runtime analysis: branching work factors, per-vertex rates of the
//! enumeration schedules, and the linear program bounding the exponent.

mod lp;
mod scalar;
mod simplex;
mod work_factor;

pub use lp::{
    build_lp, solve_lp, table2_point, AnalysisReport, LpModel, LpVar, Relation, Row, AUXILIARY_VARS,
    DECISION_VARS,
};
pub use scalar::Scalar;
pub use simplex::{simplex, LpOutcome, LpSolution};
pub use work_factor::{rate, work_factor, BranchVector, RateExpr, RateTerm};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("branch vector must be non-empty")]
    EmptyBranchVector,
    #[error("branch vector entries must be positive and finite")]
    NonPositiveReduction,
    #[error("cannot parse rate expression `{0}`")]
    BadRateExpr(String),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
}
