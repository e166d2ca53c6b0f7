//! Exact 3-coloring by forest-guided branch-and-reduce.
//!
//! The solver removes low-degree vertices, branches on degree-3 vertices
//! until every component is small or has a vertex of degree ≥ 4, then
//! covers what remains with a bushy forest and a chromatic forest whose
//! colorings are enumerated; each partial coloring leaves a (3,2)-CSP.
//!
//! ```
//! use tricolor::{fixtures, solve_3coloring};
//!
//! let result = solve_3coloring(&fixtures::petersen());
//! assert!(result.status.is_colorable());
//! assert!(!solve_3coloring(&fixtures::complete(4)).status.is_colorable());
//! ```
//!
//! The [`analysis`] module computes work factors, per-vertex rates of the
//! enumeration schedules, and solves the linear program over partition
//! class sizes. Its numeric core is generic over the scalar type; the
//! aliases below fix the common choices.

pub mod analysis;
pub mod bushy;
pub mod chromatic;
pub mod color;
pub mod csp;
pub mod dimacs;
pub mod fixtures;
pub mod generate;
pub mod graph;
pub mod reduce;
pub mod solver;

pub use color::{Color, ColorSet, Coloring};
pub use graph::{Graph, GraphError, VertexId};
pub use solver::{
    brute_force, brute_force_colorable, solve_3coloring, solve_with_config, verify_coloring, SearchStats,
    SolveResult, SolveStatus, SolverConfig,
};

pub type BranchVector64 = analysis::BranchVector<f64>;
pub type BranchVector32 = analysis::BranchVector<f32>;
pub type LpModel64 = analysis::LpModel<f64>;
pub type ExactLpModel = analysis::LpModel<num_rational::BigRational>;
pub type LpOutcome64 = analysis::LpOutcome<f64>;
pub type ExactLpOutcome = analysis::LpOutcome<num_rational::BigRational>;
