//! Sequential mean-variance portfolio selection.
//!
//! The crate provides streaming moment estimation, a certified
//! mean-variance solver on the simplex, constant / adaptive / oracle
//! risk-aversion strategies, running performance metrics, synthetic
//! markets with exact ground truth, and an experiment runner.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod error;
pub mod experiment;
pub mod markets;
pub mod metrics;
pub mod moments;
pub mod solver;
pub mod strategies;
pub mod types;

pub use error::{Error, Result};
pub use metrics::{MetricsReport, MetricsTracker, Sharpe};
pub use moments::{is_non_redundant, min_eigenvalue, MomentAccumulator};
pub use solver::{brute_force_mv, kkt_residual, solve_mv, MvProblem, SolveOptions, SolveResult};
pub use types::{Moments, Portfolio, ReturnVector, RiskAversion};
