//! Experiment configuration, orchestration and trace output.

mod config;
mod runner;
mod trace;

pub use config::{ExperimentConfig, MarketConfig, StrategyConfig};
pub use runner::{compare_strategies, run_experiment, Comparison, PairDifference, RunSummary};
pub use trace::{format_number, TraceRecord, TraceWriter};
