//! Sequential decision rules.
//!
//! Every strategy is driven in lockstep with a market: `next_portfolio`
//! is called before period `n`'s return is revealed, then `observe` feeds
//! that return. A portfolio therefore depends only on returns `1..n-1`.

mod adaptive;
mod bayesian;
mod constant;

pub use adaptive::{AdaptiveAlpha, ObjectiveKind, ARGMAX_RELATIVE_TOLERANCE};
pub use bayesian::{bayesian_next, BayesianOracle};
pub use constant::ConstantAlpha;

use crate::error::Result;
use crate::types::{Moments, Portfolio, ReturnVector, RiskAversion};

/// Default warm-up length for `m` assets.
pub fn default_warm_up(m: usize) -> usize {
    2 * m
}

/// Exact law of the next return given everything observed so far.
pub trait ConditionalOracle {
    /// Identifies the conditional law; equal keys mean equal moments.
    fn conditional_key(&self) -> u64;
    fn conditional_moments(&self) -> Result<Moments>;
}

pub trait Strategy {
    fn next_portfolio(&mut self, oracle: Option<&dyn ConditionalOracle>) -> Result<Portfolio>;
    fn observe(&mut self, x: &ReturnVector) -> Result<()>;
    /// Risk aversion behind the last emitted portfolio, when it has one.
    fn selected_alpha(&self) -> Option<RiskAversion> {
        None
    }
}

/// Plays the same portfolio every period.
#[derive(Clone, Debug)]
pub struct FixedPortfolio(pub Portfolio);

impl Strategy for FixedPortfolio {
    fn next_portfolio(&mut self, _: Option<&dyn ConditionalOracle>) -> Result<Portfolio> {
        Ok(self.0.clone())
    }

    fn observe(&mut self, _: &ReturnVector) -> Result<()> {
        Ok(())
    }
}
