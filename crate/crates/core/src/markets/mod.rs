//! Market models: synthetic generators with exact ground truth and CSV
//! ingestion of recorded data.

mod csv_io;
mod iid;
mod markov;

pub use csv_io::{
    load_csv, write_returns_csv, BoundPolicy, CsvData, CsvKind, CsvMarket, CsvSource,
};
pub use iid::{iid_sample, IidMarket, IidSpec, MAX_CONSECUTIVE_REJECTIONS, MAX_REJECTION_MASS};
pub use markov::{make_reversible_chain, markov_step, MarkovChainSpec, MarkovMarket};

use crate::error::Result;
use crate::strategies::ConditionalOracle;
use crate::types::{Moments, Portfolio, ReturnVector};

/// A source of return vectors consumed one period at a time.
pub trait Market {
    fn dim(&self) -> usize;

    fn next_return(&mut self) -> Result<ReturnVector>;

    /// Exact conditional law of the next return, if the model knows it.
    fn oracle(&self) -> Option<&dyn ConditionalOracle> {
        None
    }

    /// Moments of the limiting empirical distribution, if known exactly.
    fn limiting_moments(&self) -> Option<Moments> {
        None
    }

    /// `E log <b, X>` under the limiting distribution, if known exactly.
    fn limiting_expected_log(&self, _b: &Portfolio) -> Option<f64> {
        None
    }
}

/// Moments and expected log-return of a finitely supported law.
pub(crate) fn discrete_moments(points: &[ReturnVector], probs: &[f64]) -> Moments {
    let m = points[0].dim();
    let mut mu = nalgebra::DVector::zeros(m);
    for (x, p) in points.iter().zip(probs) {
        mu.axpy(*p, &x.to_dvector(), 1.0);
    }
    let mut sigma = nalgebra::DMatrix::zeros(m, m);
    for (x, p) in points.iter().zip(probs) {
        let d = x.to_dvector() - &mu;
        sigma.ger(*p, &d, &d, 1.0);
    }
    Moments { mu, sigma }
}

pub(crate) fn discrete_expected_log(points: &[ReturnVector], probs: &[f64], b: &Portfolio) -> f64 {
    points
        .iter()
        .zip(probs)
        .map(|(x, p)| p * b.gross_return(x).ln())
        .sum()
}
