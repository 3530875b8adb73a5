//! Running performance metrics of a portfolio trace.
//!
//! For per-period portfolio returns `r_i = <b_i, x_i>` the tracker reports
//! the empirical mean `M_n`, population variance `V_n`, Sharpe ratio
//! `M_n / sqrt(V_n)` (zero reference rate), growth rate
//! `W_n = (1/n) sum log r_i` and cumulative wealth `S_n = exp(n W_n)`.
//!
//! All functionals are kept as compensated running sums. The first and
//! second moment sums are taken about the first observed return, which is
//! algebraically neutral and keeps `V_n` free of catastrophic cancellation.

use crate::error::{Error, Result};
use crate::types::{Portfolio, ReturnVector, RiskAversion};

/// Neumaier-compensated sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricsTracker {
    n: usize,
    shift: f64,
    sum_r: CompensatedSum,
    sum_r2: CompensatedSum,
    sum_log: CompensatedSum,
}

/// Sharpe ratio together with its definition domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sharpe {
    Finite(f64),
    /// Zero empirical variance.
    Infinite,
    /// Fewer than two observations.
    Unavailable,
}

impl Sharpe {
    /// `+inf` for [`Sharpe::Infinite`], `None` when unavailable.
    pub fn value(self) -> Option<f64> {
        match self {
            Sharpe::Finite(v) => Some(v),
            Sharpe::Infinite => Some(f64::INFINITY),
            Sharpe::Unavailable => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricsReport {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub sharpe: Sharpe,
    pub growth: f64,
    /// `n * growth`, finite even when `wealth` overflows.
    pub log_wealth: f64,
    pub wealth: f64,
    pub utility: f64,
}

impl MetricsTracker {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> usize {
        self.n
    }

    /// Advances every running sum with `r = <b, x>`.
    pub fn record(&mut self, b: &Portfolio, x: &ReturnVector) -> Result<()> {
        if b.dim() != x.dim() {
            return Err(Error::DimensionMismatch {
                expected: b.dim(),
                found: x.dim(),
            });
        }
        self.record_return(b.gross_return(x))
    }

    /// Advances the running sums with a raw portfolio return.
    pub fn record_return(&mut self, r: f64) -> Result<()> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Bankruptcy {
                step: self.n + 1,
                value: r,
            });
        }
        if self.n == 0 {
            self.shift = r;
        }
        let d = r - self.shift;
        self.n += 1;
        self.sum_r.add(d);
        self.sum_r2.add(d * d);
        self.sum_log.add(r.ln());
        Ok(())
    }

    pub fn report(&self, alpha: RiskAversion) -> Result<MetricsReport> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("no returns recorded".into()));
        }
        let n = self.n as f64;
        let centered_mean = self.sum_r.value() / n;
        let mean = self.shift + centered_mean;
        let variance = (self.sum_r2.value() / n - centered_mean * centered_mean).max(0.0);
        let sharpe = if self.n < 2 {
            Sharpe::Unavailable
        } else if variance == 0.0 {
            Sharpe::Infinite
        } else {
            Sharpe::Finite(mean / variance.sqrt())
        };
        let log_wealth = self.sum_log.value();
        Ok(MetricsReport {
            n: self.n,
            mean,
            variance,
            sharpe,
            growth: log_wealth / n,
            log_wealth,
            wealth: log_wealth.exp(),
            utility: mean - alpha.value() * variance,
        })
    }
}
