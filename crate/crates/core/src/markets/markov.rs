use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::markets::{discrete_expected_log, discrete_moments, Market};
use crate::moments::min_eigenvalue;
use crate::strategies::ConditionalOracle;
use crate::types::{Moments, Portfolio, ReturnVector, DEFAULT_REDUNDANCY_TOLERANCE};

const BALANCE_TOLERANCE: f64 = 1e-12;
const GENERATION_RETRIES: usize = 100;

/// Finite-state Markov chain emitting a fixed return vector per state.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkovChainSpec {
    state_returns: Vec<ReturnVector>,
    transition: Vec<Vec<f64>>,
    stationary: Vec<f64>,
}

impl MarkovChainSpec {
    /// Validates positivity, stochasticity and detailed balance.
    pub fn new(
        state_returns: Vec<ReturnVector>,
        transition: Vec<Vec<f64>>,
        stationary: Vec<f64>,
    ) -> Result<Self> {
        let k = state_returns.len();
        if k == 0 {
            return Err(Error::InvalidArgument(
                "chain needs at least one state".into(),
            ));
        }
        let m = state_returns[0].dim();
        if let Some(x) = state_returns.iter().find(|x| x.dim() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: x.dim(),
            });
        }
        if transition.len() != k || transition.iter().any(|r| r.len() != k) || stationary.len() != k
        {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: transition.len(),
            });
        }
        for (i, row) in transition.iter().enumerate() {
            if row.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
                return Err(Error::InvalidArgument(format!(
                    "transition row {i} has a non-positive entry"
                )));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > BALANCE_TOLERANCE {
                return Err(Error::InvalidArgument(format!(
                    "transition row {i} sums to {total}"
                )));
            }
        }
        let total: f64 = stationary.iter().sum();
        if stationary.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > BALANCE_TOLERANCE {
            return Err(Error::InvalidArgument(
                "stationary law is not on the simplex".into(),
            ));
        }
        for i in 0..k {
            for j in 0..k {
                let gap =
                    (stationary[i] * transition[i][j] - stationary[j] * transition[j][i]).abs();
                if gap > BALANCE_TOLERANCE {
                    return Err(Error::InvalidArgument(format!(
                        "detailed balance fails at ({i}, {j}) by {gap:e}"
                    )));
                }
            }
        }
        Ok(Self {
            state_returns,
            transition,
            stationary,
        })
    }

    /// Chain with a symmetric transition matrix, reversible with respect
    /// to the uniform law.
    pub fn symmetric(state_returns: Vec<ReturnVector>, transition: Vec<Vec<f64>>) -> Result<Self> {
        let k = state_returns.len();
        Self::new(state_returns, transition, vec![1.0 / k as f64; k])
    }

    pub fn state_count(&self) -> usize {
        self.state_returns.len()
    }

    pub fn dim(&self) -> usize {
        self.state_returns[0].dim()
    }

    pub fn state_returns(&self) -> &[ReturnVector] {
        &self.state_returns
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    /// Moments of the next return given the current state, by enumeration
    /// over successor states.
    pub fn conditional_moments(&self, state: usize) -> Result<Moments> {
        let row = self.transition.get(state).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "state {state} out of range 0..{}",
                self.state_count()
            ))
        })?;
        Ok(discrete_moments(&self.state_returns, row))
    }

    /// Moments of the stationary law.
    pub fn stationary_moments(&self) -> Moments {
        discrete_moments(&self.state_returns, &self.stationary)
    }

    /// `E log <b, X>` under the stationary law.
    pub fn stationary_expected_log(&self, b: &Portfolio) -> f64 {
        discrete_expected_log(&self.state_returns, &self.stationary, b)
    }

    /// Smallest conditional-covariance eigenvalue over all rows.
    pub fn min_conditional_eigenvalue(&self) -> Result<f64> {
        let mut worst = f64::INFINITY;
        for i in 0..self.state_count() {
            worst = worst.min(min_eigenvalue(&self.conditional_moments(i)?)?);
        }
        Ok(worst)
    }

    /// Whether every conditional law is free of redundant assets.
    pub fn is_conditionally_non_redundant(&self, tolerance: f64) -> Result<bool> {
        Ok(self.min_conditional_eigenvalue()? > tolerance)
    }
}

fn sample_index(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut cum = 0.0;
    for (j, w) in weights.iter().enumerate() {
        cum += w;
        if u < cum {
            return j;
        }
    }
    weights.len() - 1
}

/// Draws the successor of `state` and emits its return vector.
pub fn markov_step(
    spec: &MarkovChainSpec,
    state: usize,
    rng: &mut ChaCha8Rng,
) -> (ReturnVector, usize) {
    let next = sample_index(&spec.transition[state], rng);
    (spec.state_returns[next].clone(), next)
}

/// Random chain with a strictly positive symmetric transition matrix and
/// `k` state returns whose every conditional law is non-redundant.
pub fn make_reversible_chain(k: usize, m: usize, seed: u64) -> Result<MarkovChainSpec> {
    if m == 0 || k < m + 1 {
        return Err(Error::InvalidArgument(format!(
            "need k >= m + 1 states, got k = {k}, m = {m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GENERATION_RETRIES {
        let mut a = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in 0..k {
                a[i][j] = rng.random::<f64>();
            }
        }
        let mut t = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in 0..k {
                t[i][j] = 0.5 * (a[i][j] + a[j][i]) + 0.05;
            }
        }
        let t = symmetric_sinkhorn(t);
        let returns = (0..k)
            .map(|_| {
                ReturnVector::new(
                    (0..m)
                        .map(|_| rng.random_range(-1.0..1.0f64).exp())
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let spec = MarkovChainSpec::symmetric(returns, t)?;
        if spec.is_conditionally_non_redundant(DEFAULT_REDUNDANCY_TOLERANCE)? {
            return Ok(spec);
        }
    }
    Err(Error::Generation(format!(
        "no conditionally non-redundant chain after {GENERATION_RETRIES} attempts"
    )))
}

/// Scales a symmetric positive matrix to a symmetric doubly stochastic one.
fn symmetric_sinkhorn(mut t: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let k = t.len();
    for _ in 0..10_000 {
        let r: Vec<f64> = t.iter().map(|row| row.iter().sum()).collect();
        if r.iter().all(|s| (s - 1.0).abs() < 1e-15) {
            break;
        }
        for i in 0..k {
            for j in 0..k {
                t[i][j] /= (r[i] * r[j]).sqrt();
            }
        }
    }
    // Absorb the remaining rounding into the diagonal, which keeps the
    // matrix symmetric and makes each row sum to one.
    for i in 0..k {
        let off: f64 = (0..k).filter(|&j| j != i).map(|j| t[i][j]).sum();
        t[i][i] = 1.0 - off;
    }
    t
}

/// A chain-driven market. The initial state is drawn from the stationary
/// law and is not emitted, so the first return is itself stationary.
#[derive(Clone, Debug)]
pub struct MarkovMarket {
    spec: MarkovChainSpec,
    state: usize,
    emitted: bool,
    rng: ChaCha8Rng,
}

impl MarkovMarket {
    pub fn new(spec: MarkovChainSpec, mut rng: ChaCha8Rng) -> Self {
        let state = sample_index(&spec.stationary, &mut rng);
        Self {
            spec,
            state,
            emitted: false,
            rng,
        }
    }

    pub fn spec(&self) -> &MarkovChainSpec {
        &self.spec
    }

    /// State behind the last emitted return.
    pub fn state(&self) -> Option<usize> {
        self.emitted.then_some(self.state)
    }
}

impl ConditionalOracle for MarkovMarket {
    fn conditional_key(&self) -> u64 {
        match self.state() {
            Some(s) => s as u64,
            None => u64::MAX,
        }
    }

    fn conditional_moments(&self) -> Result<Moments> {
        match self.state() {
            Some(s) => self.spec.conditional_moments(s),
            None => Ok(self.spec.stationary_moments()),
        }
    }
}

impl Market for MarkovMarket {
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn next_return(&mut self) -> Result<ReturnVector> {
        let (x, next) = markov_step(&self.spec, self.state, &mut self.rng);
        self.state = next;
        self.emitted = true;
        Ok(x)
    }

    fn oracle(&self) -> Option<&dyn ConditionalOracle> {
        Some(self)
    }

    fn limiting_moments(&self) -> Option<Moments> {
        Some(self.spec.stationary_moments())
    }

    fn limiting_expected_log(&self, b: &Portfolio) -> Option<f64> {
        Some(self.spec.stationary_expected_log(b))
    }
}
