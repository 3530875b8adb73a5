use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markets::{
    load_csv, make_reversible_chain, BoundPolicy, CsvKind, CsvMarket, CsvSource, IidMarket,
    IidSpec, Market, MarkovChainSpec, MarkovMarket,
};
use crate::strategies::{
    default_warm_up, AdaptiveAlpha, BayesianOracle, ConstantAlpha, FixedPortfolio, ObjectiveKind,
    Strategy,
};
use crate::types::{Portfolio, ReturnVector, RiskAversion, DEFAULT_M_BOUND};

/// Market section of an experiment file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarketConfig {
    IidDiscrete {
        points: Vec<Vec<f64>>,
        probs: Vec<f64>,
    },
    IidLognormal {
        mu_log: Vec<f64>,
        sigma_log: Vec<Vec<f64>>,
        lower: f64,
        upper: f64,
    },
    Markov {
        state_returns: Vec<Vec<f64>>,
        transition: Vec<Vec<f64>>,
        /// Defaults to uniform, which requires a symmetric transition.
        #[serde(default)]
        stationary: Option<Vec<f64>>,
    },
    /// Chain drawn by [`make_reversible_chain`].
    MarkovRandom {
        states: usize,
        assets: usize,
        chain_seed: u64,
    },
    Csv {
        path: PathBuf,
        data: CsvKind,
        #[serde(default)]
        bound_policy: BoundPolicy,
    },
}

/// Strategy section of an experiment file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategyConfig {
    Constant {
        alpha: f64,
    },
    Adaptive {
        alphas: Vec<f64>,
        objective: ObjectiveKind,
    },
    Bayesian {
        alpha: f64,
    },
    Fixed {
        portfolio: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub market: MarketConfig,
    pub strategy: StrategyConfig,
    pub horizon: usize,
    /// Warm-up length; defaults to twice the asset count.
    #[serde(default)]
    pub h: Option<usize>,
    /// Required for synthetic markets.
    #[serde(default)]
    pub seed: Option<u64>,
    pub report_every: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_m_bound")]
    pub m_bound: f64,
    /// Risk aversion used for the reported utility of strategies that do
    /// not carry one (`fixed`).
    #[serde(default)]
    pub utility_alpha: Option<f64>,
}

fn default_m_bound() -> f64 {
    DEFAULT_M_BOUND
}

/// A market together with the configuration facts the runner needs.
pub(crate) struct BuiltMarket {
    pub market: Box<dyn Market>,
    pub dim: usize,
    pub available: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_toml_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        // Relative CSV paths are resolved against the config file.
        if let MarketConfig::Csv { path: data, .. } = &mut cfg.market {
            if data.is_relative() {
                if let Some(dir) = path.parent() {
                    *data = dir.join(&*data);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn is_synthetic(&self) -> bool {
        !matches!(self.market, MarketConfig::Csv { .. })
    }

    /// Asset count implied by the market section (CSV markets are read).
    pub fn asset_count(&self) -> Result<usize> {
        Ok(match &self.market {
            MarketConfig::IidDiscrete { points, .. } => points.first().map_or(0, Vec::len),
            MarketConfig::IidLognormal { mu_log, .. } => mu_log.len(),
            MarketConfig::Markov { state_returns, .. } => state_returns.first().map_or(0, Vec::len),
            MarketConfig::MarkovRandom { assets, .. } => *assets,
            MarketConfig::Csv { .. } => load_csv(&self.csv_source().expect("csv market"))?
                .asset_names
                .len(),
        })
    }

    pub fn warm_up(&self, m: usize) -> usize {
        self.h.unwrap_or_else(|| default_warm_up(m))
    }

    fn csv_source(&self) -> Option<CsvSource> {
        match &self.market {
            MarketConfig::Csv {
                path,
                data,
                bound_policy,
            } => Some(CsvSource {
                path: path.clone(),
                kind: *data,
                bound_policy: *bound_policy,
                m_bound: self.m_bound,
            }),
            _ => None,
        }
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be >= 1".into()));
        }
        if self.report_every == 0 {
            return Err(Error::Config("report_every must be >= 1".into()));
        }
        if !(self.m_bound > 0.0) {
            return Err(Error::Config("m_bound must be positive".into()));
        }
        if self.is_synthetic() && self.seed.is_none() {
            return Err(Error::Config("synthetic markets need a seed".into()));
        }
        if let Some(h) = self.h {
            if h == 0 {
                return Err(Error::Config("h must be >= 1".into()));
            }
            if h > self.horizon {
                return Err(Error::Config(format!(
                    "warm-up h = {h} exceeds horizon {}",
                    self.horizon
                )));
            }
        }
        if let Some(a) = self.utility_alpha {
            RiskAversion::new(a)?;
        }
        Ok(())
    }

    pub(crate) fn build_market(&self) -> Result<BuiltMarket> {
        let rng = ChaCha8Rng::seed_from_u64(self.seed.unwrap_or(0));
        let vectors = |rows: &[Vec<f64>]| -> Result<Vec<ReturnVector>> {
            rows.iter()
                .map(|r| ReturnVector::with_bound(r.clone(), self.m_bound))
                .collect()
        };
        let built = match &self.market {
            MarketConfig::IidDiscrete { points, probs } => {
                let spec = IidSpec::discrete(vectors(points)?, probs.clone())?;
                let dim = spec.dim();
                BuiltMarket {
                    market: Box::new(IidMarket::new(spec, rng)),
                    dim,
                    available: None,
                }
            }
            MarketConfig::IidLognormal {
                mu_log,
                sigma_log,
                lower,
                upper,
            } => {
                let m = mu_log.len();
                if sigma_log.len() != m || sigma_log.iter().any(|r| r.len() != m) {
                    return Err(Error::Config("sigma_log must be m x m".into()));
                }
                let sigma = DMatrix::from_fn(m, m, |i, j| sigma_log[i][j]);
                let spec = IidSpec::truncated_lognormal(
                    DVector::from_vec(mu_log.clone()),
                    sigma,
                    *lower,
                    *upper,
                )?;
                BuiltMarket {
                    market: Box::new(IidMarket::new(spec, rng)),
                    dim: m,
                    available: None,
                }
            }
            MarketConfig::Markov {
                state_returns,
                transition,
                stationary,
            } => {
                let returns = vectors(state_returns)?;
                let spec = match stationary {
                    Some(pi) => MarkovChainSpec::new(returns, transition.clone(), pi.clone())?,
                    None => MarkovChainSpec::symmetric(returns, transition.clone())?,
                };
                let dim = spec.dim();
                BuiltMarket {
                    market: Box::new(MarkovMarket::new(spec, rng)),
                    dim,
                    available: None,
                }
            }
            MarketConfig::MarkovRandom {
                states,
                assets,
                chain_seed,
            } => {
                let spec = make_reversible_chain(*states, *assets, *chain_seed)?;
                BuiltMarket {
                    market: Box::new(MarkovMarket::new(spec, rng)),
                    dim: *assets,
                    available: None,
                }
            }
            MarketConfig::Csv { .. } => {
                let data = load_csv(&self.csv_source().expect("csv market"))?;
                for w in &data.warnings {
                    eprintln!("warning: {w}");
                }
                let market = CsvMarket::new(data);
                BuiltMarket {
                    dim: market.dim(),
                    available: Some(market.len()),
                    market: Box::new(market),
                }
            }
        };
        Ok(built)
    }

    pub(crate) fn build_strategy(&self, m: usize) -> Result<Box<dyn Strategy>> {
        let h = self.warm_up(m);
        Ok(match &self.strategy {
            StrategyConfig::Constant { alpha } => {
                Box::new(ConstantAlpha::new(RiskAversion::new(*alpha)?, h, m)?)
            }
            StrategyConfig::Adaptive { alphas, objective } => {
                let alphas = alphas
                    .iter()
                    .map(|a| RiskAversion::new(*a))
                    .collect::<Result<Vec<_>>>()?;
                Box::new(AdaptiveAlpha::new(alphas, *objective, h, m)?)
            }
            StrategyConfig::Bayesian { alpha } => {
                Box::new(BayesianOracle::new(RiskAversion::new(*alpha)?))
            }
            StrategyConfig::Fixed { portfolio } => {
                if portfolio.len() != m {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        found: portfolio.len(),
                    });
                }
                Box::new(FixedPortfolio(Portfolio::new(portfolio.clone())?))
            }
        })
    }

    /// Risk aversion used for reported utilities before the strategy has
    /// selected one.
    pub(crate) fn default_alpha(&self) -> Result<RiskAversion> {
        match &self.strategy {
            StrategyConfig::Constant { alpha } | StrategyConfig::Bayesian { alpha } => {
                RiskAversion::new(*alpha)
            }
            StrategyConfig::Adaptive { alphas, .. } => {
                RiskAversion::new(alphas.first().copied().unwrap_or(0.0))
            }
            StrategyConfig::Fixed { .. } => RiskAversion::new(self.utility_alpha.unwrap_or(0.0)),
        }
    }
}
