use std::fmt;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiment::config::ExperimentConfig;
use crate::experiment::trace::{format_number, TraceRecord, TraceWriter};
use crate::markets::Market;
use crate::metrics::{MetricsReport, MetricsTracker};
use crate::solver::{solve_mv, SolveOptions};
use crate::strategies::Strategy;
use crate::types::{Moments, Portfolio, RiskAversion};

/// Final state of one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub strategy: String,
    pub report: MetricsReport,
    /// Risk aversion used for `report.utility`.
    pub alpha: RiskAversion,
    pub alpha_selected: Option<RiskAversion>,
    pub final_portfolio: Portfolio,
    /// Optimal utility under the limiting distribution, when known.
    pub optimal_utility: Option<f64>,
    pub ground_truth_gap: Option<f64>,
    /// SHA-256 of the realized return path (little-endian `f64` bits).
    pub path_hash: String,
    pub records: usize,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.report;
        let sharpe = r
            .sharpe
            .value()
            .map_or("n/a".to_owned(), |v| format!("{v:.6}"));
        let gap = self
            .ground_truth_gap
            .map_or("n/a".to_owned(), |g| format!("{g:.3e}"));
        write!(
            f,
            "{}: n={} M={:.6} V={:.6e} Sh={} W={:.6} S={:.6e} utility(alpha={})={:.6} gap={} path={}",
            self.strategy,
            r.n,
            r.mean,
            r.variance,
            sharpe,
            r.growth,
            r.wealth,
            self.alpha,
            r.utility,
            gap,
            &self.path_hash[..16],
        )
    }
}

fn describe(cfg: &ExperimentConfig) -> String {
    use crate::experiment::config::StrategyConfig::*;
    match &cfg.strategy {
        Constant { alpha } => format!("constant(alpha={alpha})"),
        Adaptive { alphas, objective } => format!("adaptive({objective:?}, alphas={alphas:?})"),
        Bayesian { alpha } => format!("bayesian(alpha={alpha})"),
        Fixed { portfolio } => format!("fixed({portfolio:?})"),
    }
}

/// Optimal limiting utility per risk aversion, solved on first use.
struct GroundTruth {
    moments: Option<Moments>,
    cache: Vec<(RiskAversion, f64)>,
}

impl GroundTruth {
    fn optimal_utility(&mut self, alpha: RiskAversion) -> Result<Option<f64>> {
        let Some(moments) = &self.moments else {
            return Ok(None);
        };
        if let Some((_, u)) = self.cache.iter().find(|(a, _)| *a == alpha) {
            return Ok(Some(*u));
        }
        let u = solve_mv(alpha, moments, &SolveOptions::default())?.utility;
        self.cache.push((alpha, u));
        Ok(Some(u))
    }
}

/// Advances market and strategy in lockstep for `cfg.horizon` periods,
/// writing a trace record every `cfg.report_every` periods plus a final
/// summary record.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let built = cfg.build_market()?;
    let m = built.dim;
    if cfg.warm_up(m) > cfg.horizon {
        return Err(Error::Config(format!(
            "warm-up h = {} exceeds horizon {}",
            cfg.warm_up(m),
            cfg.horizon
        )));
    }
    if let Some(available) = built.available {
        if cfg.horizon > available {
            return Err(Error::Config(format!(
                "horizon {} exceeds the {available} periods of data",
                cfg.horizon
            )));
        }
    }
    let strategy = cfg.build_strategy(m)?;
    let mut writer = cfg.output.as_deref().map(TraceWriter::create).transpose()?;
    let result = drive(cfg, built.market, strategy, writer.as_mut());
    if let Some(w) = writer.as_mut() {
        w.flush()?;
    }
    result
}

fn drive(
    cfg: &ExperimentConfig,
    mut market: Box<dyn Market>,
    mut strategy: Box<dyn Strategy>,
    mut writer: Option<&mut TraceWriter>,
) -> Result<RunSummary> {
    let default_alpha = cfg.default_alpha()?;
    let mut truth = GroundTruth {
        moments: market.limiting_moments(),
        cache: Vec::new(),
    };
    let mut tracker = MetricsTracker::new();
    let mut hasher = Sha256::new();
    let mut records = 0;
    let mut portfolio = Portfolio::uniform(market.dim());

    let snapshot = |step: usize,
                    summary: bool,
                    portfolio: &Portfolio,
                    strategy: &dyn Strategy,
                    tracker: &MetricsTracker,
                    truth: &mut GroundTruth|
     -> Result<(TraceRecord, RiskAversion)> {
        let selected = strategy.selected_alpha();
        let alpha = selected.unwrap_or(default_alpha);
        let metrics = tracker.report(alpha)?;
        let optimal_utility = truth.optimal_utility(alpha)?;
        Ok((
            TraceRecord {
                summary,
                step,
                portfolio: portfolio.clone(),
                alpha_selected: selected.map(RiskAversion::value),
                metrics,
                optimal_utility,
                ground_truth_gap: optimal_utility.map(|u| (metrics.utility - u).abs()),
            },
            alpha,
        ))
    };

    for n in 1..=cfg.horizon {
        portfolio = strategy.next_portfolio(market.oracle())?;
        let x = market.next_return()?;
        for v in x.as_slice() {
            hasher.update(v.to_le_bytes());
        }
        tracker.record(&portfolio, &x).map_err(|e| match e {
            Error::Bankruptcy { value, .. } => Error::Bankruptcy { step: n, value },
            other => other,
        })?;
        strategy.observe(&x)?;
        if n % cfg.report_every == 0 {
            let (record, _) = snapshot(
                n,
                false,
                &portfolio,
                strategy.as_ref(),
                &tracker,
                &mut truth,
            )?;
            if let Some(w) = writer.as_deref_mut() {
                w.write(&record)?;
            }
            records += 1;
        }
    }
    let (record, alpha) = snapshot(
        cfg.horizon,
        true,
        &portfolio,
        strategy.as_ref(),
        &tracker,
        &mut truth,
    )?;
    if let Some(w) = writer {
        w.write(&record)?;
    }
    records += 1;

    let hash: String = hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    Ok(RunSummary {
        strategy: describe(cfg),
        report: record.metrics,
        alpha,
        alpha_selected: strategy.selected_alpha(),
        final_portfolio: portfolio,
        optimal_utility: record.optimal_utility,
        ground_truth_gap: record.ground_truth_gap,
        path_hash: hash,
        records,
    })
}

/// Final-metric differences `first - second` between two runs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairDifference {
    pub first: usize,
    pub second: usize,
    pub utility: f64,
    pub sharpe: f64,
    pub growth: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub runs: Vec<RunSummary>,
    pub differences: Vec<PairDifference>,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>3}  {:<40} {:>14} {:>14} {:>14}",
            "#", "strategy", "utility", "sharpe", "growth"
        )?;
        for (i, r) in self.runs.iter().enumerate() {
            let sharpe = r.report.sharpe.value().unwrap_or(f64::NAN);
            writeln!(
                f,
                "{i:>3}  {:<40} {:>14.8} {:>14.8} {:>14.8}",
                r.strategy, r.report.utility, sharpe, r.report.growth
            )?;
        }
        writeln!(f, "pairwise differences (first - second):")?;
        for d in &self.differences {
            writeln!(
                f,
                "{:>3} - {:<3} utility {} sharpe {} growth {}",
                d.first,
                d.second,
                format_number(d.utility),
                format_number(d.sharpe),
                format_number(d.growth)
            )?;
        }
        Ok(())
    }
}

/// Runs every configuration on the same realized market path and reports
/// final metrics with pairwise differences.
pub fn compare_strategies(cfgs: &[ExperimentConfig]) -> Result<Comparison> {
    let Some(first) = cfgs.first() else {
        return Err(Error::Config("nothing to compare".into()));
    };
    for (i, cfg) in cfgs.iter().enumerate().skip(1) {
        if cfg.market != first.market || cfg.seed != first.seed || cfg.horizon != first.horizon {
            return Err(Error::Config(format!(
                "configuration {i} does not share the market, seed and horizon of configuration 0"
            )));
        }
    }
    let runs = cfgs
        .iter()
        .map(run_experiment)
        .collect::<Result<Vec<_>>>()?;
    if let Some(r) = runs.iter().find(|r| r.path_hash != runs[0].path_hash) {
        return Err(Error::Config(format!(
            "realized paths differ ({} vs {})",
            runs[0].path_hash, r.path_hash
        )));
    }
    let mut differences = Vec::new();
    for i in 0..runs.len() {
        for j in (i + 1)..runs.len() {
            let (a, b) = (&runs[i].report, &runs[j].report);
            differences.push(PairDifference {
                first: i,
                second: j,
                utility: a.utility - b.utility,
                sharpe: a.sharpe.value().unwrap_or(f64::NAN) - b.sharpe.value().unwrap_or(f64::NAN),
                growth: a.growth - b.growth,
            });
        }
    }
    Ok(Comparison { runs, differences })
}
