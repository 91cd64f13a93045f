//! Independent runs of one scenario over consecutive seeds, executed in parallel.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::ccdf::ccdf;
use crate::analysis::classify::{classify, ClassifyConfig, Verdict};
use crate::analysis::fit::{fit_loglog, TailFit};
use crate::error::Result;
use crate::scenario::{RunStatus, Scenario, WealthSeries};
use crate::stats;

/// CCDF fit over the top decade `[max / 10, max]` of the sample.
pub fn upper_decade_ccdf_fit(samples: &[f64]) -> Result<TailFit> {
    let c = ccdf(samples)?;
    let max = c.points.last().map(|p| p.0).unwrap_or(0.0);
    fit_loglog(&c.points, Some((max / 10.0, max)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Moments {
    pub n_samples: usize,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub log_skewness: Option<f64>,
}

impl Moments {
    pub fn of(samples: &[f64]) -> Moments {
        Moments {
            n_samples: samples.len(),
            mean: stats::mean(samples),
            variance: stats::variance(samples),
            skewness: stats::skewness(samples),
            log_skewness: stats::log_skewness(samples),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub seed: u64,
    /// `None` when the run failed before producing a series.
    pub status: Option<RunStatus>,
    pub error: Option<String>,
    pub moments: Option<Moments>,
    pub gini: Option<f64>,
    pub verdict: Option<Verdict>,
    pub upper_decade_ccdf: Option<TailFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleReport {
    pub n_runs: usize,
    pub base_seed: u64,
    pub completed: usize,
    pub unbounded: usize,
    pub failed: usize,
    /// Moments of the final wealth of every completed run, pooled.
    pub pooled: Option<Moments>,
    pub verdict_tallies: BTreeMap<String, usize>,
    pub runs: Vec<RunSummary>,
}

impl EnsembleReport {
    pub fn tally(&self, verdict: Verdict) -> usize {
        self.verdict_tallies.get(verdict.name()).copied().unwrap_or(0)
    }
}

/// Runs seeds `base_seed .. base_seed + n_runs` in parallel. `on_run` sees each
/// successful series (for example to persist it) and its errors mark that run failed.
pub fn run_ensemble<F>(
    scenario: &Scenario,
    n_runs: usize,
    base_seed: u64,
    classify_config: &ClassifyConfig,
    on_run: F,
) -> Result<EnsembleReport>
where
    F: Fn(&Scenario, &WealthSeries) -> Result<()> + Sync,
{
    classify_config.validate()?;
    let results: Vec<(RunSummary, Option<Vec<f64>>)> = (0..n_runs as u64)
        .into_par_iter()
        .map(|k| {
            let seed = base_seed.wrapping_add(k);
            let run = scenario.with_seed(seed);
            match run.run().and_then(|series| on_run(&run, &series).map(|_| series)) {
                Ok(series) => summarize_run(seed, series, classify_config),
                Err(e) => (
                    RunSummary {
                        seed,
                        status: None,
                        error: Some(e.to_string()),
                        moments: None,
                        gini: None,
                        verdict: None,
                        upper_decade_ccdf: None,
                    },
                    None,
                ),
            }
        })
        .collect();

    let mut pooled = Vec::new();
    let mut runs = Vec::with_capacity(results.len());
    let mut verdict_tallies = BTreeMap::new();
    let (mut completed, mut unbounded, mut failed) = (0, 0, 0);
    for (summary, finals) in results {
        match summary.status {
            Some(RunStatus::Completed) => completed += 1,
            Some(RunStatus::Unbounded { .. }) => unbounded += 1,
            None => failed += 1,
        }
        if let Some(v) = summary.verdict {
            *verdict_tallies.entry(v.name().to_string()).or_insert(0) += 1;
        }
        if let Some(w) = finals {
            pooled.extend(w);
        }
        runs.push(summary);
    }
    Ok(EnsembleReport {
        n_runs,
        base_seed,
        completed,
        unbounded,
        failed,
        pooled: (!pooled.is_empty()).then(|| Moments::of(&pooled)),
        verdict_tallies,
        runs,
    })
}

fn summarize_run(
    seed: u64,
    series: WealthSeries,
    config: &ClassifyConfig,
) -> (RunSummary, Option<Vec<f64>>) {
    let completed = series.status == RunStatus::Completed;
    let w = series.final_wealth;
    let gini = crate::analysis::gini::gini(&w).ok();
    let summary = RunSummary {
        seed,
        status: Some(series.status),
        error: None,
        moments: Some(Moments::of(&w)),
        gini,
        verdict: classify(&w, config).ok().map(|c| c.verdict),
        upper_decade_ccdf: upper_decade_ccdf_fit(&w).ok(),
    };
    (summary, completed.then_some(w))
}
