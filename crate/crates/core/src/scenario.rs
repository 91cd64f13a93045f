//! Declarative run descriptions and the sequential stepper that executes them.

use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::gini::gini_sorted;
use crate::closed_form::{generate_b_profile, BProfile};
use crate::error::{Error, Result};
use crate::model::{system_response_with_magnitude, sign_or, AgentParams, CrowdState, ForceSeries};
use crate::reward::{self, RegimeKind, RewardRegime};
use crate::stats;

/// Runs stop with [`RunStatus::Unbounded`] once `|dO|` or any wealth passes this.
pub const OVERFLOW_GUARD: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CValue {
    Scalar(f64),
    PerAgent(Vec<f64>),
}

impl Default for CValue {
    fn default() -> Self {
        CValue::Scalar(0.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub sigma: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ForceConfig {
    #[default]
    None,
    Constant { value: f64 },
    /// CSV with a header; the `dE` column (or the last column) holds one value per step.
    Series { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialWealth {
    /// Every agent starts with `value`, `1 / n_agents` when omitted.
    Equal {
        #[serde(default)]
        value: Option<f64>,
    },
    Explicit { values: Vec<f64> },
}

impl Default for InitialWealth {
    fn default() -> Self {
        InitialWealth::Equal { value: None }
    }
}

fn one() -> f64 {
    1.0
}

fn ten() -> u64 {
    10
}

fn every_step() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub n_agents: usize,
    pub n_steps: u64,
    pub regime: RewardRegime,
    pub b_profile: BProfile,
    #[serde(default)]
    pub c_value: CValue,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub external_force: ForceConfig,
    #[serde(rename = "dO_initial", default = "one")]
    pub d_o_initial: f64,
    #[serde(default)]
    pub initial_wealth: InitialWealth,
    #[serde(default)]
    pub seed: u64,
    /// Wealth vectors are kept every this many steps, plus the first and last.
    #[serde(default = "ten")]
    pub snapshot_every: u64,
    /// Gini and top shares are computed every this many steps, plus the first and last.
    #[serde(default = "every_step")]
    pub metrics_every: u64,
}

impl ScenarioConfig {
    /// Parses JSON, reporting the dotted path of the offending field.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { "<root>".to_string() } else { path };
            Error::config(field, e.into_inner().to_string())
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// A validated scenario with every default resolved.
#[derive(Debug, Clone)]
pub struct Scenario {
    config: ScenarioConfig,
    responses: Vec<f64>,
    params: Vec<AgentParams>,
    initial_wealth: Vec<f64>,
    force: ForceSeries,
}

impl Scenario {
    /// Reads a JSON config; a series path is taken relative to the config's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config = ScenarioConfig::from_json(&text)?;
        Scenario::new(config, path.parent())
    }

    pub fn new(mut config: ScenarioConfig, base_dir: Option<&Path>) -> Result<Self> {
        let n = config.n_agents;
        if n < 2 {
            return Err(Error::config("n_agents", "at least 2 agents are required"));
        }
        if config.snapshot_every == 0 {
            return Err(Error::config("snapshot_every", "must be >= 1"));
        }
        if config.metrics_every == 0 {
            return Err(Error::config("metrics_every", "must be >= 1"));
        }
        if !config.d_o_initial.is_finite() {
            return Err(Error::config("dO_initial", "must be finite"));
        }
        let responses = generate_b_profile(&config.b_profile, n)?;

        let c_values = match &config.c_value {
            CValue::Scalar(c) => vec![*c; n],
            CValue::PerAgent(values) => {
                if values.len() != n {
                    return Err(Error::config(
                        "c_value",
                        format!("{} values for {n} agents", values.len()),
                    ));
                }
                values.clone()
            }
        };
        if let Some(i) = c_values.iter().position(|c| !(c.is_finite() && *c >= 0.0)) {
            let field = match config.c_value {
                CValue::Scalar(_) => "c_value".to_string(),
                CValue::PerAgent(_) => format!("c_value[{i}]"),
            };
            return Err(Error::config(field, "must be finite and >= 0"));
        }
        let noise = &config.noise;
        if !(noise.sigma.is_finite() && noise.sigma >= 0.0) {
            return Err(Error::config("noise.sigma", "must be finite and >= 0"));
        }
        if !noise.mu.is_finite() {
            return Err(Error::config("noise.mu", "must be finite"));
        }
        let params: Vec<AgentParams> = responses
            .iter()
            .zip(&c_values)
            .map(|(&b, &c)| AgentParams {
                b,
                c,
                noise_sigma: noise.sigma,
                drift_mu: noise.mu,
            })
            .collect();

        let initial_wealth = match &mut config.initial_wealth {
            InitialWealth::Equal { value } => {
                let v = *value.get_or_insert(1.0 / n as f64);
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::config("initial_wealth.value", "must be finite and > 0"));
                }
                vec![v; n]
            }
            InitialWealth::Explicit { values } => {
                if values.len() != n {
                    return Err(Error::config(
                        "initial_wealth.values",
                        format!("{} values for {n} agents", values.len()),
                    ));
                }
                if let Some(i) = values.iter().position(|a| !(a.is_finite() && *a >= 0.0)) {
                    return Err(Error::config(
                        format!("initial_wealth.values[{i}]"),
                        "must be finite and >= 0",
                    ));
                }
                if values.iter().all(|&a| a == 0.0) {
                    return Err(Error::config("initial_wealth.values", "total wealth is zero"));
                }
                values.clone()
            }
        };
        config.regime.validate(&initial_wealth)?;

        let force = match &mut config.external_force {
            ForceConfig::None => ForceSeries::Zero,
            ForceConfig::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::config("external_force.value", "must be finite"));
                }
                ForceSeries::Constant(*value)
            }
            ForceConfig::Series { path } => {
                if let (Some(base), true) = (base_dir, path.is_relative()) {
                    *path = base.join(&*path);
                }
                let values = read_force_series(path)?;
                if (values.len() as u64) < config.n_steps {
                    return Err(Error::config(
                        "external_force.path",
                        format!("{} values for {} steps", values.len(), config.n_steps),
                    ));
                }
                ForceSeries::Steps(values)
            }
        };
        Ok(Scenario {
            config,
            responses,
            params,
            initial_wealth,
            force,
        })
    }

    /// The resolved configuration, reproducing this run when fed back in.
    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    pub fn initial_wealth(&self) -> &[f64] {
        &self.initial_wealth
    }

    pub fn with_seed(&self, seed: u64) -> Scenario {
        let mut s = self.clone();
        s.config.seed = seed;
        s
    }

    /// Executes the run sequentially. Step `k` uses the wealth left by step `k - 1`.
    pub fn run(&self) -> Result<WealthSeries> {
        let cfg = &self.config;
        let mut state = CrowdState::new(
            self.initial_wealth.clone(),
            self.params.clone(),
            cfg.d_o_initial,
        )?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let noisy = state.has_noise();
        let mut records = Vec::new();
        let mut snapshots = Vec::new();

        let (d0, d0_mag) = system_response_with_magnitude(&state);
        records.push(StepRecord {
            t: 0,
            d_o: cfg.d_o_initial,
            system_response: d0,
            trend_sign: sign_or(d0, d0_mag, 1.0),
            metrics: Metrics::of(state.wealth()),
        });
        snapshots.push(Snapshot {
            t: 0,
            wealth: state.wealth().to_vec(),
        });

        let mut status = RunStatus::Completed;
        for step in 1..=cfg.n_steps {
            let d_e = self.force.at(step).ok_or_else(|| {
                Error::config("external_force.path", format!("no value for step {step}"))
            })?;
            let (d_o, d, trend_sign) = match cfg.regime.kind {
                RegimeKind::FeedbackBinary | RegimeKind::FeedbackContinuous => {
                    let rng = if noisy { Some(&mut rng) } else { None };
                    let out = reward::step_feedback(&mut state, d_e, &cfg.regime, rng)?;
                    (out.d_o, out.system_response, out.trend_sign)
                }
                RegimeKind::AdditiveRandom | RegimeKind::MultiplicativeRandom => {
                    let (d, mag) = system_response_with_magnitude(&state);
                    if cfg.regime.kind == RegimeKind::AdditiveRandom {
                        reward::step_additive_random(&mut state, &cfg.regime, &mut rng)?;
                    } else {
                        reward::step_multiplicative_random(&mut state, &cfg.regime, &mut rng)?;
                    }
                    (0.0, d, sign_or(d, mag, 1.0))
                }
            };
            let last = step == cfg.n_steps;
            if let Some(reason) = overflow(d_o, state.wealth()) {
                status = RunStatus::Unbounded { step, reason };
                break;
            }
            let metrics = if last || step % cfg.metrics_every == 0 {
                Metrics::of(state.wealth())
            } else {
                Metrics::default()
            };
            records.push(StepRecord {
                t: step,
                d_o,
                system_response: d,
                trend_sign,
                metrics,
            });
            if last || step % cfg.snapshot_every == 0 {
                snapshots.push(Snapshot {
                    t: step,
                    wealth: state.wealth().to_vec(),
                });
            }
        }
        // Past the guard the state is not trustworthy; keep the last good snapshot.
        let final_wealth = match status {
            RunStatus::Completed => state.wealth().to_vec(),
            RunStatus::Unbounded { .. } => snapshots.last().expect("initial snapshot").wealth.clone(),
        };
        Ok(WealthSeries {
            records,
            snapshots,
            final_wealth,
            responses: self.responses.clone(),
            status,
            seed: cfg.seed,
        })
    }
}

fn overflow(d_o: f64, wealth: &[f64]) -> Option<String> {
    if !(d_o.abs() <= OVERFLOW_GUARD) {
        return Some(format!("|dO| = {} exceeds {OVERFLOW_GUARD:e}", d_o.abs()));
    }
    wealth
        .iter()
        .position(|a| !(a.abs() <= OVERFLOW_GUARD))
        .map(|i| format!("wealth[{i}] = {} exceeds {OVERFLOW_GUARD:e}", wealth[i]))
}

fn read_force_series(path: &Path) -> Result<Vec<f64>> {
    if !path.exists() {
        return Err(Error::config(
            "external_force.path",
            format!("{} does not exist", path.display()),
        ));
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let col = headers
        .iter()
        .position(|h| h == "dE")
        .unwrap_or(headers.len().saturating_sub(1));
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let text = record.get(col).unwrap_or("");
        let v: f64 = text.parse().map_err(|_| Error::Parse {
            row: i + 1,
            message: format!("force value {text:?} is not a number"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                row: i + 1,
                message: "force value must be finite".into(),
            });
        }
        values.push(v);
    }
    Ok(values)
}

/// Convenience for in-memory configs without file references.
pub fn run_scenario(config: &ScenarioConfig) -> Result<WealthSeries> {
    Scenario::new(config.clone(), None)?.run()
}

/// Concentration metrics of one wealth vector; `None` where undefined or thinned out.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Metrics {
    pub gini: Option<f64>,
    pub top1_share: Option<f64>,
    pub top10_share: Option<f64>,
}

impl Metrics {
    pub fn of(wealth: &[f64]) -> Metrics {
        let sorted = stats::sorted(wealth);
        let total: f64 = sorted.iter().sum();
        if sorted[0] < 0.0 || !(total > 0.0) {
            return Metrics::default();
        }
        let top = |fraction: f64| {
            let m = ((fraction * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
            sorted[sorted.len() - m..].iter().sum::<f64>() / total
        };
        Metrics {
            gini: Some(gini_sorted(&sorted, total)),
            top1_share: Some(top(0.01)),
            top10_share: Some(top(0.1)),
        }
    }
}

/// One row of the time series. Row `t` holds `dO(t)`, the `D` and trend sign
/// evaluated on the wealth entering step `t`, and metrics of the wealth after it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub t: u64,
    pub d_o: f64,
    pub system_response: f64,
    pub trend_sign: f64,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub t: u64,
    pub wealth: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "state", rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    Unbounded { step: u64, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WealthSeries {
    pub records: Vec<StepRecord>,
    pub snapshots: Vec<Snapshot>,
    /// Wealth after the last completed step.
    pub final_wealth: Vec<f64>,
    pub responses: Vec<f64>,
    pub status: RunStatus,
    pub seed: u64,
}

impl WealthSeries {
    pub fn final_normalized(&self) -> Result<Vec<f64>> {
        crate::model::normalize(&self.final_wealth)
    }
}
