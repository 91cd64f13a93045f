//! Crowd state and the decision/observation feedback loop.
//!
//! Each agent holds wealth `A_i` and reacts to the previous change of the shared
//! observation through its response coefficient `b`, and to an exogenous force
//! through `c`. The observation change of a step is the wealth-weighted sum of
//! all decisions taken in that step.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Aggregates whose magnitude is below this fraction of the sum of absolute
/// terms are treated as exactly zero when their sign is taken.
pub const ZERO_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentParams {
    /// Response to the previous observation change. Positive follows the trend,
    /// negative is contrarian.
    pub b: f64,
    /// Response to the external force.
    pub c: f64,
    pub noise_sigma: f64,
    pub drift_mu: f64,
}

impl AgentParams {
    pub fn new(b: f64, c: f64, noise_sigma: f64, drift_mu: f64) -> Result<Self> {
        let params = AgentParams {
            b,
            c,
            noise_sigma,
            drift_mu,
        };
        params.validate()?;
        Ok(params)
    }

    /// Deterministic agent that only responds to the observation.
    pub fn follower(b: f64) -> Self {
        AgentParams {
            b,
            c: 0.0,
            noise_sigma: 0.0,
            drift_mu: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.b, self.c, self.noise_sigma, self.drift_mu]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::input("agent parameters must be finite"));
        }
        if !(-1.0..=1.0).contains(&self.b) {
            return Err(Error::input(format!("b = {} outside [-1, 1]", self.b)));
        }
        if self.c < 0.0 {
            return Err(Error::input(format!("c = {} is negative", self.c)));
        }
        if self.noise_sigma < 0.0 {
            return Err(Error::input(format!(
                "noise_sigma = {} is negative",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

/// How the previous observation enters a decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionMode {
    /// Only the sign of the previous observation matters; decisions are clamped to [-1, 1].
    Binary,
    /// The previous observation enters with its magnitude; decisions are unclamped.
    Continuous,
}

/// Full dynamic state of the crowd.
#[derive(Debug, Clone, PartialEq)]
pub struct CrowdState {
    wealth: Vec<f64>,
    params: Vec<AgentParams>,
    last_d_o: f64,
    /// Resolved sign of `last_d_o`; a zero observation keeps the previous trend.
    last_sign: f64,
    t: u64,
}

impl CrowdState {
    pub fn new(wealth: Vec<f64>, params: Vec<AgentParams>, d_o_initial: f64) -> Result<Self> {
        if wealth.len() != params.len() {
            return Err(Error::input(format!(
                "{} wealth values but {} agent parameter sets",
                wealth.len(),
                params.len()
            )));
        }
        if wealth.is_empty() {
            return Err(Error::input("crowd must contain at least one agent"));
        }
        if let Some(i) = wealth.iter().position(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::input(format!(
                "wealth[{i}] = {} must be finite and non-negative",
                wealth[i]
            )));
        }
        for (i, p) in params.iter().enumerate() {
            p.validate()
                .map_err(|e| Error::input(format!("agent {i}: {e}")))?;
        }
        if !d_o_initial.is_finite() {
            return Err(Error::input("initial observation change must be finite"));
        }
        Ok(CrowdState {
            wealth,
            params,
            last_d_o: d_o_initial,
            last_sign: sign_or(d_o_initial, 0.0, 1.0),
            t: 0,
        })
    }

    /// Equal wealth for every agent, deterministic followers with the given responses.
    pub fn with_responses(responses: &[f64], wealth_each: f64, d_o_initial: f64) -> Result<Self> {
        let params = responses.iter().map(|&b| AgentParams::follower(b)).collect();
        CrowdState::new(vec![wealth_each; responses.len()], params, d_o_initial)
    }

    pub fn n_agents(&self) -> usize {
        self.wealth.len()
    }

    pub fn wealth(&self) -> &[f64] {
        &self.wealth
    }

    pub(crate) fn wealth_mut(&mut self) -> &mut [f64] {
        &mut self.wealth
    }

    pub fn params(&self) -> &[AgentParams] {
        &self.params
    }

    pub fn responses(&self) -> impl Iterator<Item = f64> + '_ {
        self.params.iter().map(|p| p.b)
    }

    pub fn last_d_o(&self) -> f64 {
        self.last_d_o
    }

    pub fn last_sign(&self) -> f64 {
        self.last_sign
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub(crate) fn advance(&mut self, d_o: f64, sign: f64) {
        self.last_d_o = d_o;
        self.last_sign = sign;
        self.t += 1;
    }

    pub fn total_wealth(&self) -> f64 {
        self.wealth.iter().sum()
    }

    /// Wealth as shares of the total.
    pub fn normalized(&self) -> Result<Vec<f64>> {
        normalize(&self.wealth)
    }

    pub fn has_noise(&self) -> bool {
        self.params.iter().any(|p| p.noise_sigma > 0.0)
    }
}

pub fn normalize(wealth: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = wealth.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::input(format!(
            "cannot normalize wealth with total {total}"
        )));
    }
    Ok(wealth.iter().map(|a| a / total).collect())
}

/// Exogenous force increments `dE`, one per step.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ForceSeries {
    #[default]
    Zero,
    Constant(f64),
    /// `values[k]` is applied on step `k + 1`.
    Steps(Vec<f64>),
}

impl ForceSeries {
    /// Force applied on `step` (1-based). `None` past the end of a finite series.
    pub fn at(&self, step: u64) -> Option<f64> {
        match self {
            ForceSeries::Zero => Some(0.0),
            ForceSeries::Constant(v) => Some(*v),
            ForceSeries::Steps(values) => step
                .checked_sub(1)
                .and_then(|k| values.get(k as usize).copied()),
        }
    }

    pub fn covers(&self, horizon: u64) -> bool {
        match self {
            ForceSeries::Steps(values) => values.len() as u64 >= horizon,
            _ => true,
        }
    }
}

pub(crate) fn check_finite(label: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::input(format!("{label} is not finite ({v})")))
    }
}

/// Sign with a caller-chosen value for an aggregate indistinguishable from zero.
/// `magnitude` is the sum of absolute values of the terms that produced `value`.
pub fn sign_or(value: f64, magnitude: f64, on_zero: f64) -> f64 {
    if value.abs() <= ZERO_REL_TOL * magnitude || value == 0.0 {
        on_zero
    } else if value > 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Per-agent decision increments `dS_i = c_i dE + b_i dO(t-1) + eps_i`.
///
/// In binary mode the previous observation enters only through its sign and the
/// result is clamped to [-1, 1]. `rng` is required when any agent has noise.
pub fn decide<R: Rng + ?Sized>(
    state: &CrowdState,
    d_e: f64,
    mode: DecisionMode,
    mut rng: Option<&mut R>,
) -> Result<Vec<f64>> {
    check_finite("dE", d_e)?;
    check_finite("previous dO", state.last_d_o)?;
    if state.has_noise() && rng.is_none() {
        return Err(Error::input(
            "a random stream is required when any agent has noise_sigma > 0",
        ));
    }
    let signal = match mode {
        DecisionMode::Binary => state.last_sign,
        DecisionMode::Continuous => state.last_d_o,
    };
    let mut out = Vec::with_capacity(state.n_agents());
    for p in &state.params {
        let mut ds = p.c * d_e + p.b * signal + p.drift_mu;
        if p.noise_sigma > 0.0 {
            let z: f64 = rng
                .as_deref_mut()
                .expect("checked above")
                .sample(StandardNormal);
            ds += p.noise_sigma * z;
        }
        if mode == DecisionMode::Binary {
            ds = ds.clamp(-1.0, 1.0);
        }
        out.push(ds);
    }
    Ok(out)
}

/// Wealth-weighted sum and the matching sum of absolute terms.
pub(crate) fn weighted_sum(weights: &[f64], values: impl Iterator<Item = f64>) -> (f64, f64) {
    weights
        .iter()
        .zip(values)
        .fold((0.0, 0.0), |(s, m), (w, v)| {
            let term = w * v;
            (s + term, m + term.abs())
        })
}

/// Observation change `dO = sum_i A_i dS_i`, using the wealth held before rewards.
pub fn aggregate_observation(wealth: &[f64], decisions: &[f64]) -> Result<f64> {
    if wealth.len() != decisions.len() {
        return Err(Error::input(format!(
            "{} wealth values but {} decisions",
            wealth.len(),
            decisions.len()
        )));
    }
    Ok(weighted_sum(wealth, decisions.iter().copied()).0)
}

/// System response `D = sum_i A_i b_i`.
pub fn system_response(state: &CrowdState) -> f64 {
    weighted_sum(&state.wealth, state.responses()).0
}

pub(crate) fn system_response_with_magnitude(state: &CrowdState) -> (f64, f64) {
    weighted_sum(&state.wealth, state.responses())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type NoRng = ChaCha8Rng;

    fn state(wealth: Vec<f64>, b: &[f64], c: f64, d_o: f64) -> CrowdState {
        let params = b
            .iter()
            .map(|&b| AgentParams::new(b, c, 0.0, 0.0).unwrap())
            .collect();
        CrowdState::new(wealth, params, d_o).unwrap()
    }

    #[test]
    fn no_response_gives_zero_decisions() {
        let s = state(vec![0.5, 0.5], &[0.0, 0.0], 0.0, 1.0);
        let ds = decide::<NoRng>(&s, 3.7, DecisionMode::Continuous, None).unwrap();
        assert_eq!(ds, vec![0.0, 0.0]);
    }

    #[test]
    fn binary_decision_uses_sign_only() {
        let s = state(vec![0.5, 0.5], &[0.5, 0.5], 0.0, 1.0);
        let ds = decide::<NoRng>(&s, 0.0, DecisionMode::Binary, None).unwrap();
        assert_eq!(ds, vec![0.5, 0.5]);
        let s = state(vec![0.5, 0.5], &[0.5, 0.5], 0.0, 17.0);
        let ds = decide::<NoRng>(&s, 0.0, DecisionMode::Binary, None).unwrap();
        assert_eq!(ds, vec![0.5, 0.5]);
    }

    #[test]
    fn continuous_decision_is_affine_in_inputs() {
        let s = state(vec![1.0], &[0.3], 0.2, 0.5);
        let ds = decide::<NoRng>(&s, 1.0, DecisionMode::Continuous, None).unwrap();
        assert!((ds[0] - 0.35).abs() < 1e-15);
    }

    #[test]
    fn binary_decision_is_clamped() {
        let s = state(vec![1.0], &[1.0], 1.0, 1.0);
        let ds = decide::<NoRng>(&s, 5.0, DecisionMode::Binary, None).unwrap();
        assert_eq!(ds, vec![1.0]);
        let ds = decide::<NoRng>(&s, 5.0, DecisionMode::Continuous, None).unwrap();
        assert_eq!(ds, vec![6.0]);
    }

    #[test]
    fn noise_requires_rng() {
        let params = vec![AgentParams::new(0.0, 0.0, 0.1, 0.0).unwrap()];
        let s = CrowdState::new(vec![1.0], params, 1.0).unwrap();
        assert!(decide::<NoRng>(&s, 0.0, DecisionMode::Continuous, None).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ds = decide(&s, 0.0, DecisionMode::Continuous, Some(&mut rng)).unwrap();
        assert!(ds[0] != 0.0);
    }

    #[test]
    fn non_finite_force_is_rejected() {
        let s = state(vec![1.0], &[0.0], 0.0, 1.0);
        assert!(decide::<NoRng>(&s, f64::NAN, DecisionMode::Continuous, None).is_err());
        assert!(decide::<NoRng>(&s, f64::INFINITY, DecisionMode::Binary, None).is_err());
    }

    #[test]
    fn aggregate_examples() {
        assert_eq!(aggregate_observation(&[0.5, 0.5], &[1.0, -1.0]).unwrap(), 0.0);
        let d_o = aggregate_observation(&[0.6, 0.4], &[1.0, -1.0]).unwrap();
        assert!((d_o - 0.2).abs() < 1e-15);
        assert_eq!(
            aggregate_observation(&[1.0, 0.0, 0.0], &[0.7, -0.3, 0.9]).unwrap(),
            0.7
        );
        assert!(aggregate_observation(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn system_response_symmetric_crowd_is_zero() {
        let s = state(vec![0.5, 0.5], &[1.0, -1.0], 0.0, 1.0);
        assert_eq!(system_response(&s), 0.0);
    }

    #[test]
    fn observation_compounds_geometrically_with_constant_response() {
        // Wealth is held fixed, so D stays constant and dO(n) = dO(0) D^n.
        let mut s = state(vec![0.5, 0.5], &[0.5, 0.5], 0.0, 1.0);
        for _ in 0..3 {
            let ds = decide::<NoRng>(&s, 0.0, DecisionMode::Continuous, None).unwrap();
            let d_o = aggregate_observation(s.wealth(), &ds).unwrap();
            assert!((d_o - system_response(&s) * s.last_d_o()).abs() < 1e-15);
            s.advance(d_o, sign_or(d_o, 0.0, 1.0));
        }
        assert_eq!(s.last_d_o(), 0.125);

        // D = 2 needs unnormalized wealth: the observation doubles every step.
        let mut s = state(vec![1.0, 1.0], &[1.0, 1.0], 0.0, 1.0);
        let mut trace = vec![];
        for _ in 0..3 {
            let ds = decide::<NoRng>(&s, 0.0, DecisionMode::Continuous, None).unwrap();
            let d_o = aggregate_observation(s.wealth(), &ds).unwrap();
            s.advance(d_o, sign_or(d_o, 0.0, 1.0));
            trace.push(d_o);
        }
        assert_eq!(trace, vec![2.0, 4.0, 8.0]);
    }

    #[test]
    fn invalid_states_are_rejected() {
        assert!(CrowdState::new(vec![1.0, 1.0], vec![AgentParams::follower(0.0)], 1.0).is_err());
        assert!(CrowdState::new(vec![-1.0], vec![AgentParams::follower(0.0)], 1.0).is_err());
        assert!(CrowdState::new(vec![f64::NAN], vec![AgentParams::follower(0.0)], 1.0).is_err());
        assert!(CrowdState::new(vec![1.0], vec![AgentParams::follower(1.5)], 1.0).is_err());
        assert!(AgentParams::new(0.0, -0.1, 0.0, 0.0).is_err());
        assert!(AgentParams::new(0.0, 0.0, -0.1, 0.0).is_err());
    }

    #[test]
    fn sign_of_near_zero_uses_fallback() {
        assert_eq!(sign_or(0.0, 0.0, 1.0), 1.0);
        assert_eq!(sign_or(-1e-18, 1.0, 1.0), 1.0);
        assert_eq!(sign_or(-1e-18, 0.0, 1.0), -1.0);
        assert_eq!(sign_or(-0.2, 1.0, 1.0), -1.0);
        assert_eq!(sign_or(0.0, 0.0, -1.0), -1.0);
    }

    #[test]
    fn force_series_lookup() {
        assert_eq!(ForceSeries::Zero.at(5), Some(0.0));
        assert_eq!(ForceSeries::Constant(2.0).at(1), Some(2.0));
        let s = ForceSeries::Steps(vec![0.1, 0.2]);
        assert_eq!(s.at(1), Some(0.1));
        assert_eq!(s.at(2), Some(0.2));
        assert_eq!(s.at(3), None);
        assert!(s.covers(2));
        assert!(!s.covers(3));
    }

    #[test]
    fn normalized_view_sums_to_one() {
        let s = state(vec![3.0, 1.0, 6.0], &[0.0; 3], 0.0, 1.0);
        let n = s.normalized().unwrap();
        assert!((n.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(normalize(&[0.0, 0.0]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn continuous_decision_is_linear(
                b in -1.0f64..1.0, c in 0.0f64..2.0,
                e1 in -5.0f64..5.0, e2 in -5.0f64..5.0,
                o1 in -5.0f64..5.0, o2 in -5.0f64..5.0,
                k in -3.0f64..3.0,
            ) {
                let at = |e: f64, o: f64| {
                    let s = state(vec![1.0], &[b], c, o);
                    decide::<NoRng>(&s, e, DecisionMode::Continuous, None).unwrap()[0]
                };
                let combined = at(e1 + k * e2, o1 + k * o2);
                let split = at(e1, o1) + k * at(e2, o2);
                prop_assert!((combined - split).abs() <= 1e-12 * (1.0 + combined.abs()));
            }
        }
    }
}
