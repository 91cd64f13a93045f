//! Wealth-update regimes.
//!
//! The feedback regimes reward each agent in proportion to its own wealth and
//! to the alignment between its decision and the realized observation:
//! `dA_i = A_i dS_i Sign[dO(t)]`. The random regimes switch the feedback loop
//! off and apply i.i.d. Gaussian shocks, either additively or multiplicatively.
//! A minimum-wealth floor may be applied after any regime.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    self, decide, system_response_with_magnitude, weighted_sum, CrowdState, DecisionMode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeKind {
    FeedbackBinary,
    /// Extension: reuses the binary reward rule with unclamped continuous decisions.
    FeedbackContinuous,
    AdditiveRandom,
    MultiplicativeRandom,
}

impl RegimeKind {
    pub fn is_feedback(self) -> bool {
        matches!(
            self,
            RegimeKind::FeedbackBinary | RegimeKind::FeedbackContinuous
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardRegime {
    pub kind: RegimeKind,
    /// Minimum wealth `A_min`; values below it are clamped up after each step.
    #[serde(default)]
    pub floor: Option<f64>,
    #[serde(default)]
    pub normalize_each_step: bool,
    /// Standard deviation of the Gaussian shocks in the random regimes.
    #[serde(default)]
    pub shock_scale: f64,
}

impl RewardRegime {
    pub fn new(kind: RegimeKind) -> Self {
        RewardRegime {
            kind,
            floor: None,
            normalize_each_step: false,
            shock_scale: 0.0,
        }
    }

    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = Some(floor);
        self
    }

    pub fn with_shock_scale(mut self, shock_scale: f64) -> Self {
        self.shock_scale = shock_scale;
        self
    }

    pub fn normalized(mut self) -> Self {
        self.normalize_each_step = true;
        self
    }

    /// Checks the regime against the crowd it will be applied to.
    pub fn validate(&self, initial_wealth: &[f64]) -> Result<()> {
        if let Some(floor) = self.floor {
            if !floor.is_finite() || floor < 0.0 {
                return Err(Error::config("regime.floor", "must be finite and >= 0"));
            }
            let min = initial_wealth.iter().copied().fold(f64::INFINITY, f64::min);
            if floor > min {
                return Err(Error::config(
                    "regime.floor",
                    format!("{floor} exceeds the initial minimum wealth {min}"),
                ));
            }
        }
        if !self.kind.is_feedback() && !(self.shock_scale.is_finite() && self.shock_scale > 0.0) {
            return Err(Error::config(
                "regime.shock_scale",
                "must be finite and > 0 for random regimes",
            ));
        }
        if self.kind == RegimeKind::MultiplicativeRandom {
            if let Some(i) = initial_wealth.iter().position(|&a| a <= 0.0) {
                return Err(Error::config(
                    format!("initial_wealth[{i}]"),
                    "multiplicative regime needs strictly positive starting wealth",
                ));
            }
        }
        Ok(())
    }
}

/// What a feedback step realized, before floor and normalization were applied.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub d_o: f64,
    pub sign_d_o: f64,
    /// Per-agent reward `dA_i`.
    pub rewards: Vec<f64>,
    /// `Sign[sum_i A_i b_i]` on pre-reward wealth, zero counted as +1.
    pub trend_sign: f64,
    /// `D = sum_i A_i b_i` on pre-reward wealth.
    pub system_response: f64,
}

/// One step of a feedback regime (binary or continuous).
///
/// Order: decisions from `(dE(t), dO(t-1))`, observation from pre-reward wealth,
/// reward, floor, then optional normalization.
pub fn step_feedback<R: Rng + ?Sized>(
    state: &mut CrowdState,
    d_e: f64,
    regime: &RewardRegime,
    rng: Option<&mut R>,
) -> Result<StepOutcome> {
    let mode = match regime.kind {
        RegimeKind::FeedbackBinary => DecisionMode::Binary,
        RegimeKind::FeedbackContinuous => DecisionMode::Continuous,
        other => {
            return Err(Error::config(
                "regime.kind",
                format!("{other:?} is not a feedback regime"),
            ))
        }
    };
    if let Some(i) = state.params().iter().position(|p| p.b.abs() > 1.0) {
        return Err(Error::config(
            format!("b_profile.values[{i}]"),
            "|b| > 1 can drive wealth negative",
        ));
    }

    let (d, d_mag) = system_response_with_magnitude(state);
    let trend_sign = model::sign_or(d, d_mag, 1.0);
    let decisions = decide(state, d_e, mode, rng)?;
    let (d_o, d_o_mag) = weighted_sum(state.wealth(), decisions.iter().copied());
    // A zero observation continues the previous trend.
    let sign_d_o = model::sign_or(d_o, d_o_mag, state.last_sign());

    let wealth = state.wealth_mut();
    let mut rewards = Vec::with_capacity(wealth.len());
    for (a, ds) in wealth.iter_mut().zip(&decisions) {
        let reward = *a * ds * sign_d_o;
        rewards.push(reward);
        *a += reward;
        if mode == DecisionMode::Continuous && *a < 0.0 {
            *a = 0.0;
        }
    }
    finish_step(wealth, regime)?;
    state.advance(d_o, sign_d_o);
    Ok(StepOutcome {
        d_o,
        sign_d_o,
        rewards,
        trend_sign,
        system_response: d,
    })
}

/// `A_i += phi_i`, `phi_i ~ N(0, shock_scale)`; responses are ignored.
pub fn step_additive_random<R: Rng + ?Sized>(
    state: &mut CrowdState,
    regime: &RewardRegime,
    rng: &mut R,
) -> Result<()> {
    if regime.kind != RegimeKind::AdditiveRandom {
        return Err(Error::config("regime.kind", "expected additive-random"));
    }
    let scale = regime.shock_scale;
    let wealth = state.wealth_mut();
    if scale > 0.0 {
        for a in wealth.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *a += scale * z;
        }
    }
    finish_step(wealth, regime)?;
    state.advance(0.0, state.last_sign());
    Ok(())
}

/// `A_i *= 1 + phi_i` with `phi_i ~ N(0, shock_scale)` truncated to `(-1, inf)`.
pub fn step_multiplicative_random<R: Rng + ?Sized>(
    state: &mut CrowdState,
    regime: &RewardRegime,
    rng: &mut R,
) -> Result<()> {
    if regime.kind != RegimeKind::MultiplicativeRandom {
        return Err(Error::config(
            "regime.kind",
            "expected multiplicative-random",
        ));
    }
    if let Some(i) = state.wealth().iter().position(|&a| a <= 0.0) {
        return Err(Error::input(format!(
            "wealth[{i}] = {} must be > 0 in the multiplicative regime",
            state.wealth()[i]
        )));
    }
    let scale = regime.shock_scale;
    let wealth = state.wealth_mut();
    if scale > 0.0 {
        for a in wealth.iter_mut() {
            let phi = loop {
                let z: f64 = rng.sample(StandardNormal);
                let phi = scale * z;
                if phi > -1.0 {
                    break phi;
                }
            };
            *a *= 1.0 + phi;
        }
    }
    finish_step(wealth, regime)?;
    state.advance(0.0, state.last_sign());
    Ok(())
}

fn finish_step(wealth: &mut [f64], regime: &RewardRegime) -> Result<()> {
    if let Some(floor) = regime.floor {
        floor_in_place(wealth, floor);
    }
    if regime.normalize_each_step {
        let total: f64 = wealth.iter().sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::input(format!(
                "cannot normalize wealth with total {total}"
            )));
        }
        wealth.iter_mut().for_each(|a| *a /= total);
    }
    Ok(())
}

fn floor_in_place(wealth: &mut [f64], a_min: f64) {
    for a in wealth.iter_mut() {
        if *a < a_min {
            *a = a_min;
        }
    }
}

/// Clamps every value up to `a_min`. No wealth is redistributed.
pub fn apply_floor(wealth: &[f64], a_min: f64) -> Result<Vec<f64>> {
    if !a_min.is_finite() || a_min < 0.0 {
        return Err(Error::input(format!("floor {a_min} must be finite and >= 0")));
    }
    let mut out = wealth.to_vec();
    floor_in_place(&mut out, a_min);
    Ok(out)
}
