//! Closed-form wealth in the trendy regime and the special response profiles.
//!
//! With zero external force, no noise and a persistently positive aggregate
//! `sum_i A_i b_i`, every step multiplies agent `i` by `1 + b_i`. From equal
//! starting wealth the normalized state after `n` steps is
//! `(1 + b_i)^n / sum_j (1 + b_j)^n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Response-coefficient profile over agents ranked `i = 1..N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BProfile {
    /// `1 + b_i = c / i^b`.
    PowerLaw { c: f64, b: f64 },
    /// `b_i = 1 - 2 (i - 1) / (N - 1)`, from +1 down to -1.
    LinearDeclining,
    Explicit { values: Vec<f64> },
}

pub fn generate_b_profile(profile: &BProfile, n_agents: usize) -> Result<Vec<f64>> {
    if n_agents < 2 {
        return Err(Error::config("n_agents", "at least 2 agents are required"));
    }
    match profile {
        BProfile::PowerLaw { c, b } => {
            if !(c.is_finite() && *c > 0.0) {
                return Err(Error::config("b_profile.c", "must be finite and > 0"));
            }
            if !(b.is_finite() && *b >= 0.0) {
                return Err(Error::config("b_profile.b", "must be finite and >= 0"));
            }
            let values: Vec<f64> = (1..=n_agents)
                .map(|i| c / (i as f64).powf(*b) - 1.0)
                .collect();
            if let Some(k) = values.iter().position(|v| !(-1.0..=1.0).contains(v)) {
                return Err(Error::config(
                    format!("b_profile[{}]", k + 1),
                    format!(
                        "c / i^b - 1 = {} leaves [-1, 1] (requires c <= 2)",
                        values[k]
                    ),
                ));
            }
            Ok(values)
        }
        BProfile::LinearDeclining => {
            let n = n_agents;
            let span = (n - 1) as f64;
            let mut values = vec![0.0; n];
            // Mirror the upper half so the profile is exactly antisymmetric.
            for k in 0..n.div_ceil(2) {
                let v = 1.0 - 2.0 * k as f64 / span;
                values[k] = v;
                values[n - 1 - k] = -v;
            }
            if n % 2 == 1 {
                values[n / 2] = 0.0;
            }
            Ok(values)
        }
        BProfile::Explicit { values } => {
            if values.len() != n_agents {
                return Err(Error::config(
                    "b_profile.values",
                    format!("{} values for {} agents", values.len(), n_agents),
                ));
            }
            if let Some(k) = values
                .iter()
                .position(|v| !(v.is_finite() && (-1.0..=1.0).contains(v)))
            {
                return Err(Error::config(
                    format!("b_profile.values[{k}]"),
                    format!("{} outside [-1, 1]", values[k]),
                ));
            }
            Ok(values.clone())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    /// Normalized wealth after `n_steps`.
    pub wealth: Vec<f64>,
    /// Growth factor relative to agent 1, `(1 + b_i) / (1 + b_1)`.
    pub alpha: Vec<f64>,
    pub n_steps: u32,
}

/// Normalized trendy-regime wealth after `n` steps from equal starts.
///
/// Evaluated in log space so large `n` does not overflow. Agents with `b_i = -1`
/// hold exactly zero once `n >= 1`.
pub fn oracle_trendy_wealth(responses: &[f64], n: u32) -> Result<OracleResult> {
    if responses.is_empty() {
        return Err(Error::input("empty response profile"));
    }
    if let Some(i) = responses
        .iter()
        .position(|b| !b.is_finite() || *b < -1.0 || *b > 1.0)
    {
        return Err(Error::input(format!(
            "b[{}] = {} outside [-1, 1]",
            i + 1,
            responses[i]
        )));
    }
    let growth0 = 1.0 + responses[0];
    if growth0 == 0.0 {
        return Err(Error::input("b_1 = -1 leaves the reference agent with nothing"));
    }
    let alpha = responses.iter().map(|b| (1.0 + b) / growth0).collect();

    let wealth = if n == 0 {
        vec![1.0 / responses.len() as f64; responses.len()]
    } else {
        let logs: Vec<f64> = responses
            .iter()
            .map(|b| {
                let g = 1.0 + b;
                if g == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    n as f64 * g.ln()
                }
            })
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Err(Error::input("every agent has b = -1; no wealth survives"));
        }
        let scaled: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = scaled.iter().sum();
        scaled.into_iter().map(|w| w / total).collect()
    };
    Ok(OracleResult {
        wealth,
        alpha,
        n_steps: n,
    })
}

/// Unnormalized wealth under the linear-declining profile:
/// `A_i = A0 2^n ((N - i) / (N - 1))^n`.
pub fn oracle_linear_declining(n_agents: usize, n: u32, a0: f64) -> Result<Vec<f64>> {
    if n_agents < 2 {
        return Err(Error::input("at least 2 agents are required"));
    }
    if !(a0.is_finite() && a0 > 0.0) {
        return Err(Error::input(format!("A0 = {a0} must be finite and > 0")));
    }
    let exp = i32::try_from(n).map_err(|_| Error::input("step count too large"))?;
    let span = (n_agents - 1) as f64;
    let doubling = 2f64.powi(exp);
    Ok((1..=n_agents)
        .map(|i| {
            let ratio = (n_agents - i) as f64 / span;
            a0 * doubling * ratio.powi(exp)
        })
        .collect())
}

/// `A_i(n) / A_1(n) = ((1 + b_i) / (1 + b_1))^n` for 1-based rank `i`.
pub fn oracle_ratio(responses: &[f64], n: u32, i: usize) -> Result<f64> {
    let b1 = *responses
        .first()
        .ok_or_else(|| Error::input("empty response profile"))?;
    if i == 0 || i > responses.len() {
        return Err(Error::input(format!(
            "rank {i} outside 1..={}",
            responses.len()
        )));
    }
    if b1 == -1.0 {
        return Err(Error::input("b_1 = -1 has no growth to compare against"));
    }
    if responses.iter().any(|&b| b > b1) {
        return Err(Error::input("b_1 must be the largest response"));
    }
    let alpha = (1.0 + responses[i - 1]) / (1.0 + b1);
    Ok(alpha.powf(n as f64))
}
