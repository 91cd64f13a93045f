//! With the feedback loop off, i.i.d. shocks give normal (additive) or lognormal
//! (multiplicative) wealth. A wealth floor turns both into distributions that
//! peak at the floor.
//!
//! cargo run --release --example random_regimes

use wealthloop::analysis::{classify, ClassifyConfig};
use wealthloop::scenario::{Scenario, ScenarioConfig};
use wealthloop::stats;

fn run(label: &str, regime: &str, steps: u64) -> wealthloop::Result<()> {
    let json = format!(
        r#"{{"n_agents": 20000, "n_steps": {steps}, "seed": 5,
            "regime": {regime},
            "b_profile": {{"kind": "linear-declining"}},
            "initial_wealth": {{"kind": "equal", "value": 2.0}},
            "snapshot_every": {steps}, "metrics_every": {steps}}}"#
    );
    let series = Scenario::new(ScenarioConfig::from_json(&json)?, None)?.run()?;
    let w = &series.final_wealth;
    let verdict = classify(w, &ClassifyConfig::default())?.verdict;
    let log_skew = stats::log_skewness(w).map_or("n/a".to_string(), |s| format!("{s:+.3}"));
    println!(
        "{label:<28} skew {:+.3}  log-skew {log_skew:>6}  -> {verdict}",
        stats::skewness(w)
    );
    Ok(())
}

fn main() -> wealthloop::Result<()> {
    run("additive", r#"{"kind": "additive-random", "shock_scale": 0.01}"#, 1000)?;
    run("additive, floor 1.0", r#"{"kind": "additive-random", "shock_scale": 0.01, "floor": 1.0}"#, 4000)?;
    run("multiplicative", r#"{"kind": "multiplicative-random", "shock_scale": 0.05}"#, 1000)?;
    run(
        "multiplicative, floor 2.0",
        r#"{"kind": "multiplicative-random", "shock_scale": 0.05, "floor": 2.0}"#,
        1000,
    )?;
    Ok(())
}
