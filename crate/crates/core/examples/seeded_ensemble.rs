//! Multiplicative shocks above a floor, repeated over consecutive seeds. Each
//! run's upper decade is fitted on its CCDF; verdicts are tallied.
//!
//! cargo run --release --example seeded_ensemble

use wealthloop::analysis::ClassifyConfig;
use wealthloop::ensemble::run_ensemble;
use wealthloop::scenario::{Scenario, ScenarioConfig};

fn main() -> wealthloop::Result<()> {
    let config = ScenarioConfig::from_json(
        r#"{"n_agents": 10000, "n_steps": 500,
            "regime": {"kind": "multiplicative-random", "shock_scale": 0.03, "floor": 1.0},
            "b_profile": {"kind": "linear-declining"},
            "initial_wealth": {"kind": "equal", "value": 1.0},
            "snapshot_every": 500, "metrics_every": 500}"#,
    )?;
    let scenario = Scenario::new(config, None)?;
    let report = run_ensemble(&scenario, 8, 100, &ClassifyConfig::default(), |_, _| Ok(()))?;

    println!("{:>5} {:>8} {:>10} {:>8}  verdict", "seed", "gini", "ccdf k", "R^2");
    for r in &report.runs {
        let (k, r2) = r
            .upper_decade_ccdf
            .as_ref()
            .map_or((f64::NAN, f64::NAN), |f| (-f.slope, f.r_squared));
        let verdict = r.verdict.map_or("-".to_string(), |v| v.to_string());
        println!(
            "{:>5} {:>8.4} {:>10.3} {:>8.4}  {verdict}",
            r.seed,
            r.gini.unwrap_or(f64::NAN),
            k,
            r2
        );
    }
    println!("completed {}/{}, tallies {:?}", report.completed, report.n_runs, report.verdict_tallies);
    Ok(())
}
