//! The linear-declining profile runs from a perfect follower (`b = 1`) to a
//! perfect contrarian (`b = -1`). The top agent doubles each step, the middle
//! agent stands still and the bottom agent is wiped out.
//!
//! cargo run --release --example linear_declining

use wealthloop::closed_form::oracle_linear_declining;
use wealthloop::compare::relative_diff;
use wealthloop::scenario::{Scenario, ScenarioConfig};

fn main() -> wealthloop::Result<()> {
    let (n_agents, steps) = (101, 20);
    let oracle = oracle_linear_declining(n_agents, steps, 1.0)?;
    println!("A_1  = {} (2^20 = {})", oracle[0], 2f64.powi(20));
    println!("A_51 = {}", oracle[50]);
    println!("A_N  = {}", oracle[n_agents - 1]);

    let config = ScenarioConfig::from_json(
        r#"{"n_agents": 101, "n_steps": 20,
            "regime": {"kind": "feedback-binary"},
            "b_profile": {"kind": "linear-declining"},
            "initial_wealth": {"kind": "equal", "value": 1.0}}"#,
    )?;
    let series = Scenario::new(config, None)?.run()?;
    let worst = series
        .final_wealth
        .iter()
        .zip(&oracle)
        .map(|(s, o)| relative_diff(*s, *o))
        .fold(0.0, f64::max);
    println!("simulation vs closed form, max relative difference: {worst:e}");
    Ok(())
}
