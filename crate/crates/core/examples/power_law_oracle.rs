//! Closed-form wealth for `1 + b_i = c / i^b` is exactly Zipf-like in rank space:
//! the log-log slope equals `-n b`.
//!
//! cargo run --release --example power_law_oracle

use wealthloop::analysis::fit_loglog;
use wealthloop::closed_form::{generate_b_profile, oracle_trendy_wealth, BProfile};

fn main() -> wealthloop::Result<()> {
    let b = 0.1;
    let responses = generate_b_profile(&BProfile::PowerLaw { c: 1.5, b }, 1000)?;
    for n in [1u32, 5, 10, 20] {
        let oracle = oracle_trendy_wealth(&responses, n)?;
        let points: Vec<(f64, f64)> = oracle
            .wealth
            .iter()
            .enumerate()
            .map(|(i, w)| ((i + 1) as f64, *w))
            .collect();
        let fit = fit_loglog(&points, None)?;
        println!(
            "n = {n:>2}: slope {:.6} (expected {:.6}), R^2 {:.8}",
            fit.slope,
            -(n as f64) * b,
            fit.r_squared
        );
    }
    Ok(())
}
