use crate::error::{Error, Result};
use crate::stats;

/// Gini index of non-negative samples.
///
/// Evaluated as `sum_{i<j} (x_(j) - x_(i)) / (n sum x)` by summing sorted gaps
/// weighted by the number of pairs straddling them, so identical values give
/// exactly zero.
pub fn gini(samples: &[f64]) -> Result<f64> {
    stats::require_finite(samples)?;
    if samples.iter().any(|&x| x < 0.0) {
        return Err(Error::input("gini requires non-negative samples"));
    }
    let sorted = stats::sorted(samples);
    let total: f64 = sorted.iter().sum();
    if total <= 0.0 {
        return Err(Error::input("gini of an all-zero sample is undefined"));
    }
    Ok(gini_sorted(&sorted, total))
}

pub(crate) fn gini_sorted(sorted: &[f64], total: f64) -> f64 {
    let n = sorted.len();
    let pair_sum: f64 = sorted
        .windows(2)
        .enumerate()
        .map(|(k, w)| {
            let below = (k + 1) as f64;
            (w[1] - w[0]) * below * (n as f64 - below)
        })
        .sum();
    pair_sum / (n as f64 * total)
}

/// Share of the total held by the richest `ceil(fraction * n)` samples.
pub fn top_share(samples: &[f64], fraction: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::input("empty sample"));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::input(format!("fraction {fraction} outside (0, 1]")));
    }
    let total: f64 = samples.iter().sum();
    if !(total > 0.0) {
        return Err(Error::input("top share of a non-positive total is undefined"));
    }
    let m = ((fraction * samples.len() as f64).ceil() as usize).clamp(1, samples.len());
    let mut v = samples.to_vec();
    let cut = v.len() - m;
    v.select_nth_unstable_by(cut, f64::total_cmp);
    Ok(v[cut..].iter().sum::<f64>() / total)
}
