//! Small descriptive-statistics helpers shared by the analysis modules.

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population central moments `(m2, m3)`.
fn central_moments(xs: &[f64]) -> (f64, f64) {
    let m = mean(xs);
    let (m2, m3) = xs.iter().fold((0.0, 0.0), |(s2, s3), &x| {
        let d = x - m;
        (s2 + d * d, s3 + d * d * d)
    });
    let n = xs.len() as f64;
    (m2 / n, m3 / n)
}

pub fn variance(xs: &[f64]) -> f64 {
    central_moments(xs).0
}

/// Moment skewness `m3 / m2^(3/2)`; zero for a constant sample.
pub fn skewness(xs: &[f64]) -> f64 {
    let (m2, m3) = central_moments(xs);
    if m2 == 0.0 {
        0.0
    } else {
        m3 / m2.powf(1.5)
    }
}

/// Skewness of `ln x`, or `None` if any value is not strictly positive.
pub fn log_skewness(xs: &[f64]) -> Option<f64> {
    if xs.iter().any(|&x| x <= 0.0) {
        return None;
    }
    let logs: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    Some(skewness(&logs))
}

pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}

/// Linear-interpolation quantile of an ascending slice, `q` in [0, 1].
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

pub fn require_finite(samples: &[f64]) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::input("empty sample"));
    }
    let bad = samples.iter().filter(|x| !x.is_finite()).count();
    if bad > 0 {
        return Err(Error::input(format!("{bad} non-finite sample value(s)")));
    }
    Ok(())
}

pub fn distinct_count(sorted: &[f64]) -> usize {
    if sorted.is_empty() {
        return 0;
    }
    1 + sorted.windows(2).filter(|w| w[0] != w[1]).count()
}
