use serde::Serialize;

use crate::analysis::histogram::Histogram;
use crate::error::{Error, Result};

/// Second differences of sampled counts smaller than this many standard
/// errors are treated as unresolved and left out of the score.
pub const RESOLUTION_Z: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationProfile {
    /// `d[k+1] - d[k]`, one shorter than the densities.
    pub first_diff: Vec<f64>,
    /// `d[k+2] - 2 d[k+1] + d[k]`, two shorter than the densities.
    pub second_diff: Vec<f64>,
    /// Fraction of scored interior buckets that are falling and convex.
    pub convexity_score: f64,
    /// Interior buckets that entered the score.
    pub scored_buckets: usize,
}

/// Shape of a density: how much of it is decreasing and convex.
///
/// Interior bucket `j` passes when `first_diff[j] < 0` and `second_diff[j-1] > 0`.
/// When the histogram carries a sample count, buckets whose second difference is
/// within sampling noise (Poisson counts) are not scored.
pub fn concentration_profile(hist: &Histogram) -> Result<ConcentrationProfile> {
    let counts = hist.counts();
    profile(&hist.densities, counts.as_deref())
}

pub(crate) fn profile(densities: &[f64], counts: Option<&[f64]>) -> Result<ConcentrationProfile> {
    let m = densities.len();
    if m < 3 {
        return Err(Error::InsufficientData(format!(
            "{m} buckets, need at least 3 for second differences"
        )));
    }
    let first_diff: Vec<f64> = densities.windows(2).map(|w| w[1] - w[0]).collect();
    let second_diff: Vec<f64> = densities
        .windows(3)
        .map(|w| w[2] - 2.0 * w[1] + w[0])
        .collect();
    let mut scored = 0usize;
    let mut passed = 0usize;
    for j in 1..m - 1 {
        if let Some(c) = counts {
            let sd = c[j + 1] - 2.0 * c[j] + c[j - 1];
            let noise = (c[j - 1] + 4.0 * c[j] + c[j + 1]).sqrt();
            if sd.abs() <= RESOLUTION_Z * noise {
                continue;
            }
        }
        scored += 1;
        if first_diff[j] < 0.0 && second_diff[j - 1] > 0.0 {
            passed += 1;
        }
    }
    let convexity_score = if scored == 0 {
        0.0
    } else {
        passed as f64 / scored as f64
    };
    Ok(ConcentrationProfile {
        first_diff,
        second_diff,
        convexity_score,
        scored_buckets: scored,
    })
}
