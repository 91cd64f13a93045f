use serde::Serialize;

use crate::error::Result;
use crate::stats;

/// Empirical complementary CDF `P[X > x]` on the distinct sample values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ccdf {
    pub points: Vec<(f64, f64)>,
    pub n_samples: usize,
}

impl Ccdf {
    /// Right-continuous step-function evaluation.
    pub fn at(&self, x: f64) -> f64 {
        match self.points.partition_point(|&(v, _)| v <= x) {
            0 => 1.0,
            k => self.points[k - 1].1,
        }
    }
}

pub fn ccdf(samples: &[f64]) -> Result<Ccdf> {
    stats::require_finite(samples)?;
    let sorted = stats::sorted(samples);
    Ok(ccdf_sorted(&sorted))
}

pub(crate) fn ccdf_sorted(sorted: &[f64]) -> Ccdf {
    let n = sorted.len();
    let mut points = Vec::new();
    let mut i = 0;
    while i < n {
        let x = sorted[i];
        let mut j = i;
        while j < n && sorted[j] == x {
            j += 1;
        }
        points.push((x, (n - j) as f64 / n as f64));
        i = j;
    }
    Ccdf {
        points,
        n_samples: n,
    }
}
