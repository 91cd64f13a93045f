use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats;

/// Expected value per equal-probability bucket, rank 1 holding the largest values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankCurve {
    pub ranks: Vec<usize>,
    pub expected_values: Vec<f64>,
}

impl RankCurve {
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.ranks
            .iter()
            .map(|&r| r as f64)
            .zip(self.expected_values.iter().copied())
            .collect()
    }
}

/// Sorts descending and splits into `n_ranks` buckets of `floor(N/R)` or
/// `ceil(N/R)` samples (larger buckets first). Each bucket reports its mean.
pub fn rank_curve(samples: &[f64], n_ranks: usize) -> Result<RankCurve> {
    stats::require_finite(samples)?;
    if n_ranks == 0 {
        return Err(Error::input("n_ranks must be >= 1"));
    }
    if n_ranks > samples.len() {
        return Err(Error::input(format!(
            "{n_ranks} ranks requested for {} samples",
            samples.len()
        )));
    }
    let mut sorted = stats::sorted(samples);
    sorted.reverse();
    let base = sorted.len() / n_ranks;
    let extra = sorted.len() % n_ranks;
    let mut expected_values = Vec::with_capacity(n_ranks);
    let mut start = 0;
    for r in 0..n_ranks {
        let size = base + usize::from(r < extra);
        expected_values.push(stats::mean(&sorted[start..start + size]));
        start += size;
    }
    Ok(RankCurve {
        ranks: (1..=n_ranks).collect(),
        expected_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halves() {
        let r = rank_curve(&[1.0, 4.0, 2.0, 3.0], 2).unwrap();
        assert_eq!(r.ranks, vec![1, 2]);
        assert_eq!(r.expected_values, vec![3.5, 1.5]);
    }

    #[test]
    fn even_distribution_is_flat() {
        let r = rank_curve(&[2.5; 37], 5).unwrap();
        assert_eq!(r.expected_values, vec![2.5; 5]);
    }

    #[test]
    fn uneven_split_front_loads_extra_samples() {
        // 5 samples, 2 ranks -> sizes 3 and 2.
        let r = rank_curve(&[5.0, 4.0, 3.0, 2.0, 1.0], 2).unwrap();
        assert_eq!(r.expected_values, vec![4.0, 1.5]);
    }

    #[test]
    fn errors() {
        assert!(rank_curve(&[1.0, 2.0], 3).is_err());
        assert!(rank_curve(&[1.0, 2.0], 0).is_err());
        assert!(rank_curve(&[], 1).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn non_increasing(xs in prop::collection::vec(-1e6f64..1e6, 1..300), r in 1usize..50) {
                let r = r.min(xs.len());
                let c = rank_curve(&xs, r).unwrap();
                prop_assert!(c.expected_values.windows(2).all(|w| w[1] <= w[0]));
            }
        }
    }
}
