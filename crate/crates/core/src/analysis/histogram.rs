use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

const MAX_BUCKETS: usize = 50_000_000;

/// Fixed-width probability-density histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bucket_edges: Vec<f64>,
    /// Probability per unit of x in each bucket.
    pub densities: Vec<f64>,
    /// Sample count behind the densities; `None` for histograms derived from grouped data.
    pub n_samples: Option<usize>,
}

impl Histogram {
    /// Builds a histogram from per-bucket probability masses starting at `lo`.
    pub fn from_masses(lo: f64, width: f64, masses: &[f64], n_samples: Option<usize>) -> Self {
        let bucket_edges = (0..=masses.len()).map(|k| lo + k as f64 * width).collect();
        let densities = masses.iter().map(|m| m / width).collect();
        Histogram {
            bucket_edges,
            densities,
            n_samples,
        }
    }

    pub fn n_buckets(&self) -> usize {
        self.densities.len()
    }

    pub fn width(&self) -> f64 {
        (self.upper() - self.lower()) / self.n_buckets() as f64
    }

    pub fn lower(&self) -> f64 {
        self.bucket_edges[0]
    }

    pub fn upper(&self) -> f64 {
        *self.bucket_edges.last().expect("histogram has edges")
    }

    pub fn masses(&self) -> Vec<f64> {
        let w = self.width();
        self.densities.iter().map(|d| d * w).collect()
    }

    pub fn mass(&self) -> f64 {
        self.masses().iter().sum()
    }

    /// Reconstructed counts when the sample size is known.
    pub fn counts(&self) -> Option<Vec<f64>> {
        let n = self.n_samples? as f64;
        Some(self.masses().iter().map(|m| (m * n).round()).collect())
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.bucket_edges
            .windows(2)
            .map(|e| 0.5 * (e[0] + e[1]))
            .collect()
    }

    /// `(midpoint, density)` pairs, the plot-ready PDF.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.midpoints()
            .into_iter()
            .zip(self.densities.iter().copied())
            .collect()
    }

    /// CDF with the density taken as uniform inside each bucket.
    pub fn cdf(&self, x: f64) -> f64 {
        let lo = self.lower();
        if x <= lo {
            return 0.0;
        }
        let w = self.width();
        let mut acc = 0.0;
        for (k, d) in self.densities.iter().enumerate() {
            let left = lo + k as f64 * w;
            let right = lo + (k + 1) as f64 * w;
            if x >= right {
                acc += d * w;
            } else {
                acc += d * (x - left);
                return acc;
            }
        }
        acc
    }

    /// Probability mass between consecutive `edges`, under the same uniform-within-bucket model.
    pub fn rebucket(&self, edges: &[f64]) -> Vec<f64> {
        let cdf: Vec<f64> = edges.iter().map(|&e| self.cdf(e)).collect();
        cdf.windows(2).map(|c| (c[1] - c[0]).max(0.0)).collect()
    }

    /// Inverse of [`Histogram::cdf`], normalized by the total mass.
    pub fn quantile(&self, q: f64) -> f64 {
        let w = self.width();
        let total = self.mass();
        let target = q.clamp(0.0, 1.0) * total;
        let mut acc = 0.0;
        for (k, d) in self.densities.iter().enumerate() {
            let m = d * w;
            if m > 0.0 && acc + m >= target {
                return self.bucket_edges[k] + (target - acc) / d;
            }
            acc += m;
        }
        self.upper()
    }

    pub(crate) fn check_uniform(&self) -> Result<()> {
        if self.bucket_edges.len() != self.densities.len() + 1 || self.densities.is_empty() {
            return Err(Error::input("histogram needs n + 1 edges for n >= 1 buckets"));
        }
        let w = self.width();
        if !(w > 0.0) {
            return Err(Error::input("histogram edges must be strictly increasing"));
        }
        for (k, e) in self.bucket_edges.iter().enumerate() {
            let expected = self.lower() + k as f64 * w;
            if (e - expected).abs() > 1e-12 * expected.abs().max(w) {
                return Err(Error::input(format!("histogram edge {k} is not uniformly spaced")));
            }
        }
        Ok(())
    }
}

/// Equal-width PDF. Edges start at `floor(min / width) * width`.
pub fn pdf_histogram(samples: &[f64], bucket_width: f64) -> Result<Histogram> {
    stats::require_finite(samples)?;
    if !(bucket_width.is_finite() && bucket_width > 0.0) {
        return Err(Error::input(format!(
            "bucket width {bucket_width} must be finite and > 0"
        )));
    }
    let (min, max) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let lo = (min / bucket_width).floor() * bucket_width;
    let span = ((max - lo) / bucket_width).floor();
    if span >= MAX_BUCKETS as f64 {
        return Err(Error::input(format!(
            "bucket width {bucket_width} gives more than {MAX_BUCKETS} buckets"
        )));
    }
    let n_buckets = span as usize + 1;
    let mut counts = vec![0usize; n_buckets];
    for &x in samples {
        let k = (((x - lo) / bucket_width).floor().max(0.0) as usize).min(n_buckets - 1);
        counts[k] += 1;
    }
    let n = samples.len() as f64;
    let masses: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    Ok(Histogram::from_masses(
        lo,
        bucket_width,
        &masses,
        Some(samples.len()),
    ))
}

/// Counts of `samples` in `n_buckets` equal buckets spanning `[lo, hi]`; values
/// outside are ignored and `hi` itself falls in the last bucket.
pub(crate) fn counts_in_range(sorted: &[f64], lo: f64, hi: f64, n_buckets: usize) -> Vec<f64> {
    let w = (hi - lo) / n_buckets as f64;
    let mut counts = vec![0.0; n_buckets];
    for &x in sorted {
        if x < lo || x > hi {
            continue;
        }
        let k = (((x - lo) / w).floor() as usize).min(n_buckets - 1);
        counts[k] += 1.0;
    }
    counts
}

/// Logarithmically binned PDF of the strictly positive samples, as
/// `(geometric bin centre, density)` pairs. Densities are per unit of x and
/// relative to the full sample size. Empty bins are kept with density 0.
pub fn log_binned_pdf(samples: &[f64], bins_per_decade: usize) -> Result<Vec<(f64, f64)>> {
    Ok(log_binned_counts(samples, bins_per_decade)?
        .into_iter()
        .map(|(x, d, _)| (x, d))
        .collect())
}

/// Same bins as [`log_binned_pdf`] with the raw count of each bin.
pub(crate) fn log_binned_counts(
    samples: &[f64],
    bins_per_decade: usize,
) -> Result<Vec<(f64, f64, usize)>> {
    stats::require_finite(samples)?;
    if bins_per_decade == 0 {
        return Err(Error::input("bins_per_decade must be >= 1"));
    }
    let positive: Vec<f64> = samples.iter().copied().filter(|&x| x > 0.0).collect();
    if positive.is_empty() {
        return Err(Error::InsufficientData("no positive samples".into()));
    }
    let min = positive.iter().copied().fold(f64::INFINITY, f64::min);
    let max = positive.iter().copied().fold(0.0, f64::max);
    let edges = log_edges(min, max, bins_per_decade);
    let n = samples.len() as f64;
    let mut counts = vec![0usize; edges.len() - 1];
    let log_min = min.ln();
    let step = (edges[edges.len() - 1].ln() - log_min) / counts.len() as f64;
    for &x in &positive {
        let k = (((x.ln() - log_min) / step).floor().max(0.0) as usize).min(counts.len() - 1);
        counts[k] += 1;
    }
    Ok(edges
        .windows(2)
        .zip(counts)
        .map(|(e, c)| ((e[0] * e[1]).sqrt(), c as f64 / (n * (e[1] - e[0])), c))
        .collect())
}

pub(crate) fn log_edges(min: f64, max: f64, bins_per_decade: usize) -> Vec<f64> {
    let decades = (max / min).log10();
    let n_bins = ((decades * bins_per_decade as f64).ceil() as usize).max(1);
    let log_min = min.ln();
    let log_max = (max * (1.0 + 1e-12)).ln();
    (0..=n_bins)
        .map(|k| (log_min + (log_max - log_min) * k as f64 / n_bins as f64).exp())
        .collect()
}
