use serde::{Deserialize, Serialize};

use crate::analysis::concentration;
use crate::analysis::fit::{fit_loglog, TailFit};
use crate::analysis::histogram::{self, Histogram};
use crate::error::{Error, Result};
use crate::stats;

/// Thresholds and grids used by [`classify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyConfig {
    /// The peak is searched on `[min, quantile(peak_range_quantile)]`.
    pub peak_range_quantile: f64,
    pub peak_buckets: usize,
    /// Half-width of the moving average applied before locating the peak.
    pub peak_smoothing: usize,
    /// Fraction of the peak grid counted as the lower boundary.
    pub peak_window: f64,
    /// The convexity grid spans `[min, quantile(shape_range_quantile)]`.
    pub shape_range_quantile: f64,
    pub shape_buckets: usize,
    pub min_convexity: f64,
    pub min_r_squared: f64,
    pub max_abs_skewness: f64,
    /// Resolution of the log-binned PDF behind the scale-free test.
    pub log_bins_per_decade: usize,
    /// Log bins holding fewer samples are left out of the scale-free fit.
    pub min_log_bin_count: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            peak_range_quantile: 0.5,
            peak_buckets: 100,
            peak_smoothing: 3,
            peak_window: 0.05,
            shape_range_quantile: 0.9,
            shape_buckets: 10,
            min_convexity: 0.7,
            min_r_squared: 0.98,
            max_abs_skewness: 0.2,
            log_bins_per_decade: 10,
            min_log_bin_count: 5,
        }
    }
}

impl ClassifyConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(Error::config(name, format!("{v} outside (0, 1]")))
            }
        };
        unit("peak_range_quantile", self.peak_range_quantile)?;
        unit("peak_window", self.peak_window)?;
        unit("shape_range_quantile", self.shape_range_quantile)?;
        if self.peak_buckets < 3 {
            return Err(Error::config("peak_buckets", "need at least 3"));
        }
        if self.shape_buckets < 3 {
            return Err(Error::config("shape_buckets", "need at least 3"));
        }
        if self.log_bins_per_decade == 0 {
            return Err(Error::config("log_bins_per_decade", "need at least 1"));
        }
        for (name, v) in [
            ("min_convexity", self.min_convexity),
            ("min_r_squared", self.min_r_squared),
            ("max_abs_skewness", self.max_abs_skewness),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(name, format!("{v} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    fn window_buckets(&self) -> usize {
        ((self.peak_window * self.peak_buckets as f64).ceil() as usize).max(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Normal-like.
    InteriorPeak,
    /// Lognormal-like.
    InteriorPeakSkewed,
    /// Concentrated at the lower boundary.
    BoundaryPeak,
    /// Concentrated and power-law.
    BoundaryPeakScalefree,
    Degenerate,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::InteriorPeak => "interior-peak",
            Verdict::InteriorPeakSkewed => "interior-peak-skewed",
            Verdict::BoundaryPeak => "boundary-peak",
            Verdict::BoundaryPeakScalefree => "boundary-peak-scalefree",
            Verdict::Degenerate => "degenerate",
        }
    }

    pub fn is_boundary(self) -> bool {
        matches!(self, Verdict::BoundaryPeak | Verdict::BoundaryPeakScalefree)
    }

    pub const ALL: [Verdict; 5] = [
        Verdict::InteriorPeak,
        Verdict::InteriorPeakSkewed,
        Verdict::BoundaryPeak,
        Verdict::BoundaryPeakScalefree,
        Verdict::Degenerate,
    ];
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    /// Peak index on the `peak_buckets` grid over the lower half of the data.
    pub peak_bucket: Option<usize>,
    /// `[lo, hi]` of the peak grid.
    pub peak_range: Option<(f64, f64)>,
    pub convexity_score: Option<f64>,
    /// Full-range log-log fit of the PDF.
    pub tail_fit: Option<TailFit>,
    pub skewness: Option<f64>,
    pub log_skewness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub evidence: Evidence,
}

/// Classifies a sample by the shape of its lower tail.
///
/// A peak inside the lowest `peak_window` of `[min, median]` with a convex
/// decreasing shape is a boundary peak, and a scale-free one if the log-log PDF
/// is straight. Otherwise the symmetry of `x` or `ln x` decides between the
/// normal-like and lognormal-like interior verdicts.
pub fn classify(samples: &[f64], config: &ClassifyConfig) -> Result<Classification> {
    stats::require_finite(samples)?;
    config.validate()?;
    let sorted = stats::sorted(samples);
    if stats::distinct_count(&sorted) < 3 {
        return Ok(degenerate());
    }
    decide(&SampleView { sorted: &sorted }, config)
}

/// [`classify`] for grouped data, treating density as uniform within buckets.
pub fn classify_histogram(hist: &Histogram, config: &ClassifyConfig) -> Result<Classification> {
    hist.check_uniform()?;
    config.validate()?;
    if hist.densities.iter().any(|d| !d.is_finite() || *d < 0.0) {
        return Err(Error::input("histogram densities must be finite and >= 0"));
    }
    if hist.densities.iter().filter(|&&d| d > 0.0).count() < 3 {
        return Ok(degenerate());
    }
    decide(&HistView::new(hist), config)
}

fn degenerate() -> Classification {
    Classification {
        verdict: Verdict::Degenerate,
        evidence: Evidence {
            peak_bucket: None,
            peak_range: None,
            convexity_score: None,
            tail_fit: None,
            skewness: None,
            log_skewness: None,
        },
    }
}

trait View {
    fn min(&self) -> f64;
    fn max(&self) -> f64;
    fn quantile(&self, q: f64) -> f64;
    /// Masses on an equal grid over `[lo, hi]`, plus raw counts when sampled.
    fn grid(&self, lo: f64, hi: f64, n: usize) -> (Vec<f64>, Option<Vec<f64>>);
    fn pdf_points(&self, config: &ClassifyConfig) -> Option<Vec<(f64, f64)>>;
    fn skewness(&self) -> f64;
    fn log_skewness(&self) -> Option<f64>;
}

struct SampleView<'a> {
    sorted: &'a [f64],
}

impl View for SampleView<'_> {
    fn min(&self) -> f64 {
        self.sorted[0]
    }
    fn max(&self) -> f64 {
        self.sorted[self.sorted.len() - 1]
    }
    fn quantile(&self, q: f64) -> f64 {
        stats::quantile_sorted(self.sorted, q)
    }
    fn grid(&self, lo: f64, hi: f64, n: usize) -> (Vec<f64>, Option<Vec<f64>>) {
        let counts = histogram::counts_in_range(self.sorted, lo, hi, n);
        let total = self.sorted.len() as f64;
        (counts.iter().map(|c| c / total).collect(), Some(counts))
    }
    fn pdf_points(&self, config: &ClassifyConfig) -> Option<Vec<(f64, f64)>> {
        if self.min() <= 0.0 {
            return None;
        }
        let bins = histogram::log_binned_counts(self.sorted, config.log_bins_per_decade).ok()?;
        Some(
            bins.into_iter()
                .filter(|&(_, _, c)| c >= config.min_log_bin_count)
                .map(|(x, d, _)| (x, d))
                .collect(),
        )
    }
    fn skewness(&self) -> f64 {
        stats::skewness(self.sorted)
    }
    fn log_skewness(&self) -> Option<f64> {
        stats::log_skewness(self.sorted)
    }
}

const SUBDIVISIONS: usize = 16;

struct HistView<'a> {
    hist: &'a Histogram,
    first: usize,
    last: usize,
}

impl<'a> HistView<'a> {
    fn new(hist: &'a Histogram) -> Self {
        let first = hist.densities.iter().position(|&d| d > 0.0).unwrap_or(0);
        let last = hist.densities.iter().rposition(|&d| d > 0.0).unwrap_or(0);
        HistView { hist, first, last }
    }

    /// Weighted central moments on a midpoint subdivision of each bucket.
    fn moments(&self, transform: impl Fn(f64) -> f64) -> (f64, f64) {
        let w = self.hist.width();
        let sub = w / SUBDIVISIONS as f64;
        let mut pts = Vec::new();
        for k in self.first..=self.last {
            let m = self.hist.densities[k] * w;
            if m <= 0.0 {
                continue;
            }
            for s in 0..SUBDIVISIONS {
                let x = self.hist.bucket_edges[k] + (s as f64 + 0.5) * sub;
                pts.push((transform(x), m / SUBDIVISIONS as f64));
            }
        }
        let total: f64 = pts.iter().map(|p| p.1).sum();
        let mean = pts.iter().map(|p| p.0 * p.1).sum::<f64>() / total;
        let (m2, m3) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, p)| {
            let d = x - mean;
            (a + p * d * d, b + p * d * d * d)
        });
        (m2 / total, m3 / total)
    }
}

fn skew_from(m2: f64, m3: f64) -> f64 {
    if m2 > 0.0 {
        m3 / m2.powf(1.5)
    } else {
        0.0
    }
}

impl View for HistView<'_> {
    fn min(&self) -> f64 {
        self.hist.bucket_edges[self.first]
    }
    fn max(&self) -> f64 {
        self.hist.bucket_edges[self.last + 1]
    }
    fn quantile(&self, q: f64) -> f64 {
        self.hist.quantile(q)
    }
    fn grid(&self, lo: f64, hi: f64, n: usize) -> (Vec<f64>, Option<Vec<f64>>) {
        let edges: Vec<f64> = (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
        (self.hist.rebucket(&edges), None)
    }
    fn pdf_points(&self, _config: &ClassifyConfig) -> Option<Vec<(f64, f64)>> {
        Some(self.hist.points())
    }
    fn skewness(&self) -> f64 {
        let (m2, m3) = self.moments(|x| x);
        skew_from(m2, m3)
    }
    fn log_skewness(&self) -> Option<f64> {
        if self.min() < 0.0 {
            return None;
        }
        let (m2, m3) = self.moments(f64::ln);
        Some(skew_from(m2, m3))
    }
}

/// Upper end of a grid starting at the minimum; falls back to the maximum when
/// ties at the minimum swallow the quantile.
fn grid_top(view: &dyn View, q: f64) -> f64 {
    let top = view.quantile(q);
    if top > view.min() {
        top
    } else {
        view.max()
    }
}

fn smoothed_argmax(masses: &[f64], half_width: usize) -> usize {
    let n = masses.len();
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for i in 0..n {
        let lo = i.saturating_sub(half_width);
        let hi = (i + half_width).min(n - 1);
        let avg = masses[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64;
        if avg > best_value {
            best_value = avg;
            best = i;
        }
    }
    best
}

fn decide(view: &dyn View, config: &ClassifyConfig) -> Result<Classification> {
    let lo = view.min();
    let peak_hi = grid_top(view, config.peak_range_quantile);
    let (peak_masses, _) = view.grid(lo, peak_hi, config.peak_buckets);
    let peak = smoothed_argmax(&peak_masses, config.peak_smoothing);
    let window = config.window_buckets();

    let shape_hi = grid_top(view, config.shape_range_quantile);
    let (shape_masses, shape_counts) = view.grid(lo, shape_hi, config.shape_buckets);
    let convexity = concentration::profile(&shape_masses, shape_counts.as_deref())?.convexity_score;

    let tail_fit = view
        .pdf_points(config)
        .and_then(|pts| fit_loglog(&pts, None).ok());
    let skewness = view.skewness();
    let log_skewness = view.log_skewness();

    let verdict = if peak < window {
        let straight = tail_fit
            .as_ref()
            .is_some_and(|f| f.r_squared >= config.min_r_squared);
        if convexity >= config.min_convexity && straight {
            Verdict::BoundaryPeakScalefree
        } else {
            Verdict::BoundaryPeak
        }
    } else {
        let limit = config.max_abs_skewness;
        let raw = skewness.abs();
        let log = log_skewness.map(f64::abs);
        match log {
            Some(l) if l < limit && (raw >= limit || l < raw) => Verdict::InteriorPeakSkewed,
            _ if raw < limit => Verdict::InteriorPeak,
            // Neither symmetric: fall back to the nearer verdict by peak position.
            _ if peak < 2 * window => Verdict::BoundaryPeak,
            Some(l) if l < raw => Verdict::InteriorPeakSkewed,
            _ => Verdict::InteriorPeak,
        }
    };
    Ok(Classification {
        verdict,
        evidence: Evidence {
            peak_bucket: Some(peak),
            peak_range: Some((lo, peak_hi)),
            convexity_score: Some(convexity),
            tail_fit,
            skewness: Some(skewness),
            log_skewness,
        },
    })
}
