use serde::{Deserialize, Serialize};

use crate::analysis::ccdf::ccdf_sorted;
use crate::analysis::classify::{classify, Classification, ClassifyConfig};
use crate::analysis::fit::{fit_loglog, TailFit};
use crate::analysis::gini::{gini_sorted, top_share};
use crate::analysis::histogram::{log_binned_pdf, pdf_histogram, Histogram};
use crate::analysis::rank::{rank_curve, RankCurve};
use crate::error::{Error, Result};
use crate::stats;

const MAX_DEFAULT_BUCKETS: f64 = 10_000.0;
const DEFAULT_RANKS: usize = 100;
const LOG_BINS_PER_DECADE: usize = 10;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SummaryOptions {
    /// PDF bucket width; Freedman-Diaconis with at most 10^4 buckets when unset.
    pub bucket_width: Option<f64>,
    /// Rank buckets; `min(100, n)` when unset.
    pub n_ranks: Option<usize>,
    /// Range of x for the PDF and CCDF fits; the top decade `[max/10, max]` when unset.
    pub fit_range: Option<(f64, f64)>,
    pub classify: ClassifyConfig,
}

/// Fits per representation. The rank fit always spans every rank.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fits {
    /// Fit of the equal-width histogram.
    pub pdf: Option<TailFit>,
    /// Fit of the log-binned PDF, only for positive samples.
    pub pdf_log_binned: Option<TailFit>,
    pub ccdf: Option<TailFit>,
    pub rank: Option<TailFit>,
}

/// Exponents as positive magnitudes: `f ~ x^-a`, `P[X>x] ~ x^-k`, `E[x](r) ~ r^-b`.
/// `a` comes from the log-binned PDF when there is one, since sparse equal-width
/// tail buckets bias the slope toward zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exponents {
    pub a: Option<f64>,
    pub k: Option<f64>,
    pub b: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionSummary {
    pub n_samples: usize,
    pub mean: f64,
    pub skewness: f64,
    pub log_skewness: Option<f64>,
    pub histogram: Histogram,
    pub ccdf: Vec<(f64, f64)>,
    pub rank_curve: RankCurve,
    pub fits: Fits,
    pub exponents: Exponents,
    pub gini: Option<f64>,
    pub top_1pct_share: Option<f64>,
    pub classification: Classification,
}

pub fn default_bucket_width(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    let range = sorted[sorted.len() - 1] - sorted[0];
    if range <= 0.0 {
        return 1.0;
    }
    let iqr = stats::quantile_sorted(sorted, 0.75) - stats::quantile_sorted(sorted, 0.25);
    let fd = 2.0 * iqr / n.cbrt();
    let width = if fd > 0.0 { fd } else { range / 100.0 };
    width.max(range / MAX_DEFAULT_BUCKETS)
}

/// Estimates every representation of one sample and classifies it.
pub fn summarize(samples: &[f64], options: &SummaryOptions) -> Result<DistributionSummary> {
    stats::require_finite(samples)?;
    let sorted = stats::sorted(samples);
    let width = options
        .bucket_width
        .unwrap_or_else(|| default_bucket_width(&sorted));
    let histogram = pdf_histogram(&sorted, width)?;
    let ccdf = ccdf_sorted(&sorted);
    let n_ranks = options
        .n_ranks
        .unwrap_or_else(|| DEFAULT_RANKS.min(sorted.len()));
    let rank_curve = rank_curve(&sorted, n_ranks)?;

    let max = sorted[sorted.len() - 1];
    let fit_range = match options.fit_range {
        Some((lo, hi)) if !(lo < hi) => {
            return Err(Error::input(format!("fit range ({lo}, {hi}) is empty")))
        }
        Some(r) => r,
        None => (max / 10.0, max),
    };
    let log_binned = if sorted[0] > 0.0 {
        log_binned_pdf(&sorted, LOG_BINS_PER_DECADE).ok()
    } else {
        None
    };
    let fits = Fits {
        pdf: fit_loglog(&histogram.points(), Some(fit_range)).ok(),
        pdf_log_binned: log_binned.and_then(|p| fit_loglog(&p, Some(fit_range)).ok()),
        ccdf: fit_loglog(&ccdf.points, Some(fit_range)).ok(),
        rank: fit_loglog(&rank_curve.points(), None).ok(),
    };
    let exponents = Exponents {
        a: fits.pdf_log_binned.as_ref().or(fits.pdf.as_ref()).map(|f| -f.slope),
        k: fits.ccdf.as_ref().map(|f| -f.slope),
        b: fits.rank.as_ref().map(|f| -f.slope),
    };
    let total: f64 = sorted.iter().sum();
    let non_negative = sorted[0] >= 0.0 && total > 0.0;
    let gini = non_negative.then(|| gini_sorted(&sorted, total));
    let top_1pct_share = if non_negative {
        top_share(&sorted, 0.01).ok()
    } else {
        None
    };
    let classification = classify(&sorted, &options.classify)?;
    Ok(DistributionSummary {
        n_samples: sorted.len(),
        mean: stats::mean(&sorted),
        skewness: stats::skewness(&sorted),
        log_skewness: stats::log_skewness(&sorted),
        histogram,
        ccdf: ccdf.points,
        rank_curve,
        fits,
        exponents,
        gini,
        top_1pct_share,
        classification,
    })
}
