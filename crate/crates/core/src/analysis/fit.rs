use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Smallest and largest x actually used.
    pub fit_range: (f64, f64),
    pub n_points: usize,
    /// `ln y` was constant over the range; `r_squared` is reported as 0.
    pub zero_variance: bool,
}

/// Fits a power law `y ~ x^slope` to the points with `x > 0`, `y > 0` inside
/// the optional inclusive range.
pub fn fit_loglog(points: &[(f64, f64)], range: Option<(f64, f64)>) -> Result<TailFit> {
    let (lo, hi) = range.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 0.0 && x >= lo && x <= hi && x.is_finite() && y.is_finite())
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} positive points in range, need 3",
            logs.len()
        )));
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let (sxx, sxy, syy) = logs.iter().fold((0.0, 0.0, 0.0), |(a, b, c), &(x, y)| {
        let dx = x - mx;
        let dy = y - my;
        (a + dx * dx, b + dx * dy, c + dy * dy)
    });
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all points share one x value".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let zero_variance = syy == 0.0;
    let r_squared = if zero_variance {
        0.0
    } else {
        let ss_res = logs
            .iter()
            .map(|&(x, y)| {
                let e = y - (intercept + slope * x);
                e * e
            })
            .sum::<f64>();
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    let x_lo = logs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min).exp();
    let x_hi = logs.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max).exp();
    Ok(TailFit {
        slope,
        intercept,
        r_squared,
        fit_range: (x_lo, x_hi),
        n_points: logs.len(),
        zero_variance,
    })
}
