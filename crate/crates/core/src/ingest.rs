//! Survey tables with uneven buckets, converted to equal-width PDFs through the
//! piecewise-linear CDF.

use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::histogram::Histogram;
use crate::error::{Error, Result};

const SHARE_TOLERANCE: f64 = 1e-3;
const MAX_BUCKETS: f64 = 50_000_000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub lower: f64,
    /// `None` for an open-ended top bucket.
    pub upper: Option<f64>,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketedSurvey {
    pub rows: Vec<SurveyRow>,
    pub source: Option<String>,
    pub unit: Option<String>,
}

impl BucketedSurvey {
    /// Validates the rows and renormalizes shares summing to within 1e-3 of one.
    pub fn new(mut rows: Vec<SurveyRow>, source: Option<String>, unit: Option<String>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::input("survey has no rows"));
        }
        let last = rows.len() - 1;
        for (i, r) in rows.iter().enumerate() {
            let row = i + 1;
            let bad = |message: String| Error::Parse { row, message };
            if !r.lower.is_finite() || !r.share.is_finite() {
                return Err(bad("lower and share must be finite".into()));
            }
            if r.share < 0.0 {
                return Err(bad(format!("negative share {}", r.share)));
            }
            match r.upper {
                None if i != last => {
                    return Err(bad("only the last bucket may be open-ended".into()));
                }
                Some(u) if !(u.is_finite() && u > r.lower) => {
                    return Err(bad(format!("upper {u} must be finite and > lower {}", r.lower)));
                }
                _ => {}
            }
            if i > 0 {
                let prev = rows[i - 1].upper.expect("only the last row is open");
                if r.lower < prev {
                    return Err(bad(format!(
                        "bucket starting at {} overlaps or precedes the previous bucket ending at {prev}",
                        r.lower
                    )));
                }
            }
        }
        let total: f64 = rows.iter().map(|r| r.share).sum();
        if (total - 1.0).abs() > SHARE_TOLERANCE {
            return Err(Error::Parse {
                row: rows.len(),
                message: format!("shares sum to {total}, outside 1 +/- {SHARE_TOLERANCE}"),
            });
        }
        for r in &mut rows {
            r.share /= total;
        }
        Ok(BucketedSurvey { rows, source, unit })
    }

    pub fn is_open_ended(&self) -> bool {
        self.rows.last().is_some_and(|r| r.upper.is_none())
    }

    /// CDF at original bucket edges, linear inside buckets and flat across gaps.
    /// The open bucket, if any, is spread over `[lower, cap]`.
    fn cdf(&self, x: f64, cap: f64) -> f64 {
        let mut acc = 0.0;
        for r in &self.rows {
            let upper = r.upper.unwrap_or(cap);
            if x >= upper {
                acc += r.share;
            } else {
                if x > r.lower {
                    acc += r.share * (x - r.lower) / (upper - r.lower);
                }
                return acc;
            }
        }
        acc
    }
}

/// Reads `lower,upper,share` rows. Lines `# source: ...` and `# unit: ...`
/// before the data set the metadata; other `#` lines are ignored.
pub fn parse_survey<R: Read>(input: R) -> Result<BucketedSurvey> {
    let mut source = None;
    let mut unit = None;
    let mut body = String::new();
    for line in BufReader::new(input).lines() {
        let line = line?;
        if let Some(comment) = line.trim_start().strip_prefix('#') {
            if let Some((key, value)) = comment.split_once(':') {
                let value = Some(value.trim().to_string());
                match key.trim() {
                    "source" => source = value,
                    "unit" => unit = value,
                    _ => {}
                }
            }
            continue;
        }
        body.push_str(&line);
        body.push('\n');
    }
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Parse {
                row: 0,
                message: format!("header must name a `{name}` column"),
            })
    };
    let (lo, hi, sh) = (col("lower")?, col("upper")?, col("share")?);
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record?;
        let field = |k: usize, name: &str| -> Result<&str> {
            record.get(k).ok_or_else(|| Error::Parse {
                row,
                message: format!("missing `{name}`"),
            })
        };
        let number = |text: &str, name: &str| -> Result<f64> {
            text.parse::<f64>().map_err(|_| Error::Parse {
                row,
                message: format!("`{name}` value {text:?} is not a number"),
            })
        };
        let upper_text = field(hi, "upper")?;
        let upper = match upper_text.to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "" => None,
            _ => Some(number(upper_text, "upper")?),
        };
        rows.push(SurveyRow {
            lower: number(field(lo, "lower")?, "lower")?,
            upper,
            share: number(field(sh, "share")?, "share")?,
        });
    }
    BucketedSurvey::new(rows, source, unit)
}

pub fn parse_survey_path(path: &Path) -> Result<BucketedSurvey> {
    let file = std::fs::File::open(path)?;
    parse_survey(file)
}

/// Equal-width PDF obtained by differencing the interpolated CDF.
///
/// Output edges are multiples of `width` covering the survey. `top_cap` must be
/// given exactly when the top bucket is open-ended and must exceed its lower edge.
pub fn to_equal_buckets(survey: &BucketedSurvey, width: f64, top_cap: Option<f64>) -> Result<Histogram> {
    if !(width.is_finite() && width > 0.0) {
        return Err(Error::input(format!("width {width} must be finite and > 0")));
    }
    let last = survey.rows.last().ok_or_else(|| Error::input("survey has no rows"))?;
    let cap = match (last.upper, top_cap) {
        (None, None) => {
            return Err(Error::input("open-ended top bucket needs a top cap"));
        }
        (None, Some(cap)) => {
            if !(cap.is_finite() && cap > last.lower) {
                return Err(Error::input(format!(
                    "top cap {cap} must exceed the open bucket's lower edge {}",
                    last.lower
                )));
            }
            cap
        }
        (Some(_), Some(_)) => {
            return Err(Error::input("top cap given but no bucket is open-ended"));
        }
        (Some(u), None) => u,
    };
    let lo = (survey.rows[0].lower / width).floor() * width;
    let span = ((cap - lo) / width).ceil();
    if span > MAX_BUCKETS {
        return Err(Error::input(format!("width {width} gives more than {MAX_BUCKETS} buckets")));
    }
    let n = (span as usize).max(1);
    let cdf: Vec<f64> = (0..=n).map(|k| survey.cdf(lo + k as f64 * width, cap)).collect();
    let masses: Vec<f64> = cdf.windows(2).map(|c| (c[1] - c[0]).max(0.0)).collect();
    Ok(Histogram::from_masses(lo, width, &masses, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_rows() -> BucketedSurvey {
        parse_survey("lower,upper,share\n0,10,0.5\n10,30,0.5\n".as_bytes()).unwrap()
    }

    #[test]
    fn parses_and_spreads() {
        let h = to_equal_buckets(&two_rows(), 10.0, None).unwrap();
        assert_eq!(h.bucket_edges, vec![0.0, 10.0, 20.0, 30.0]);
        assert_eq!(h.densities, vec![0.05, 0.025, 0.025]);
    }

    #[test]
    fn equal_buckets_map_to_identity() {
        let s = parse_survey("lower,upper,share\n0,5,0.2\n5,10,0.3\n10,15,0.5\n".as_bytes()).unwrap();
        let h = to_equal_buckets(&s, 5.0, None).unwrap();
        let shares: Vec<f64> = h.masses();
        for (a, b) in shares.iter().zip([0.2, 0.3, 0.5]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn metadata_and_open_bucket() {
        let text = "# source: synthetic test table\n# unit: USD\nlower,upper,share\n0,10,0.6\n10,inf,0.4\n";
        let s = parse_survey(text.as_bytes()).unwrap();
        assert_eq!(s.source.as_deref(), Some("synthetic test table"));
        assert_eq!(s.unit.as_deref(), Some("USD"));
        assert!(s.is_open_ended());
        assert!(to_equal_buckets(&s, 5.0, None).is_err());
        assert!(to_equal_buckets(&s, 5.0, Some(10.0)).is_err());
        let h = to_equal_buckets(&s, 5.0, Some(30.0)).unwrap();
        assert_eq!(h.n_buckets(), 6);
        assert!((h.mass() - 1.0).abs() < 1e-12);
        assert!((h.densities[5] - 0.02).abs() < 1e-15);
    }

    #[test]
    fn parse_errors_name_rows() {
        let cases = [
            ("lower,upper,share\n10,30,0.5\n0,10,0.5\n", "row 2"),
            ("lower,upper,share\n0,10,0.5\n5,30,0.5\n", "row 2"),
            ("lower,upper,share\n0,10,0.45\n10,30,0.45\n", "outside"),
            ("lower,upper,share\n0,10,-0.1\n10,30,1.1\n", "row 1"),
            ("lower,upper,share\n0,inf,0.5\n10,30,0.5\n", "open-ended"),
            ("lower,upper,share\n0,ten,0.5\n", "not a number"),
            ("low,upper,share\n0,10,1\n", "lower"),
        ];
        for (text, needle) in cases {
            let err = parse_survey(text.as_bytes()).unwrap_err().to_string();
            assert!(err.contains(needle), "{err:?} lacks {needle:?}");
        }
    }

    #[test]
    fn near_one_totals_renormalize() {
        let s = parse_survey("lower,upper,share\n0,1,0.4996\n1,2,0.5\n".as_bytes()).unwrap();
        let total: f64 = s.rows.iter().map(|r| r.share).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gaps_hold_no_mass() {
        let s = parse_survey("lower,upper,share\n0,1,0.5\n3,4,0.5\n".as_bytes()).unwrap();
        let h = to_equal_buckets(&s, 1.0, None).unwrap();
        assert_eq!(h.densities, vec![0.5, 0.0, 0.0, 0.5]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn survey() -> impl Strategy<Value = (BucketedSurvey, bool)> {
            (
                prop::collection::vec((0.1f64..20.0, 0.0f64..5.0, 0.01f64..1.0), 1..12),
                -50.0f64..50.0,
                any::<bool>(),
            )
                .prop_map(|(buckets, start, open)| {
                    let total: f64 = buckets.iter().map(|s| s.2).sum();
                    let mut lower = start;
                    let last = buckets.len() - 1;
                    let rows = buckets
                        .iter()
                        .enumerate()
                        .map(|(i, &(w, gap, share))| {
                            let row = SurveyRow {
                                lower,
                                upper: if open && i == last { None } else { Some(lower + w) },
                                share: share / total,
                            };
                            lower += w + gap;
                            row
                        })
                        .collect();
                    (BucketedSurvey::new(rows, None, None).unwrap(), open)
                })
        }

        proptest! {
            #[test]
            fn mass_and_refinement((s, open) in survey(), width in 0.05f64..10.0, extra in 0.5f64..30.0) {
                let cap = open.then(|| s.rows.last().unwrap().lower + extra);
                let coarse = to_equal_buckets(&s, width, cap).unwrap();
                prop_assert!((coarse.mass() - 1.0).abs() <= 1e-9);
                prop_assert!(coarse.densities.iter().all(|&d| d >= 0.0));
                let fine = to_equal_buckets(&s, width / 2.0, cap).unwrap();
                let fm = fine.masses();
                let cm = coarse.masses();
                let offset = ((coarse.lower() - fine.lower()) / (width / 2.0)).round() as i64;
                let at = |i: i64| usize::try_from(i).ok().and_then(|i| fm.get(i)).copied().unwrap_or(0.0);
                for (k, m) in cm.iter().enumerate() {
                    let a = at(offset + 2 * k as i64);
                    let b = at(offset + 2 * k as i64 + 1);
                    prop_assert!((a + b - m).abs() <= 1e-12, "bucket {k}: {} vs {m}", a + b);
                }
            }
        }
    }
}
