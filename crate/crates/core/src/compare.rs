//! Column-wise numeric comparison of two CSV tables.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Columns that identify rows and must agree exactly when both files carry them.
pub const KEY_COLUMNS: [&str; 3] = ["t", "agent_id", "rank"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstCell {
    /// 1-based data row.
    pub row: usize,
    pub column: String,
    pub left: String,
    pub right: String,
    pub rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub rows: usize,
    /// Columns present in both files, in the left file's order.
    pub columns: Vec<String>,
    pub max_abs_diff: f64,
    pub max_rel_diff: f64,
    pub worst: Option<WorstCell>,
    pub tolerance: f64,
    pub passed: bool,
}

/// `|a - b| / max(|a|, |b|)`, zero when both are zero.
pub fn relative_diff(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let scale = a.abs().max(b.abs());
    let d = (a - b).abs() / scale;
    if d.is_nan() {
        f64::INFINITY
    } else {
        d
    }
}

pub fn compare_files(left: &Path, right: &Path, tolerance: f64) -> Result<CompareReport> {
    let l = std::fs::read_to_string(left)?;
    let r = std::fs::read_to_string(right)?;
    compare_tables(&l, &r, tolerance)
}

/// Compares the columns both tables share. Shape problems (no shared columns,
/// different row counts, mismatched keys) are errors; numeric differences are
/// reported and judged against `tolerance`.
pub fn compare_tables(left: &str, right: &str, tolerance: f64) -> Result<CompareReport> {
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        return Err(Error::input(format!("tolerance {tolerance} must be finite and >= 0")));
    }
    let (lh, lrows) = read_table(left)?;
    let (rh, rrows) = read_table(right)?;
    let pairs: Vec<(usize, usize)> = lh
        .iter()
        .enumerate()
        .filter_map(|(i, h)| rh.iter().position(|x| x == h).map(|j| (i, j)))
        .collect();
    if pairs.is_empty() {
        return Err(Error::input("the files share no column names"));
    }
    if lrows.len() != rrows.len() {
        return Err(Error::input(format!(
            "row counts differ: {} vs {}",
            lrows.len(),
            rrows.len()
        )));
    }
    let mut report = CompareReport {
        rows: lrows.len(),
        columns: pairs.iter().map(|&(i, _)| lh[i].clone()).collect(),
        max_abs_diff: 0.0,
        max_rel_diff: 0.0,
        worst: None,
        tolerance,
        passed: true,
    };
    for (row, (a, b)) in lrows.iter().zip(&rrows).enumerate() {
        for &(i, j) in &pairs {
            let name = &lh[i];
            let (x, y) = (a.get(i).unwrap_or(""), b.get(j).unwrap_or(""));
            if KEY_COLUMNS.contains(&name.as_str()) {
                if x != y {
                    return Err(Error::input(format!(
                        "key column `{name}` differs at row {}: {x} vs {y}",
                        row + 1
                    )));
                }
                continue;
            }
            let (abs, rel) = match (x.parse::<f64>(), y.parse::<f64>()) {
                (Ok(u), Ok(v)) => {
                    let abs = if u == v { 0.0 } else { (u - v).abs() };
                    (if abs.is_nan() { f64::INFINITY } else { abs }, relative_diff(u, v))
                }
                _ if x == y => (0.0, 0.0),
                _ => (f64::INFINITY, f64::INFINITY),
            };
            report.max_abs_diff = report.max_abs_diff.max(abs);
            if rel > report.max_rel_diff || (report.worst.is_none() && rel > 0.0) {
                report.max_rel_diff = rel;
                report.worst = Some(WorstCell {
                    row: row + 1,
                    column: name.clone(),
                    left: x.to_string(),
                    right: y.to_string(),
                    rel_diff: rel,
                });
            }
        }
    }
    report.passed = report.max_rel_diff <= tolerance;
    Ok(report)
}

fn read_table(text: &str) -> Result<(Vec<String>, Vec<csv::StringRecord>)> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.iter().map(str::to_string).collect();
    let rows = reader.records().collect::<std::result::Result<Vec<_>, _>>()?;
    Ok((headers, rows))
}
