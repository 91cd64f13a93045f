//! Plot-ready CSV and JSON artifacts. Floats are written in shortest
//! round-trip form so files compare meaningfully at tight tolerances.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::analysis::histogram::Histogram;
use crate::error::{Error, Result};
use crate::scenario::{RunStatus, Scenario, WealthSeries};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
    }
    let name = path
        .file_name()
        .ok_or_else(|| Error::input(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp-{}", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

pub fn timeseries_csv(series: &WealthSeries) -> String {
    let mut out = String::from("t,dO,D,trend_sign,gini,top1_share,top10_share\n");
    for r in &series.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.t,
            fmt_f64(r.d_o),
            fmt_f64(r.system_response),
            fmt_f64(r.trend_sign),
            opt(r.metrics.gini),
            opt(r.metrics.top1_share),
            opt(r.metrics.top10_share),
        );
    }
    out
}

pub fn wealth_final_csv(series: &WealthSeries) -> String {
    let normalized = series.final_normalized().ok();
    let mut out = String::from("agent_id,b,wealth,wealth_normalized\n");
    for (i, (a, b)) in series.final_wealth.iter().zip(&series.responses).enumerate() {
        let share = normalized.as_ref().map(|w| w[i]);
        let _ = writeln!(out, "{},{},{},{}", i + 1, fmt_f64(*b), fmt_f64(*a), opt(share));
    }
    out
}

pub fn wealth_snapshots_csv(series: &WealthSeries) -> String {
    let mut out = String::from("t,agent_id,wealth\n");
    for s in &series.snapshots {
        for (i, a) in s.wealth.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", s.t, i + 1, fmt_f64(*a));
        }
    }
    out
}

#[derive(Serialize)]
struct RunMeta<'a> {
    config: &'a crate::scenario::ScenarioConfig,
    seed: u64,
    status: &'a RunStatus,
    steps_recorded: usize,
    snapshots: usize,
    version: &'static str,
}

pub fn run_meta_json(scenario: &Scenario, series: &WealthSeries) -> Result<String> {
    let meta = RunMeta {
        config: scenario.config(),
        seed: series.seed,
        status: &series.status,
        steps_recorded: series.records.len().saturating_sub(1),
        snapshots: series.snapshots.len(),
        version: env!("CARGO_PKG_VERSION"),
    };
    Ok(serde_json::to_string_pretty(&meta)? + "\n")
}

/// `timeseries.csv`, `wealth_final.csv`, `wealth_snapshots.csv` and `run_meta.json`.
pub fn write_run(dir: &Path, scenario: &Scenario, series: &WealthSeries) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_atomic(&dir.join("timeseries.csv"), timeseries_csv(series).as_bytes())?;
    write_atomic(&dir.join("wealth_final.csv"), wealth_final_csv(series).as_bytes())?;
    write_atomic(&dir.join("wealth_snapshots.csv"), wealth_snapshots_csv(series).as_bytes())?;
    write_atomic(&dir.join("run_meta.json"), run_meta_json(scenario, series)?.as_bytes())?;
    Ok(())
}

pub fn points_csv(x: &str, y: &str, points: &[(f64, f64)]) -> String {
    let mut out = format!("{x},{y}\n");
    for (a, b) in points {
        let _ = writeln!(out, "{},{}", fmt_f64(*a), fmt_f64(*b));
    }
    out
}

pub fn histogram_csv(hist: &Histogram) -> String {
    let mut out = String::from("lower,upper,midpoint,density\n");
    for (k, d) in hist.densities.iter().enumerate() {
        let lo = hist.bucket_edges[k];
        let hi = hist.bucket_edges[k + 1];
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(lo),
            fmt_f64(hi),
            fmt_f64(0.5 * (lo + hi)),
            fmt_f64(*d)
        );
    }
    out
}

/// Reads a sample column. Headerless files hold one value per row; otherwise the
/// named column, else `wealth` if present, else the last column is used.
pub fn read_samples(path: &Path, column: Option<&str>) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    read_samples_str(&text, column)
}

pub fn read_samples_str(text: &str, column: Option<&str>) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let first = match records.next() {
        Some(r) => r?,
        None => return Err(Error::input("sample file is empty")),
    };
    let header_row = first.iter().any(|f| f.parse::<f64>().is_err());
    let col = if header_row {
        match column {
            Some(name) => first.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
                row: 0,
                message: format!("no column named `{name}`"),
            })?,
            None => first
                .iter()
                .position(|h| h == "wealth")
                .unwrap_or(first.len().saturating_sub(1)),
        }
    } else {
        if column.is_some() {
            return Err(Error::input("a column name needs a header row"));
        }
        first.len().saturating_sub(1)
    };
    let mut values = Vec::new();
    let parse = |row: usize, rec: &csv::StringRecord| -> Result<f64> {
        let text = rec.get(col).unwrap_or("");
        text.parse::<f64>().map_err(|_| Error::Parse {
            row,
            message: format!("{text:?} is not a number"),
        })
    };
    if !header_row {
        values.push(parse(1, &first)?);
    }
    for (i, rec) in records.enumerate() {
        let rec = rec?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let row = i + 1 + usize::from(!header_row);
        values.push(parse(row, &rec)?);
    }
    Ok(values)
}
