//! Turns an unevenly bucketed survey into an equal-width PDF and classifies it.
//!
//! cargo run --release --example survey_ingest [survey.csv] [width] [top_cap]

use std::path::PathBuf;

use wealthloop::analysis::{classify_histogram, ClassifyConfig};
use wealthloop::ingest::{parse_survey_path, to_equal_buckets};

fn main() -> wealthloop::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic_us_income_survey.csv")
    });
    let width: f64 = args.next().map_or(Ok(10.0), |w| w.parse()).expect("width must be a number");
    let cap: f64 = args.next().map_or(Ok(1000.0), |c| c.parse()).expect("cap must be a number");

    let survey = parse_survey_path(&path)?;
    println!("source: {}", survey.source.as_deref().unwrap_or("unknown"));
    println!("{} source buckets, unit {}", survey.rows.len(), survey.unit.as_deref().unwrap_or("?"));

    let cap = survey.is_open_ended().then_some(cap);
    let hist = to_equal_buckets(&survey, width, cap)?;
    println!("{} equal buckets of width {width}, mass {:.12}", hist.n_buckets(), hist.mass());
    let peak = hist
        .densities
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    println!(
        "peak density in [{}, {})",
        hist.bucket_edges[peak],
        hist.bucket_edges[peak + 1]
    );
    let c = classify_histogram(&hist, &ClassifyConfig::default())?;
    println!("verdict: {}", c.verdict);
    Ok(())
}
