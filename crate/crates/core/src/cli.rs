//! Command-line surface. The binary only parses arguments and calls [`run`].
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 runtime failure or
//! unbounded run, 3 comparison beyond tolerance.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::classify::ClassifyConfig;
use crate::analysis::summary::{summarize, SummaryOptions};
use crate::closed_form::{generate_b_profile, oracle_linear_declining, oracle_trendy_wealth, BProfile};
use crate::compare::compare_files;
use crate::ensemble::run_ensemble;
use crate::error::{Error, Result};
use crate::ingest::{parse_survey_path, to_equal_buckets};
use crate::output::{self, fmt_f64, write_atomic};
use crate::scenario::{InitialWealth, RunStatus, Scenario};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_RUNTIME: u8 = 2;
pub const EXIT_COMPARE: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "wealthloop", version, about = "Feedback-loop wealth simulator and distribution toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write its time series and wealth files.
    Simulate(SimulateArgs),
    /// Closed-form trendy-regime wealth as (rank, wealth).
    Oracle(OracleArgs),
    /// PDF, CCDF, rank curve, fits and classification of a sample.
    Analyze(AnalyzeArgs),
    /// Convert an unevenly bucketed survey to an equal-width PDF.
    Ingest(IngestArgs),
    /// Compare the shared columns of two CSV files.
    Compare(CompareArgs),
    /// Run a scenario over consecutive seeds and pool the results.
    Ensemble(EnsembleArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProfileKind {
    PowerLaw,
    LinearDeclining,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Take the profile, agent count, steps and starting wealth from a scenario.
    #[arg(long, conflicts_with_all = ["profile", "c", "b", "agents", "steps", "a0"])]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub profile: Option<ProfileKind>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub agents: Option<usize>,
    #[arg(long)]
    pub steps: Option<u32>,
    /// Starting wealth per agent, `1 / agents` by default.
    #[arg(long)]
    pub a0: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// CSV of samples: one value per row, or a header naming the column.
    pub input: PathBuf,
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub ranks: Option<usize>,
    #[arg(long, value_parser = parse_range)]
    pub fit_range: Option<(f64, f64)>,
    /// Directory for summary.json, pdf.csv, ccdf.csv and rank.csv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Survey CSV with `lower,upper,share` columns.
    pub survey: PathBuf,
    #[arg(long)]
    pub width: f64,
    #[arg(long)]
    pub top_cap: Option<f64>,
    /// Output pdf.csv path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub left: PathBuf,
    pub right: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub runs: usize,
    /// Base seed, the config's seed by default.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_range(text: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = text
        .split_once(',')
        .ok_or_else(|| format!("expected lo,hi but got {text:?}"))?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound {lo:?}"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound {hi:?}"))?;
    if !(lo < hi) {
        return Err(format!("empty range {lo},{hi}"));
    }
    Ok((lo, hi))
}

/// Result of a command: what to print on stdout and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout }
    }
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidConfig { .. } => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

/// Runs a command, printing its report and any error, and returns the exit code.
pub fn run(cli: Cli) -> u8 {
    match execute(cli.command) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(outcome.stdout.as_bytes());
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Simulate(a) => simulate(&a),
        Command::Oracle(a) => oracle(&a),
        Command::Analyze(a) => analyze(&a),
        Command::Ingest(a) => ingest(&a),
        Command::Compare(a) => compare(&a),
        Command::Ensemble(a) => ensemble(&a),
    }
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    if !path.exists() {
        return Err(Error::config("--config", format!("{} does not exist", path.display())));
    }
    Scenario::load(path)
}

fn simulate(a: &SimulateArgs) -> Result<Outcome> {
    let mut scenario = load_scenario(&a.config)?;
    if let Some(seed) = a.seed {
        scenario = scenario.with_seed(seed);
    }
    let series = scenario.run()?;
    output::write_run(&a.out, &scenario, &series)?;
    let code = match series.status {
        RunStatus::Completed => EXIT_OK,
        RunStatus::Unbounded { .. } => EXIT_RUNTIME,
    };
    let report = serde_json::json!({ "seed": series.seed, "status": series.status, "out": a.out });
    Ok(Outcome {
        code,
        stdout: serde_json::to_string(&report)? + "\n",
    })
}

fn oracle(a: &OracleArgs) -> Result<Outcome> {
    let (profile, n_agents, steps, a0) = match &a.config {
        Some(path) => {
            let s = load_scenario(path)?;
            let c = s.config();
            let a0 = match &c.initial_wealth {
                InitialWealth::Equal { value } => value.unwrap_or(1.0 / c.n_agents as f64),
                InitialWealth::Explicit { .. } => {
                    return Err(Error::config(
                        "initial_wealth",
                        "the closed form needs equal starting wealth",
                    ))
                }
            };
            let steps = u32::try_from(c.n_steps)
                .map_err(|_| Error::config("n_steps", "too many steps for the closed form"))?;
            (c.b_profile.clone(), c.n_agents, steps, a0)
        }
        None => {
            let need = |flag: &str| Error::config(flag, "required without --config");
            let profile = match a.profile.ok_or_else(|| need("--profile"))? {
                ProfileKind::PowerLaw => BProfile::PowerLaw {
                    c: a.c.ok_or_else(|| need("--c"))?,
                    b: a.b.ok_or_else(|| need("--b"))?,
                },
                ProfileKind::LinearDeclining => BProfile::LinearDeclining,
            };
            let n = a.agents.ok_or_else(|| need("--agents"))?;
            let steps = a.steps.ok_or_else(|| need("--steps"))?;
            (profile, n, steps, a.a0.unwrap_or(1.0 / n as f64))
        }
    };
    let wealth = oracle_wealth(&profile, n_agents, steps, a0)?;
    let total: f64 = wealth.iter().sum();
    let mut csv = String::from("rank,wealth,wealth_normalized\n");
    for (i, w) in wealth.iter().enumerate() {
        csv.push_str(&format!("{},{},{}\n", i + 1, fmt_f64(*w), fmt_f64(w / total)));
    }
    write_atomic(&a.out, csv.as_bytes())?;
    Ok(Outcome::ok(String::new()))
}

/// Unnormalized closed-form wealth `A0 (1 + b_i)^n` for each agent.
pub fn oracle_wealth(profile: &BProfile, n_agents: usize, steps: u32, a0: f64) -> Result<Vec<f64>> {
    if !(a0.is_finite() && a0 > 0.0) {
        return Err(Error::config("--a0", "must be finite and > 0"));
    }
    if let BProfile::LinearDeclining = profile {
        return oracle_linear_declining(n_agents, steps, a0);
    }
    let responses = generate_b_profile(profile, n_agents)?;
    // Validates the profile the same way the normalized form does.
    oracle_trendy_wealth(&responses, steps)?;
    let wealth: Vec<f64> = responses
        .iter()
        .map(|b| {
            let g = 1.0 + b;
            if g == 0.0 && steps > 0 {
                0.0
            } else {
                a0 * (steps as f64 * g.ln()).exp()
            }
        })
        .collect();
    if wealth.iter().any(|w| !w.is_finite()) {
        return Err(Error::input("closed-form wealth overflows; use fewer steps"));
    }
    Ok(wealth)
}

fn analyze(a: &AnalyzeArgs) -> Result<Outcome> {
    let samples = output::read_samples(&a.input, a.column.as_deref())?;
    let options = SummaryOptions {
        bucket_width: a.width,
        n_ranks: a.ranks,
        fit_range: a.fit_range,
        classify: ClassifyConfig::default(),
    };
    let summary = summarize(&samples, &options)?;
    std::fs::create_dir_all(&a.out)?;
    write_atomic(&a.out.join("summary.json"), (serde_json::to_string_pretty(&summary)? + "\n").as_bytes())?;
    write_atomic(&a.out.join("pdf.csv"), output::histogram_csv(&summary.histogram).as_bytes())?;
    write_atomic(&a.out.join("ccdf.csv"), output::points_csv("x", "ccdf", &summary.ccdf).as_bytes())?;
    write_atomic(
        &a.out.join("rank.csv"),
        output::points_csv("rank", "expected_value", &summary.rank_curve.points()).as_bytes(),
    )?;
    let report = serde_json::json!({
        "n_samples": summary.n_samples,
        "verdict": summary.classification.verdict,
        "gini": summary.gini,
        "exponents": summary.exponents,
    });
    Ok(Outcome::ok(serde_json::to_string(&report)? + "\n"))
}

fn ingest(a: &IngestArgs) -> Result<Outcome> {
    let survey = parse_survey_path(&a.survey)?;
    let hist = to_equal_buckets(&survey, a.width, a.top_cap)?;
    write_atomic(&a.out, output::histogram_csv(&hist).as_bytes())?;
    let report = serde_json::json!({
        "source": survey.source,
        "unit": survey.unit,
        "buckets": hist.n_buckets(),
        "mass": hist.mass(),
    });
    Ok(Outcome::ok(serde_json::to_string(&report)? + "\n"))
}

fn compare(a: &CompareArgs) -> Result<Outcome> {
    let report = compare_files(&a.left, &a.right, a.tol)?;
    Ok(Outcome {
        code: if report.passed { EXIT_OK } else { EXIT_COMPARE },
        stdout: serde_json::to_string_pretty(&report)? + "\n",
    })
}

fn ensemble(a: &EnsembleArgs) -> Result<Outcome> {
    if a.runs == 0 {
        return Err(Error::config("--runs", "must be >= 1"));
    }
    let scenario = load_scenario(&a.config)?;
    let base = a.seed.unwrap_or(scenario.config().seed);
    let report = run_ensemble(&scenario, a.runs, base, &ClassifyConfig::default(), |run, series| {
        output::write_run(&a.out.join(format!("run_{}", run.config().seed)), run, series)
    })?;
    let json = serde_json::to_string_pretty(&report)? + "\n";
    write_atomic(&a.out.join("ensemble.json"), json.as_bytes())?;
    let code = if report.failed + report.unbounded > 0 {
        EXIT_RUNTIME
    } else {
        EXIT_OK
    };
    let brief = serde_json::json!({
        "n_runs": report.n_runs,
        "completed": report.completed,
        "unbounded": report.unbounded,
        "failed": report.failed,
        "verdict_tallies": report.verdict_tallies,
    });
    Ok(Outcome {
        code,
        stdout: serde_json::to_string(&brief)? + "\n",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1,10").unwrap(), (1.0, 10.0));
        assert!(parse_range("10,1").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn oracle_forms_agree() {
        let profile = BProfile::PowerLaw { c: 2.0, b: 0.1 };
        let w = oracle_wealth(&profile, 50, 12, 0.02).unwrap();
        let total: f64 = w.iter().sum();
        let responses = generate_b_profile(&profile, 50).unwrap();
        let norm = oracle_trendy_wealth(&responses, 12).unwrap().wealth;
        for (a, b) in w.iter().zip(norm) {
            assert!((a / total - b).abs() <= 1e-12 * b);
        }
    }
}
