//! Command-line experiments over the `skewsep-core` criteria.
//!
//! Every command reads an [`ExperimentConfig`] assembled from an optional
//! JSON file and flags (flags win), and writes deterministic JSON or CSV.

pub mod config;
pub mod error;
pub mod evaluate;
pub mod independence;
pub mod output;
pub mod selftest;
pub mod state_file;
pub mod sweep;
pub mod threshold;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{ExperimentConfig, ParamRange};
pub use error::{CliError, CliResult};

use output::{emit, to_json};

#[derive(Debug, Parser)]
#[command(name = "skewsep", version, about = "Entanglement criteria experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate criteria on one state (JSON report list).
    Evaluate(EvaluateArgs),
    /// Evaluate a family over a parameter grid (CSV).
    Sweep(SweepArgs),
    /// Bisect the parameter where a criterion starts detecting (JSON).
    Threshold(ThresholdArgs),
    /// Tally lur against skew verdicts on sampled states (JSON).
    Independence(IndependenceArgs),
    /// Run the invariant suites at fixed seeds.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub family: Option<String>,
    /// Local dimension for families that take one.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Comma-separated subset of ccn,lur,skew,ppt.
    #[arg(long, value_delimiter = ',')]
    pub criteria: Option<Vec<String>>,
    /// canonical, schmidt or optimized (sweeps accept a comma-separated list).
    #[arg(long)]
    pub strategy: Option<String>,
    /// Falls back to SKEWSEP_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Optimizer restarts.
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Optimizer steps per restart.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub param: Option<f64>,
    /// Density-matrix JSON file instead of a family.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub grid: Option<Vec<f64>>,
    /// lo:hi:points
    #[arg(long)]
    pub range: Option<ParamRange>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Search interval lo:hi[:prescan points]; the family range by default.
    #[arg(long)]
    pub range: Option<ParamRange>,
}

#[derive(Debug, Args)]
pub struct IndependenceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub samples: Option<usize>,
    /// mixed (default), noisy-bell, random or random-separable.
    #[arg(long)]
    pub sampler: Option<String>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Instances per suite and dimension.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Also write the report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, hide = true)]
    pub corrupt_loo: bool,
}

impl CommonArgs {
    /// File config overlaid by these flags and `extra`.
    fn resolve(self, extra: ExperimentConfig) -> CliResult<ExperimentConfig> {
        let base = match &self.config {
            Some(path) => config::load_config(path)?,
            None => ExperimentConfig::default(),
        };
        let flags = ExperimentConfig {
            family: self.family,
            dim: self.dim,
            criteria: self.criteria,
            strategy: self.strategy,
            seed: self.seed,
            tol: self.tol,
            out: self.out,
            ..extra
        };
        let mut merged = base.overlay(flags);
        if self.restarts.is_some() || self.steps.is_some() {
            let mut opt = merged.optimize();
            opt.restarts = self.restarts.unwrap_or(opt.restarts);
            opt.steps = self.steps.unwrap_or(opt.steps);
            merged.optimize = Some(opt);
        }
        Ok(merged)
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Evaluate(a) => {
            let cfg = a.common.resolve(ExperimentConfig {
                param: a.param,
                input: a.input,
                ..Default::default()
            })?;
            let reports = evaluate::evaluate(&cfg)?;
            emit(cfg.out.as_deref(), &to_json(&reports))
        }
        Command::Sweep(a) => {
            let cfg = a.common.resolve(ExperimentConfig {
                grid: a.grid,
                range: a.range,
                ..Default::default()
            })?;
            let records = sweep::sweep(&cfg)?;
            emit(cfg.out.as_deref(), &sweep::to_csv(&records))
        }
        Command::Threshold(a) => {
            let cfg = a.common.resolve(ExperimentConfig {
                range: a.range,
                ..Default::default()
            })?;
            let result = threshold::threshold(&cfg)?;
            emit(cfg.out.as_deref(), &to_json(&result))
        }
        Command::Independence(a) => {
            let cfg = a.common.resolve(ExperimentConfig {
                samples: a.samples,
                sampler: a.sampler,
                ..Default::default()
            })?;
            let tally = independence::independence(&cfg)?;
            if let Some(out) = &cfg.out {
                independence::write_exemplars(&tally, out)?;
            }
            emit(cfg.out.as_deref(), &to_json(&tally))
        }
        Command::Selftest(a) => {
            let seed = ExperimentConfig {
                seed: a.seed,
                ..Default::default()
            }
            .seed()?;
            let report = selftest::selftest(&selftest::SelftestOptions {
                seed,
                instances_per_dim: a.samples.unwrap_or(selftest::DEFAULT_INSTANCES),
                corrupt_loo: a.corrupt_loo,
            })?;
            emit(None, report.lines().as_bytes())?;
            if let Some(out) = &a.out {
                emit(Some(out), &to_json(&report))?;
            }
            if report.passed {
                Ok(())
            } else {
                let failed: Vec<&str> = report.suites.iter().filter(|s| !s.passed).map(|s| s.name).collect();
                Err(CliError::SelftestFailed(failed.join(", ")))
            }
        }
    }
}
