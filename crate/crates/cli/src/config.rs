//! Experiment configuration: a JSON file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use skewsep_core::zoo::StateFamily;
use skewsep_core::{BasisStrategy, Criterion, OptimizeConfig, Tolerances};

use crate::error::{CliError, CliResult};

pub const SEED_ENV: &str = "SKEWSEP_SEED";

/// Inclusive parameter interval, optionally sampled at `points` evenly spaced values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamRange {
    pub start: f64,
    pub stop: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

impl std::str::FromStr for ParamRange {
    type Err = String;

    /// `lo:hi` or `lo:hi:points`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad range bound `{t}`: {e}"));
        match parts.as_slice() {
            [a, b] => Ok(ParamRange {
                start: num(a)?,
                stop: num(b)?,
                points: None,
            }),
            [a, b, n] => Ok(ParamRange {
                start: num(a)?,
                stop: num(b)?,
                points: Some(n.trim().parse().map_err(|e| format!("bad point count `{n}`: {e}"))?),
            }),
            _ => Err(format!("range `{s}` is not lo:hi or lo:hi:points")),
        }
    }
}

impl ParamRange {
    pub fn validate(&self) -> CliResult<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start >= self.stop {
            return Err(CliError::Config(format!(
                "range {}:{} must be finite and ordered",
                self.start, self.stop
            )));
        }
        if matches!(self.points, Some(n) if n < 2) {
            return Err(CliError::Config("a sampled range needs at least 2 points".into()));
        }
        Ok(())
    }

    /// Evenly spaced values including both endpoints.
    pub fn values(&self) -> CliResult<Vec<f64>> {
        self.validate()?;
        let n = self
            .points
            .ok_or_else(|| CliError::Config("range needs a point count (lo:hi:points) to form a grid".into()))?;
        let m = (n - 1) as f64;
        Ok((0..n)
            .map(|i| {
                let i = i as f64;
                (self.start * (m - i) + self.stop * i) / m
            })
            .collect())
    }
}

/// Every setting a command may read. Unset fields fall back to defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: Option<String>,
    pub dim: Option<usize>,
    pub param: Option<f64>,
    pub grid: Option<Vec<f64>>,
    pub range: Option<ParamRange>,
    pub criteria: Option<Vec<String>>,
    /// One strategy name, or a comma-separated list for sweeps.
    pub strategy: Option<String>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub sampler: Option<String>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub optimize: Option<OptimizeConfig>,
    pub tolerances: Option<Tolerances>,
}

pub fn load_config(path: &Path) -> CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl ExperimentConfig {
    /// Fields set in `flags` replace those in `self`.
    pub fn overlay(self, flags: ExperimentConfig) -> ExperimentConfig {
        ExperimentConfig {
            family: flags.family.or(self.family),
            dim: flags.dim.or(self.dim),
            param: flags.param.or(self.param),
            grid: flags.grid.or(self.grid),
            range: flags.range.or(self.range),
            criteria: flags.criteria.or(self.criteria),
            strategy: flags.strategy.or(self.strategy),
            seed: flags.seed.or(self.seed),
            samples: flags.samples.or(self.samples),
            sampler: flags.sampler.or(self.sampler),
            tol: flags.tol.or(self.tol),
            out: flags.out.or(self.out),
            input: flags.input.or(self.input),
            optimize: flags.optimize.or(self.optimize),
            tolerances: flags.tolerances.or(self.tolerances),
        }
    }

    pub fn family(&self) -> CliResult<StateFamily> {
        let name = self
            .family
            .as_deref()
            .ok_or_else(|| CliError::Config("no state family given (--family)".into()))?;
        StateFamily::by_name(name).ok_or_else(|| {
            let known: Vec<&str> = StateFamily::ALL.iter().map(|f| f.name()).collect();
            CliError::Config(format!("unknown family `{name}` (known: {})", known.join(", ")))
        })
    }

    pub fn dim(&self) -> CliResult<usize> {
        match self.dim.unwrap_or(2) {
            d if (2..=8).contains(&d) => Ok(d),
            d => Err(CliError::Config(format!("local dimension {d} outside 2..=8"))),
        }
    }

    /// Requested criteria in canonical order; all four when unset.
    pub fn criteria(&self) -> CliResult<Vec<Criterion>> {
        let Some(names) = &self.criteria else {
            return Ok(Criterion::ALL.to_vec());
        };
        if names.is_empty() {
            return Err(CliError::Config("criteria list is empty".into()));
        }
        let mut out = Vec::new();
        for name in names {
            let c: Criterion = name.parse().map_err(CliError::Config)?;
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out.sort_by_key(|c| Criterion::ALL.iter().position(|x| x == c));
        Ok(out)
    }

    pub fn strategies(&self) -> CliResult<Vec<BasisStrategy>> {
        let Some(spec) = &self.strategy else {
            return Ok(vec![BasisStrategy::Optimized]);
        };
        let mut out = Vec::new();
        for name in spec.split(',').map(str::trim) {
            let s: BasisStrategy = name.parse().map_err(CliError::Config)?;
            if !out.contains(&s) {
                out.push(s);
            }
        }
        Ok(out)
    }

    pub fn strategy(&self) -> CliResult<BasisStrategy> {
        match self.strategies()?.as_slice() {
            [s] => Ok(*s),
            _ => Err(CliError::Config("this command takes exactly one basis strategy".into())),
        }
    }

    /// Flag or config seed, then the environment fallback, then 0.
    pub fn seed(&self) -> CliResult<u64> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|e| CliError::Config(format!("{SEED_ENV}=`{v}` is not a seed: {e}"))),
            Err(_) => Ok(0),
        }
    }

    pub fn optimize(&self) -> OptimizeConfig {
        self.optimize.unwrap_or_default()
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances.unwrap_or_default()
    }

    /// Grid for a sweep: an explicit list, or a sampled range.
    pub fn grid(&self, family: StateFamily) -> CliResult<Vec<f64>> {
        let values = match (&self.grid, &self.range) {
            (Some(_), Some(_)) => return Err(CliError::Config("give either a grid or a range, not both".into())),
            (Some(g), None) => g.clone(),
            (None, Some(r)) => r.values()?,
            (None, None) => match self.param {
                Some(p) => vec![p],
                None if family.param_range().is_none() => vec![0.0],
                None => return Err(CliError::Config("sweep needs --grid or --range".into())),
            },
        };
        if values.is_empty() {
            return Err(CliError::Config("grid is empty".into()));
        }
        for &p in &values {
            check_param(family, p)?;
        }
        Ok(values)
    }
}

pub fn check_param(family: StateFamily, p: f64) -> CliResult<()> {
    if !p.is_finite() {
        return Err(CliError::Config(format!("parameter {p} is not finite")));
    }
    if let Some((lo, hi)) = family.param_range() {
        if !(lo..=hi).contains(&p) {
            return Err(CliError::Config(format!(
                "{} parameter {p} outside [{lo}, {hi}]",
                family.name()
            )));
        }
    }
    Ok(())
}
