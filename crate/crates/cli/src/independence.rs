use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use skewsep_core::criteria::{evaluate_strategy, ppt_report};
use skewsep_core::rng::stream_rng;
use skewsep_core::zoo::{bell_state, noisy, random_separable_with, random_state_with};
use skewsep_core::{BasisStrategy, Criterion, DensityMatrix, OptimizeConfig, Tolerances};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::to_json;
use crate::state_file::StateFile;

pub const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampler {
    /// Half noisy Bell states with uniform noise, half Ginibre states of uniform rank.
    Mixed,
    NoisyBell,
    Random,
    RandomSeparable,
}

impl Sampler {
    pub fn name(self) -> &'static str {
        match self {
            Sampler::Mixed => "mixed",
            Sampler::NoisyBell => "noisy-bell",
            Sampler::Random => "random",
            Sampler::RandomSeparable => "random-separable",
        }
    }

    pub fn by_name(name: &str) -> CliResult<Self> {
        [Sampler::Mixed, Sampler::NoisyBell, Sampler::Random, Sampler::RandomSeparable]
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| {
                CliError::Config(format!(
                    "unknown sampler `{name}` (expected mixed, noisy-bell, random or random-separable)"
                ))
            })
    }

    fn draw(self, d: usize, rng: &mut impl Rng) -> skewsep_core::Result<DensityMatrix> {
        let noisy_bell = self == Sampler::NoisyBell || (self == Sampler::Mixed && rng.gen_bool(0.5));
        if noisy_bell {
            noisy(&bell_state(d)?, rng.gen::<f64>())
        } else if self == Sampler::RandomSeparable {
            random_separable_with(d, d, d * d, rng)
        } else {
            let rank = rng.gen_range(1..=d * d);
            random_state_with(d, d, rank, rng)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cell {
    Both,
    SkewOnly,
    LurOnly,
    Neither,
}

impl Cell {
    pub fn of(lur: bool, skew: bool) -> Cell {
        match (lur, skew) {
            (true, true) => Cell::Both,
            (false, true) => Cell::SkewOnly,
            (true, false) => Cell::LurOnly,
            (false, false) => Cell::Neither,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Cell::Both => "both",
            Cell::SkewOnly => "skew-only",
            Cell::LurOnly => "lur-only",
            Cell::Neither => "neither",
        }
    }
}

/// A sample from an off-diagonal cell, with everything needed to re-evaluate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exemplar {
    pub cell: Cell,
    pub sample_index: usize,
    pub strategy: BasisStrategy,
    pub optimize: OptimizeConfig,
    pub lur_value: f64,
    pub skew_value: f64,
    pub ppt_value: f64,
    #[serde(flatten)]
    pub state: StateFile,
}

impl Exemplar {
    /// Re-evaluates both criteria on the stored state; true if it lands in the same cell.
    pub fn reverify(&self, tol: &Tolerances) -> CliResult<bool> {
        let rho = self.state.to_state(tol).map_err(|reason| CliError::BadInput {
            path: PathBuf::from("<exemplar>"),
            reason,
        })?;
        let s = evaluate_sample(&rho, self.strategy, &self.optimize, tol)?;
        Ok(Cell::of(s.lur.1, s.skew.1) == self.cell)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndependenceTally {
    pub samples: usize,
    pub sampler: Sampler,
    pub dim: usize,
    pub strategy: BasisStrategy,
    pub seed: u64,
    pub optimize: OptimizeConfig,
    pub both: usize,
    pub skew_only: usize,
    pub lur_only: usize,
    pub neither: usize,
    /// Whether PPT decides separability at this dimension.
    pub ppt_exact: bool,
    /// Samples flagged by lur or skew whose partial transpose is nonnegative.
    pub ppt_inconsistent: usize,
    /// Largest lur/skew violation among PPT (hence separable, when exact) samples.
    pub max_violation_on_ppt: f64,
    pub exemplars: Vec<Exemplar>,
}

impl IndependenceTally {
    pub fn cell(&self, c: Cell) -> usize {
        match c {
            Cell::Both => self.both,
            Cell::SkewOnly => self.skew_only,
            Cell::LurOnly => self.lur_only,
            Cell::Neither => self.neither,
        }
    }
}

struct SampleOutcome {
    lur: (f64, bool, f64),
    skew: (f64, bool, f64),
    ppt: (f64, bool),
}

fn evaluate_sample(
    rho: &DensityMatrix,
    strategy: BasisStrategy,
    opt: &OptimizeConfig,
    tol: &Tolerances,
) -> CliResult<SampleOutcome> {
    let lur = evaluate_strategy(rho, Criterion::Lur, strategy, opt, tol)?.report;
    let skew = evaluate_strategy(rho, Criterion::Skew, strategy, opt, tol)?.report;
    let ppt = ppt_report(rho, tol)?;
    Ok(SampleOutcome {
        lur: (lur.value, lur.detected, lur.violation()),
        skew: (skew.value, skew.detected, skew.violation()),
        ppt: (ppt.value, ppt.detected),
    })
}

/// Tallies lur against skew verdicts over `samples` draws.
///
/// Sample `i` is drawn from stream `i` of `seed`, which also fixes its
/// optimizer seed; results are assembled in index order.
pub fn independence(cfg: &ExperimentConfig) -> CliResult<IndependenceTally> {
    let samples = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(CliError::Config("independence needs at least one sample".into()));
    }
    let sampler = Sampler::by_name(cfg.sampler.as_deref().unwrap_or("mixed"))?;
    let strategy = cfg.strategy()?;
    let dim = cfg.dim()?;
    let seed = cfg.seed()?;
    let tol = cfg.tolerances();
    let base_opt = cfg.optimize();

    let outcomes: Vec<CliResult<(DensityMatrix, u64, SampleOutcome)>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let rho = sampler.draw(dim, &mut rng)?;
            let opt_seed: u64 = rng.gen();
            let out = evaluate_sample(&rho, strategy, &base_opt.with_seed(opt_seed), &tol)?;
            Ok((rho, opt_seed, out))
        })
        .collect();

    let ppt_exact = dim * dim <= 6;
    let mut tally = IndependenceTally {
        samples,
        sampler,
        dim,
        strategy,
        seed,
        optimize: base_opt,
        both: 0,
        skew_only: 0,
        lur_only: 0,
        neither: 0,
        ppt_exact,
        ppt_inconsistent: 0,
        max_violation_on_ppt: f64::NEG_INFINITY,
        exemplars: Vec::new(),
    };
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let (rho, opt_seed, s) = outcome?;
        let cell = Cell::of(s.lur.1, s.skew.1);
        match cell {
            Cell::Both => tally.both += 1,
            Cell::SkewOnly => tally.skew_only += 1,
            Cell::LurOnly => tally.lur_only += 1,
            Cell::Neither => tally.neither += 1,
        }
        let flagged = s.lur.1 || s.skew.1;
        let ppt_negative = s.ppt.0 < 0.0;
        if flagged && !ppt_negative {
            tally.ppt_inconsistent += 1;
        }
        if !ppt_negative {
            tally.max_violation_on_ppt = tally.max_violation_on_ppt.max(s.lur.2).max(s.skew.2);
        }
        let off_diagonal = matches!(cell, Cell::SkewOnly | Cell::LurOnly);
        if off_diagonal && !tally.exemplars.iter().any(|e| e.cell == cell) {
            tally.exemplars.push(Exemplar {
                cell,
                sample_index: i,
                strategy,
                optimize: base_opt.with_seed(opt_seed),
                lur_value: s.lur.0,
                skew_value: s.skew.0,
                ppt_value: s.ppt.0,
                state: StateFile::from_state(&rho),
            });
        }
    }
    tally.exemplars.sort_by_key(|e| e.cell.name());
    if tally.max_violation_on_ppt == f64::NEG_INFINITY {
        tally.max_violation_on_ppt = 0.0;
    }
    Ok(tally)
}

/// `<dir>/<stem>.<cell>.json` next to the tally file.
pub fn exemplar_path(out: &Path, cell: Cell) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("independence");
    out.with_file_name(format!("{stem}.{}.json", cell.name()))
}

/// Writes one file per exemplar beside `out`; returns the paths written.
pub fn write_exemplars(tally: &IndependenceTally, out: &Path) -> CliResult<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for e in &tally.exemplars {
        let path = exemplar_path(out, e.cell);
        std::fs::write(&path, to_json(e)).map_err(|err| CliError::io(&path, err))?;
        paths.push(path);
    }
    Ok(paths)
}

pub fn load_exemplar(path: &Path) -> CliResult<Exemplar> {
    let bad = |reason: String| CliError::BadInput {
        path: path.to_owned(),
        reason,
    };
    let text = std::fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| bad(e.to_string()))
}
