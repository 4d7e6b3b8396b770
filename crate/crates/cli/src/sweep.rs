use rayon::prelude::*;
use serde::Serialize;
use skewsep_core::{BasisStrategy, Criterion, CriterionReport};

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::evaluate::{criterion_report, family_member, task_seeds};
use crate::output::fmt_sig;

pub const COLUMNS: [&str; 12] = [
    "family", "param", "strategy", "seed", "ccn_value", "ccn_det", "lur_value", "lur_det", "skew_value", "skew_det",
    "ppt_value", "ppt_det",
];

/// One CSV row. Criteria that were not requested stay `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub family: String,
    pub param: f64,
    pub strategy: BasisStrategy,
    pub seed: u64,
    pub ccn: Option<(f64, bool)>,
    pub lur: Option<(f64, bool)>,
    pub skew: Option<(f64, bool)>,
    pub ppt: Option<(f64, bool)>,
}

impl SweepRecord {
    fn fields(&self) -> Vec<String> {
        let mut out = vec![
            self.family.clone(),
            format!("{}", self.param),
            self.strategy.name().to_owned(),
            self.seed.to_string(),
        ];
        for cell in [self.ccn, self.lur, self.skew, self.ppt] {
            match cell {
                Some((v, d)) => {
                    out.push(fmt_sig(v, 12));
                    out.push(d.to_string());
                }
                None => out.extend([String::new(), String::new()]),
            }
        }
        out
    }
}

/// One record per (param, strategy), in grid order then strategy order.
///
/// Grid points run in parallel; point `i` draws its state and optimizer
/// seeds from stream `i` of `seed`, so every strategy sees the same state.
pub fn sweep(cfg: &ExperimentConfig) -> CliResult<Vec<SweepRecord>> {
    let family = cfg.family()?;
    let grid = cfg.grid(family)?;
    let strategies = cfg.strategies()?;
    let criteria = cfg.criteria()?;
    let dim = cfg.dim()?;
    let seed = cfg.seed()?;
    let tol = cfg.tolerances();
    let base_opt = cfg.optimize();

    let per_point: Vec<CliResult<Vec<SweepRecord>>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &param)| {
            let (state_seed, opt_seed) = task_seeds(seed, i as u64);
            let rho = family_member(family, dim, param, state_seed)?;
            let opt = base_opt.with_seed(opt_seed);
            let mut fixed: Vec<(Criterion, CriterionReport)> = Vec::new();
            for &c in criteria.iter().filter(|c| !c.uses_basis()) {
                fixed.push((c, criterion_report(&rho, c, BasisStrategy::Canonical, &opt, &tol)?));
            }
            let mut rows = Vec::with_capacity(strategies.len());
            for &strategy in &strategies {
                let mut record = SweepRecord {
                    family: family.name().to_owned(),
                    param,
                    strategy,
                    seed,
                    ccn: None,
                    lur: None,
                    skew: None,
                    ppt: None,
                };
                let mut set = |c: Criterion, r: &CriterionReport| {
                    let cell = Some((r.value, r.detected));
                    match c {
                        Criterion::Ccn => record.ccn = cell,
                        Criterion::Lur => record.lur = cell,
                        Criterion::Skew => record.skew = cell,
                        Criterion::Ppt => record.ppt = cell,
                        Criterion::Theorem1 => {}
                    }
                };
                for (c, r) in &fixed {
                    set(*c, r);
                }
                for &c in criteria.iter().filter(|c| c.uses_basis()) {
                    set(c, &criterion_report(&rho, c, strategy, &opt, &tol)?);
                }
                rows.push(record);
            }
            Ok(rows)
        })
        .collect();

    let mut records = Vec::new();
    for rows in per_point {
        records.extend(rows?);
    }
    Ok(records)
}

pub fn to_csv(records: &[SweepRecord]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COLUMNS).expect("in-memory write");
    for r in records {
        w.write_record(r.fields()).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}
