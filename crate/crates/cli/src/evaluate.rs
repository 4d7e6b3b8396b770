use rand::Rng;
use skewsep_core::criteria::{ccn_value, evaluate_strategy, ppt_report};
use skewsep_core::rng::stream_rng;
use skewsep_core::zoo::StateFamily;
use skewsep_core::{BasisStrategy, Criterion, CriterionReport, DensityMatrix, OptimizeConfig, Tolerances};

use crate::config::{check_param, ExperimentConfig};
use crate::error::{CliError, CliResult};
use crate::state_file::load_state;

/// Independent seeds for the state draw and the basis optimizer of task `index`.
pub fn task_seeds(seed: u64, index: u64) -> (u64, u64) {
    let mut rng = stream_rng(seed, index);
    (rng.gen(), rng.gen())
}

pub fn criterion_report(
    rho: &DensityMatrix,
    criterion: Criterion,
    strategy: BasisStrategy,
    opt: &OptimizeConfig,
    tol: &Tolerances,
) -> CliResult<CriterionReport> {
    Ok(match criterion {
        Criterion::Ccn => ccn_value(rho, tol)?,
        Criterion::Ppt => ppt_report(rho, tol)?,
        c => evaluate_strategy(rho, c, strategy, opt, tol)?.report,
    })
}

/// The state named by the config: an input file, or a family member.
///
/// Random families are drawn with `seed` directly.
pub fn resolve_state(cfg: &ExperimentConfig) -> CliResult<DensityMatrix> {
    let tol = cfg.tolerances();
    match (&cfg.input, &cfg.family) {
        (Some(_), Some(_)) => Err(CliError::Config("give either --input or --family, not both".into())),
        (Some(path), None) => load_state(path, &tol),
        (None, _) => {
            let family = cfg.family()?;
            let param = match (cfg.param, family.param_range()) {
                (Some(p), _) => p,
                (None, None) => 0.0,
                (None, Some(_)) => {
                    return Err(CliError::Config(format!("family {} needs --param", family.name())));
                }
            };
            check_param(family, param)?;
            Ok(family.generate(cfg.dim()?, param, cfg.seed()?)?)
        }
    }
}

/// Reports for the requested criteria. Basis-dependent criteria need equal
/// local dimensions and are skipped for unequal ones unless asked for.
pub fn evaluate(cfg: &ExperimentConfig) -> CliResult<Vec<CriterionReport>> {
    let rho = resolve_state(cfg)?;
    let strategy = cfg.strategy()?;
    let tol = cfg.tolerances();
    let opt = cfg.optimize().with_seed(cfg.seed()?);
    let mut criteria = cfg.criteria()?;
    if rho.da() != rho.db() {
        if cfg.criteria.is_some() && criteria.iter().any(|c| c.uses_basis()) {
            return Err(CliError::Config(format!(
                "lur and skew need equal local dimensions, got {}x{}",
                rho.da(),
                rho.db()
            )));
        }
        criteria.retain(|c| !c.uses_basis());
    }
    criteria
        .into_iter()
        .map(|c| criterion_report(&rho, c, strategy, &opt, &tol))
        .collect()
}

/// Family member at `param`; `state_seed` only matters for random families.
pub fn family_member(family: StateFamily, dim: usize, param: f64, state_seed: u64) -> CliResult<DensityMatrix> {
    check_param(family, param)?;
    Ok(family.generate(dim, param, state_seed)?)
}
