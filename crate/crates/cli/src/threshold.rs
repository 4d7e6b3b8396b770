use serde::Serialize;
use skewsep_core::{BasisStrategy, Criterion};

use crate::config::{ExperimentConfig, ParamRange};
use crate::error::{CliError, CliResult};
use crate::evaluate::{criterion_report, family_member};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_PRESCAN: usize = 21;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub family: String,
    pub dim: usize,
    pub criterion: Criterion,
    pub strategy: BasisStrategy,
    pub seed: u64,
    pub tol: f64,
    /// Midpoint of the final bracket.
    pub p_star: f64,
    pub bracket: [f64; 2],
    /// Verdicts at the two bracket endpoints; always opposite.
    pub detected: [bool; 2],
    pub prescan: Vec<(f64, bool)>,
    pub bisection_steps: usize,
}

/// Bisects the parameter at which `criterion` changes verdict.
///
/// A coarse pre-scan over the range must show exactly one flip. The state is
/// drawn with the config seed and the basis optimizer uses the same seed at
/// every parameter value.
pub fn threshold(cfg: &ExperimentConfig) -> CliResult<ThresholdResult> {
    let family = cfg.family()?;
    let (lo0, hi0) = family.param_range().ok_or_else(|| {
        CliError::Config(format!("family {} has no parameter to bisect", family.name()))
    })?;
    let criterion = match cfg.criteria()?.as_slice() {
        [c] if cfg.criteria.is_some() => *c,
        _ => return Err(CliError::Config("threshold takes exactly one criterion (--criteria)".into())),
    };
    let strategy = cfg.strategy()?;
    let tol = cfg.tol.unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Config(format!("bisection tolerance {tol} must be positive")));
    }
    let range = cfg.range.unwrap_or(ParamRange {
        start: lo0,
        stop: hi0,
        points: None,
    });
    let range = ParamRange {
        points: Some(range.points.unwrap_or(DEFAULT_PRESCAN)),
        ..range
    };
    let dim = cfg.dim()?;
    let seed = cfg.seed()?;
    let tols = cfg.tolerances();
    let opt = cfg.optimize().with_seed(seed);

    let verdict = |p: f64| -> CliResult<bool> {
        let rho = family_member(family, dim, p, seed)?;
        Ok(criterion_report(&rho, criterion, strategy, &opt, &tols)?.detected)
    };
    let b = bisect(verdict, &range, tol)?;

    Ok(ThresholdResult {
        family: family.name().to_owned(),
        dim: family.local_dims(dim).0,
        criterion,
        strategy,
        seed,
        tol,
        p_star: 0.5 * (b.bracket[0] + b.bracket[1]),
        bracket: b.bracket,
        detected: b.detected,
        prescan: b.prescan,
        bisection_steps: b.steps,
    })
}

/// Outcome of [`bisect`].
#[derive(Debug, Clone, PartialEq)]
pub struct Bisection {
    pub bracket: [f64; 2],
    pub detected: [bool; 2],
    pub prescan: Vec<(f64, bool)>,
    pub steps: usize,
}

/// Pre-scans `range` (which must carry a point count), requires exactly one
/// verdict flip, then halves the flipping interval until it is at most `tol` wide.
pub fn bisect(
    mut verdict: impl FnMut(f64) -> CliResult<bool>,
    range: &ParamRange,
    tol: f64,
) -> CliResult<Bisection> {
    let mut prescan = Vec::new();
    for p in range.values()? {
        prescan.push((p, verdict(p)?));
    }
    let flips: Vec<usize> = (1..prescan.len()).filter(|&i| prescan[i].1 != prescan[i - 1].1).collect();
    let i = match flips.as_slice() {
        [i] => *i,
        [] => {
            return Err(CliError::NoCrossing {
                lo: range.start,
                hi: range.stop,
            })
        }
        _ => {
            return Err(CliError::NonMonotone {
                lo: range.start,
                hi: range.stop,
                flips: flips.len(),
            })
        }
    };

    let (mut lo, v_lo) = prescan[i - 1];
    let (mut hi, v_hi) = prescan[i];
    let mut steps = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if verdict(mid)? == v_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    Ok(Bisection {
        bracket: [lo, hi],
        detected: [v_lo, v_hi],
        prescan,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn range(points: usize) -> ParamRange {
        ParamRange {
            start: 0.0,
            stop: 1.0,
            points: Some(points),
        }
    }

    #[test]
    fn brackets_a_single_crossing() {
        let b = bisect(|p| Ok(p > 0.3141), &range(11), 1e-9).unwrap();
        assert_eq!(b.detected, [false, true]);
        assert!(b.bracket[1] - b.bracket[0] <= 1e-9);
        assert!(b.bracket[0] <= 0.3141 && 0.3141 <= b.bracket[1]);
        let down = bisect(|p| Ok(p < 0.7), &range(11), 1e-9).unwrap();
        assert_eq!(down.detected, [true, false]);
    }

    #[test]
    fn rejects_non_monotone_and_constant_verdicts() {
        let wavy = bisect(|p| Ok((p - 0.5).abs() < 0.2), &range(21), 1e-6);
        assert!(matches!(wavy, Err(CliError::NonMonotone { flips: 2, .. })));
        assert!(matches!(bisect(|_| Ok(false), &range(5), 1e-6), Err(CliError::NoCrossing { .. })));
    }
}
