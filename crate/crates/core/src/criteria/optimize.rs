//! Choice of LOO bases for the two basis-dependent criteria.
//!
//! Rotating canonical LOOs by real orthogonal matrices R_A, R_B turns both
//! criteria into `offset - Tr(R_A W R_B^T)` for a fixed real matrix W:
//!
//! * lur:  W = T - alpha beta^T, offset = 1 - (Tr rho_A^2 + Tr rho_B^2)/2
//! * skew: W = T - Q,            offset = 1 - (c_A + c_B)/2
//!
//! where T is the correlation matrix, alpha/beta the local Bloch vectors,
//! Q[l][m] = Tr(S (G_l ⊗ I) S (I ⊗ G_m)) with S = rho^1/2, and
//! c_A = sum_l Tr(S (G_l ⊗ I) S (G_l ⊗ I)) (similarly c_B), which does not
//! depend on the rotation. The hill climber works on this reduced form; the
//! final report is always re-evaluated literally on the rotated bases.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::separability::{lur_ccn_value, skew_ccn_with_sqrt};
use super::{BasisStrategy, Criterion, CriterionReport};
use crate::error::{Error, Result};
use crate::linalg::{kron, partial_trace, svd_real, ComplexMatrix, RealMatrix, Side};
use crate::loo::{canonical_loo, correlation_matrix, random_orthogonal_with, rotate_unchecked, LooBasis};
use crate::rng::{gaussian, stream_rng};
use crate::state::{DensityMatrix, Tolerances};

/// Hill-climbing budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeConfig {
    /// Random restarts in addition to the climb started from the Schmidt bases.
    pub restarts: usize,
    pub steps: usize,
    /// Standard deviation of the first Givens angle, in radians.
    pub initial_step: f64,
    pub decay: f64,
    pub seed: u64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            steps: 200,
            initial_step: 0.3,
            decay: 0.99,
            seed: 0,
        }
    }
}

impl OptimizeConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// Reduced form `offset - Tr(R_A W R_B^T)` of the lur or skew criterion.
#[derive(Debug, Clone)]
pub struct CriterionModel {
    criterion: Criterion,
    offset: f64,
    w: RealMatrix,
    correlation: RealMatrix,
}

impl CriterionModel {
    /// `sqrt` must be rho^1/2; it is only used for the skew criterion.
    pub fn build(rho: &DensityMatrix, sqrt: &ComplexMatrix, criterion: Criterion, canon: &LooBasis) -> Result<Self> {
        let d = rho.da();
        if rho.db() != d || canon.dim() != d {
            return Err(Error::DimensionMismatch(format!(
                "basis optimization requires dA = dB; got {}x{}",
                rho.da(),
                rho.db()
            )));
        }
        let t = correlation_matrix(rho, canon, canon, f64::INFINITY)?;
        let (offset, w) = match criterion {
            Criterion::Lur => {
                let alpha = canon.coefficients(rho.reduced(Side::A).matrix());
                let beta = canon.coefficients(rho.reduced(Side::B).matrix());
                let norm2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
                let offset = 1.0 - 0.5 * (norm2(&alpha) + norm2(&beta));
                (offset, t.sub(&RealMatrix::outer(&alpha, &beta)))
            }
            Criterion::Skew => {
                let id = ComplexMatrix::identity(d);
                let sandwich = |m: &ComplexMatrix| sqrt.matmul(m).matmul(sqrt);
                let n = canon.len();
                let mut q = RealMatrix::zeros(n, n);
                let mut c_a = 0.0;
                let mut c_b = 0.0;
                for (m, gm) in canon.observables().iter().enumerate() {
                    // Tr((G ⊗ I) Y) = Tr(G Tr_B Y)
                    let y = sandwich(&kron(&id, gm));
                    let y_a = partial_trace(&y, d, d, Side::A)?;
                    for (l, gl) in canon.observables().iter().enumerate() {
                        q[(l, m)] = y_a.trace_product(gl).re;
                    }
                    let y_b = partial_trace(&y, d, d, Side::B)?;
                    c_b += y_b.trace_product(gm).re;
                    let x = sandwich(&kron(gm, &id));
                    let x_a = partial_trace(&x, d, d, Side::A)?;
                    c_a += x_a.trace_product(gm).re;
                }
                (1.0 - 0.5 * (c_a + c_b), t.sub(&q))
            }
            other => {
                return Err(Error::Range(format!("criterion {other} has no basis to optimize")));
            }
        };
        Ok(Self {
            criterion,
            offset,
            w,
            correlation: t,
        })
    }

    pub fn criterion(&self) -> Criterion {
        self.criterion
    }

    /// Criterion value for bases R_A G and R_B G.
    pub fn value(&self, r_a: &RealMatrix, r_b: &RealMatrix) -> f64 {
        self.offset - r_a.matmul(&self.w).trace_product(&r_b.transpose())
    }

    /// +1 when a larger Tr(R_A W R_B^T) means a stronger violation.
    fn sense(&self) -> f64 {
        match self.criterion {
            Criterion::Lur => 1.0,
            _ => -1.0,
        }
    }

    /// Most violating value over all pairs of LOO bases: the extremum of
    /// Tr(R_A W R_B^T) over the orthogonal group is +-(sum of singular values of W).
    pub fn closed_form_extreme(&self) -> Result<f64> {
        let nuclear = svd_real(&self.w)?.nuclear_norm();
        Ok(self.offset - self.sense() * nuclear)
    }

    /// Rotations giving the Schmidt bases. For the skew criterion Bob's basis
    /// is negated, so that sum_k <G^A_k ⊗ G^B_k> = -sum_k lambda_k.
    pub fn schmidt_start(&self) -> Result<(RealMatrix, RealMatrix)> {
        let svd = svd_real(&self.correlation)?;
        let r_b = svd.v.transpose();
        let r_b = match self.criterion {
            Criterion::Skew => r_b.scale(-1.0),
            _ => r_b,
        };
        Ok((svd.u.transpose(), r_b))
    }
}

/// Bases found by [`optimize_basis`] together with their literal report.
#[derive(Debug, Clone)]
pub struct OptimizedBases {
    pub basis_a: LooBasis,
    pub basis_b: LooBasis,
    pub report: CriterionReport,
}

/// Bases and report for one evaluation under a given strategy.
#[derive(Debug, Clone)]
pub struct StrategyReport {
    pub strategy: BasisStrategy,
    pub basis_a: LooBasis,
    pub basis_b: LooBasis,
    pub report: CriterionReport,
}

struct Climber {
    sense: f64,
    r_a: RealMatrix,
    r_b: RealMatrix,
    /// row k = W r_b[k]
    z: RealMatrix,
}

impl Climber {
    fn new(model: &CriterionModel, r_a: RealMatrix, r_b: RealMatrix) -> Self {
        let z = r_b.matmul(&model.w.transpose());
        Self {
            sense: model.sense(),
            r_a,
            r_b,
            z,
        }
    }

    fn row_term(&self, k: usize) -> f64 {
        let n = self.r_a.cols();
        (0..n).map(|j| self.r_a[(k, j)] * self.z[(k, j)]).sum()
    }

    fn score(&self) -> f64 {
        self.sense * (0..self.r_a.rows()).map(|k| self.row_term(k)).sum::<f64>()
    }

    /// Tries one Givens rotation of rows p, q on one side; keeps it if the
    /// violation strictly increases.
    fn try_step(&mut self, side_a: bool, p: usize, q: usize, angle: f64) {
        let before = self.row_term(p) + self.row_term(q);
        if side_a {
            self.r_a.rotate_rows(p, q, angle);
        } else {
            self.r_b.rotate_rows(p, q, angle);
            self.z.rotate_rows(p, q, angle);
        }
        let after = self.row_term(p) + self.row_term(q);
        if self.sense * (after - before) <= 0.0 {
            if side_a {
                self.r_a.rotate_rows(p, q, -angle);
            } else {
                self.r_b.rotate_rows(p, q, -angle);
                self.z.rotate_rows(p, q, -angle);
            }
        }
    }
}

/// Random-restart hill climbing over local orthogonal rotations of the LOO
/// bases, maximizing the violation of the lur or skew inequality.
///
/// The first climb starts at the Schmidt bases, so the result is never worse
/// than [`BasisStrategy::Schmidt`]; with zero restarts and steps it is exactly
/// that evaluation. Deterministic for a fixed `cfg.seed`.
pub fn optimize_basis(
    rho: &DensityMatrix,
    criterion: Criterion,
    cfg: &OptimizeConfig,
    tol: &Tolerances,
) -> Result<OptimizedBases> {
    let canon = canonical_loo(rho.da())?;
    let sqrt = rho.sqrt(tol.negativity)?;
    let model = CriterionModel::build(rho, &sqrt, criterion, &canon)?;
    let n = canon.len();
    let mut rng = stream_rng(cfg.seed, 0);

    let (r_a0, r_b0) = model.schmidt_start()?;
    let mut best: Option<Climber> = None;
    for restart in 0..=cfg.restarts {
        let mut climber = if restart == 0 {
            Climber::new(&model, r_a0.clone(), r_b0.clone())
        } else {
            let r_a = random_orthogonal_with(n, &mut rng);
            let r_b = random_orthogonal_with(n, &mut rng);
            Climber::new(&model, r_a, r_b)
        };
        let mut step = cfg.initial_step;
        for _ in 0..cfg.steps {
            let side_a = rng.gen_bool(0.5);
            let p = rng.gen_range(0..n);
            let mut q = rng.gen_range(0..n - 1);
            if q >= p {
                q += 1;
            }
            let angle = step * gaussian(&mut rng);
            climber.try_step(side_a, p, q, angle);
            step *= cfg.decay;
        }
        if best.as_ref().is_none_or(|b| climber.score() > b.score()) {
            best = Some(climber);
        }
    }
    let best = best.expect("at least one climb");

    let basis_a = rotate_unchecked(&canon, &best.r_a);
    let basis_b = rotate_unchecked(&canon, &best.r_b);
    let report = literal_report(rho, &sqrt, criterion, &basis_a, &basis_b, tol)?
        .with("basis", BasisStrategy::Optimized.name())
        .with("model_value", model.value(&best.r_a, &best.r_b))
        .with("closed_form_extreme", model.closed_form_extreme()?)
        .with("restarts", cfg.restarts as f64)
        .with("steps", cfg.steps as f64);
    Ok(OptimizedBases {
        basis_a,
        basis_b,
        report,
    })
}

fn literal_report(
    rho: &DensityMatrix,
    sqrt: &ComplexMatrix,
    criterion: Criterion,
    basis_a: &LooBasis,
    basis_b: &LooBasis,
    tol: &Tolerances,
) -> Result<CriterionReport> {
    match criterion {
        Criterion::Lur => lur_ccn_value(rho, basis_a, basis_b, tol),
        Criterion::Skew => skew_ccn_with_sqrt(rho, sqrt, basis_a, basis_b, tol),
        other => Err(Error::Range(format!("criterion {other} takes no LOO bases"))),
    }
}

/// Evaluates `criterion` (lur or skew) with bases chosen by `strategy`.
pub fn evaluate_strategy(
    rho: &DensityMatrix,
    criterion: Criterion,
    strategy: BasisStrategy,
    cfg: &OptimizeConfig,
    tol: &Tolerances,
) -> Result<StrategyReport> {
    if !criterion.uses_basis() {
        return Err(Error::Range(format!("criterion {criterion} takes no LOO bases")));
    }
    let (basis_a, basis_b, report) = match strategy {
        BasisStrategy::Canonical => {
            let canon = canonical_loo(rho.da())?;
            let sqrt = rho.sqrt(tol.negativity)?;
            let report = literal_report(rho, &sqrt, criterion, &canon, &canon, tol)?
                .with("basis", BasisStrategy::Canonical.name());
            (canon.clone(), canon, report)
        }
        BasisStrategy::Schmidt => {
            let canon = canonical_loo(rho.da())?;
            let sqrt = rho.sqrt(tol.negativity)?;
            let model = CriterionModel::build(rho, &sqrt, criterion, &canon)?;
            let (r_a, r_b) = model.schmidt_start()?;
            let basis_a = rotate_unchecked(&canon, &r_a);
            let basis_b = rotate_unchecked(&canon, &r_b);
            let bob_sign = if criterion == Criterion::Skew { -1.0 } else { 1.0 };
            let report = literal_report(rho, &sqrt, criterion, &basis_a, &basis_b, tol)?
                .with("basis", BasisStrategy::Schmidt.name())
                .with("bob_sign", bob_sign);
            (basis_a, basis_b, report)
        }
        BasisStrategy::Optimized => {
            let o = optimize_basis(rho, criterion, cfg, tol)?;
            (o.basis_a, o.basis_b, o.report)
        }
    };
    Ok(StrategyReport {
        strategy,
        basis_a,
        basis_b,
        report,
    })
}
