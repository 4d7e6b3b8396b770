use serde::Serialize;

use super::{Criterion, CriterionReport, Direction};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::loo::LooBasis;
use crate::state::{DensityMatrix, MixtureSpec, Observable, Tolerances};

/// Values in `[-CLAMP, 0)` are roundoff and reported as zero.
const CLAMP: f64 = 1e-10;

fn clamp_small_negative(x: f64) -> f64 {
    if (-CLAMP..0.0).contains(&x) {
        0.0
    } else {
        x
    }
}

fn check_dims(rho: &DensityMatrix, m: &ComplexMatrix) -> Result<()> {
    if m.rows() != rho.dim() || m.cols() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} observable on a state of dimension {}",
            m.rows(),
            m.cols(),
            rho.dim()
        )));
    }
    Ok(())
}

/// <M^2> - <M>^2.
pub fn variance(rho: &DensityMatrix, m: &Observable) -> Result<f64> {
    let m = m.matrix();
    check_dims(rho, m)?;
    let mean = rho.expect(m);
    let second = rho.matrix().trace_product(&m.matmul(m)).re;
    Ok(clamp_small_negative(second - mean * mean))
}

/// Wigner-Yanase skew information Tr(rho M^2) - Tr(rho^1/2 M rho^1/2 M).
pub fn skew_information(rho: &DensityMatrix, m: &Observable) -> Result<f64> {
    check_dims(rho, m.matrix())?;
    let sqrt = rho.sqrt(Tolerances::default().negativity)?;
    skew_information_with_sqrt(rho, &sqrt, m.matrix())
}

/// Skew information for a caller-supplied rho^1/2.
pub fn skew_information_with_sqrt(rho: &DensityMatrix, sqrt: &ComplexMatrix, m: &ComplexMatrix) -> Result<f64> {
    check_dims(rho, m)?;
    let second = rho.matrix().trace_product(&m.matmul(m));
    let sm = sqrt.matmul(m);
    let overlap = sm.trace_product(&sm);
    let value = second - overlap;
    let scale = m.max_abs().powi(2).max(1.0);
    if value.im.abs() > 1e-10 * scale {
        return Err(Error::Internal(format!("skew information has imaginary part {:e}", value.im)));
    }
    Ok(clamp_small_negative(value.re))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MixtureKind {
    Variance,
    Skew,
}

/// Both sides of the mixing inequality for a list of observables.
#[derive(Debug, Clone, Serialize)]
pub struct MixtureBounds {
    pub kind: MixtureKind,
    /// Functional summed over observables, evaluated on the mixed state.
    pub lhs: f64,
    /// Weighted average of the same sum over the components.
    pub rhs: f64,
}

impl MixtureBounds {
    /// Amount by which the expected inequality fails (<= 0 when it holds):
    /// variance is concave under mixing (lhs >= rhs), skew information convex
    /// (lhs <= rhs).
    pub fn violation(&self) -> f64 {
        match self.kind {
            MixtureKind::Variance => self.rhs - self.lhs,
            MixtureKind::Skew => self.lhs - self.rhs,
        }
    }

    pub fn holds(&self, slack: f64) -> bool {
        self.violation() <= slack
    }
}

pub fn mixture_bounds(mix: &MixtureSpec, observables: &[Observable], kind: MixtureKind) -> Result<MixtureBounds> {
    let functional = |rho: &DensityMatrix| -> Result<f64> {
        match kind {
            MixtureKind::Variance => observables.iter().map(|m| variance(rho, m)).sum(),
            MixtureKind::Skew => {
                let sqrt = rho.sqrt(Tolerances::default().negativity)?;
                observables
                    .iter()
                    .map(|m| skew_information_with_sqrt(rho, &sqrt, m.matrix()))
                    .sum()
            }
        }
    };
    let lhs = functional(&mix.mixed_state())?;
    let mut rhs = 0.0;
    for (p, c) in mix.weights().iter().zip(mix.components()) {
        rhs += p * functional(c)?;
    }
    Ok(MixtureBounds { kind, lhs, rhs })
}

fn joint_observables(rho: &DensityMatrix, a_obs: &[ComplexMatrix], b_obs: &[ComplexMatrix], sign: f64) -> Result<Vec<ComplexMatrix>> {
    if a_obs.len() != b_obs.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} observables for Alice but {} for Bob",
            a_obs.len(),
            b_obs.len()
        )));
    }
    if a_obs.iter().any(|a| a.rows() != rho.da() || a.cols() != rho.da())
        || b_obs.iter().any(|b| b.rows() != rho.db() || b.cols() != rho.db())
    {
        return Err(Error::DimensionMismatch("local observable does not match local dimension".into()));
    }
    let ia = ComplexMatrix::identity(rho.da());
    let ib = ComplexMatrix::identity(rho.db());
    Ok(a_obs
        .iter()
        .zip(b_obs)
        .map(|(a, b)| &crate::linalg::kron(a, &ib) + &crate::linalg::kron(&ia, b).scale(sign))
        .collect())
}

/// sum_i I(rho, A_i ⊗ I + sign · I ⊗ B_i) for sign = +1 or -1.
pub fn theorem1_sum(rho: &DensityMatrix, a_obs: &[ComplexMatrix], b_obs: &[ComplexMatrix], sign: f64) -> Result<f64> {
    let joint = joint_observables(rho, a_obs, b_obs, sign)?;
    let sqrt = rho.sqrt(Tolerances::default().negativity)?;
    joint.iter().map(|m| skew_information_with_sqrt(rho, &sqrt, m)).sum()
}

/// Separable states satisfy sum_i I(rho, M_i) <= C_A + C_B whenever the local
/// sums are bounded by C_A and C_B on every local state.
pub fn theorem1_bound_report(
    rho: &DensityMatrix,
    a_obs: &[ComplexMatrix],
    b_obs: &[ComplexMatrix],
    sign: f64,
    bounds: (f64, f64),
    margin: f64,
) -> Result<CriterionReport> {
    let value = theorem1_sum(rho, a_obs, b_obs, sign)?;
    Ok(
        CriterionReport::new(Criterion::Theorem1, value, bounds.0 + bounds.1, Direction::DetectIfGreater, margin)
            .with("c_a", bounds.0)
            .with("c_b", bounds.1),
    )
}

/// sum_k I(rho, G_k) over a LOO basis of a single system.
pub fn skew_loo_sum(rho: &DensityMatrix, basis: &LooBasis) -> Result<f64> {
    if rho.is_bipartite() || rho.dim() != basis.dim() {
        return Err(Error::DimensionMismatch(format!(
            "basis of dimension {} for a {}x{} state",
            basis.dim(),
            rho.da(),
            rho.db()
        )));
    }
    let sqrt = rho.sqrt(Tolerances::default().negativity)?;
    basis
        .observables()
        .iter()
        .map(|g| skew_information_with_sqrt(rho, &sqrt, g))
        .sum()
}

/// d - (Tr rho^1/2)^2 from the spectrum; the basis-independent value of
/// [`skew_loo_sum`].
pub fn skew_loo_closed_form(rho: &DensityMatrix) -> f64 {
    let ev = rho.eigen().eigenvalues;
    let floor = crate::linalg::resolution_floor(&ev);
    let root_trace: f64 = ev.iter().filter(|&&l| l > floor).map(|l| l.sqrt()).sum();
    rho.dim() as f64 - root_trace * root_trace
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use crate::loo::canonical_loo;
    use crate::rng::{ginibre, stream_rng};
    use num_complex::Complex64;

    fn pauli(k: usize) -> Observable {
        let z = |r: f64, i: f64| Complex64::new(r, i);
        let m = match k {
            1 => [z(0.0, 0.0), z(1.0, 0.0), z(1.0, 0.0), z(0.0, 0.0)],
            2 => [z(0.0, 0.0), z(0.0, -1.0), z(0.0, 1.0), z(0.0, 0.0)],
            _ => [z(1.0, 0.0), z(0.0, 0.0), z(0.0, 0.0), z(-1.0, 0.0)],
        };
        Observable::new(ComplexMatrix::from_vec(2, 2, m.to_vec()).unwrap()).unwrap()
    }

    fn random_state(d: usize, rank: usize, seed: u64) -> DensityMatrix {
        let g = ginibre(d, rank, &mut stream_rng(seed, 0));
        DensityMatrix::from_unnormalized(g.matmul(&g.adjoint()), d, 1).unwrap()
    }

    fn random_observable(d: usize, seed: u64) -> Observable {
        let g = ginibre(d, d, &mut stream_rng(seed, 1));
        Observable::new((&g + &g.adjoint()).scale(0.5)).unwrap()
    }

    #[test]
    fn variance_of_eigenstate_and_mixed() {
        let up = DensityMatrix::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], 2, 1).unwrap();
        assert_eq!(variance(&up, &pauli(3)).unwrap(), 0.0);
        let mixed = DensityMatrix::maximally_mixed(2, 1);
        assert!((variance(&mixed, &pauli(3)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn variance_matches_direct_products() {
        for seed in 0..20 {
            let rho = random_state(3, 3, seed);
            let m = random_observable(3, seed);
            let r = rho.matrix();
            let mm = m.matrix();
            let direct = r.matmul(mm).matmul(mm).trace().re - r.matmul(mm).trace().re.powi(2);
            assert!((variance(&rho, &m).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn skew_information_special_cases() {
        for seed in 0..20 {
            let pure = random_state(3, 1, seed);
            let m = random_observable(3, seed);
            let diff = skew_information(&pure, &m).unwrap() - variance(&pure, &m).unwrap();
            assert!(diff.abs() < 1e-9);
        }
        let mixed = DensityMatrix::maximally_mixed(3, 1);
        assert!(skew_information(&mixed, &random_observable(3, 5)).unwrap().abs() < 1e-14);

        // commuting: diagonal state with diagonal observable
        let rho = DensityMatrix::single(ComplexMatrix::diag_real(&[0.5, 0.3, 0.2])).unwrap();
        let m = Observable::new(ComplexMatrix::diag_real(&[1.0, -2.0, 0.7])).unwrap();
        assert!(skew_information(&rho, &m).unwrap().abs() < 1e-14);
    }

    #[test]
    fn dimension_errors() {
        let rho = DensityMatrix::maximally_mixed(3, 1);
        assert!(matches!(variance(&rho, &pauli(1)), Err(Error::DimensionMismatch(_))));
        assert!(matches!(skew_information(&rho, &pauli(1)), Err(Error::DimensionMismatch(_))));
        let b = canonical_loo(2).unwrap();
        assert!(matches!(skew_loo_sum(&rho, &b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn single_component_mixture_is_tight() {
        let rho = random_state(2, 2, 9);
        let mix = MixtureSpec::new(vec![1.0], vec![rho]).unwrap();
        let obs = [pauli(1), pauli(2), pauli(3)];
        for kind in [MixtureKind::Variance, MixtureKind::Skew] {
            let b = mixture_bounds(&mix, &obs, kind).unwrap();
            assert!((b.lhs - b.rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenstate_mixture_variance() {
        let up = DensityMatrix::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], 2, 1).unwrap();
        let down = DensityMatrix::pure(&[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)], 2, 1).unwrap();
        let mix = MixtureSpec::new(vec![0.5, 0.5], vec![up, down]).unwrap();
        let b = mixture_bounds(&mix, &[pauli(3)], MixtureKind::Variance).unwrap();
        assert!((b.lhs - 1.0).abs() < 1e-15);
        assert_eq!(b.rhs, 0.0);
        assert!(b.holds(0.0));
    }

    #[test]
    fn joint_sum_on_product_state_is_additive() {
        let ra = random_state(2, 2, 1);
        let rb = random_state(2, 2, 2);
        let rho = DensityMatrix::product(&ra, &rb);
        let a: Vec<ComplexMatrix> = (1..=3).map(|k| pauli(k).matrix().clone()).collect();
        let b: Vec<ComplexMatrix> = (0..3).map(|k| random_observable(2, 10 + k).matrix().clone()).collect();
        let joint = theorem1_sum(&rho, &a, &b, 1.0).unwrap();
        let mut local = 0.0;
        for (ai, bi) in a.iter().zip(&b) {
            local += skew_information(&ra, &Observable::new(ai.clone()).unwrap()).unwrap();
            local += skew_information(&rb, &Observable::new(bi.clone()).unwrap()).unwrap();
        }
        assert!((joint - local).abs() < 1e-9);
        let mixed = DensityMatrix::maximally_mixed(2, 2);
        assert!(theorem1_sum(&mixed, &a, &b, 1.0).unwrap().abs() < 1e-14);
        assert!(theorem1_sum(&mixed, &a, &b[..2], 1.0).is_err());
    }

    #[test]
    fn joint_sum_bound_holds_on_separable_mixture() {
        let g = canonical_loo(2).unwrap();
        let obs = g.observables().to_vec();
        let mut m = ComplexMatrix::zeros(4, 4);
        for k in 0..3u64 {
            let p = DensityMatrix::product(&random_state(2, 1, 30 + k), &random_state(2, 1, 40 + k));
            m = &m + &p.matrix().scale(1.0 / 3.0);
        }
        let rho = DensityMatrix::new(m, 2, 2).unwrap();
        let r = theorem1_bound_report(&rho, &obs, &obs, 1.0, (1.0, 1.0), 1e-7).unwrap();
        assert!(r.value <= 2.0 + 1e-9);
        assert!(!r.detected);
    }

    #[test]
    fn loo_sum_closed_form() {
        let b = canonical_loo(2).unwrap();
        let pure = random_state(2, 1, 4);
        assert!((skew_loo_sum(&pure, &b).unwrap() - 1.0).abs() < 1e-9);
        for d in 2..=4 {
            let b = canonical_loo(d).unwrap();
            let mixed = DensityMatrix::maximally_mixed(d, 1);
            assert!(skew_loo_sum(&mixed, &b).unwrap().abs() < 1e-12);
        }
        let rho = random_state(3, 3, 8);
        let b = canonical_loo(3).unwrap();
        let ev = rho.eigen().eigenvalues;
        let oracle = 3.0 - ev.iter().map(|l| l.max(0.0).sqrt()).sum::<f64>().powi(2);
        assert!((skew_loo_sum(&rho, &b).unwrap() - oracle).abs() < 1e-8);
    }

    #[test]
    fn local_sum_matches_kron() {
        let a = pauli(1);
        let b = pauli(3);
        let m = Observable::local_sum(&a, &b, -1.0);
        let i = ComplexMatrix::identity(2);
        let expected = &kron(a.matrix(), &i) - &kron(&i, b.matrix());
        assert_eq!(m.matrix(), &expected);
    }
}
