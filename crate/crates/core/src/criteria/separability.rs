use super::information::theorem1_sum;
use super::{Criterion, CriterionReport, Direction};
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, kron, partial_transpose, ComplexMatrix, Side};
use crate::loo::{schmidt_loos, LooBasis};
use crate::state::{DensityMatrix, Tolerances};

fn check_equal_dims(rho: &DensityMatrix, basis_a: &LooBasis, basis_b: &LooBasis) -> Result<usize> {
    let d = rho.da();
    if rho.db() != d || basis_a.dim() != d || basis_b.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "requires dA = dB = basis dimension; got state {}x{} with bases {} and {}",
            rho.da(),
            rho.db(),
            basis_a.dim(),
            basis_b.dim()
        )));
    }
    Ok(d)
}

/// Per-k ingredients shared by both Schmidt-type inequalities.
struct JointTerms {
    /// sum_k <G^A_k ⊗ G^B_k>
    correlation_sum: f64,
    /// M_k = G^A_k ⊗ I - I ⊗ G^B_k
    joint: Vec<ComplexMatrix>,
}

fn joint_terms(rho: &DensityMatrix, basis_a: &LooBasis, basis_b: &LooBasis) -> JointTerms {
    let d = rho.da();
    let id = ComplexMatrix::identity(d);
    let mut correlation_sum = 0.0;
    let mut joint = Vec::with_capacity(basis_a.len());
    for (ga, gb) in basis_a.observables().iter().zip(basis_b.observables()) {
        correlation_sum += rho.expect(&kron(ga, gb));
        joint.push(&kron(ga, &id) - &kron(&id, gb));
    }
    JointTerms {
        correlation_sum,
        joint,
    }
}

/// 1 - sum_k <G^A_k ⊗ G^B_k> - 1/2 sum_k <G^A_k ⊗ I - I ⊗ G^B_k>^2.
///
/// Nonnegative for every separable state and every pair of LOO bases.
pub fn lur_ccn_value(
    rho: &DensityMatrix,
    basis_a: &LooBasis,
    basis_b: &LooBasis,
    tol: &Tolerances,
) -> Result<CriterionReport> {
    check_equal_dims(rho, basis_a, basis_b)?;
    let terms = joint_terms(rho, basis_a, basis_b);
    let mean_square: f64 = terms.joint.iter().map(|m| rho.expect(m).powi(2)).sum();
    let value = 1.0 - terms.correlation_sum - 0.5 * mean_square;
    Ok(
        CriterionReport::new(Criterion::Lur, value, 0.0, Direction::DetectIfLess, tol.margin)
            .with("correlation_sum", terms.correlation_sum)
            .with("mean_square_sum", mean_square),
    )
}

/// 1 - sum_k <G^A_k ⊗ G^B_k> - 1/2 sum_k Tr(rho^1/2 M_k rho^1/2 M_k) with
/// M_k = G^A_k ⊗ I - I ⊗ G^B_k.
///
/// Nonpositive for every separable state. The value is computed literally
/// and, independently, as (sum_k I(rho, M_k) - (2d - 2)) / 2; the two routes
/// must agree to `tol.double_entry`.
pub fn skew_ccn_value(
    rho: &DensityMatrix,
    basis_a: &LooBasis,
    basis_b: &LooBasis,
    tol: &Tolerances,
) -> Result<CriterionReport> {
    let sqrt = rho.sqrt(tol.negativity)?;
    skew_ccn_with_sqrt(rho, &sqrt, basis_a, basis_b, tol)
}

pub(crate) fn skew_ccn_with_sqrt(
    rho: &DensityMatrix,
    sqrt: &ComplexMatrix,
    basis_a: &LooBasis,
    basis_b: &LooBasis,
    tol: &Tolerances,
) -> Result<CriterionReport> {
    let d = check_equal_dims(rho, basis_a, basis_b)?;
    let terms = joint_terms(rho, basis_a, basis_b);
    let mut overlap = 0.0;
    for m in &terms.joint {
        let sm = sqrt.matmul(m);
        overlap += sm.trace_product(&sm).re;
    }
    let value = 1.0 - terms.correlation_sum - 0.5 * overlap;

    let skew_sum = theorem1_sum(rho, basis_a.observables(), basis_b.observables(), -1.0)?;
    let bound = 2.0 * d as f64 - 2.0;
    let residual = (2.0 * value - (skew_sum - bound)).abs();
    if residual > tol.double_entry {
        return Err(Error::Internal(format!(
            "skew criterion routes disagree: 2*value = {:.12}, sum I - (2d-2) = {:.12}",
            2.0 * value,
            skew_sum - bound
        )));
    }
    Ok(
        CriterionReport::new(Criterion::Skew, value, 0.0, Direction::DetectIfGreater, tol.margin)
            .with("correlation_sum", terms.correlation_sum)
            .with("overlap_sum", overlap)
            .with("skew_information_sum", skew_sum)
            .with("separable_bound", bound)
            .with("double_entry_residual", residual),
    )
}

/// Realignment / computable cross norm: sum of operator-Schmidt coefficients,
/// at most 1 for separable states.
pub fn ccn_value(rho: &DensityMatrix, tol: &Tolerances) -> Result<CriterionReport> {
    if !rho.is_bipartite() && rho.da() < 2 {
        return Err(Error::DimensionMismatch("realignment needs a bipartite state".into()));
    }
    let schmidt = schmidt_loos(rho)?;
    Ok(
        CriterionReport::new(Criterion::Ccn, schmidt.lambda_sum(), 1.0, Direction::DetectIfGreater, tol.margin)
            .with("lambdas", schmidt.lambdas),
    )
}

/// Smallest eigenvalue of the partial transpose. Exact separability test
/// when dA * dB <= 6.
pub fn ppt_report(rho: &DensityMatrix, tol: &Tolerances) -> Result<CriterionReport> {
    if !rho.is_bipartite() {
        return Err(Error::DimensionMismatch("partial transpose needs a bipartite state".into()));
    }
    let pt = partial_transpose(rho.matrix(), rho.da(), rho.db(), Side::B)?;
    let eig = eig_hermitian(&pt, tol.hermiticity.max(1e-9))?;
    let min = eig.eigenvalues[0];
    Ok(
        CriterionReport::new(Criterion::Ppt, min, 0.0, Direction::DetectIfLess, tol.margin)
            .with("exact-separability-oracle", rho.dim() <= 6),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loo::canonical_loo;
    use num_complex::Complex64;

    fn phi_plus(d: usize) -> DensityMatrix {
        let mut psi = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            psi[i * d + i] = Complex64::new(1.0, 0.0);
        }
        DensityMatrix::pure(&psi, d, d).unwrap()
    }

    #[test]
    fn maximally_mixed_is_not_detected() {
        let tol = Tolerances::default();
        for d in [2, 3] {
            let rho = DensityMatrix::maximally_mixed(d, d);
            let b = canonical_loo(d).unwrap();
            let lur = lur_ccn_value(&rho, &b, &b, &tol).unwrap();
            // only the identity term survives: 1 - 1/d
            assert!((lur.value - (1.0 - 1.0 / d as f64)).abs() < 1e-12);
            assert!(!lur.detected);
            let skew = skew_ccn_value(&rho, &b, &b, &tol).unwrap();
            assert!(skew.value <= 0.0);
            assert!(!skew.detected);
            let ccn = ccn_value(&rho, &tol).unwrap();
            assert!((ccn.value - 1.0 / d as f64).abs() < 1e-12);
            assert!(!ccn.detected);
        }
    }

    #[test]
    fn bell_state_ccn_and_ppt() {
        let tol = Tolerances::default();
        for d in [2, 3] {
            let ccn = ccn_value(&phi_plus(d), &tol).unwrap();
            assert!((ccn.value - d as f64).abs() < 1e-9);
            assert!(ccn.detected);
        }
        let ppt = ppt_report(&phi_plus(2), &tol).unwrap();
        assert!((ppt.value + 0.5).abs() < 1e-12);
        assert!(ppt.detected);
        assert_eq!(ppt.detail["exact-separability-oracle"], true.into());
        let ppt3 = ppt_report(&phi_plus(3), &tol).unwrap();
        assert_eq!(ppt3.detail["exact-separability-oracle"], false.into());
    }

    #[test]
    fn unequal_dimensions_rejected() {
        let rho = DensityMatrix::maximally_mixed(2, 3);
        let a = canonical_loo(2).unwrap();
        let b = canonical_loo(3).unwrap();
        let tol = Tolerances::default();
        assert!(matches!(lur_ccn_value(&rho, &a, &b, &tol), Err(Error::DimensionMismatch(_))));
        assert!(matches!(skew_ccn_value(&rho, &a, &b, &tol), Err(Error::DimensionMismatch(_))));
        // realignment and PPT are fine with unequal dimensions
        assert!(!ccn_value(&rho, &tol).unwrap().detected);
        assert!(!ppt_report(&rho, &tol).unwrap().detected);
    }
}
