//! Real singular value decomposition built on the Hermitian eigensolver.

use super::eigen::eig_hermitian;
use super::matrix::RealMatrix;
use crate::error::{Error, Result};

/// T = U diag(sigma) V^T with square orthogonal U (m x m) and V (n x n).
#[derive(Debug, Clone)]
pub struct RealSvd {
    pub u: RealMatrix,
    /// min(m, n) values, nonnegative and descending.
    pub singular_values: Vec<f64>,
    pub v: RealMatrix,
}

impl RealSvd {
    pub fn reconstruct(&self) -> RealMatrix {
        let (m, n) = (self.u.rows(), self.v.rows());
        RealMatrix::from_fn(m, n, |i, j| {
            self.singular_values
                .iter()
                .enumerate()
                .map(|(k, s)| self.u[(i, k)] * s * self.v[(j, k)])
                .sum()
        })
    }

    pub fn nuclear_norm(&self) -> f64 {
        self.singular_values.iter().sum()
    }
}

/// Singular value decomposition of a real matrix.
///
/// V comes from the eigenvectors of T^T T; each singular value is then taken
/// as |T v_k| (not the square root of the eigenvalue, which loses half the
/// digits for small values) and u_k = T v_k / sigma_k. U is re-orthogonalized
/// and completed to a full basis by Gram-Schmidt.
pub fn svd_real(t: &RealMatrix) -> Result<RealSvd> {
    if let Some(i) = t.as_slice().iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    if t.rows() < t.cols() {
        let s = svd_real(&t.transpose())?;
        return Ok(RealSvd {
            u: s.v,
            singular_values: s.singular_values,
            v: s.u,
        });
    }
    let (m, n) = (t.rows(), t.cols());
    let gram = t.transpose().matmul(t);
    let eig = eig_hermitian(&gram.to_complex(), f64::INFINITY)?;

    let mut pairs: Vec<(f64, Vec<f64>, Vec<f64>)> = (0..n)
        .map(|k| {
            let v: Vec<f64> = (0..n).map(|i| eig.eigenvectors[(i, k)].re).collect();
            let tv = t.matvec(&v);
            let sigma = norm(&tv);
            (sigma, v, tv)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let scale = pairs.first().map_or(0.0, |p| p.0);
    let cutoff = scale * 1e-13;

    let mut u = RealMatrix::zeros(m, m);
    let mut v = RealMatrix::zeros(n, n);
    let mut singular_values = Vec::with_capacity(n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (k, (sigma, vk, tv)) in pairs.into_iter().enumerate() {
        v.set_column(k, &vk);
        singular_values.push(sigma);
        if sigma > cutoff && sigma > 0.0 {
            let uk: Vec<f64> = tv.iter().map(|x| x / sigma).collect();
            if let Some(uk) = orthonormalize(uk, &basis) {
                basis.push(uk);
                continue;
            }
        }
        basis.push(complete_one(&basis, m));
    }
    while basis.len() < m {
        let next = complete_one(&basis, m);
        basis.push(next);
    }
    for (k, col) in basis.iter().enumerate() {
        u.set_column(k, col);
    }
    Ok(RealSvd { u, singular_values, v })
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Two passes of modified Gram-Schmidt against `basis`; None if the vector collapses.
fn orthonormalize(mut x: Vec<f64>, basis: &[Vec<f64>]) -> Option<Vec<f64>> {
    let before = norm(&x);
    for _ in 0..2 {
        for b in basis {
            let dot: f64 = x.iter().zip(b).map(|(a, c)| a * c).sum();
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi -= dot * bi;
            }
        }
    }
    let after = norm(&x);
    if after <= 1e-8 * before.max(f64::MIN_POSITIVE) {
        return None;
    }
    Some(x.into_iter().map(|a| a / after).collect())
}

/// A unit vector orthogonal to `basis`, taken from the standard basis.
fn complete_one(basis: &[Vec<f64>], m: usize) -> Vec<f64> {
    // pick the standard vector with the smallest projection onto the span
    let mut order: Vec<(f64, usize)> = (0..m)
        .map(|i| (basis.iter().map(|b| b[i] * b[i]).sum::<f64>(), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    for &(_, i) in &order {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        if let Some(x) = orthonormalize(e, basis) {
            return x;
        }
    }
    unreachable!("basis of size {} cannot span R^{m}", basis.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check(t: &RealMatrix) -> RealSvd {
        let s = svd_real(t).unwrap();
        assert!(s.reconstruct().max_abs_diff(t) <= 1e-9, "{t:?}");
        assert!(s.u.orthogonality_violation() <= 1e-9);
        assert!(s.v.orthogonality_violation() <= 1e-9);
        assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        assert!(s.singular_values.iter().all(|&x| x >= 0.0));
        s
    }

    #[test]
    fn identity_has_unit_singular_values() {
        let s = check(&RealMatrix::identity(4));
        assert!(s.singular_values.iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn sign_is_absorbed() {
        let s = check(&RealMatrix::diag(&[3.0, -2.0]));
        assert!((s.singular_values[0] - 3.0).abs() < 1e-14);
        assert!((s.singular_values[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn random_square_and_rectangular() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (m, n) in [(9, 9), (4, 9), (9, 4), (16, 16), (1, 3)] {
            for _ in 0..10 {
                let t = RealMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0));
                check(&t);
            }
        }
    }

    #[test]
    fn rank_deficient_inputs() {
        let a = [1.0, -2.0, 0.5, 0.0];
        let b = [0.3, 0.0, 1.0, 2.0];
        let s = check(&RealMatrix::outer(&a, &b));
        let expected = norm(&a) * norm(&b);
        assert!((s.singular_values[0] - expected).abs() < 1e-12);
        assert!(s.singular_values[1..].iter().all(|&x| x < 1e-12));
        check(&RealMatrix::zeros(3, 3));
    }

    #[test]
    fn graded_singular_values() {
        // wide dynamic range: sqrt(eig(T^T T)) would lose these
        let t = RealMatrix::diag(&[1.0, 1e-4, 1e-7, 1e-11]);
        let s = check(&t);
        for (got, want) in s.singular_values.iter().zip([1.0, 1e-4, 1e-7, 1e-11]) {
            assert!((got - want).abs() <= 1e-15 + 1e-9 * want);
        }
    }
}
