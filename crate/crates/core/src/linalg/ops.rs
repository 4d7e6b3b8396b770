//! Tensor-product structure: Kronecker products, partial trace and partial transpose.

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Which tensor factor of a bipartite space an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Side {
    A,
    B,
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

fn check_bipartite(rho: &ComplexMatrix, da: usize, db: usize) -> Result<()> {
    let n = da * db;
    if rho.rows() != n || rho.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix on a {da}x{db} bipartite space",
            rho.rows(),
            rho.cols()
        )));
    }
    Ok(())
}

/// Traces out one factor, keeping `keep`.
pub fn partial_trace(rho: &ComplexMatrix, da: usize, db: usize, keep: Side) -> Result<ComplexMatrix> {
    check_bipartite(rho, da, db)?;
    let out = match keep {
        Side::A => ComplexMatrix::from_fn(da, da, |i, j| {
            (0..db).fold(ZERO, |acc, k| acc + rho[(i * db + k, j * db + k)])
        }),
        Side::B => ComplexMatrix::from_fn(db, db, |i, j| {
            (0..da).fold(ZERO, |acc, k| acc + rho[(k * db + i, k * db + j)])
        }),
    };
    Ok(out)
}

/// Transposes the chosen tensor factor.
pub fn partial_transpose(rho: &ComplexMatrix, da: usize, db: usize, side: Side) -> Result<ComplexMatrix> {
    check_bipartite(rho, da, db)?;
    let n = da * db;
    Ok(ComplexMatrix::from_fn(n, n, |r, c| {
        let (i, k) = (r / db, r % db);
        let (j, l) = (c / db, c % db);
        match side {
            Side::A => rho[(j * db + k, i * db + l)],
            Side::B => rho[(i * db + l, j * db + k)],
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigen::eig_hermitian;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_identities_and_diagonals() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let k = kron(&ComplexMatrix::diag_real(&[1.0, 2.0]), &ComplexMatrix::diag_real(&[3.0, 4.0]));
        assert_eq!(k, ComplexMatrix::diag_real(&[3.0, 4.0, 6.0, 8.0]));
    }

    #[test]
    fn kron_sigma_x_sigma_z_by_hand() {
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let z = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        #[rustfmt::skip]
        let expected = ComplexMatrix::from_real(4, 4, &[
            0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, -1.0,
            1.0, 0.0, 0.0, 0.0,
            0.0, -1.0, 0.0, 0.0,
        ]).unwrap();
        assert_eq!(kron(&x, &z), expected);
    }

    #[test]
    fn partial_trace_of_product() {
        let a = ComplexMatrix::from_vec(2, 2, vec![c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)]).unwrap();
        let b = ComplexMatrix::diag_real(&[0.5, 0.25, 0.25]);
        let rho = kron(&a, &b);
        assert!(partial_trace(&rho, 2, 3, Side::A).unwrap().max_abs_diff(&a) < 1e-15);
        assert!(partial_trace(&rho, 2, 3, Side::B).unwrap().max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = ComplexMatrix::outer(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        let half = ComplexMatrix::identity(2).scale(0.5);
        assert!(partial_trace(&phi, 2, 2, Side::A).unwrap().max_abs_diff(&half) < 1e-15);
        assert!(partial_trace(&phi, 2, 2, Side::B).unwrap().max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn partial_transpose_of_bell_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = ComplexMatrix::outer(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        let pt = partial_transpose(&phi, 2, 2, Side::B).unwrap();
        // flip operator / 2: eigenvalues {-1/2, 1/2, 1/2, 1/2}
        let e = eig_hermitian(&pt, 1e-12).unwrap();
        assert!((e.eigenvalues[0] + 0.5).abs() < 1e-14);
        assert!((e.eigenvalues[3] - 0.5).abs() < 1e-14);
        assert_eq!(partial_transpose(&pt, 2, 2, Side::B).unwrap(), phi);
    }

    #[test]
    fn partial_transpose_sides_are_related_by_full_transpose() {
        let rho = ComplexMatrix::from_fn(6, 6, |i, j| c((i * 7 + j) as f64, (i as f64) - (j as f64)));
        let ta = partial_transpose(&rho, 2, 3, Side::A).unwrap();
        let tb = partial_transpose(&rho, 2, 3, Side::B).unwrap();
        assert_eq!(ta.transpose(), tb);
    }

    #[test]
    fn dimension_mismatch() {
        let rho = ComplexMatrix::identity(4);
        assert!(matches!(partial_trace(&rho, 2, 3, Side::A), Err(Error::DimensionMismatch(_))));
        assert!(matches!(partial_transpose(&rho, 3, 3, Side::B), Err(Error::DimensionMismatch(_))));
    }
}
