//! Cyclic Jacobi eigensolver for Hermitian matrices, and the PSD square root.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Sweep cap for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

/// Default tolerance for [`sqrt_psd`]: eigenvalues in `[-1e-9, 0)` are clamped to zero.
pub const DEFAULT_NEGATIVITY_TOL: f64 = 1e-9;

/// Eigenvalues in ascending order with the matching unitary eigenvector matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigenSystem {
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigenSystem {
    /// V diag(f(lambda)) V^dagger.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = ZERO;
                for k in 0..n {
                    if fl[k] != 0.0 {
                        acc += v[(i, k)] * v[(j, k)].conj() * fl[k];
                    }
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)] = Complex64::new(out[(i, i)].re, 0.0);
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }
}

/// Diagonalizes a Hermitian matrix by cyclic Jacobi rotations.
///
/// The input is checked against `hermiticity_tol` and then symmetrized, so
/// tiny anti-Hermitian noise does not leak into the eigenvalues.
pub fn eig_hermitian(h: &ComplexMatrix, hermiticity_tol: f64) -> Result<HermitianEigenSystem> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            h.rows(),
            h.cols()
        )));
    }
    let violation = h.hermiticity_violation();
    if violation > hermiticity_tol {
        return Err(Error::NotHermitian {
            violation,
            tol: hermiticity_tol,
        });
    }

    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    if scale > 0.0 {
        let target = f64::EPSILON * scale;
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&a) <= target {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
        if !converged && off_diagonal_norm(&a) > target {
            return Err(Error::NoConvergence {
                iterations: MAX_SWEEPS,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermitianEigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One complex Jacobi rotation zeroing a[p][q].
///
/// The 2x2 unitary is W = diag(1, e^{-i phi}) R with R a real rotation, where
/// phi is the phase of a[p][q]; A <- W^dagger A W and V <- V W.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // skip entries already negligible relative to the diagonal
    if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // W = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
    let pc = phase.conj();
    let w_pp = Complex64::new(c, 0.0);
    let w_pq = Complex64::new(s, 0.0);
    let w_qp = -pc * s;
    let w_qq = pc * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * w_pp + akq * w_qp;
        a[(k, q)] = akp * w_pq + akq * w_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = w_pp.conj() * apk + w_qp.conj() * aqk;
        a[(q, k)] = w_pq.conj() * apk + w_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(app - t * r, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * r, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * w_pp + vkq * w_qp;
        v[(k, q)] = vkp * w_pq + vkq * w_qq;
    }
}

/// Square root of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues in `[-negativity_tol, 0)` are treated as roundoff and clamped
/// to zero, as are positive ones below [`resolution_floor`]; anything more
/// negative than `-negativity_tol` is rejected.
pub fn sqrt_psd(rho: &ComplexMatrix, negativity_tol: f64) -> Result<ComplexMatrix> {
    let tol = (1e-10f64).max(negativity_tol);
    let eig = eig_hermitian(rho, tol)?;
    sqrt_from_eigen(&eig, negativity_tol)
}

/// Same as [`sqrt_psd`] for callers that already hold the eigensystem.
pub fn sqrt_from_eigen(eig: &HermitianEigenSystem, negativity_tol: f64) -> Result<ComplexMatrix> {
    if let Some(&min) = eig.eigenvalues.first() {
        if min < -negativity_tol {
            return Err(Error::NotPsd {
                eigenvalue: min,
                tol: negativity_tol,
            });
        }
    }
    let floor = resolution_floor(&eig.eigenvalues);
    Ok(eig.reconstruct_with(|l| if l <= floor { 0.0 } else { l.sqrt() }))
}

/// Eigenvalues at or below this are indistinguishable from zero in f64;
/// rooting them would turn 1e-17 noise into 3e-9 entries.
pub fn resolution_floor(eigenvalues: &[f64]) -> f64 {
    let max = eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    8.0 * eigenvalues.len() as f64 * f64::EPSILON * max
}
