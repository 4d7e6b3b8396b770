//! Local orthogonal observables (LOOs): d^2 Hermitian operators orthonormal in
//! the Hilbert-Schmidt inner product, and the operator-Schmidt decomposition
//! that produces the bases adapted to a given state.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{kron, svd_real, ComplexMatrix, RealMatrix};
use crate::rng::{gaussian, stream_rng};
use crate::state::DensityMatrix;

/// An ordered list of `dim^2` observables on C^dim.
///
/// Construction does not validate; use [`verify_loo`] for that.
#[derive(Debug, Clone, PartialEq)]
pub struct LooBasis {
    dim: usize,
    observables: Vec<ComplexMatrix>,
}

impl LooBasis {
    pub fn from_observables(dim: usize, observables: Vec<ComplexMatrix>) -> Result<Self> {
        if observables.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} observables for local dimension {dim}",
                observables.len()
            )));
        }
        if let Some(bad) = observables.iter().find(|g| g.rows() != dim || g.cols() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} observable in a basis of dimension {dim}",
                bad.rows(),
                bad.cols()
            )));
        }
        Ok(Self { dim, observables })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }

    pub fn observables(&self) -> &[ComplexMatrix] {
        &self.observables
    }

    pub fn get(&self, k: usize) -> &ComplexMatrix {
        &self.observables[k]
    }

    /// Every observable multiplied by `s` (s = -1 keeps the basis orthonormal).
    pub fn scaled(&self, s: f64) -> LooBasis {
        LooBasis {
            dim: self.dim,
            observables: self.observables.iter().map(|g| g.scale(s)).collect(),
        }
    }

    /// Coefficients Tr(X G_k) of a Hermitian operator in this basis.
    pub fn coefficients(&self, x: &ComplexMatrix) -> Vec<f64> {
        self.observables.iter().map(|g| x.trace_product(g).re).collect()
    }

    /// sum_k G_k X G_k; equals Tr(X) I for a complete orthonormal basis.
    pub fn twirl(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
        for g in &self.observables {
            acc = &acc + &g.matmul(x).matmul(g);
        }
        acc
    }

    /// sum_k G_k^2.
    pub fn square_sum(&self) -> ComplexMatrix {
        self.twirl(&ComplexMatrix::identity(self.dim))
    }

    /// sum_k G_k ⊗ G_k, the swap operator for a valid basis.
    pub fn swap_sum(&self) -> ComplexMatrix {
        let n = self.dim * self.dim;
        let mut acc = ComplexMatrix::zeros(n, n);
        for g in &self.observables {
            acc = &acc + &kron(g, g);
        }
        acc
    }
}

/// Identity/sqrt(d) followed by the normalized generalized Gell-Mann matrices.
///
/// Order: symmetric (E_jk + E_kj)/sqrt2 for j < k lexicographic, then the
/// antisymmetric -i(E_jk - E_kj)/sqrt2 in the same order, then the diagonal
/// ones (sum_{j<l} E_jj - l E_ll)/sqrt(l(l+1)) for l = 1..d-1. For d = 2 this
/// is {I, sigma_x, sigma_y, sigma_z}/sqrt2.
pub fn canonical_loo(d: usize) -> Result<LooBasis> {
    if d < 2 {
        return Err(Error::Range(format!("local dimension {d} < 2")));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut obs = Vec::with_capacity(d * d);
    obs.push(ComplexMatrix::identity(d).scale(1.0 / (d as f64).sqrt()));
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|j| ((j + 1)..d).map(move |k| (j, k))).collect();
    for &(j, k) in &pairs {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(j, k)] = Complex64::new(h, 0.0);
        m[(k, j)] = Complex64::new(h, 0.0);
        obs.push(m);
    }
    for &(j, k) in &pairs {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(j, k)] = Complex64::new(0.0, -h);
        m[(k, j)] = Complex64::new(0.0, h);
        obs.push(m);
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        for x in diag.iter_mut().take(l) {
            *x = norm;
        }
        diag[l] = -(l as f64) * norm;
        obs.push(ComplexMatrix::diag_real(&diag));
    }
    LooBasis::from_observables(d, obs)
}

/// Outcome of [`verify_loo`].
#[derive(Debug, Clone, Serialize)]
pub struct LooReport {
    pub tol: f64,
    pub count_ok: bool,
    /// max |Tr(G_k G_l) - delta_kl|
    pub orthonormality: f64,
    /// max_k |G_k - G_k^dagger|
    pub hermiticity: f64,
    /// max |sum_k G_k X G_k - Tr(X) I| over fixed random test operators X
    pub completeness: f64,
    pub passed: bool,
}

/// Checks Hilbert-Schmidt orthonormality, Hermiticity and completeness.
pub fn verify_loo(basis: &LooBasis, tol: f64) -> LooReport {
    let n = basis.len();
    let count_ok = n == basis.dim * basis.dim;
    let mut orthonormality: f64 = 0.0;
    for k in 0..n {
        for l in k..n {
            let g = basis.get(k).trace_product(basis.get(l));
            let target = if k == l { 1.0 } else { 0.0 };
            orthonormality = orthonormality.max((g - Complex64::new(target, 0.0)).norm());
        }
    }
    let hermiticity = basis
        .observables()
        .iter()
        .map(|g| g.hermiticity_violation())
        .fold(0.0, f64::max);

    let mut rng = stream_rng(0x100, basis.dim as u64);
    let mut completeness: f64 = 0.0;
    for _ in 0..3 {
        let x = ComplexMatrix::from_fn(basis.dim, basis.dim, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let target = ComplexMatrix::identity(basis.dim).scale_complex(x.trace());
        completeness = completeness.max(basis.twirl(&x).max_abs_diff(&target));
    }

    let passed = count_ok && orthonormality <= tol && hermiticity <= tol && completeness <= tol;
    LooReport {
        tol,
        count_ok,
        orthonormality,
        hermiticity,
        completeness,
        passed,
    }
}

/// G'_k = sum_l O[k][l] G_l for a real orthogonal O.
pub fn rotate_loo(basis: &LooBasis, o: &RealMatrix) -> Result<LooBasis> {
    let n = basis.len();
    if o.rows() != n || o.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} rotation for a basis of {n} observables",
            o.rows(),
            o.cols()
        )));
    }
    let violation = o.orthogonality_violation();
    if violation > 1e-9 {
        return Err(Error::NotOrthogonal { violation });
    }
    Ok(rotate_unchecked(basis, o))
}

pub(crate) fn rotate_unchecked(basis: &LooBasis, o: &RealMatrix) -> LooBasis {
    let d = basis.dim;
    let n = basis.len();
    let observables = (0..n)
        .map(|k| {
            let mut g = ComplexMatrix::zeros(d, d);
            for l in 0..n {
                let w = o[(k, l)];
                if w != 0.0 {
                    g = &g + &basis.get(l).scale(w);
                }
            }
            g.hermitian_part()
        })
        .collect();
    LooBasis { dim: d, observables }
}

/// T[k][l] = Tr(rho G^A_k ⊗ G^B_l).
///
/// Fails with `NonRealCorrelation` if any entry has an imaginary part above
/// `imag_tol`, which only happens for a non-Hermitian input or a broken basis.
pub fn correlation_matrix(
    rho: &DensityMatrix,
    basis_a: &LooBasis,
    basis_b: &LooBasis,
    imag_tol: f64,
) -> Result<RealMatrix> {
    let (da, db) = (rho.da(), rho.db());
    if basis_a.dim() != da || basis_b.dim() != db {
        return Err(Error::DimensionMismatch(format!(
            "bases of dimension {}x{} for a {da}x{db} state",
            basis_a.dim(),
            basis_b.dim()
        )));
    }
    let m = rho.matrix();
    let mut t = RealMatrix::zeros(basis_a.len(), basis_b.len());
    // Tr(rho (A ⊗ B)) = sum rho[(i,k),(j,l)] A[j][i] B[l][k]
    for (ka, ga) in basis_a.observables().iter().enumerate() {
        // partial contraction over Alice: X[k][l] = sum_ij rho[(i,k),(j,l)] A[j][i]
        let x = ComplexMatrix::from_fn(db, db, |k, l| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..da {
                for j in 0..da {
                    acc += m[(i * db + k, j * db + l)] * ga[(j, i)];
                }
            }
            acc
        });
        for (kb, gb) in basis_b.observables().iter().enumerate() {
            let z = x.trace_product(gb);
            if z.im.abs() > imag_tol {
                return Err(Error::NonRealCorrelation {
                    row: ka,
                    col: kb,
                    residue: z.im.abs(),
                });
            }
            t[(ka, kb)] = z.re;
        }
    }
    Ok(t)
}

/// rho = sum_k lambda_k G^A_k ⊗ G^B_k with lambda_k >= 0 descending.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub lambdas: Vec<f64>,
    pub basis_a: LooBasis,
    pub basis_b: LooBasis,
}

impl SchmidtDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.basis_a.dim() * self.basis_b.dim();
        let mut acc = ComplexMatrix::zeros(n, n);
        for (k, &l) in self.lambdas.iter().enumerate() {
            acc = &acc + &kron(self.basis_a.get(k), self.basis_b.get(k)).scale(l);
        }
        acc
    }

    /// sum_k lambda_k, the realignment (CCN) witness.
    pub fn lambda_sum(&self) -> f64 {
        self.lambdas.iter().sum()
    }
}

/// Operator-Schmidt decomposition from the SVD T = U S V^T of the
/// correlation matrix in canonical LOOs; Alice's basis is rotated by U^T and
/// Bob's by V^T.
///
/// Unequal local dimensions are accepted: there are then min(dA^2, dB^2)
/// coefficients and the bases are completed to full LOOs.
pub fn schmidt_loos(rho: &DensityMatrix) -> Result<SchmidtDecomposition> {
    let (da, db) = (rho.da(), rho.db());
    let canon_a = canonical_loo(da)?;
    let canon_b = canonical_loo(db)?;
    schmidt_from(rho, &canon_a, &canon_b, f64::INFINITY)
}

pub(crate) fn schmidt_from(
    rho: &DensityMatrix,
    canon_a: &LooBasis,
    canon_b: &LooBasis,
    imag_tol: f64,
) -> Result<SchmidtDecomposition> {
    let t = correlation_matrix(rho, canon_a, canon_b, imag_tol)?;
    let svd = svd_real(&t)?;
    Ok(SchmidtDecomposition {
        lambdas: svd.singular_values,
        basis_a: rotate_unchecked(canon_a, &svd.u.transpose()),
        basis_b: rotate_unchecked(canon_b, &svd.v.transpose()),
    })
}

/// Haar-distributed orthogonal matrix, deterministic in `seed`.
pub fn random_orthogonal(n: usize, seed: u64) -> RealMatrix {
    random_orthogonal_with(n, &mut stream_rng(seed, 0))
}

/// Gram-Schmidt QR of a Gaussian matrix; R's diagonal is positive by construction.
pub fn random_orthogonal_with(n: usize, rng: &mut impl Rng) -> RealMatrix {
    let g = RealMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &cols {
                let dot: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= dot * qi;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|x| x / norm).collect());
    }
    RealMatrix::from_fn(n, n, |i, j| cols[j][i])
}
