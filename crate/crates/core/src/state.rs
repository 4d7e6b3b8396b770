//! Validated density matrices, observables and convex mixtures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, kron, partial_trace, sqrt_from_eigen, ComplexMatrix, HermitianEigenSystem, Side,
};

/// Numerical tolerances shared by every evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// max |H - H^dagger| accepted for states and observables.
    pub hermiticity: f64,
    /// |Tr(rho) - 1| accepted for states.
    pub trace: f64,
    /// Most negative eigenvalue accepted (and clamped) in a state.
    pub negativity: f64,
    /// Margin applied toward non-detection on every criterion.
    pub margin: f64,
    /// Imaginary residue allowed in correlation entries and expectation values.
    pub imaginary: f64,
    /// Agreement required between the two evaluation routes of the skew criterion.
    pub double_entry: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity: 1e-10,
            trace: 1e-10,
            negativity: 1e-9,
            margin: 1e-7,
            imaginary: 1e-10,
            double_entry: 1e-8,
        }
    }
}

/// A Hermitian, positive semidefinite, unit-trace operator on C^dA ⊗ C^dB.
///
/// Unipartite states use `db = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    da: usize,
    db: usize,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, da: usize, db: usize) -> Result<Self> {
        Self::with_tolerances(matrix, da, db, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: ComplexMatrix, da: usize, db: usize, tol: &Tolerances) -> Result<Self> {
        if da == 0 || db == 0 {
            return Err(Error::DimensionMismatch("local dimensions must be positive".into()));
        }
        if matrix.rows() != da * db || matrix.cols() != da * db {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for local dimensions {da}x{db}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let herm = matrix.hermiticity_violation();
        if herm > tol.hermiticity {
            return Err(Error::InvalidState(format!(
                "Hermiticity violation {herm:e} exceeds {:e}",
                tol.hermiticity
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let matrix = matrix.hermitian_part();
        let eig = eig_hermitian(&matrix, f64::INFINITY)?;
        let min = eig.eigenvalues[0];
        if min < -tol.negativity {
            return Err(Error::InvalidState(format!(
                "eigenvalue {min:e} below -{:e}",
                tol.negativity
            )));
        }
        Ok(Self { matrix, da, db })
    }

    /// Unipartite state of dimension `d`.
    pub fn single(matrix: ComplexMatrix) -> Result<Self> {
        let d = matrix.rows();
        Self::new(matrix, d, 1)
    }

    /// Normalizes a PSD operator to unit trace, then validates it.
    pub fn from_unnormalized(matrix: ComplexMatrix, da: usize, db: usize) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr.is_nan() || tr <= 0.0 {
            return Err(Error::InvalidState(format!("cannot normalize operator with trace {tr}")));
        }
        Self::new(matrix.hermitian_part().scale(1.0 / tr), da, db)
    }

    pub fn pure(psi: &[num_complex::Complex64], da: usize, db: usize) -> Result<Self> {
        Self::from_unnormalized(ComplexMatrix::outer(psi), da, db)
    }

    pub fn maximally_mixed(da: usize, db: usize) -> Self {
        let n = da * db;
        Self {
            matrix: ComplexMatrix::identity(n).scale(1.0 / n as f64),
            da,
            db,
        }
    }

    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Self {
        Self {
            matrix: kron(&a.matrix, &b.matrix),
            da: a.dim(),
            db: b.dim(),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn da(&self) -> usize {
        self.da
    }

    pub fn db(&self) -> usize {
        self.db
    }

    /// Total dimension dA * dB.
    pub fn dim(&self) -> usize {
        self.da * self.db
    }

    pub fn is_bipartite(&self) -> bool {
        self.db > 1
    }

    pub fn reduced(&self, keep: Side) -> DensityMatrix {
        let m = partial_trace(&self.matrix, self.da, self.db, keep).expect("dimensions validated");
        let d = m.rows();
        DensityMatrix {
            matrix: m.hermitian_part(),
            da: d,
            db: 1,
        }
    }

    pub fn eigen(&self) -> HermitianEigenSystem {
        eig_hermitian(&self.matrix, f64::INFINITY).expect("validated state diagonalizes")
    }

    pub fn sqrt(&self, negativity_tol: f64) -> Result<ComplexMatrix> {
        sqrt_from_eigen(&self.eigen(), negativity_tol)
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    /// Tr(rho M) for Hermitian M.
    pub fn expect(&self, m: &ComplexMatrix) -> f64 {
        self.matrix.expect(m)
    }

    /// Same state regarded as an unstructured single system.
    pub fn flattened(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: self.matrix.clone(),
            da: self.dim(),
            db: 1,
        }
    }

    /// rho -> W rho W^dagger for unitary W of matching dimension.
    pub fn conjugated(&self, w: &ComplexMatrix) -> Result<DensityMatrix> {
        if w.rows() != self.dim() || w.cols() != self.dim() {
            return Err(Error::DimensionMismatch("unitary does not match state".into()));
        }
        let m = w.matmul(&self.matrix).matmul(&w.adjoint()).hermitian_part();
        DensityMatrix::new(m, self.da, self.db)
    }
}

/// A Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable(ComplexMatrix);

impl Observable {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, Tolerances::default().hermiticity)
    }

    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self> {
        let violation = m.hermiticity_violation();
        if violation > tol {
            return Err(Error::NotHermitian { violation, tol });
        }
        Ok(Self(m.hermitian_part()))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    /// A ⊗ I + sign · I ⊗ B.
    pub fn local_sum(a: &Observable, b: &Observable, sign: f64) -> Observable {
        let ia = ComplexMatrix::identity(a.dim());
        let ib = ComplexMatrix::identity(b.dim());
        let m = &kron(&a.0, &ib) + &kron(&ia, &b.0).scale(sign);
        Observable(m)
    }
}

impl AsRef<ComplexMatrix> for Observable {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// A convex combination sum_k p_k rho_k.
#[derive(Debug, Clone)]
pub struct MixtureSpec {
    weights: Vec<f64>,
    components: Vec<DensityMatrix>,
}

impl MixtureSpec {
    pub fn new(weights: Vec<f64>, components: Vec<DensityMatrix>) -> Result<Self> {
        if weights.is_empty() || weights.len() != components.len() {
            return Err(Error::BadWeights(format!(
                "{} weights for {} components",
                weights.len(),
                components.len()
            )));
        }
        if weights.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::BadWeights("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::BadWeights(format!("weights sum to {total}")));
        }
        let (da, db) = (components[0].da(), components[0].db());
        if components.iter().any(|c| c.da() != da || c.db() != db) {
            return Err(Error::DimensionMismatch("mixture components differ in dimension".into()));
        }
        Ok(Self { weights, components })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[DensityMatrix] {
        &self.components
    }

    pub fn mixed_state(&self) -> DensityMatrix {
        let first = &self.components[0];
        let n = first.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for (p, c) in self.weights.iter().zip(&self.components) {
            m = &m + &c.matrix().scale(*p);
        }
        DensityMatrix {
            matrix: m.hermitian_part(),
            da: first.da(),
            db: first.db(),
        }
    }
}
