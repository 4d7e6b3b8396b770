//! Dense complex linear algebra for small operators.

mod eigen;
mod matrix;
mod ops;
mod svd;

pub use eigen::{
    eig_hermitian, resolution_floor, sqrt_from_eigen, sqrt_psd, HermitianEigenSystem, DEFAULT_NEGATIVITY_TOL, MAX_SWEEPS,
};
pub use matrix::{ComplexMatrix, RealMatrix, ONE, ZERO};
pub use ops::{kron, partial_trace, partial_transpose, Side};
pub use svd::{svd_real, RealSvd};
