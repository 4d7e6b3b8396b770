//! Entanglement criteria from uncertainty functionals.
//!
//! The crate evaluates, on dense density matrices of small bipartite systems:
//!
//! * the variance and the Wigner-Yanase skew information of an observable,
//! * the local-uncertainty inequality built on local orthogonal observables
//!   (LOOs) and the operator-Schmidt decomposition ([`criteria::lur_ccn_value`]),
//! * its skew-information counterpart ([`criteria::skew_ccn_value`]),
//! * the realignment / computable cross norm criterion and the PPT test.
//!
//! Everything is built on a small self-contained linear algebra kernel
//! ([`linalg`]) with explicit tolerances.

pub mod criteria;
pub mod error;
pub mod linalg;
pub mod loo;
pub mod rng;
pub mod state;
pub mod zoo;

pub use criteria::{BasisStrategy, Criterion, CriterionReport, Direction, OptimizeConfig};
pub use error::{Error, Result};
pub use loo::{LooBasis, SchmidtDecomposition};
pub use state::{DensityMatrix, MixtureSpec, Observable, Tolerances};
pub use zoo::StateFamily;
