//! JSON interchange for density matrices: `{dA, dB, entries}` with entries
//! the row-major `[re, im]` pairs of the full matrix.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use skewsep_core::linalg::ComplexMatrix;
use skewsep_core::{DensityMatrix, Tolerances};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(rename = "dA")]
    pub da: usize,
    #[serde(rename = "dB")]
    pub db: usize,
    pub entries: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        StateFile {
            da: rho.da(),
            db: rho.db(),
            entries: rho.matrix().as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_state(&self, tol: &Tolerances) -> Result<DensityMatrix, String> {
        let n = self.da.checked_mul(self.db).filter(|&n| n >= 1).ok_or("dimensions must be positive")?;
        if self.entries.len() != n * n {
            return Err(format!("{} entries for a {n}x{n} matrix", self.entries.len()));
        }
        let data: Vec<Complex64> = self.entries.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
        let m = ComplexMatrix::from_vec(n, n, data).map_err(|e| e.to_string())?;
        DensityMatrix::with_tolerances(m, self.da, self.db, tol).map_err(|e| e.to_string())
    }
}

/// Reads and validates a state file; every failure maps to a bad-input error.
pub fn load_state(path: &Path, tol: &Tolerances) -> CliResult<DensityMatrix> {
    let bad = |reason: String| CliError::BadInput {
        path: path.to_owned(),
        reason,
    };
    let text = std::fs::read_to_string(path).map_err(|e| bad(e.to_string()))?;
    let file: StateFile = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    file.to_state(tol).map_err(bad)
}
