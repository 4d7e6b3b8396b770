//! Uncertainty functionals and the separability criteria built from them.
//!
//! Every criterion returns a [`CriterionReport`] carrying the witness value,
//! the separable-side threshold, and the verdict after a safety margin has
//! been applied toward non-detection.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

mod information;
mod optimize;
mod separability;

pub use information::{
    mixture_bounds, skew_information, skew_information_with_sqrt, skew_loo_closed_form, skew_loo_sum,
    theorem1_bound_report, theorem1_sum, variance, MixtureBounds, MixtureKind,
};
pub use optimize::{
    evaluate_strategy, optimize_basis, CriterionModel, OptimizeConfig, OptimizedBases, StrategyReport,
};
pub use separability::{ccn_value, lur_ccn_value, ppt_report, skew_ccn_value};

/// Which side of the threshold signals entanglement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    DetectIfGreater,
    DetectIfLess,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    /// Local uncertainty relation built on the operator-Schmidt structure.
    Lur,
    /// Skew-information counterpart of `Lur`.
    Skew,
    /// Computable cross norm / realignment.
    Ccn,
    /// Positive partial transpose.
    Ppt,
    /// Summed skew information of joint local observables against C_A + C_B.
    Theorem1,
}

impl Criterion {
    pub const ALL: [Criterion; 4] = [Criterion::Ccn, Criterion::Lur, Criterion::Skew, Criterion::Ppt];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Lur => "lur",
            Criterion::Skew => "skew",
            Criterion::Ccn => "ccn",
            Criterion::Ppt => "ppt",
            Criterion::Theorem1 => "theorem1",
        }
    }

    /// True for criteria whose value depends on a choice of LOO bases.
    pub fn uses_basis(self) -> bool {
        matches!(self, Criterion::Lur | Criterion::Skew)
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Criterion {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lur" => Ok(Criterion::Lur),
            "skew" => Ok(Criterion::Skew),
            "ccn" => Ok(Criterion::Ccn),
            "ppt" => Ok(Criterion::Ppt),
            other => Err(format!("unknown criterion `{other}` (expected lur, skew, ccn or ppt)")),
        }
    }
}

/// How LOO bases are chosen for the basis-dependent criteria.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisStrategy {
    /// Identity plus generalized Gell-Mann matrices on both sides.
    Canonical,
    /// Operator-Schmidt bases of the state under test.
    Schmidt,
    /// Hill climbing over local rotations, started from the Schmidt bases.
    Optimized,
}

impl BasisStrategy {
    pub fn name(self) -> &'static str {
        match self {
            BasisStrategy::Canonical => "canonical",
            BasisStrategy::Schmidt => "schmidt",
            BasisStrategy::Optimized => "optimized",
        }
    }
}

impl fmt::Display for BasisStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BasisStrategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "canonical" => Ok(BasisStrategy::Canonical),
            "schmidt" => Ok(BasisStrategy::Schmidt),
            "optimized" => Ok(BasisStrategy::Optimized),
            other => Err(format!(
                "unknown basis strategy `{other}` (expected canonical, schmidt or optimized)"
            )),
        }
    }
}

/// Diagnostic attached to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Detail {
    Flag(bool),
    Number(f64),
    List(Vec<f64>),
    Text(String),
}

impl From<f64> for Detail {
    fn from(x: f64) -> Self {
        Detail::Number(x)
    }
}

impl From<bool> for Detail {
    fn from(x: bool) -> Self {
        Detail::Flag(x)
    }
}

impl From<Vec<f64>> for Detail {
    fn from(x: Vec<f64>) -> Self {
        Detail::List(x)
    }
}

impl From<&str> for Detail {
    fn from(x: &str) -> Self {
        Detail::Text(x.to_owned())
    }
}

impl From<String> for Detail {
    fn from(x: String) -> Self {
        Detail::Text(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub criterion: Criterion,
    pub value: f64,
    pub threshold: f64,
    pub direction: Direction,
    pub margin: f64,
    pub detected: bool,
    pub detail: BTreeMap<String, Detail>,
}

impl CriterionReport {
    pub fn new(criterion: Criterion, value: f64, threshold: f64, direction: Direction, margin: f64) -> Self {
        Self {
            criterion,
            value,
            threshold,
            direction,
            margin,
            detected: detects(value, threshold, direction, margin),
            detail: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Detail>) -> Self {
        self.detail.insert(key.to_owned(), value.into());
        self
    }

    /// Signed distance past the threshold in the detecting direction
    /// (positive means the inequality is violated).
    pub fn violation(&self) -> f64 {
        match self.direction {
            Direction::DetectIfGreater => self.value - self.threshold,
            Direction::DetectIfLess => self.threshold - self.value,
        }
    }

    pub fn number(&self, key: &str) -> Option<f64> {
        match self.detail.get(key) {
            Some(Detail::Number(x)) => Some(*x),
            _ => None,
        }
    }
}

/// Verdict with `margin` applied toward non-detection.
pub fn detects(value: f64, threshold: f64, direction: Direction, margin: f64) -> bool {
    match direction {
        Direction::DetectIfGreater => value > threshold + margin,
        Direction::DetectIfLess => value < threshold - margin,
    }
}
