//! Invariant suites run at fixed seeds.

use rand::Rng;
use serde::Serialize;
use skewsep_core::criteria::{
    evaluate_strategy, lur_ccn_value, mixture_bounds, skew_ccn_value, skew_information, skew_loo_closed_form,
    skew_loo_sum, theorem1_sum, variance, MixtureKind,
};
use skewsep_core::loo::{canonical_loo, random_orthogonal_with, rotate_loo, schmidt_loos, verify_loo, LooBasis};
use skewsep_core::rng::{ginibre, stream_rng, StreamRng};
use skewsep_core::zoo::{random_separable_with, random_state_with};
use skewsep_core::{BasisStrategy, Criterion, DensityMatrix, MixtureSpec, Observable, OptimizeConfig, Tolerances};

use crate::error::CliResult;

pub const DEFAULT_INSTANCES: usize = 500;
pub const DIMS: [usize; 2] = [2, 3];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub instances: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub instances_per_dim: usize,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

impl SelftestReport {
    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }

    pub fn lines(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            out.push_str(&format!(
                "{:<24} {:>5} instances  max violation {:.3e}  tol {:.0e}  {}\n",
                s.name,
                s.instances,
                s.max_violation,
                s.tolerance,
                if s.passed { "PASS" } else { "FAIL" }
            ));
        }
        out.push_str(if self.passed { "selftest PASS\n" } else { "selftest FAIL\n" });
        out
    }
}

/// Options for [`selftest`]. `corrupt_loo` rescales one canonical observable
/// before the orthonormality suite runs, to show the suite can fail.
#[derive(Debug, Clone, Copy)]
pub struct SelftestOptions {
    pub seed: u64,
    pub instances_per_dim: usize,
    pub corrupt_loo: bool,
}

struct Suite {
    name: &'static str,
    tolerance: f64,
    instances: usize,
    max_violation: f64,
}

impl Suite {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Suite {
            name,
            tolerance,
            instances: 0,
            max_violation: 0.0,
        }
    }

    fn record(&mut self, violation: f64) {
        self.instances += 1;
        // NaN counts as a failure
        if violation.is_nan() {
            self.max_violation = f64::INFINITY;
        } else {
            self.max_violation = self.max_violation.max(violation);
        }
    }

    fn finish(self) -> SuiteResult {
        SuiteResult {
            name: self.name,
            instances: self.instances,
            max_violation: self.max_violation,
            tolerance: self.tolerance,
            passed: self.max_violation <= self.tolerance,
        }
    }
}

fn random_observable(d: usize, rng: &mut StreamRng) -> CliResult<Observable> {
    let g = ginibre(d, d, rng);
    Ok(Observable::new((&g + &g.adjoint()).scale(0.5))?)
}

fn random_local(d: usize, rng: &mut StreamRng) -> CliResult<DensityMatrix> {
    let rank = rng.gen_range(1..=d);
    Ok(random_state_with(d, 1, rank, rng)?)
}

fn random_bipartite(d: usize, rng: &mut StreamRng) -> CliResult<DensityMatrix> {
    let rank = rng.gen_range(1..=d * d);
    Ok(random_state_with(d, d, rank, rng)?)
}

fn corrupted(basis: &LooBasis) -> CliResult<LooBasis> {
    let mut obs = basis.observables().to_vec();
    obs[0] = obs[0].scale(1.001);
    Ok(LooBasis::from_observables(basis.dim(), obs)?)
}

type SuiteFn = fn(usize, &mut StreamRng, &SelftestOptions, &mut Suite) -> CliResult<()>;

fn loo_orthonormality(d: usize, rng: &mut StreamRng, opts: &SelftestOptions, suite: &mut Suite) -> CliResult<()> {
    let mut canon = canonical_loo(d)?;
    if opts.corrupt_loo {
        canon = corrupted(&canon)?;
    }
    let basis = rotate_loo(&canon, &random_orthogonal_with(d * d, rng))?;
    let r = verify_loo(&basis, suite.tolerance);
    let count = if r.count_ok { 0.0 } else { f64::INFINITY };
    suite.record(r.orthonormality.max(r.hermiticity).max(r.completeness).max(count));
    Ok(())
}

fn convexity(d: usize, rng: &mut StreamRng, _: &SelftestOptions, suite: &mut Suite) -> CliResult<()> {
    let r1 = random_local(d, rng)?;
    let r2 = random_local(d, rng)?;
    let m = random_observable(d, rng)?;
    let lambda: f64 = rng.gen();
    let mix = DensityMatrix::single(&r1.matrix().scale(lambda) + &r2.matrix().scale(1.0 - lambda))?;
    let lhs = skew_information(&mix, &m)?;
    let rhs = lambda * skew_information(&r1, &m)? + (1.0 - lambda) * skew_information(&r2, &m)?;
    suite.record(lhs - rhs);
    Ok(())
}

fn additivity(d: usize, rng: &mut StreamRng, _: &SelftestOptions, suite: &mut Suite) -> CliResult<()> {
    let r1 = random_local(d, rng)?;
    let r2 = random_local(d, rng)?;
    let m1 = random_observable(d, rng)?;
    let m2 = random_observable(d, rng)?;
    let joint = Observable::local_sum(&m1, &m2, 1.0);
    let lhs = skew_information(&DensityMatrix::product(&r1, &r2), &joint)?;
    let rhs = skew_information(&r1, &m1)? + skew_information(&r2, &m2)?;
    suite.record((lhs - rhs).abs());
    Ok(())
}

fn mixture(d: usize, rng: &mut StreamRng, _: &SelftestOptions, suite: &mut Suite) -> CliResult<()> {
    let k = rng.gen_range(2..=4);
    let comps = (0..k).map(|_| random_local(d, rng)).collect::<CliResult<Vec<_>>>()?;
    let raw: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let mix = MixtureSpec::new(raw.iter().map(|w| w / total).collect(), comps)?;
    let obs = (0..3).map(|_| random_observable(d, rng)).collect::<CliResult<Vec<_>>>()?;
    let var = mixture_bounds(&mix, &obs, MixtureKind::Variance)?;
    let skew = mixture_bounds(&mix, &obs, MixtureKind::Skew)?;
    suite.record(var.violation().max(skew.violation()));
    Ok(())
}

fn pure_reduction(d: usize, rng: &mut StreamRng, _: &SelftestOptions, suite: &mut Suite) -> CliResult<()> {
    let rho = random_state_with(d, 1, 1, rng)?;
    let m = random_observable(d, rng)?;
    suite.record((skew_information(&rho, &m)? - variance(&rho, &m)?).abs());
    Ok(())
}

fn loo_closed_form(d: usize, rng: &mut StreamRng, _: &SelftestOptions, suite: &mut Suite) -> CliResult<()> {
    let rho = random_local(d, rng)?;
    let canon = canonical_loo(d)?;
    let rotated = rotate_loo(&canon, &random_orthogonal_with(d * d, rng))?;
    let schmidt = schmidt_loos(&random_bipartite(d, rng)?)?.basis_a;
    let closed = skew_loo_closed_form(&rho);
    let mut worst: f64 = 0.0;
    for basis in [&canon, &rotated, &schmidt] {
        let s = skew_loo_sum(&rho, basis)?;
        worst = worst.max((s - closed).abs()).max(s - (d as f64 - 1.0));
    }
    suite.record(worst);
    Ok(())
}

fn double_entry(d: usize, rng: &mut StreamRng, _: &SelftestOptions, suite: &mut Suite) -> CliResult<()> {
    let rho = random_bipartite(d, rng)?;
    let canon = canonical_loo(d)?;
    let a = rotate_loo(&canon, &random_orthogonal_with(d * d, rng))?;
    let b = rotate_loo(&canon, &random_orthogonal_with(d * d, rng))?;
    // the evaluator refuses to return when its two routes disagree, so use a
    // loose internal tolerance and measure the residual here
    let loose = Tolerances {
        double_entry: f64::INFINITY,
        ..Tolerances::default()
    };
    let value = skew_ccn_value(&rho, &a, &b, &loose)?.value;
    let t1 = theorem1_sum(&rho, a.observables(), b.observables(), -1.0)?;
    suite.record((2.0 * value - (t1 - (2.0 * d as f64 - 2.0))).abs());
    Ok(())
}

fn separable_soundness(d: usize, rng: &mut StreamRng, _: &SelftestOptions, suite: &mut Suite) -> CliResult<()> {
    let terms = rng.gen_range(1..=d * d);
    let rho = random_separable_with(d, d, terms, rng)?;
    let tol = Tolerances::default();
    let canon = canonical_loo(d)?;
    let rot = rotate_loo(&canon, &random_orthogonal_with(d * d, rng))?;
    let mut worst = (-lur_ccn_value(&rho, &rot, &canon, &tol)?.value).max(skew_ccn_value(&rho, &canon, &rot, &tol)?.value);
    let cfg = OptimizeConfig::default().with_seed(rng.gen());
    for c in [Criterion::Lur, Criterion::Skew] {
        let r = evaluate_strategy(&rho, c, BasisStrategy::Schmidt, &cfg, &tol)?.report;
        worst = worst.max(r.violation());
    }
    suite.record(worst);
    Ok(())
}

const SUITES: [(&str, f64, SuiteFn); 8] = [
    ("loo-orthonormality", 1e-8, loo_orthonormality),
    ("convexity", 1e-8, convexity),
    ("additivity", 1e-8, additivity),
    ("mixture-bounds", 1e-8, mixture),
    ("pure-state-reduction", 1e-8, pure_reduction),
    ("loo-sum-closed-form", 1e-8, loo_closed_form),
    ("double-entry", 1e-8, double_entry),
    ("separable-soundness", 1e-7, separable_soundness),
];

/// Runs every suite for `instances_per_dim` instances at each of d = 2 and 3.
/// Suite `k` at dimension `d` uses stream `(seed, 16 k + d)`.
pub fn selftest(opts: &SelftestOptions) -> CliResult<SelftestReport> {
    let mut suites = Vec::new();
    for (k, (name, tolerance, run)) in SUITES.iter().enumerate() {
        let mut suite = Suite::new(name, *tolerance);
        for d in DIMS {
            let mut rng = stream_rng(opts.seed, 16 * k as u64 + d as u64);
            for _ in 0..opts.instances_per_dim {
                run(d, &mut rng, opts, &mut suite)?;
            }
        }
        suites.push(suite.finish());
    }
    let passed = suites.iter().all(|s| s.passed);
    Ok(SelftestReport {
        seed: opts.seed,
        instances_per_dim: opts.instances_per_dim,
        suites,
        passed,
    })
}
