//! Named validation suites with per-check pass/fail results.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::distribution::{Pmf, SampleCounts};
use crate::entropies::{asymptotic_constants, phi_kernel, true_entropy, zhang_estimate, EntropyKind};
use crate::error::{Error, Result};
use crate::montecarlo::{
    self, clt_entry, exact_enumeration_oracle, monte_carlo_moments, rate_entry, reference_pmf, EstimatorTag,
    ExperimentConfig, KindEstimator, CLT_KS_LIMIT, RATE_SLACK, VARIANCE_RATIO_BAND,
};
use crate::phi::{check_derivatives, default_grid, power_sum};

/// High-precision reference values at the reference pmf `(0.4, 0.25, 0.35)`,
/// computed independently with 50-digit arithmetic.
pub mod reference {
    pub const SHANNON: f64 = 1.080527626604172;
    pub const RENYI_2: f64 = 1.0642108619507773;
    pub const TSALLIS_2: f64 = 0.655;
    pub const POWER_SUM_2: f64 = 0.345;
    pub const SHANNON_A: f64 = 0.5198257537444132;
    pub const SHANNON_VARIANCE: f64 = 0.03449281677116763;
}

pub const DEFAULT_SEED: u64 = 42;
pub const EXACT_TOLERANCE: f64 = 1e-6;
pub const LIMIT_TOLERANCE: f64 = 1e-4;
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;
pub const BIAS_HALF_WIDTH: f64 = 0.3;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Exact,
    Clt,
    Bias,
    Oracle,
    Rate,
    Limits,
    Derivatives,
    Invariants,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Exact,
        Suite::Clt,
        Suite::Bias,
        Suite::Oracle,
        Suite::Rate,
        Suite::Limits,
        Suite::Derivatives,
        Suite::Invariants,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Exact => "exact",
            Suite::Clt => "clt",
            Suite::Bias => "bias",
            Suite::Oracle => "oracle",
            Suite::Rate => "rate",
            Suite::Limits => "limits",
            Suite::Derivatives => "derivatives",
            Suite::Invariants => "invariants",
        }
    }

    pub fn run(&self) -> Result<Vec<Check>> {
        match self {
            Suite::Exact => exact_values(),
            Suite::Clt => clt(),
            Suite::Bias => bias(),
            Suite::Oracle => oracle(),
            Suite::Rate => rate(),
            Suite::Limits => limits(),
            Suite::Derivatives => derivatives(),
            Suite::Invariants => invariants(),
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}")))
    }
}

fn within(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Check {
    let err = (value - target).abs();
    Check::new(name, err <= tol, format!("{value:.12} vs {target:.12} (|diff| {err:.2e}, tol {tol:.0e})"))
}

/// Closed-form values at the reference pmf against the high-precision table.
pub fn exact_values() -> Result<Vec<Check>> {
    let pmf = reference_pmf();
    Ok(vec![
        within("shannon", true_entropy(&pmf, EntropyKind::Shannon)?, reference::SHANNON, EXACT_TOLERANCE),
        within("renyi(2)", true_entropy(&pmf, EntropyKind::Renyi { alpha: 2.0 })?, reference::RENYI_2, EXACT_TOLERANCE),
        within(
            "tsallis(2)",
            true_entropy(&pmf, EntropyKind::Tsallis { alpha: 2.0 })?,
            reference::TSALLIS_2,
            EXACT_TOLERANCE,
        ),
        within("power-sum(2)", power_sum(pmf.probs(), 2.0)?, reference::POWER_SUM_2, EXACT_TOLERANCE),
    ])
}

/// Seven-family normality and variance-ratio checks at n = 10⁴, R = 2000.
pub fn clt() -> Result<Vec<Check>> {
    let report = montecarlo::run_clt_experiment(&ExperimentConfig::default())?;
    Ok(report
        .entries
        .iter()
        .flat_map(|e| {
            let name = format!("{} n={}", e.kind, e.n);
            let ks = e.normality.ks_distance;
            let ratio = e.empirical_variance_ratio;
            [
                Check::new(format!("{name} ks"), ks <= CLT_KS_LIMIT, format!("KS {ks:.4} (limit {CLT_KS_LIMIT})")),
                Check::new(
                    format!("{name} variance ratio"),
                    (VARIANCE_RATIO_BAND.0..=VARIANCE_RATIO_BAND.1).contains(&ratio),
                    format!("{ratio:.4} (band {:?})", VARIANCE_RATIO_BAND),
                ),
            ]
        })
        .collect())
}

/// Leading-order bias of the Shannon plug-in and its Miller–Madow removal
/// at n = 100, R = 20000.
pub fn bias() -> Result<Vec<Check>> {
    let pmf = reference_pmf();
    let (n, reps) = (100, 20_000);
    let sigma = asymptotic_constants(pmf.probs(), EntropyKind::Shannon)?.variance.sqrt();
    let expected = -((pmf.len() - 1) as f64) / 2.0;
    let raw = KindEstimator::new(EntropyKind::Shannon, EstimatorTag::Plugin)?;
    let mm = KindEstimator::new(EntropyKind::Shannon, EstimatorTag::PluginMillerMadow)?;
    let raw_bias = clt_entry(&pmf, &raw, 0, n, reps, DEFAULT_SEED, sigma, 30)?.bias_times_n;
    let mm_bias = clt_entry(&pmf, &mm, 0, n, reps, DEFAULT_SEED, sigma, 30)?.bias_times_n;
    Ok(vec![
        within("plug-in n*bias", raw_bias, expected, BIAS_HALF_WIDTH),
        within("miller-madow n*bias", mm_bias, 0.0, BIAS_HALF_WIDTH),
    ])
}

/// Exact multinomial enumeration at p = (0.3, 0.7), n = 60 against Monte
/// Carlo and against the asymptotic variance.
pub fn oracle() -> Result<Vec<Check>> {
    let pmf = Pmf::from_probs(vec![0.3, 0.7])?;
    let n = 60;
    let exact = exact_enumeration_oracle(&pmf, n, EntropyKind::Shannon)?;
    let est = KindEstimator::new(EntropyKind::Shannon, EstimatorTag::Plugin)?;
    let mc = monte_carlo_moments(&pmf, &est, n, 100_000, DEFAULT_SEED)?;
    let sigma2 = asymptotic_constants(pmf.probs(), EntropyKind::Shannon)?.variance;
    let z = (mc.variance - exact.variance).abs() / mc.variance_se;
    let scaled = n as f64 * exact.variance / sigma2;
    Ok(vec![
        Check::new(
            "exact vs monte carlo variance",
            z <= 3.0,
            format!("exact {:.6e}, MC {:.6e} ± {:.1e} ({z:.2} SE)", exact.variance, mc.variance, mc.variance_se),
        ),
        Check::new(
            "n*Var vs asymptotic variance",
            (scaled - 1.0).abs() <= 0.1,
            format!("n*Var {:.6} / sigma^2 {sigma2:.6} = {scaled:.4}", n as f64 * exact.variance),
        ),
    ])
}

/// Almost-sure rate ratio of the Shannon plug-in, 200 replications.
pub fn rate() -> Result<Vec<Check>> {
    let pmf = reference_pmf();
    let est = KindEstimator::new(EntropyKind::Shannon, EstimatorTag::Plugin)?;
    let entry = rate_entry(&pmf, &est, 0, &[10_000, 30_000], 200, DEFAULT_SEED)?;
    Ok(entry
        .rows
        .iter()
        .map(|row| {
            Check::new(
                format!("shannon n={}", row.n),
                row.max_ratio <= entry.bound,
                format!("max ratio {:.4} vs {RATE_SLACK}*A = {:.4}", row.max_ratio, entry.bound),
            )
        })
        .collect())
}

/// Families that collapse to Shannon near their limiting parameter.
pub fn limits() -> Result<Vec<Check>> {
    let pmf = reference_pmf();
    let shannon = true_entropy(&pmf, EntropyKind::Shannon)?;
    let mut kinds = Vec::new();
    for alpha in [1.0 - 1e-5, 1.0 + 1e-5] {
        kinds.push(EntropyKind::Renyi { alpha });
        kinds.push(EntropyKind::Tsallis { alpha });
        kinds.push(EntropyKind::LandsbergVedral { alpha });
    }
    kinds.push(EntropyKind::Kappa { kappa: 1e-5 });
    kinds.into_iter().map(|k| Ok(within(k.to_string(), true_entropy(&pmf, k)?, shannon, LIMIT_TOLERANCE))).collect()
}

/// Finite-difference derivative checks of all seven kernels.
pub fn derivatives() -> Result<Vec<Check>> {
    let grid = default_grid();
    EntropyKind::standard_suite()
        .into_iter()
        .map(|kind| {
            let phi = phi_kernel(kind)?.phi();
            let r = check_derivatives(&phi, &grid);
            Ok(Check::new(
                format!("{kind} ({})", phi.name()),
                r.passed,
                format!(
                    "d1 rel err {:.2e} at {}, d2 rel err {:.2e} at {}",
                    r.max_d1_error, r.worst_d1_at, r.max_d2_error, r.worst_d2_at
                ),
            ))
        })
        .collect()
}

/// Abe symmetry, degenerate variance at the uniform pmf, Zhang hand cases.
pub fn invariants() -> Result<Vec<Check>> {
    let pmf = reference_pmf();
    let mut checks = Vec::new();
    for alpha in [2.0, 3.5, 0.7] {
        let a = true_entropy(&pmf, EntropyKind::Abe { alpha })?;
        let b = true_entropy(&pmf, EntropyKind::Abe { alpha: 1.0 / alpha })?;
        checks.push(within(format!("abe symmetry alpha={alpha}"), a, b, SYMMETRY_TOLERANCE));
    }
    let uniform = Pmf::uniform(4)?;
    for kind in EntropyKind::standard_suite().into_iter().filter(|k| k.is_direct()) {
        let v = asymptotic_constants(uniform.probs(), kind)?.variance;
        checks.push(Check::new(format!("uniform variance {kind}"), v == 0.0, format!("{v:e}")));
    }
    for (name, counts, target) in
        [("zhang n=1", vec![1, 0], 0.0), ("zhang one-hot", vec![7, 0, 0], 0.0), ("zhang (1,1)", vec![1, 1], 1.0)]
    {
        let z = zhang_estimate(&SampleCounts::from_counts(counts)?);
        checks.push(within(name, z, target, 1e-15));
    }
    Ok(checks)
}
