//! Replicated sampling experiments that check the asymptotic theory, and an
//! exact enumeration oracle for small samples.
//!
//! Every replication draws from its own ChaCha8 stream seeded by
//! [`replication_seed`]`(master_seed, kind_index, n, replication)`. Results
//! are collected in replication order, so parallel execution never changes the
//! output.

use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distribution::{sup_deviation, Pmf, SampleCounts, Sampler};
use crate::entropies::{miller_madow_shift, phi_kernel, zhang_estimate, EntropyKind, Kernel};
use crate::error::{Error, Result};
use crate::inference::{NormalityReport, SigmaSource, StandardizedSample};
use crate::numeric::{compensated_sum, ln_factorials, mean_variance};
use crate::phi::{self, AsymptoticSummary, PhiSpec};

pub const SCHEMA_VERSION: u32 = 1;

/// Largest KS distance accepted by a CLT check.
pub const CLT_KS_LIMIT: f64 = 0.05;
/// Accepted band for `Var(√n(Ê − E)) / σ²`.
pub const VARIANCE_RATIO_BAND: (f64, f64) = (0.9, 1.1);
/// Replications below this are rejected for CLT experiments.
pub const MIN_CLT_REPLICATIONS: usize = 100;
/// Largest fraction of replications that may be excluded for undefined
/// zero-mass kernels.
pub const MAX_EXCLUDED_FRACTION: f64 = 0.01;
/// Slack on `A_J` in the rate experiment.
pub const RATE_SLACK: f64 = 1.05;
/// Sample sizes below this are reported but never counted as rate violations.
pub const RATE_MIN_CHECKED_N: u64 = 10_000;
/// Largest number of outcomes the exact oracle will enumerate.
pub const ENUMERATION_LIMIT: u128 = 100_000;
pub const DEFAULT_HISTOGRAM_BINS: usize = 30;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one replication: each coordinate is folded in through a SplitMix64
/// round, `h ← splitmix(h ⊕ splitmix(x))`, starting from the master seed.
pub fn replication_seed(master_seed: u64, kind_index: u64, n: u64, replication: u64) -> u64 {
    [kind_index, n, replication].into_iter().fold(splitmix64(master_seed), |h, x| splitmix64(h ^ splitmix64(x)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorTag {
    Plugin,
    PluginMillerMadow,
    Zhang,
}

/// Something whose plug-in estimate can be replicated: an entropy family
/// under an estimator, or a bare φ-summation.
pub trait Functional: Sync {
    fn label(&self) -> String;
    fn estimate(&self, counts: &SampleCounts) -> Result<f64>;
    fn truth(&self, pmf: &Pmf) -> Result<f64>;
    fn summary(&self, pmf: &Pmf) -> Result<AsymptoticSummary>;
}

/// An entropy family evaluated by one of the estimators.
#[derive(Debug, Clone)]
pub struct KindEstimator {
    kind: EntropyKind,
    kernel: Kernel,
    tag: EstimatorTag,
}

impl KindEstimator {
    pub fn new(kind: EntropyKind, tag: EstimatorTag) -> Result<Self> {
        if tag != EstimatorTag::Plugin && kind != EntropyKind::Shannon {
            return Err(Error::WrongFamily(kind.to_string()));
        }
        Ok(KindEstimator { kind, kernel: phi_kernel(kind)?, tag })
    }

    pub fn kind(&self) -> EntropyKind {
        self.kind
    }
}

impl Functional for KindEstimator {
    fn label(&self) -> String {
        self.kind.family_name().to_string()
    }

    fn estimate(&self, counts: &SampleCounts) -> Result<f64> {
        match self.tag {
            EstimatorTag::Plugin => self.kernel.value(&counts.empirical().freqs),
            EstimatorTag::PluginMillerMadow => {
                Ok(self.kernel.value(&counts.empirical().freqs)? + miller_madow_shift(counts))
            }
            EstimatorTag::Zhang => Ok(zhang_estimate(counts)),
        }
    }

    fn truth(&self, pmf: &Pmf) -> Result<f64> {
        self.kernel.value(pmf.probs())
    }

    fn summary(&self, pmf: &Pmf) -> Result<AsymptoticSummary> {
        self.kernel.summary(pmf.probs())
    }
}

/// Plug-in `J(p̂_n)` for an arbitrary kernel.
#[derive(Debug, Clone)]
pub struct PhiFunctional(pub PhiSpec);

impl Functional for PhiFunctional {
    fn label(&self) -> String {
        self.0.name().to_string()
    }

    fn estimate(&self, counts: &SampleCounts) -> Result<f64> {
        phi::j_summation(&counts.empirical().freqs, &self.0)
    }

    fn truth(&self, pmf: &Pmf) -> Result<f64> {
        phi::j_summation(pmf.probs(), &self.0)
    }

    fn summary(&self, pmf: &Pmf) -> Result<AsymptoticSummary> {
        Ok(phi::summary(pmf, &self.0))
    }
}

/// Design of a simulation study.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub pmf: Pmf,
    pub kinds: Vec<EntropyKind>,
    pub n_grid: Vec<u64>,
    pub replications: usize,
    pub master_seed: u64,
    pub estimator: EstimatorTag,
    pub histogram_bins: usize,
}

/// `100, 200, …, 30000`.
pub fn default_trace_grid() -> Vec<u64> {
    (1..=300).map(|k| k * 100).collect()
}

/// `(0.4, 0.25, 0.35)` over labels `1, 2, 3`.
pub fn reference_pmf() -> Pmf {
    Pmf::from_probs(vec![0.4, 0.25, 0.35]).expect("reference pmf is valid")
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            pmf: reference_pmf(),
            kinds: EntropyKind::standard_suite(),
            n_grid: vec![10_000],
            replications: 2000,
            master_seed: 42,
            estimator: EstimatorTag::Plugin,
            histogram_bins: DEFAULT_HISTOGRAM_BINS,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kinds.is_empty() {
            return Err(Error::InvalidParameter("no entropy families requested".into()));
        }
        if self.n_grid.is_empty() || self.n_grid[0] == 0 {
            return Err(Error::InvalidParameter("sample sizes must be positive".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("sample sizes must be strictly increasing".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidParameter("at least one replication is required".into()));
        }
        for kind in &self.kinds {
            KindEstimator::new(*kind, self.estimator)?;
        }
        Ok(())
    }

    fn estimators(&self) -> Result<Vec<KindEstimator>> {
        self.kinds.iter().map(|k| KindEstimator::new(*k, self.estimator)).collect()
    }
}

/// Replicates `functional` and returns per-replication estimates; `None`
/// marks a replication excluded because the kernel is undefined at an
/// unobserved category.
fn replicate(
    pmf: &Pmf,
    functional: &dyn Functional,
    kind_index: u64,
    n: u64,
    replications: usize,
    master_seed: u64,
) -> Result<Vec<Option<(f64, SampleCounts)>>> {
    let sampler = Sampler::new(pmf);
    (0..replications as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(replication_seed(master_seed, kind_index, n, rep));
            let mut counts = vec![0u64; pmf.len()];
            sampler.fill(n, &mut rng, &mut counts);
            let counts = SampleCounts::new(pmf.labels().to_vec(), counts)?;
            match functional.estimate(&counts) {
                Ok(v) => Ok(Some((v, counts))),
                Err(Error::ZeroMassUndefined { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Normality diagnostics of one (family, n) cell.
#[derive(Debug, Clone, Serialize)]
pub struct CltEntry {
    pub kind: EntropyKind,
    pub n: u64,
    pub replications: usize,
    pub excluded: usize,
    pub truth: f64,
    /// σ² used to standardize.
    pub theoretical_variance: f64,
    /// Sample variance of `√n(Ê − E)` over `theoretical_variance`.
    pub empirical_variance_ratio: f64,
    /// Replication mean of `n(Ê − E)`.
    pub bias_times_n: f64,
    pub normality: NormalityReport,
    pub passed: bool,
    #[serde(skip)]
    pub standardized: StandardizedSample,
}

#[derive(Debug, Clone, Serialize)]
pub struct CltReport {
    pub schema_version: u32,
    pub pmf: Pmf,
    pub estimator: EstimatorTag,
    pub master_seed: u64,
    pub replications: usize,
    pub ks_limit: f64,
    pub variance_ratio_band: (f64, f64),
    pub entries: Vec<CltEntry>,
    pub passed: bool,
}

/// One CLT cell standardized by an explicit `sigma`.
#[allow(clippy::too_many_arguments)]
pub fn clt_entry(
    pmf: &Pmf,
    estimator: &KindEstimator,
    kind_index: u64,
    n: u64,
    replications: usize,
    master_seed: u64,
    sigma: f64,
    bins: usize,
) -> Result<CltEntry> {
    let truth = estimator.truth(pmf)?;
    let draws = replicate(pmf, estimator, kind_index, n, replications, master_seed)?;
    let excluded = draws.iter().filter(|d| d.is_none()).count();
    if excluded as f64 > MAX_EXCLUDED_FRACTION * replications as f64 {
        return Err(Error::TooManyExclusions { excluded, replications });
    }
    let root_n = (n as f64).sqrt();
    let scaled: Vec<f64> = draws.iter().flatten().map(|(v, _)| root_n * (v - truth)).collect();
    let (mean_scaled, var_scaled) = mean_variance(&scaled);
    let values: Vec<f64> = scaled.iter().map(|x| x / sigma).collect();
    let normality = NormalityReport::new(&values, bins);
    let ratio = var_scaled / (sigma * sigma);
    let passed =
        normality.ks_distance <= CLT_KS_LIMIT && (VARIANCE_RATIO_BAND.0..=VARIANCE_RATIO_BAND.1).contains(&ratio);
    Ok(CltEntry {
        kind: estimator.kind(),
        n,
        replications,
        excluded,
        truth,
        theoretical_variance: sigma * sigma,
        empirical_variance_ratio: ratio,
        bias_times_n: root_n * mean_scaled,
        normality,
        passed,
        standardized: StandardizedSample { values, n, family: estimator.kind(), sigma_source: SigmaSource::TruePmf },
    })
}

/// Replicates every (family, n) cell and standardizes by σ at the true pmf.
pub fn run_clt_experiment(config: &ExperimentConfig) -> Result<CltReport> {
    config.validate()?;
    if config.replications < MIN_CLT_REPLICATIONS {
        return Err(Error::InvalidParameter(format!(
            "CLT experiments need at least {MIN_CLT_REPLICATIONS} replications"
        )));
    }
    let estimators = config.estimators()?;
    let mut sigmas = Vec::with_capacity(estimators.len());
    for est in &estimators {
        let variance = est.summary(&config.pmf)?.variance;
        if variance.is_nan() || variance <= 1e-20 {
            return Err(Error::DegenerateVariance { family: est.kind().to_string() });
        }
        sigmas.push(variance.sqrt());
    }
    let mut entries = Vec::new();
    for (index, (est, sigma)) in estimators.iter().zip(&sigmas).enumerate() {
        for &n in &config.n_grid {
            entries.push(clt_entry(
                &config.pmf,
                est,
                index as u64,
                n,
                config.replications,
                config.master_seed,
                *sigma,
                config.histogram_bins,
            )?);
        }
    }
    let passed = entries.iter().all(|e| e.passed);
    Ok(CltReport {
        schema_version: SCHEMA_VERSION,
        pmf: config.pmf.clone(),
        estimator: config.estimator,
        master_seed: config.master_seed,
        replications: config.replications,
        ks_limit: CLT_KS_LIMIT,
        variance_ratio_band: VARIANCE_RATIO_BAND,
        entries,
        passed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RateRow {
    pub n: u64,
    /// Max over replications of `|J(p̂) − J(p)| / a_n`.
    pub max_ratio: f64,
    pub checked: bool,
    pub violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateEntry {
    pub label: String,
    pub a_constant: f64,
    pub bound: f64,
    pub rows: Vec<RateRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    pub schema_version: u32,
    pub replications: usize,
    pub master_seed: u64,
    pub slack: f64,
    pub min_checked_n: u64,
    pub entries: Vec<RateEntry>,
    pub passed: bool,
}

impl RateReport {
    pub fn violations(&self) -> usize {
        self.entries.iter().flat_map(|e| &e.rows).map(|r| r.violations).sum()
    }
}

/// Rate ratios of the plug-in `functional`. A replication whose empirical
/// pmf equals `pmf` exactly has ratio 0.
pub fn rate_entry(
    pmf: &Pmf,
    functional: &dyn Functional,
    kind_index: u64,
    n_grid: &[u64],
    replications: usize,
    master_seed: u64,
) -> Result<RateEntry> {
    let truth = functional.truth(pmf)?;
    let a_constant = functional.summary(pmf)?.a_constant;
    let bound = RATE_SLACK * a_constant;
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let draws = replicate(pmf, functional, kind_index, n, replications, master_seed)?;
        let mut ratios = Vec::with_capacity(draws.len());
        for (value, counts) in draws.iter().flatten() {
            let a_n = sup_deviation(&counts.empirical(), pmf)?;
            ratios.push(if a_n > 0.0 { (value - truth).abs() / a_n } else { 0.0 });
        }
        let checked = n >= RATE_MIN_CHECKED_N;
        let violations = if checked { ratios.iter().filter(|&&r| r > bound).count() } else { 0 };
        rows.push(RateRow { n, max_ratio: ratios.iter().copied().fold(0.0, f64::max), checked, violations });
    }
    Ok(RateEntry { label: functional.label(), a_constant, bound, rows })
}

/// Plug-in rate check for every family in `config` (the estimator tag is
/// ignored: the bound concerns `J(p̂_n)`).
pub fn run_rate_experiment(config: &ExperimentConfig) -> Result<RateReport> {
    config.validate()?;
    let mut entries = Vec::with_capacity(config.kinds.len());
    for (index, kind) in config.kinds.iter().enumerate() {
        let est = KindEstimator::new(*kind, EstimatorTag::Plugin)?;
        entries.push(rate_entry(
            &config.pmf,
            &est,
            index as u64,
            &config.n_grid,
            config.replications,
            config.master_seed,
        )?);
    }
    let mut report = RateReport {
        schema_version: SCHEMA_VERSION,
        replications: config.replications,
        master_seed: config.master_seed,
        slack: RATE_SLACK,
        min_checked_n: RATE_MIN_CHECKED_N,
        entries,
        passed: false,
    };
    report.passed = report.violations() == 0;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub family: String,
    pub kind: EntropyKind,
    pub n: u64,
    pub estimate: f64,
    pub truth: f64,
}

/// Estimates along one growing sample path: the observations at size `n`
/// are a prefix of those at every larger grid size. The same path is shared
/// by all families.
pub fn run_trace_experiment(config: &ExperimentConfig) -> Result<Vec<TraceRow>> {
    config.validate()?;
    let estimators = config.estimators()?;
    let sampler = Sampler::new(&config.pmf);
    let mut rng = ChaCha8Rng::seed_from_u64(replication_seed(config.master_seed, u64::MAX, 0, 0));
    let mut counts = vec![0u64; config.pmf.len()];
    let mut drawn = 0;
    let mut snapshots = Vec::with_capacity(config.n_grid.len());
    for &n in &config.n_grid {
        sampler.fill(n - drawn, &mut rng, &mut counts);
        drawn = n;
        snapshots.push(SampleCounts::new(config.pmf.labels().to_vec(), counts.clone())?);
    }
    let mut rows = Vec::with_capacity(estimators.len() * snapshots.len());
    for est in &estimators {
        let truth = est.truth(&config.pmf)?;
        for snapshot in &snapshots {
            rows.push(TraceRow {
                family: est.label(),
                kind: est.kind(),
                n: snapshot.n(),
                estimate: est.estimate(snapshot)?,
                truth,
            });
        }
    }
    Ok(rows)
}

/// Exact moments of an estimator over all multinomial outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactMoments {
    pub mean: f64,
    pub variance: f64,
    pub outcomes: usize,
}

/// Number of count vectors of length `r` summing to `n`: `C(n + r − 1, r − 1)`.
pub fn outcome_count(n: u64, r: usize) -> u128 {
    let k = (r as u128).saturating_sub(1);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = match acc.checked_mul(n as u128 + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    acc
}

fn for_each_composition(n: u64, r: usize, visit: &mut dyn FnMut(&[u64]) -> Result<()>) -> Result<()> {
    fn rec(pos: usize, remaining: u64, buf: &mut [u64], visit: &mut dyn FnMut(&[u64]) -> Result<()>) -> Result<()> {
        if pos + 1 == buf.len() {
            buf[pos] = remaining;
            return visit(buf);
        }
        for c in (0..=remaining).rev() {
            buf[pos] = c;
            rec(pos + 1, remaining - c, buf, visit)?;
        }
        Ok(())
    }
    let mut buf = vec![0u64; r];
    rec(0, n, &mut buf, visit)
}

/// Exact `E[f]` and `Var[f]` where `f` is evaluated on every count vector,
/// weighted by its multinomial probability.
pub fn exact_moments<F>(pmf: &Pmf, n: u64, mut f: F) -> Result<ExactMoments>
where
    F: FnMut(&SampleCounts) -> Result<f64>,
{
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let outcomes = outcome_count(n, pmf.len());
    if outcomes > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { outcomes, limit: ENUMERATION_LIMIT });
    }
    let ln_fact = ln_factorials(n as usize);
    let ln_p: Vec<f64> = pmf.probs().iter().map(|p| p.ln()).collect();
    let mut weights = Vec::with_capacity(outcomes as usize);
    let mut values = Vec::with_capacity(outcomes as usize);
    for_each_composition(n, pmf.len(), &mut |c| {
        let log_w =
            ln_fact[n as usize] + c.iter().zip(&ln_p).map(|(&k, lp)| k as f64 * lp - ln_fact[k as usize]).sum::<f64>();
        let counts = SampleCounts::new(pmf.labels().to_vec(), c.to_vec())?;
        values.push(f(&counts)?);
        weights.push(log_w.exp());
        Ok(())
    })?;
    let total = compensated_sum(weights.iter().copied());
    let mean = compensated_sum(weights.iter().zip(&values).map(|(w, v)| w * v)) / total;
    let variance = compensated_sum(weights.iter().zip(&values).map(|(w, v)| w * (v - mean) * (v - mean))) / total;
    Ok(ExactMoments { mean, variance, outcomes: values.len() })
}

/// Exact mean and variance of the plug-in estimate of `kind`.
pub fn exact_enumeration_oracle(pmf: &Pmf, n: u64, kind: EntropyKind) -> Result<ExactMoments> {
    let est = KindEstimator::new(kind, EstimatorTag::Plugin)?;
    exact_moments(pmf, n, |c| est.estimate(c))
}

/// Monte Carlo mean and variance of an estimator, with standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloMoments {
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    /// Standard error of the sample variance from the fourth central moment.
    pub variance_se: f64,
    pub replications: usize,
}

pub fn monte_carlo_moments(
    pmf: &Pmf,
    functional: &dyn Functional,
    n: u64,
    replications: usize,
    master_seed: u64,
) -> Result<MonteCarloMoments> {
    if replications < 4 {
        return Err(Error::InvalidParameter("at least 4 replications are required".into()));
    }
    let draws = replicate(pmf, functional, 0, n, replications, master_seed)?;
    let xs: Vec<f64> = draws.into_iter().flatten().map(|(v, _)| v).collect();
    let r = xs.len() as f64;
    let (mean, variance) = mean_variance(&xs);
    let m4 = compensated_sum(xs.iter().map(|x| (x - mean).powi(4))) / r;
    let var_of_var = ((m4 - variance * variance * (r - 3.0) / (r - 1.0)) / r).max(0.0);
    Ok(MonteCarloMoments {
        mean,
        mean_se: (variance / r).sqrt(),
        variance,
        variance_se: var_of_var.sqrt(),
        replications: xs.len(),
    })
}
