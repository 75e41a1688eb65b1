//! Finite discrete distributions, multinomial sampling and the empirical pmf.
//!
//! Labels are opaque strings; every computation downstream is index based.

use std::collections::HashSet;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on `|Σ p_j − 1|` accepted by [`Pmf::new`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

fn check_labels(labels: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for label in labels {
        if !seen.insert(label.as_str()) {
            return Err(Error::DuplicateLabel(label.clone()));
        }
    }
    Ok(())
}

/// Labels `"1".."r"`, used when the caller supplies bare probabilities.
pub fn default_labels(r: usize) -> Vec<String> {
    (1..=r).map(|j| j.to_string()).collect()
}

/// A validated probability mass function with strictly positive masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PmfFile", into = "PmfFile")]
pub struct Pmf {
    labels: Vec<String>,
    probs: Vec<f64>,
}

/// On-disk JSON shape of a pmf: `{"labels": [...], "probs": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PmfFile {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl TryFrom<PmfFile> for Pmf {
    type Error = Error;

    fn try_from(file: PmfFile) -> Result<Self> {
        Pmf::new(file.labels, file.probs)
    }
}

impl From<Pmf> for PmfFile {
    fn from(pmf: Pmf) -> Self {
        PmfFile { labels: pmf.labels, probs: pmf.probs }
    }
}

impl Pmf {
    /// Validates `weights` as a pmf over `labels`. Weights are stored as
    /// given; nothing is renormalized.
    pub fn new(labels: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if labels.len() != weights.len() {
            return Err(Error::LengthMismatch { left: labels.len(), right: weights.len() });
        }
        if weights.len() < 2 {
            return Err(Error::TooFewCategories { found: weights.len() });
        }
        if let Some((index, &value)) =
            weights.iter().enumerate().find(|(_, w)| w.is_nan() || **w <= 0.0 || w.is_infinite())
        {
            return Err(Error::NonPositiveMass { index, value });
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { sum, tolerance: NORMALIZATION_TOLERANCE });
        }
        check_labels(&labels)?;
        Ok(Pmf { labels, probs: weights })
    }

    /// Same as [`Pmf::new`] with labels `"1".."r"`.
    pub fn from_probs(weights: Vec<f64>) -> Result<Self> {
        Pmf::new(default_labels(weights.len()), weights)
    }

    pub fn uniform(r: usize) -> Result<Self> {
        Pmf::from_probs(vec![1.0 / r as f64; r])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Draws `n` i.i.d. observations and returns their counts. The result is
    /// a pure function of `(self, n, seed)`.
    pub fn sample(&self, n: u64, seed: u64) -> Result<SampleCounts> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(n, &mut rng)
    }

    pub fn sample_with<R: RngCore + ?Sized>(&self, n: u64, rng: &mut R) -> Result<SampleCounts> {
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let sampler = Sampler::new(self);
        let mut counts = vec![0u64; self.len()];
        sampler.fill(n, rng, &mut counts);
        Ok(SampleCounts { labels: self.labels.clone(), counts, n })
    }
}

/// Inverse-CDF sampler over a fixed pmf.
#[derive(Debug, Clone)]
pub struct Sampler {
    // Interior cut points: cumulative mass of categories 0..r-1.
    cuts: Vec<f64>,
}

impl Sampler {
    pub fn new(pmf: &Pmf) -> Self {
        let mut acc = 0.0;
        let cuts = pmf.probs[..pmf.len() - 1]
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Sampler { cuts }
    }

    /// One categorical draw, as an index.
    #[inline]
    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> usize {
        let u = unit_f64(rng.next_u64());
        self.cuts.partition_point(|&c| c <= u)
    }

    /// Adds `n` draws to `counts`.
    pub fn fill<R: RngCore + ?Sized>(&self, n: u64, rng: &mut R, counts: &mut [u64]) {
        for _ in 0..n {
            counts[self.draw(rng)] += 1;
        }
    }
}

/// Maps 64 random bits to `[0, 1)` using the top 53 bits.
#[inline]
fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Category counts from an i.i.d. sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleCounts {
    labels: Vec<String>,
    counts: Vec<u64>,
    n: u64,
}

impl SampleCounts {
    pub fn new(labels: Vec<String>, counts: Vec<u64>) -> Result<Self> {
        if labels.len() != counts.len() {
            return Err(Error::LengthMismatch { left: labels.len(), right: counts.len() });
        }
        if counts.len() < 2 {
            return Err(Error::TooFewCategories { found: counts.len() });
        }
        check_labels(&labels)?;
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::EmptySample);
        }
        Ok(SampleCounts { labels, counts, n })
    }

    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        SampleCounts::new(default_labels(counts.len()), counts)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Number of categories with a non-zero count.
    pub fn observed(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    pub fn empirical(&self) -> EmpiricalPmf {
        empirical_pmf(self)
    }
}

/// The empirical pmf `p̂_j = counts_j / n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalPmf {
    pub labels: Vec<String>,
    pub freqs: Vec<f64>,
    pub n: u64,
    pub unobserved: Vec<usize>,
}

pub fn empirical_pmf(counts: &SampleCounts) -> EmpiricalPmf {
    let n = counts.n as f64;
    let freqs = counts.counts.iter().map(|&c| c as f64 / n).collect();
    let unobserved = counts.counts.iter().enumerate().filter(|(_, &c)| c == 0).map(|(j, _)| j).collect();
    EmpiricalPmf { labels: counts.labels.clone(), freqs, n: counts.n, unobserved }
}

/// `a_n = max_j |p̂_j − p_j|`.
pub fn sup_deviation(emp: &EmpiricalPmf, truth: &Pmf) -> Result<f64> {
    if emp.labels != truth.labels {
        return Err(Error::LabelMismatch);
    }
    Ok(emp.freqs.iter().zip(&truth.probs).map(|(f, p)| (f - p).abs()).fold(0.0, f64::max))
}
