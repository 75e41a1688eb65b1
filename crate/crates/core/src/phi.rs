//! φ-entropy summations `J(p) = Σ_j φ(p_j)` and their asymptotic constants.
//!
//! For a twice-differentiable kernel φ the plug-in `J(p̂_n)` satisfies
//!
//! * `limsup |J(p̂_n) − J(p)| / a_n ≤ A_J(p)` almost surely, with
//!   `A_J(p) = Σ_j |φ′(p_j)|` and `a_n = max_j |p̂_j − p_j|`;
//! * `√n (J(p̂_n) − J(p)) ⇝ N(0, σ²_J(p))`.
//!
//! The variance is the quadratic form of `(φ′(p_j))_j` against the multinomial
//! covariance `diag(p) − p pᵀ`, i.e. the variance of `φ′(p_X)` for `X ~ p`:
//!
//! ```text
//! σ²_J(p) = Σ_j p_j φ′(p_j)² − (Σ_j p_j φ′(p_j))²
//! ```

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::distribution::{Pmf, NORMALIZATION_TOLERANCE};
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, weighted_variance};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A kernel φ on (0, 1) together with φ′, φ″ and its value at zero mass.
#[derive(Clone)]
pub struct PhiSpec {
    name: String,
    value: ScalarFn,
    d1: ScalarFn,
    d2: ScalarFn,
    /// `lim_{s→0⁺} φ(s)`, or `None` when the limit is not finite.
    zero_limit: Option<f64>,
}

impl fmt::Debug for PhiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhiSpec")
            .field("name", &self.name)
            .field("zero_limit", &self.zero_limit)
            .finish_non_exhaustive()
    }
}

impl PhiSpec {
    pub fn new<V, D1, D2>(name: impl Into<String>, value: V, d1: D1, d2: D2, zero_limit: Option<f64>) -> Self
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        D1: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        PhiSpec { name: name.into(), value: Arc::new(value), d1: Arc::new(d1), d2: Arc::new(d2), zero_limit }
    }

    /// `φ(s) = s`; `J ≡ 1` on every pmf.
    pub fn identity() -> Self {
        PhiSpec::new("identity", |s| s, |_| 1.0, |_| 0.0, Some(0.0))
    }

    /// `φ(s) = −s ln s`.
    pub fn shannon() -> Self {
        PhiSpec::new("shannon", |s| -s * s.ln(), |s| -(1.0 + s.ln()), |s| -1.0 / s, Some(0.0))
    }

    /// `φ(s) = s^γ`, whose summation is the power sum `S_γ`.
    pub fn power(gamma: f64) -> Self {
        let zero = if gamma > 0.0 {
            Some(0.0)
        } else if gamma == 0.0 {
            Some(1.0)
        } else {
            None
        };
        PhiSpec::new(
            format!("power({gamma})"),
            move |s| s.powf(gamma),
            move |s| gamma * s.powf(gamma - 1.0),
            move |s| gamma * (gamma - 1.0) * s.powf(gamma - 2.0),
            zero,
        )
    }

    /// `φ(s) = (s^α − s)/(1 − α)`, so that `J = (S_α − 1)/(1 − α)`.
    pub fn tsallis(alpha: f64) -> Self {
        let c = 1.0 - alpha;
        PhiSpec::new(
            format!("tsallis({alpha})"),
            move |s| (s.powf(alpha) - s) / c,
            move |s| (alpha * s.powf(alpha - 1.0) - 1.0) / c,
            move |s| -alpha * s.powf(alpha - 2.0),
            Some(0.0),
        )
    }

    /// `φ(s) = −(s^α − s^{1/α})/(α − 1/α)`.
    pub fn abe(alpha: f64) -> Self {
        let inv = 1.0 / alpha;
        let c = alpha - inv;
        PhiSpec::new(
            format!("abe({alpha})"),
            move |s| -(s.powf(alpha) - s.powf(inv)) / c,
            move |s| -(alpha * s.powf(alpha - 1.0) - inv * s.powf(inv - 1.0)) / c,
            move |s| -(alpha * (alpha - 1.0) * s.powf(alpha - 2.0) - inv * (inv - 1.0) * s.powf(inv - 2.0)) / c,
            Some(0.0),
        )
    }

    /// `φ(s) = (s^{1−κ} − s^{1+κ})/(2κ)`.
    pub fn kappa(kappa: f64) -> Self {
        let c = 2.0 * kappa;
        PhiSpec::new(
            format!("kappa({kappa})"),
            move |s| (s.powf(1.0 - kappa) - s.powf(1.0 + kappa)) / c,
            move |s| ((1.0 - kappa) * s.powf(-kappa) - (1.0 + kappa) * s.powf(kappa)) / c,
            move |s| -((1.0 - kappa) * s.powf(-kappa - 1.0) + (1.0 + kappa) * s.powf(kappa - 1.0)) / 2.0,
            Some(0.0),
        )
    }

    /// `φ(s) + c·s`. On a pmf this shifts `J` by exactly `c` and leaves σ²
    /// unchanged.
    pub fn with_linear_term(&self, c: f64) -> Self {
        let (value, d1, d2) = (self.value.clone(), self.d1.clone(), self.d2.clone());
        PhiSpec {
            name: format!("{} + {c}s", self.name),
            value: Arc::new(move |s| value(s) + c * s),
            d1: Arc::new(move |s| d1(s) + c),
            d2,
            zero_limit: self.zero_limit,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self, s: f64) -> f64 {
        (self.value)(s)
    }

    pub fn d1(&self, s: f64) -> f64 {
        (self.d1)(s)
    }

    pub fn d2(&self, s: f64) -> f64 {
        (self.d2)(s)
    }

    pub fn zero_limit(&self) -> Option<f64> {
        self.zero_limit
    }
}

/// `A_J(p)` and `σ²_J(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticSummary {
    pub a_constant: f64,
    pub variance: f64,
}

pub(crate) fn check_normalized(masses: &[f64]) -> Result<()> {
    if let Some((index, &value)) = masses.iter().enumerate().find(|(_, m)| !(**m >= 0.0 && **m <= 1.0)) {
        return Err(Error::NonPositiveMass { index, value });
    }
    let sum: f64 = masses.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized { sum, tolerance: NORMALIZATION_TOLERANCE });
    }
    Ok(())
}

pub(crate) fn check_positive(masses: &[f64]) -> Result<()> {
    match masses.iter().enumerate().find(|(_, m)| m.is_nan() || **m <= 0.0) {
        Some((index, &value)) => Err(Error::NonPositiveMass { index, value }),
        None => Ok(()),
    }
}

/// `Σ_j φ(m_j)`; cells with zero mass contribute `φ`'s zero limit.
pub fn j_summation(masses: &[f64], phi: &PhiSpec) -> Result<f64> {
    check_normalized(masses)?;
    let mut terms = Vec::with_capacity(masses.len());
    for (index, &m) in masses.iter().enumerate() {
        if m == 0.0 {
            terms.push(phi.zero_limit.ok_or(Error::ZeroMassUndefined { index })?);
        } else {
            terms.push(phi.value(m));
        }
    }
    Ok(compensated_sum(terms))
}

/// Power sum `S_α = Σ_j m_j^α` for `α > 0`, `α ≠ 1`, with `0^α = 0`.
pub fn power_sum(masses: &[f64], alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha == 1.0 {
        return Err(Error::InvalidParameter(format!("power sum order must lie in (0,1)∪(1,∞), got {alpha}")));
    }
    check_normalized(masses)?;
    Ok(power_sum_unchecked(masses, alpha))
}

pub(crate) fn power_sum_unchecked(masses: &[f64], gamma: f64) -> f64 {
    compensated_sum(masses.iter().map(|&m| if m == 0.0 { 0.0 } else { m.powf(gamma) }))
}

/// `Σ_j |φ′(m_j)|` over strictly positive masses.
pub fn a_constant_of(masses: &[f64], phi: &PhiSpec) -> Result<f64> {
    check_positive(masses)?;
    Ok(compensated_sum(masses.iter().map(|&m| phi.d1(m).abs())))
}

/// `σ²_J` over strictly positive masses summing to one.
pub fn asymptotic_variance_of(masses: &[f64], phi: &PhiSpec) -> Result<f64> {
    check_positive(masses)?;
    let slopes: Vec<f64> = masses.iter().map(|&m| phi.d1(m)).collect();
    Ok(weighted_variance(masses, &slopes))
}

pub fn a_constant(pmf: &Pmf, phi: &PhiSpec) -> f64 {
    compensated_sum(pmf.probs().iter().map(|&p| phi.d1(p).abs()))
}

pub fn asymptotic_variance(pmf: &Pmf, phi: &PhiSpec) -> f64 {
    let slopes: Vec<f64> = pmf.probs().iter().map(|&p| phi.d1(p)).collect();
    weighted_variance(pmf.probs(), &slopes)
}

pub fn summary(pmf: &Pmf, phi: &PhiSpec) -> AsymptoticSummary {
    AsymptoticSummary { a_constant: a_constant(pmf, phi), variance: asymptotic_variance(pmf, phi) }
}

/// Finite-difference step used by [`check_derivatives`].
pub const DERIVATIVE_STEP: f64 = 1e-6;
/// Largest accepted derivative error in [`check_derivatives`].
pub const DERIVATIVE_TOLERANCE: f64 = 1e-5;

/// Worst disagreement between the analytic derivatives of a kernel and
/// central differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub max_d1_error: f64,
    pub worst_d1_at: f64,
    pub max_d2_error: f64,
    pub worst_d2_at: f64,
    pub passed: bool,
}

/// `0.01, 0.02, …, 0.99`.
pub fn default_grid() -> Vec<f64> {
    (1..=99).map(|i| i as f64 / 100.0).collect()
}

// Relative error with a unit floor on the scale; φ′ has roots inside (0,1).
fn scaled_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1.0)
}

pub fn check_derivatives(phi: &PhiSpec, grid: &[f64]) -> DerivativeReport {
    let h = DERIVATIVE_STEP;
    let mut report = DerivativeReport {
        max_d1_error: 0.0,
        worst_d1_at: f64::NAN,
        max_d2_error: 0.0,
        worst_d2_at: f64::NAN,
        passed: true,
    };
    for &s in grid {
        let fd1 = (phi.value(s + h) - phi.value(s - h)) / (2.0 * h);
        let fd2 = (phi.d1(s + h) - phi.d1(s - h)) / (2.0 * h);
        let e1 = scaled_error(phi.d1(s), fd1);
        let e2 = scaled_error(phi.d2(s), fd2);
        // A NaN error is kept, so it fails the final comparison.
        if !report.max_d1_error.is_nan() && (e1.is_nan() || e1 > report.max_d1_error) {
            report.max_d1_error = e1;
            report.worst_d1_at = s;
        }
        if !report.max_d2_error.is_nan() && (e2.is_nan() || e2 > report.max_d2_error) {
            report.max_d2_error = e2;
            report.worst_d2_at = s;
        }
    }
    report.passed = report.max_d1_error <= DERIVATIVE_TOLERANCE && report.max_d2_error <= DERIVATIVE_TOLERANCE;
    report
}
