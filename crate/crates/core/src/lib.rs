//! Plug-in estimation of discrete entropies.
//!
//! Shannon, Rényi, Tsallis, Landsberg–Vedral, Abe, κ and Varma entropies are
//! estimated from i.i.d. categorical samples by evaluating the entropy at the
//! empirical pmf. Each estimator comes with its almost-sure rate constant and
//! CLT variance, so point estimates carry standard errors and confidence
//! intervals. The [`montecarlo`] module replicates sampling to check those
//! asymptotics empirically, and provides an exact enumeration oracle for
//! small samples.
//!
//! ```
//! use dentropy::{plugin_estimate, EntropyKind, SampleCounts};
//!
//! let counts = SampleCounts::from_counts(vec![40, 25, 35]).unwrap();
//! let est = plugin_estimate(&counts, EntropyKind::Shannon, 0.95).unwrap();
//! assert!((est.point - 1.0805276).abs() < 1e-6);
//! ```

pub mod distribution;
pub mod entropies;
pub mod error;
pub mod inference;
pub mod io;
pub mod montecarlo;
pub mod numeric;
pub mod phi;
pub mod validation;

pub use distribution::{empirical_pmf, sup_deviation, EmpiricalPmf, Pmf, SampleCounts};
pub use entropies::{
    asymptotic_constants, limit_bridge, miller_madow_correct, phi_kernel, plugin_estimate, true_entropy,
    zhang_estimate, Correction, EntropyKind, EstimateResult, Kernel,
};
pub use error::{Error, Result};
pub use phi::{AsymptoticSummary, PhiSpec};
