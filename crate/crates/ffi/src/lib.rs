//! C ABI over the `dentropy` estimators.
//!
//! Distributions and count vectors cross the boundary as opaque handles that
//! the caller releases with the matching `*_free` function. Every fallible
//! function returns a [`DentStatus`]; on failure a description is available
//! from [`dent_last_error`] on the same thread. Panics are caught and
//! reported as [`DentStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dentropy::{EntropyKind, Error, Pmf, SampleCounts};

/// Opaque probability mass function.
pub struct DentPmf(Pmf);

/// Opaque category counts.
pub struct DentCounts(SampleCounts);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DentStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidDistribution = 2,
    InvalidParameter = 3,
    ZeroMassUndefined = 4,
    WrongFamily = 5,
    DegenerateVariance = 6,
    BufferTooSmall = 7,
    Panic = 8,
    Internal = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DentFamily {
    Shannon = 0,
    Renyi = 1,
    Tsallis = 2,
    LandsbergVedral = 3,
    Abe = 4,
    Kappa = 5,
    Varma = 6,
}

/// Family selector. Only the parameters the family uses are read.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DentKind {
    pub family: DentFamily,
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DentEstimate {
    pub point: f64,
    pub variance: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub level: f64,
    pub n: u64,
    pub unobserved: u64,
    /// 1 when the Miller–Madow shift was applied.
    pub miller_madow: i32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct DentAsymptotics {
    pub a_constant: f64,
    pub variance: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> DentStatus {
    match err {
        Error::TooFewCategories { .. }
        | Error::NonPositiveMass { .. }
        | Error::NotNormalized { .. }
        | Error::DuplicateLabel(_)
        | Error::LengthMismatch { .. }
        | Error::EmptySample
        | Error::LabelMismatch => DentStatus::InvalidDistribution,
        Error::ZeroMassUndefined { .. } => DentStatus::ZeroMassUndefined,
        Error::InvalidParameter(_) | Error::TooLarge { .. } | Error::TooManyExclusions { .. } => {
            DentStatus::InvalidParameter
        }
        Error::WrongFamily(_) => DentStatus::WrongFamily,
        Error::DegenerateVariance { .. } => DentStatus::DegenerateVariance,
        _ => DentStatus::Internal,
    }
}

/// Runs `f`, translating errors and panics into a status code.
fn guard<F: FnOnce() -> Result<(), (DentStatus, String)>>(f: F) -> DentStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            DentStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside dentropy".to_string());
            DentStatus::Panic
        }
    }
}

fn lib<T>(r: dentropy::Result<T>) -> Result<T, (DentStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn non_null<'a, T>(p: *const T, what: &str) -> Result<&'a T, (DentStatus, String)> {
    // SAFETY: callers pass either NULL or a pointer obtained from this library
    // (or a valid out-parameter) that outlives the call.
    unsafe { p.as_ref() }.ok_or_else(|| (DentStatus::NullPointer, format!("{what} is NULL")))
}

fn out_ptr<T>(p: *mut T, what: &str) -> Result<*mut T, (DentStatus, String)> {
    if p.is_null() {
        Err((DentStatus::NullPointer, format!("{what} is NULL")))
    } else {
        Ok(p)
    }
}

fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (DentStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err((DentStatus::NullPointer, format!("{what} is NULL")));
    }
    // SAFETY: the caller guarantees `p` points to `len` readable elements.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

fn kind_of(k: &DentKind) -> Result<EntropyKind, (DentStatus, String)> {
    let kind = match k.family {
        DentFamily::Shannon => EntropyKind::Shannon,
        DentFamily::Renyi => EntropyKind::Renyi { alpha: k.alpha },
        DentFamily::Tsallis => EntropyKind::Tsallis { alpha: k.alpha },
        DentFamily::LandsbergVedral => EntropyKind::LandsbergVedral { alpha: k.alpha },
        DentFamily::Abe => EntropyKind::Abe { alpha: k.alpha },
        DentFamily::Kappa => EntropyKind::Kappa { kappa: k.kappa },
        DentFamily::Varma => EntropyKind::Varma { alpha: k.alpha, beta: k.beta },
    };
    lib(kind.validate())?;
    Ok(kind)
}

fn write_estimate(out: *mut DentEstimate, r: &dentropy::EstimateResult) {
    let value = DentEstimate {
        point: r.point,
        variance: r.variance,
        std_error: r.std_error,
        ci_low: r.ci_low,
        ci_high: r.ci_high,
        level: r.level,
        n: r.n,
        unobserved: r.diagnostics.unobserved as u64,
        miller_madow: (r.correction == dentropy::Correction::MillerMadow) as i32,
    };
    // SAFETY: `out` was checked non-null and points to caller-owned storage.
    unsafe { out.write(value) };
}

/// Builds a pmf over labels `"1".."len"`. Masses must be positive and sum to
/// one within 1e-9.
///
/// # Safety
/// `probs` must point to `len` doubles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dent_pmf_new(probs: *const f64, len: usize, out: *mut *mut DentPmf) -> DentStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let probs = slice(probs, len, "probs")?.to_vec();
        let pmf = lib(Pmf::from_probs(probs))?;
        *out = Box::into_raw(Box::new(DentPmf(pmf)));
        Ok(())
    })
}

/// # Safety
/// `pmf` must be NULL or a handle from [`dent_pmf_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dent_pmf_free(pmf: *mut DentPmf) {
    if !pmf.is_null() {
        drop(Box::from_raw(pmf));
    }
}

/// Number of categories, or 0 for NULL.
///
/// # Safety
/// `pmf` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dent_pmf_len(pmf: *const DentPmf) -> usize {
    pmf.as_ref().map_or(0, |p| p.0.len())
}

/// # Safety
/// `counts` must point to `len` integers; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dent_counts_new(counts: *const u64, len: usize, out: *mut *mut DentCounts) -> DentStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let counts = slice(counts, len, "counts")?.to_vec();
        let c = lib(SampleCounts::from_counts(counts))?;
        *out = Box::into_raw(Box::new(DentCounts(c)));
        Ok(())
    })
}

/// Draws `n` i.i.d. observations. The same `seed` always yields the same
/// counts.
///
/// # Safety
/// `pmf` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dent_pmf_sample(
    pmf: *const DentPmf,
    n: u64,
    seed: u64,
    out: *mut *mut DentCounts,
) -> DentStatus {
    guard(|| {
        let pmf = non_null(pmf, "pmf")?;
        let out = out_ptr(out, "out")?;
        let c = lib(pmf.0.sample(n, seed))?;
        *out = Box::into_raw(Box::new(DentCounts(c)));
        Ok(())
    })
}

/// # Safety
/// `counts` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dent_counts_free(counts: *mut DentCounts) {
    if !counts.is_null() {
        drop(Box::from_raw(counts));
    }
}

/// Number of categories, or 0 for NULL.
///
/// # Safety
/// `counts` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dent_counts_len(counts: *const DentCounts) -> usize {
    counts.as_ref().map_or(0, |c| c.0.len())
}

/// Copies the counts into `buf`, which must hold at least
/// [`dent_counts_len`] elements.
///
/// # Safety
/// `counts` must be a live handle; `buf` must point to `len` writable
/// integers.
#[no_mangle]
pub unsafe extern "C" fn dent_counts_get(counts: *const DentCounts, buf: *mut u64, len: usize) -> DentStatus {
    guard(|| {
        let counts = non_null(counts, "counts")?;
        let buf = out_ptr(buf, "buf")?;
        let src = counts.0.counts();
        if len < src.len() {
            return Err((DentStatus::BufferTooSmall, format!("buffer holds {len}, need {}", src.len())));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
        Ok(())
    })
}

/// Entropy of the pmf in nats.
///
/// # Safety
/// `pmf` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dent_true_entropy(pmf: *const DentPmf, kind: DentKind, out: *mut f64) -> DentStatus {
    guard(|| {
        let pmf = non_null(pmf, "pmf")?;
        let out = out_ptr(out, "out")?;
        *out = lib(dentropy::true_entropy(&pmf.0, kind_of(&kind)?))?;
        Ok(())
    })
}

/// Almost-sure rate constant and CLT variance at the pmf.
///
/// # Safety
/// `pmf` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dent_asymptotic_constants(
    pmf: *const DentPmf,
    kind: DentKind,
    out: *mut DentAsymptotics,
) -> DentStatus {
    guard(|| {
        let pmf = non_null(pmf, "pmf")?;
        let out = out_ptr(out, "out")?;
        let s = lib(dentropy::asymptotic_constants(pmf.0.probs(), kind_of(&kind)?))?;
        *out = DentAsymptotics { a_constant: s.a_constant, variance: s.variance };
        Ok(())
    })
}

/// Plug-in estimate with a two-sided normal interval at `level`.
///
/// # Safety
/// `counts` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dent_estimate(
    counts: *const DentCounts,
    kind: DentKind,
    level: f64,
    out: *mut DentEstimate,
) -> DentStatus {
    guard(|| {
        let counts = non_null(counts, "counts")?;
        let out = out_ptr(out, "out")?;
        let r = lib(dentropy::plugin_estimate(&counts.0, kind_of(&kind)?, level))?;
        write_estimate(out, &r);
        Ok(())
    })
}

/// Shannon plug-in estimate shifted by the Miller–Madow term.
///
/// # Safety
/// `counts` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dent_miller_madow(
    counts: *const DentCounts,
    level: f64,
    out: *mut DentEstimate,
) -> DentStatus {
    guard(|| {
        let counts = non_null(counts, "counts")?;
        let out = out_ptr(out, "out")?;
        let raw = lib(dentropy::plugin_estimate(&counts.0, EntropyKind::Shannon, level))?;
        let r = lib(dentropy::miller_madow_correct(&raw, &counts.0))?;
        write_estimate(out, &r);
        Ok(())
    })
}

/// Zhang's Shannon estimator.
///
/// # Safety
/// `counts` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dent_zhang(counts: *const DentCounts, out: *mut f64) -> DentStatus {
    guard(|| {
        let counts = non_null(counts, "counts")?;
        let out = out_ptr(out, "out")?;
        *out = dentropy::zhang_estimate(&counts.0);
        Ok(())
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn dent_status_message(status: DentStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        DentStatus::Ok => b"ok\0",
        DentStatus::NullPointer => b"null pointer argument\0",
        DentStatus::InvalidDistribution => b"invalid distribution or counts\0",
        DentStatus::InvalidParameter => b"invalid parameter\0",
        DentStatus::ZeroMassUndefined => b"kernel undefined at zero mass\0",
        DentStatus::WrongFamily => b"operation not defined for this family\0",
        DentStatus::DegenerateVariance => b"degenerate asymptotic variance\0",
        DentStatus::BufferTooSmall => b"buffer too small\0",
        DentStatus::Panic => b"internal panic\0",
        DentStatus::Internal => b"internal error\0",
    };
    s.as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL
/// terminated, truncated to fit). Returns the full message length excluding
/// the terminator, or 0 when the last call succeeded.
///
/// # Safety
/// `buf` must be NULL or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn dent_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let Some(msg) = slot.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}
