//! C ABI over `bbp-secrecy`.
//!
//! Every function returns a [`BbpStatus`] and writes results through out
//! pointers. Schedules and verification reports are opaque handles that must
//! be released with their `_free` function. After a non-OK status,
//! [`bbp_last_error`] copies the message of the failure on the calling thread.
//! Panics are caught at the boundary and reported as `BBP_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bbp_secrecy::verify::{verify_with, T3Verdict, VerificationReport};
use bbp_secrecy::{
    binary_entropy, compute_schedule, BoundPoint, Error, ExplorationSchedule, HalvingRule,
    ModelConfig, T3Variant,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BbpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    ProbabilityDomain = 3,
    NoBlocks = 4,
    EnumerationTooLarge = 5,
    Io = 6,
    Parse = 7,
    OutOfRange = 8,
    Panic = 99,
}

/// Probe size rule after detection.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BbpHalving {
    AsPrinted = 0,
    Bisection = 1,
}

/// Normalization of the deep-prefix leakage term.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BbpT3Variant {
    AsPrinted = 0,
    SummedOverStates = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BbpT3Verdict {
    NotActive = 0,
    AsPrinted = 1,
    SummedOverStates = 2,
    Both = 3,
    Neither = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BbpBoundPoint {
    pub k: u32,
    pub l: usize,
    pub b: f64,
    pub outer: f64,
    pub leakage: f64,
    pub inner_raw: f64,
    pub inner: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BbpRateEstimates {
    pub main_rate: f64,
    pub main_stderr: f64,
    pub leakage: f64,
    pub leakage_stderr: f64,
    pub blocks: u64,
}

/// Opaque exploration schedule.
pub struct BbpSchedule(ExplorationSchedule);

/// Opaque verification report.
pub struct BbpReport(VerificationReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|e| {
        let mut bytes = e.into_vec();
        bytes.retain(|&b| b != 0);
        CString::new(bytes).unwrap_or_default()
    });
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> BbpStatus {
    match e {
        Error::ProbabilityDomain(_) => BbpStatus::ProbabilityDomain,
        Error::InvalidParameter(_) => BbpStatus::InvalidParameter,
        Error::NoBlocks => BbpStatus::NoBlocks,
        Error::EnumerationTooLarge { .. } => BbpStatus::EnumerationTooLarge,
        Error::TranscriptParse { .. } => BbpStatus::Parse,
        Error::Io(_) => BbpStatus::Io,
    }
}

fn fail(status: BbpStatus, msg: impl Into<String>) -> BbpStatus {
    set_error(msg.into());
    status
}

/// Run `f` behind the panic guard, translating library errors.
fn guard(f: impl FnOnce() -> Result<(), BbpStatus>) -> BbpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BbpStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(BbpStatus::Panic, "panic inside bbp_secrecy"),
    }
}

fn lib<T>(r: bbp_secrecy::Result<T>) -> Result<T, BbpStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), BbpStatus> {
    if p.is_null() {
        Err(fail(BbpStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

fn halving(h: BbpHalving) -> HalvingRule {
    match h {
        BbpHalving::AsPrinted => HalvingRule::AsPrinted,
        BbpHalving::Bisection => HalvingRule::Bisection,
    }
}

fn variant(v: BbpT3Variant) -> T3Variant {
    match v {
        BbpT3Variant::AsPrinted => T3Variant::AsPrinted,
        BbpT3Variant::SummedOverStates => T3Variant::SummedOverStates,
    }
}

/// Copy the last error message of this thread into `buf` (NUL terminated,
/// truncated to `len - 1` bytes). Returns the full message length, or 0 when
/// there is none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn bbp_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let Some(msg) = slot.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            // SAFETY: caller guarantees `len` writable bytes at `buf`.
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bbp_binary_entropy(p: f64, out: *mut f64) -> BbpStatus {
    guard(|| {
        non_null(out, "out")?;
        let h = lib(binary_entropy(p))?;
        // SAFETY: checked non-null above.
        unsafe { *out = h };
        Ok(())
    })
}

/// Outer bound, leakage and inner bound at `(K, B, L)`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bbp_bound_point(
    k: u32,
    b: f64,
    l: usize,
    t3: BbpT3Variant,
    out: *mut BbpBoundPoint,
) -> BbpStatus {
    guard(|| {
        non_null(out, "out")?;
        let p = lib(BoundPoint::compute_with(k, b, l, variant(t3)))?;
        let value = BbpBoundPoint {
            k: p.k,
            l: p.l,
            b: p.b,
            outer: p.outer,
            leakage: p.leakage,
            inner_raw: p.inner_raw,
            inner: p.inner,
        };
        // SAFETY: checked non-null above.
        unsafe { *out = value };
        Ok(())
    })
}

/// # Safety
/// `out` must be null or valid for writes. The handle written there must be
/// released with [`bbp_schedule_free`].
#[no_mangle]
pub unsafe extern "C" fn bbp_schedule_new(
    k: u32,
    b: f64,
    l: usize,
    out: *mut *mut BbpSchedule,
) -> BbpStatus {
    guard(|| {
        non_null(out, "out")?;
        let s = lib(compute_schedule(k, b, l))?;
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(Box::new(BbpSchedule(s))) };
        Ok(())
    })
}

/// # Safety
/// `schedule` must be null or a handle from [`bbp_schedule_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bbp_schedule_free(schedule: *mut BbpSchedule) {
    if !schedule.is_null() {
        // SAFETY: created by Box::into_raw in bbp_schedule_new.
        drop(unsafe { Box::from_raw(schedule) });
    }
}

/// Block length `L`, or 0 for a null handle.
///
/// # Safety
/// `schedule` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bbp_schedule_len(schedule: *const BbpSchedule) -> usize {
    // SAFETY: caller guarantees a live handle or null.
    unsafe { schedule.as_ref() }.map_or(0, |s| s.0.len())
}

/// Entry `j` (1-based) of the real schedule `c`, its floor and the partial
/// sum `cum_j`. Any of the out pointers may be null.
///
/// # Safety
/// `schedule` must be a live handle; non-null out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn bbp_schedule_entry(
    schedule: *const BbpSchedule,
    j: usize,
    c: *mut f64,
    c_int: *mut u32,
    cum: *mut f64,
) -> BbpStatus {
    guard(|| {
        // SAFETY: caller guarantees a live handle or null.
        let s = unsafe { schedule.as_ref() }
            .ok_or_else(|| fail(BbpStatus::NullPointer, "schedule is null"))?;
        if j == 0 || j > s.0.len() {
            return Err(fail(
                BbpStatus::OutOfRange,
                format!("step {j} outside 1..={}", s.0.len()),
            ));
        }
        // SAFETY: each pointer is written only when non-null.
        unsafe {
            if !c.is_null() {
                *c = s.0.c(j);
            }
            if !c_int.is_null() {
                *c_int = s.0.c_int(j);
            }
            if !cum.is_null() {
                *cum = s.0.cum(j);
            }
        }
        Ok(())
    })
}

/// Monte Carlo estimates of the main rate and the leakage over `blocks`
/// blocks seeded with `seed`.
///
/// # Safety
/// `out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn bbp_simulate(
    k: u32,
    b: f64,
    l: usize,
    blocks: u64,
    seed: u64,
    rule: BbpHalving,
    out: *mut BbpRateEstimates,
) -> BbpStatus {
    guard(|| {
        non_null(out, "out")?;
        let config = lib(ModelConfig::new(k, b, l))?
            .with_blocks(blocks)
            .with_seed(seed)
            .with_rule(halving(rule));
        lib(config.validate_for_simulation())?;
        let schedule = lib(compute_schedule(k, b, l))?;
        let stats = lib(bbp_secrecy::sim::simulate_stats(&config, &schedule))?;
        let main = lib(stats.main_rate_estimate())?;
        let leak = lib(stats.leakage_estimate())?;
        let value = BbpRateEstimates {
            main_rate: main.value,
            main_stderr: main.stderr,
            leakage: leak.value,
            leakage_stderr: leak.stderr,
            blocks: main.blocks,
        };
        // SAFETY: checked non-null above.
        unsafe { *out = value };
        Ok(())
    })
}

/// Exact-enumeration verification of the closed forms.
///
/// # Safety
/// `out` must be null or valid for writes. The handle written there must be
/// released with [`bbp_report_free`].
#[no_mangle]
pub unsafe extern "C" fn bbp_verify(
    k: u32,
    b: f64,
    l: usize,
    rule: BbpHalving,
    out: *mut *mut BbpReport,
) -> BbpStatus {
    guard(|| {
        non_null(out, "out")?;
        let r = lib(verify_with(k, b, l, halving(rule)))?;
        // SAFETY: checked non-null above.
        unsafe { *out = Box::into_raw(Box::new(BbpReport(r))) };
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle from [`bbp_verify`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bbp_report_free(report: *mut BbpReport) {
    if !report.is_null() {
        // SAFETY: created by Box::into_raw in bbp_verify.
        drop(unsafe { Box::from_raw(report) });
    }
}

/// 1 when every checked quantity matched, 0 otherwise or for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bbp_report_all_matched(report: *const BbpReport) -> i32 {
    // SAFETY: caller guarantees a live handle or null.
    unsafe { report.as_ref() }.map_or(0, |r| i32::from(r.0.all_matched()))
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bbp_report_t3_verdict(report: *const BbpReport) -> BbpT3Verdict {
    // SAFETY: caller guarantees a live handle or null.
    match unsafe { report.as_ref() }.map(|r| r.0.t3_verdict) {
        Some(T3Verdict::AsPrinted) => BbpT3Verdict::AsPrinted,
        Some(T3Verdict::SummedOverStates) => BbpT3Verdict::SummedOverStates,
        Some(T3Verdict::Both) => BbpT3Verdict::Both,
        Some(T3Verdict::Neither) => BbpT3Verdict::Neither,
        Some(T3Verdict::NotActive) | None => BbpT3Verdict::NotActive,
    }
}

/// Rendered report text. Release with [`bbp_string_free`]; null for a null
/// handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bbp_report_text(report: *const BbpReport) -> *mut c_char {
    // SAFETY: caller guarantees a live handle or null.
    match unsafe { report.as_ref() } {
        Some(r) => CString::new(r.0.to_string()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bbp_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: created by CString::into_raw.
        drop(unsafe { CString::from_raw(s) });
    }
}
