use std::ffi::{c_char, CStr};
use std::ptr;

use bbp_secrecy_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let n = unsafe { bbp_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn bound_point_matches_library() {
    let mut p = BbpBoundPoint::default();
    let st = unsafe { bbp_bound_point(32, 8.0, 2, BbpT3Variant::AsPrinted, &mut p) };
    assert_eq!(st, BbpStatus::Ok);
    assert!((p.outer - 0.875).abs() < 1e-12);
    assert!((p.leakage - 0.7778139).abs() < 1e-6);
    assert_eq!(p.inner, p.outer - p.leakage);
    assert_eq!((p.k, p.l, p.b), (32, 2, 8.0));
}

#[test]
fn error_codes_and_messages() {
    let mut p = BbpBoundPoint::default();
    assert_eq!(
        unsafe { bbp_bound_point(1, 8.0, 2, BbpT3Variant::AsPrinted, &mut p) },
        BbpStatus::InvalidParameter
    );
    assert!(last_error().contains("K must be >= 2"));
    assert_eq!(
        unsafe { bbp_bound_point(32, 8.0, 2, BbpT3Variant::AsPrinted, ptr::null_mut()) },
        BbpStatus::NullPointer
    );
    let mut h = 0.0;
    assert_eq!(
        unsafe { bbp_binary_entropy(1.5, &mut h) },
        BbpStatus::ProbabilityDomain
    );
    assert_eq!(unsafe { bbp_binary_entropy(0.25, &mut h) }, BbpStatus::Ok);
    assert!((h - 0.8112781244591329).abs() < 1e-15);
    let mut est = BbpRateEstimates::default();
    assert_eq!(
        unsafe { bbp_simulate(32, 8.0, 2, 0, 1, BbpHalving::AsPrinted, &mut est) },
        BbpStatus::NoBlocks
    );
}

#[test]
fn truncated_error_copy() {
    unsafe { bbp_schedule_new(0, 1.0, 1, ptr::null_mut()) };
    let mut small = [1 as c_char; 4];
    let n = unsafe { bbp_last_error(small.as_mut_ptr(), small.len()) };
    assert!(n > 3);
    assert_eq!(small[3], 0);
    assert_eq!(unsafe { bbp_last_error(ptr::null_mut(), 0) }, n);
}

#[test]
fn schedule_handle() {
    let mut s = ptr::null_mut();
    assert_eq!(
        unsafe { bbp_schedule_new(32, 8.0, 5, &mut s) },
        BbpStatus::Ok
    );
    assert_eq!(unsafe { bbp_schedule_len(s) }, 5);
    let (mut c, mut ci, mut cum) = (0.0, 0u32, 0.0);
    assert_eq!(
        unsafe { bbp_schedule_entry(s, 3, &mut c, &mut ci, &mut cum) },
        BbpStatus::Ok
    );
    assert_eq!((c, ci, cum), (8.0, 8, 24.0));
    assert_eq!(
        unsafe { bbp_schedule_entry(s, 4, &mut c, ptr::null_mut(), ptr::null_mut()) },
        BbpStatus::Ok
    );
    assert_eq!(c, 4.0);
    assert_eq!(
        unsafe { bbp_schedule_entry(s, 0, &mut c, &mut ci, &mut cum) },
        BbpStatus::OutOfRange
    );
    assert_eq!(
        unsafe { bbp_schedule_entry(s, 6, &mut c, &mut ci, &mut cum) },
        BbpStatus::OutOfRange
    );
    unsafe { bbp_schedule_free(s) };
    unsafe { bbp_schedule_free(ptr::null_mut()) };
    assert_eq!(unsafe { bbp_schedule_len(ptr::null()) }, 0);
}

#[test]
fn simulate_is_deterministic() {
    let run = || {
        let mut e = BbpRateEstimates::default();
        assert_eq!(
            unsafe { bbp_simulate(16, 4.0, 3, 20_000, 9, BbpHalving::Bisection, &mut e) },
            BbpStatus::Ok
        );
        e
    };
    let a = run();
    assert_eq!(a, run());
    assert_eq!(a.blocks, 20_000);
    assert!(a.main_stderr > 0.0 && a.leakage > 0.0);
}

#[test]
fn verify_report_handle() {
    let mut r = ptr::null_mut();
    assert_eq!(
        unsafe { bbp_verify(8, 2.0, 2, BbpHalving::AsPrinted, &mut r) },
        BbpStatus::Ok
    );
    assert_eq!(unsafe { bbp_report_all_matched(r) }, 1);
    assert_eq!(unsafe { bbp_report_t3_verdict(r) }, BbpT3Verdict::NotActive);
    let text = unsafe { bbp_report_text(r) };
    let s = unsafe { CStr::from_ptr(text) }.to_str().unwrap().to_owned();
    assert!(s.contains("quantity=main_rate "));
    unsafe { bbp_string_free(text) };
    unsafe { bbp_report_free(r) };

    let mut r = ptr::null_mut();
    assert_eq!(
        unsafe { bbp_verify(8, 2.0, 4, BbpHalving::Bisection, &mut r) },
        BbpStatus::Ok
    );
    assert_eq!(
        unsafe { bbp_report_t3_verdict(r) },
        BbpT3Verdict::SummedOverStates
    );
    unsafe { bbp_report_free(r) };

    assert_eq!(
        unsafe { bbp_verify(16, 8.0, 6, BbpHalving::AsPrinted, &mut r) },
        BbpStatus::EnumerationTooLarge
    );
    assert!(last_error().contains("enumeration limits"));
    assert_eq!(unsafe { bbp_report_all_matched(ptr::null()) }, 0);
    assert!(unsafe { bbp_report_text(ptr::null()) }.is_null());
}
