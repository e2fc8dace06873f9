//! C ABI for the relequi pipelines. Analyses are returned as opaque
//! handles; scalar accessors and JSON serialization read from them. Every
//! entry point returns an error code and never unwinds across the boundary.
//!
//! The matching header lives at `include/relequi.h`.

use std::cell::RefCell;
use std::ffi::CString;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::{c_char, c_double, c_int, size_t};

use relequi::analysis::{analyze, AnalysisReport, ConfigRequest};
use relequi::error::Error;
use relequi::report;

pub const RELEQUI_OK: c_int = 0;
pub const RELEQUI_ERR_NUMERIC: c_int = 1;
pub const RELEQUI_ERR_DOMAIN: c_int = 2;
pub const RELEQUI_ERR_INVALID: c_int = 3;
pub const RELEQUI_ERR_PANIC: c_int = 4;

/// Opaque analysis result.
pub struct RelequiAnalysis {
    report: AnalysisReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn code_of(err: &Error) -> c_int {
    match err.exit_code() {
        2 => RELEQUI_ERR_DOMAIN,
        64 => RELEQUI_ERR_INVALID,
        _ => RELEQUI_ERR_NUMERIC,
    }
}

fn finish_analysis(
    req: ConfigRequest,
    out: *mut *mut RelequiAnalysis,
) -> c_int {
    if out.is_null() {
        set_error("null output pointer");
        return RELEQUI_ERR_INVALID;
    }
    let result = catch_unwind(AssertUnwindSafe(|| analyze(&req)));
    match result {
        Ok(Ok(report)) => {
            let boxed = Box::new(RelequiAnalysis { report });
            unsafe { *out = Box::into_raw(boxed) };
            RELEQUI_OK
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            unsafe { *out = ptr::null_mut() };
            code_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            unsafe { *out = ptr::null_mut() };
            RELEQUI_ERR_PANIC
        }
    }
}

/// Analyze a Lagrange point from the (beta, m1) parameterization.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn relequi_analyze_lagrange(
    beta: c_double,
    m1: c_double,
    out: *mut *mut RelequiAnalysis,
) -> c_int {
    finish_analysis(ConfigRequest::Lagrange { beta, m1 }, out)
}

/// Analyze an Euler three-body point; `ordering` is the left-to-right body
/// permutation (pass [0, 1, 2] for the natural order).
///
/// # Safety
/// `masses` must point to 3 doubles, `ordering` to 3 ints, `out` to a slot.
#[no_mangle]
pub unsafe extern "C" fn relequi_analyze_euler3(
    masses: *const c_double,
    ordering: *const c_int,
    out: *mut *mut RelequiAnalysis,
) -> c_int {
    if masses.is_null() || ordering.is_null() {
        set_error("null input pointer");
        return RELEQUI_ERR_INVALID;
    }
    let ms = std::slice::from_raw_parts(masses, 3).to_vec();
    let ord_raw = std::slice::from_raw_parts(ordering, 3);
    if ord_raw.iter().any(|&o| !(0..3).contains(&o)) {
        set_error("ordering entries must be 0..2");
        return RELEQUI_ERR_INVALID;
    }
    let ord = [ord_raw[0] as usize, ord_raw[1] as usize, ord_raw[2] as usize];
    finish_analysis(
        ConfigRequest::Euler3 {
            masses: ms,
            ordering: ord,
        },
        out,
    )
}

/// Analyze an Euler-Moulton collinear configuration of `n` bodies.
///
/// # Safety
/// `masses` must point to `n` doubles, `out` to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn relequi_analyze_collinear(
    masses: *const c_double,
    n: size_t,
    out: *mut *mut RelequiAnalysis,
) -> c_int {
    if masses.is_null() || n < 2 {
        set_error("need at least two masses");
        return RELEQUI_ERR_INVALID;
    }
    let ms = std::slice::from_raw_parts(masses, n).to_vec();
    finish_analysis(ConfigRequest::Collinear { masses: ms }, out)
}

/// Free an analysis handle. Passing NULL is a no-op.
///
/// # Safety
/// `h` must come from one of the analyze entry points.
#[no_mangle]
pub unsafe extern "C" fn relequi_analysis_free(h: *mut RelequiAnalysis) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Full report as a JSON document; free with relequi_string_free.
///
/// # Safety
/// `h` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn relequi_analysis_json(h: *const RelequiAnalysis) -> *mut c_char {
    if h.is_null() {
        return ptr::null_mut();
    }
    let json = report::to_json(&(*h).report);
    CString::new(json)
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Determinant of the center-manifold coefficient matrix.
///
/// # Safety
/// `h` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn relequi_analysis_det_center(
    h: *const RelequiAnalysis,
    out: *mut c_double,
) -> c_int {
    if h.is_null() || out.is_null() {
        set_error("null pointer");
        return RELEQUI_ERR_INVALID;
    }
    *out = (*h).report.det_center;
    RELEQUI_OK
}

/// Nondegeneracy verdict: 1 if |det| clears the threshold.
///
/// # Safety
/// `h` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn relequi_analysis_nondegenerate(
    h: *const RelequiAnalysis,
    out: *mut c_int,
) -> c_int {
    if h.is_null() || out.is_null() {
        set_error("null pointer");
        return RELEQUI_ERR_INVALID;
    }
    *out = if (*h).report.nondegenerate { 1 } else { 0 };
    RELEQUI_OK
}

/// Signed frequency vector. Writes up to `cap` values and reports the full
/// length in `written`; call with cap = 0 to query the length.
///
/// # Safety
/// `buf` must hold `cap` doubles (or be NULL when cap = 0).
#[no_mangle]
pub unsafe extern "C" fn relequi_analysis_frequencies(
    h: *const RelequiAnalysis,
    buf: *mut c_double,
    cap: size_t,
    written: *mut size_t,
) -> c_int {
    if h.is_null() || written.is_null() || (buf.is_null() && cap > 0) {
        set_error("null pointer");
        return RELEQUI_ERR_INVALID;
    }
    let freqs = &(*h).report.signed_freq;
    *written = freqs.len();
    let n = freqs.len().min(cap);
    for (i, w) in freqs.iter().take(n).enumerate() {
        *buf.add(i) = *w;
    }
    RELEQUI_OK
}

/// Resonance scan of an explicit frequency vector; JSON report out.
///
/// # Safety
/// `freqs` must point to `n` doubles, `out_json` to a slot.
#[no_mangle]
pub unsafe extern "C" fn relequi_scan(
    freqs: *const c_double,
    n: size_t,
    order: c_int,
    tol: c_double,
    out_json: *mut *mut c_char,
) -> c_int {
    if freqs.is_null() || out_json.is_null() || order < 1 {
        set_error("invalid arguments");
        return RELEQUI_ERR_INVALID;
    }
    let f = std::slice::from_raw_parts(freqs, n).to_vec();
    match relequi::resonance::scan(&f, order as u32, tol) {
        Ok(rep) => {
            let json = report::to_json(&rep);
            *out_json = CString::new(json).map(CString::into_raw).unwrap_or(ptr::null_mut());
            RELEQUI_OK
        }
        Err(e) => {
            set_error(&e.to_string());
            *out_json = ptr::null_mut();
            code_of(&e)
        }
    }
}

/// Printed Lagrange closed forms at (beta, m1); JSON out.
///
/// # Safety
/// `out_json` must be a valid slot.
#[no_mangle]
pub unsafe extern "C" fn relequi_oracle_lagrange(
    beta: c_double,
    m1: c_double,
    out_json: *mut *mut c_char,
) -> c_int {
    if out_json.is_null() {
        set_error("null pointer");
        return RELEQUI_ERR_INVALID;
    }
    match relequi::normal_form::oracle_lagrange(beta, m1) {
        Ok(o) => {
            *out_json = CString::new(report::to_json(&o))
                .map(CString::into_raw)
                .unwrap_or(ptr::null_mut());
            RELEQUI_OK
        }
        Err(e) => {
            set_error(&e.to_string());
            *out_json = ptr::null_mut();
            code_of(&e)
        }
    }
}

/// Free a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn relequi_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the most recent error on this thread. Borrowed pointer,
/// valid until the next failing call.
#[no_mangle]
pub extern "C" fn relequi_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;

    #[test]
    fn lagrange_handle_round_trip() {
        let mut h: *mut RelequiAnalysis = ptr::null_mut();
        let code = unsafe { relequi_analyze_lagrange(0.0197, 0.98, &mut h) };
        assert_eq!(code, RELEQUI_OK);
        assert!(!h.is_null());
        let mut det = 0.0;
        assert_eq!(
            unsafe { relequi_analysis_det_center(h, &mut det) },
            RELEQUI_OK
        );
        assert!(det.abs() > 1.0);
        let mut flag = 0;
        unsafe { relequi_analysis_nondegenerate(h, &mut flag) };
        assert_eq!(flag, 1);
        let mut len = 0usize;
        let mut buf = [0.0f64; 8];
        unsafe { relequi_analysis_frequencies(h, buf.as_mut_ptr(), 8, &mut len) };
        assert_eq!(len, 3);
        let json = unsafe { relequi_analysis_json(h) };
        assert!(!json.is_null());
        let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap();
        assert!(text.contains("det_center"));
        unsafe {
            relequi_string_free(json);
            relequi_analysis_free(h);
        }
    }

    #[test]
    fn domain_error_code_and_message() {
        let mut h: *mut RelequiAnalysis = ptr::null_mut();
        let code = unsafe { relequi_analyze_lagrange(1.0 / 36.0, 0.98, &mut h) };
        assert_eq!(code, RELEQUI_ERR_DOMAIN);
        assert!(h.is_null());
        let msg = relequi_last_error_message();
        let text = unsafe { CStr::from_ptr(msg) }.to_str().unwrap();
        assert!(text.contains("Omega_ps"));
    }

    #[test]
    fn scan_via_ffi() {
        let freqs = [1.0, 2.0];
        let mut json: *mut c_char = ptr::null_mut();
        let code = unsafe { relequi_scan(freqs.as_ptr(), 2, 3, 1e-9, &mut json) };
        assert_eq!(code, RELEQUI_OK);
        let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap();
        assert!(text.contains("offending"));
        unsafe { relequi_string_free(json) };
    }

    #[test]
    fn null_pointer_is_invalid() {
        let code = unsafe { relequi_analyze_lagrange(0.0197, 0.98, ptr::null_mut()) };
        assert_eq!(code, RELEQUI_ERR_INVALID);
    }
}
