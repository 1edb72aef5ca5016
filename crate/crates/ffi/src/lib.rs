//! C interface to basispath-core.
//!
//! Graphs and reports are opaque heap handles released with their `_free`
//! functions. Fallible calls return a [`BpStatus`]; the message of the last
//! failure on the calling thread is available from [`bp_last_error`].
//! Strings returned to the caller are released with [`bp_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use basispath_core::bridge::{self, LayoutFile};
use basispath_core::{Cfg, GenerationReport, Limits, Strategy};

/// Result codes of fallible calls.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BpStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidGraph = 3,
    UnknownStrategy = 4,
    ModelError = 5,
    Panic = 6,
}

/// A validated control-flow graph.
pub struct BpCfg {
    inner: Cfg,
}

/// The outcome of one generation run.
pub struct BpReport {
    inner: GenerationReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<Vec<u8>>) {
    let msg = CString::new(msg).unwrap_or_else(|e| {
        let mut bytes = e.into_vec();
        bytes.retain(|&b| b != 0);
        CString::new(bytes).expect("nul bytes removed")
    });
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: BpStatus, msg: impl Into<Vec<u8>>) -> BpStatus {
    set_error(msg);
    status
}

fn guarded(f: impl FnOnce() -> BpStatus) -> BpStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(BpStatus::Panic, "internal panic"))
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, BpStatus> {
    if p.is_null() {
        return Err(fail(BpStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(BpStatus::InvalidUtf8, "argument is not valid UTF-8"))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread; empty when none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses and validates a graph document.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bp_cfg_from_json(json: *const c_char, out: *mut *mut BpCfg) -> BpStatus {
    guarded(|| {
        if out.is_null() {
            return fail(BpStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match str_arg(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match Cfg::from_json(text) {
            Ok(cfg) => {
                *out = Box::into_raw(Box::new(BpCfg { inner: cfg }));
                BpStatus::Ok
            }
            Err(e) => fail(BpStatus::InvalidGraph, e.to_string()),
        }
    })
}

/// # Safety
/// `cfg` must come from [`bp_cfg_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bp_cfg_free(cfg: *mut BpCfg) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Cyclomatic complexity, or 0 for a null handle.
///
/// # Safety
/// `cfg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bp_cfg_cyclomatic_complexity(cfg: *const BpCfg) -> usize {
    cfg.as_ref().map_or(0, |c| c.inner.cyclomatic_complexity())
}

/// # Safety
/// `cfg` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bp_cfg_edge_count(cfg: *const BpCfg) -> usize {
    cfg.as_ref().map_or(0, |c| c.inner.edge_count())
}

/// Runs a strategy by id (`holistic`, `incr-novelty`, ...). A non-positive
/// `time_limit_s` selects the default budget and `node_limit` 0 means no
/// node budget. A run that finishes without a complete basis still returns
/// [`BpStatus::Ok`]; check [`bp_report_success`].
///
/// # Safety
/// `cfg` must be a live handle, `strategy` a nul-terminated string and
/// `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bp_generate(
    cfg: *const BpCfg,
    strategy: *const c_char,
    time_limit_s: f64,
    node_limit: u64,
    out: *mut *mut BpReport,
) -> BpStatus {
    guarded(|| {
        if out.is_null() {
            return fail(BpStatus::NullArgument, "null output pointer");
        }
        *out = ptr::null_mut();
        let Some(cfg) = cfg.as_ref() else {
            return fail(BpStatus::NullArgument, "null graph handle");
        };
        let strategy: Strategy = match str_arg(strategy).map(str::parse) {
            Ok(Ok(s)) => s,
            Ok(Err(e)) => return fail(BpStatus::UnknownStrategy, e),
            Err(s) => return s,
        };
        let limits = Limits {
            time: Some(if time_limit_s > 0.0 { Duration::from_secs_f64(time_limit_s) } else { Limits::DEFAULT_TIME }),
            nodes: (node_limit > 0).then_some(node_limit),
        };
        let report = strategy.run(&cfg.inner, limits);
        *out = Box::into_raw(Box::new(BpReport { inner: report }));
        BpStatus::Ok
    })
}

/// # Safety
/// `report` must come from [`bp_generate`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bp_report_free(report: *mut BpReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bp_report_success(report: *const BpReport) -> bool {
    report.as_ref().is_some_and(|r| r.inner.success)
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bp_report_path_count(report: *const BpReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.paths.len())
}

/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bp_report_rank(report: *const BpReport) -> usize {
    report.as_ref().map_or(0, |r| r.inner.rank)
}

/// Covered and total edge counts.
///
/// # Safety
/// `report` must be a live handle; `covered` and `total` may be null.
#[no_mangle]
pub unsafe extern "C" fn bp_report_coverage(
    report: *const BpReport,
    covered: *mut usize,
    total: *mut usize,
) -> BpStatus {
    let Some(r) = report.as_ref() else {
        return fail(BpStatus::NullArgument, "null report handle");
    };
    if let Some(c) = covered.as_mut() {
        *c = r.inner.edge_coverage.covered;
    }
    if let Some(t) = total.as_mut() {
        *t = r.inner.edge_coverage.total;
    }
    BpStatus::Ok
}

/// Path set JSON (no timing fields). Release with [`bp_string_free`].
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bp_report_paths_json(report: *const BpReport) -> *mut c_char {
    report.as_ref().map_or(ptr::null_mut(), |r| into_c_string(r.inner.path_set_json()))
}

/// Full report JSON with per-iteration diagnostics.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bp_report_json(report: *const BpReport) -> *mut c_char {
    report.as_ref().map_or(ptr::null_mut(), |r| into_c_string(r.inner.report_json().to_string()))
}

/// Writes the holistic model in CPLEX LP format into `*lp` and the matching
/// layout JSON into `*layout`. Either output pointer may be null.
///
/// # Safety
/// `cfg` must be a live handle; non-null output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn bp_export_holistic_lp(
    cfg: *const BpCfg,
    enforce_connectivity: bool,
    lp: *mut *mut c_char,
    layout: *mut *mut c_char,
) -> BpStatus {
    guarded(|| {
        let Some(cfg) = cfg.as_ref() else {
            return fail(BpStatus::NullArgument, "null graph handle");
        };
        let file = LayoutFile::holistic(&cfg.inner, enforce_connectivity);
        match bridge::export(&cfg.inner, &file) {
            Ok((text, layout_text)) => {
                if let Some(p) = lp.as_mut() {
                    *p = into_c_string(text);
                }
                if let Some(p) = layout.as_mut() {
                    *p = into_c_string(layout_text);
                }
                BpStatus::Ok
            }
            Err(e) => fail(BpStatus::ModelError, e.to_string()),
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn bp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
