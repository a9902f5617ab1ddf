//! C interface to the fiberwise scenario runner.
//!
//! Handles are opaque and owned by the caller once returned; release them with the matching
//! `*_free` function. Strings returned as `char *` are owned by the caller and released with
//! [`fw_string_free`]. Failures return a status code and leave a message readable through
//! [`fw_last_error`] on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::OnceLock;

use fiberwise::expansivity::Verdict;
use fiberwise::scenario::{
    builtin_names, emit_report, load_config, run_scenario, OutputFormat, RunReport, ScenarioConfig,
};
use fiberwise::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// The config was rejected; the message lists every problem.
    InvalidConfig = 3,
    /// The run finished but at least one diagnostic errored.
    DiagnosticFailed = 4,
    Io = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FwVerdict {
    /// The diagnostic produces no verdict, or it errored.
    None = 0,
    EvidenceFor = 1,
    Refuted = 2,
    Inconclusive = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FwFormat {
    Json = 0,
    Csv = 1,
}

pub struct FwScenario {
    config: ScenarioConfig,
}

pub struct FwReport {
    report: RunReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: FwStatus, msg: impl Into<String>) -> FwStatus {
    set_error(msg);
    status
}

fn status_of(e: &Error) -> FwStatus {
    match e {
        Error::Config(_) | Error::Json(_) => FwStatus::InvalidConfig,
        Error::Io(_) => FwStatus::Io,
        _ => FwStatus::DiagnosticFailed,
    }
}

fn guarded(f: impl FnOnce() -> FwStatus) -> FwStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(FwStatus::Panic, "internal panic"),
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, FwStatus> {
    if s.is_null() {
        return Err(fail(FwStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(FwStatus::InvalidUtf8, "argument is not UTF-8"))
}

fn names() -> &'static [CString] {
    static NAMES: OnceLock<Vec<CString>> = OnceLock::new();
    NAMES.get_or_init(|| builtin_names().into_iter().map(|n| CString::new(n).expect("no NUL")).collect())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fw_version() -> *const c_char {
    static V: OnceLock<CString> = OnceLock::new();
    V.get_or_init(|| CString::new(env!("CARGO_PKG_VERSION")).expect("no NUL")).as_ptr()
}

/// Message for the last failure on this thread, or NULL. Valid until the next call into the library.
#[no_mangle]
pub extern "C" fn fw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn fw_builtin_count() -> usize {
    names().len()
}

/// Static name of built-in `index`, or NULL when out of range.
#[no_mangle]
pub extern "C" fn fw_builtin_name(index: usize) -> *const c_char {
    names().get(index).map_or(ptr::null(), |s| s.as_ptr())
}

/// Loads a scenario from a built-in name, a file path, or inline JSON.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fw_scenario_load(source: *const c_char, out: *mut *mut FwScenario) -> FwStatus {
    guarded(|| {
        if out.is_null() {
            return fail(FwStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let source = match text(source) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match load_config(source) {
            Ok(config) => {
                *out = Box::into_raw(Box::new(FwScenario { config }));
                FwStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// Replaces every seed in the scenario.
///
/// # Safety
/// `scenario` must come from [`fw_scenario_load`] and not yet be freed.
#[no_mangle]
pub unsafe extern "C" fn fw_scenario_set_seed(scenario: *mut FwScenario, seed: u64) -> FwStatus {
    guarded(|| match scenario.as_mut() {
        Some(s) => {
            s.config.override_seed(seed);
            FwStatus::Ok
        }
        None => fail(FwStatus::NullPointer, "null scenario"),
    })
}

/// The scenario as a JSON config document. Free with [`fw_string_free`].
///
/// # Safety
/// `scenario` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn fw_scenario_json(scenario: *const FwScenario) -> *mut c_char {
    match scenario.as_ref() {
        Some(s) => owned(s.config.to_json()),
        None => {
            set_error("null scenario");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `scenario` must come from [`fw_scenario_load`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn fw_scenario_free(scenario: *mut FwScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Runs every diagnostic. On [`FwStatus::DiagnosticFailed`] the report is still produced.
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fw_scenario_run(scenario: *const FwScenario, out: *mut *mut FwReport) -> FwStatus {
    guarded(|| {
        if out.is_null() {
            return fail(FwStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let Some(s) = scenario.as_ref() else {
            return fail(FwStatus::NullPointer, "null scenario");
        };
        match run_scenario(&s.config) {
            Ok(report) => {
                let errored: Vec<String> = report
                    .results
                    .iter()
                    .filter_map(|r| r.error.as_ref().map(|e| format!("{}: {e}", r.diagnostic)))
                    .collect();
                *out = Box::into_raw(Box::new(FwReport { report }));
                if errored.is_empty() {
                    FwStatus::Ok
                } else {
                    fail(FwStatus::DiagnosticFailed, errored.join("\n"))
                }
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `report` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn fw_report_diagnostic_count(report: *const FwReport) -> usize {
    report.as_ref().map_or(0, |r| r.report.results.len())
}

/// Verdict of diagnostic `index`.
///
/// # Safety
/// `report` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn fw_report_verdict(report: *const FwReport, index: usize) -> FwVerdict {
    let verdict = report.as_ref().and_then(|r| r.report.results.get(index)).and_then(|o| o.verdict);
    match verdict {
        Some(Verdict::EvidenceFor) => FwVerdict::EvidenceFor,
        Some(Verdict::Refuted) => FwVerdict::Refuted,
        Some(Verdict::Inconclusive) => FwVerdict::Inconclusive,
        None => FwVerdict::None,
    }
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("NUL removed").into_raw()
}

/// Serialized report. JSON gives one document; CSV gives every table, each preceded by a
/// `# <file name>` line. Free with [`fw_string_free`].
///
/// # Safety
/// `report` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn fw_report_emit(report: *const FwReport, format: FwFormat) -> *mut c_char {
    let Some(r) = report.as_ref() else {
        set_error("null report");
        return ptr::null_mut();
    };
    let format = match format {
        FwFormat::Json => OutputFormat::Json,
        FwFormat::Csv => OutputFormat::Csv,
    };
    let files = emit_report(&r.report, format);
    let text = if files.len() == 1 && format == OutputFormat::Json {
        files[0].contents.clone()
    } else {
        files.iter().map(|f| format!("# {}\n{}", f.name, f.contents)).collect()
    };
    owned(text)
}

/// # Safety
/// `report` must come from [`fw_scenario_run`] or be NULL.
#[no_mangle]
pub unsafe extern "C" fn fw_report_free(report: *mut FwReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn fw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
