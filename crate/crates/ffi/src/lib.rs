//! C ABI over the moment graph toolkit.
//!
//! A completed run is held behind the opaque handle [`MgRun`]; strings
//! returned as `*const c_char` from a handle are borrowed and live until
//! the handle is freed, strings returned as `*mut c_char` are owned by the
//! caller and must be released with [`mg_string_free`]. Status codes mirror
//! the command line exit codes. On any non-OK status a human-readable
//! message is available from [`mg_last_error`] until the next call on the
//! same thread.

use mgsheaf::arith::FieldSpec;
use mgsheaf::rootsys::CartanType;
use mgsheaf::run::{cmd_build, cmd_kl, cmd_verify, CheckSelection, RunConfig, RunError};
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, c_int, CStr, CString};
use std::ptr;

/// Status codes; identical to the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MgStatus {
    Ok = 0,
    CheckFailed = 1,
    InputError = 2,
    Uncertified = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Message of the most recent failure on this thread. Borrowed; valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// A completed construction/verification run.
pub struct MgRun {
    json: CString,
    checks: BTreeMap<String, CString>,
    failures: CString,
    status: MgStatus,
}

unsafe fn opt_str<'a>(p: *const c_char) -> Result<Option<&'a str>, RunError> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Some)
        .map_err(|_| RunError::Input("invalid UTF-8 in argument".into()))
}

unsafe fn req_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, RunError> {
    opt_str(p)?.ok_or_else(|| RunError::Input(format!("{what} must not be NULL")))
}

fn config_from(
    ctype: &str,
    affine: bool,
    word: &str,
    field: &str,
    max_degree: c_int,
    checks: Option<&str>,
) -> Result<RunConfig, RunError> {
    let ctype = CartanType::parse(ctype).map_err(|e| RunError::Input(e.to_string()))?;
    let field = FieldSpec::parse(field)
        .map_err(|_| RunError::Input(format!("cannot parse field `{field}`")))?;
    let checks = match checks {
        None => CheckSelection::all(),
        Some(list) => CheckSelection::parse(list)?,
    };
    Ok(RunConfig {
        ctype,
        affine,
        word: word.to_string(),
        field,
        max_degree: (max_degree >= 0).then_some(max_degree as usize),
        checks,
    })
}

fn status_of(err: &RunError) -> MgStatus {
    match err.exit_code() {
        2 => MgStatus::InputError,
        _ => MgStatus::CheckFailed,
    }
}

/// Run the construction and the selected checks.
///
/// `checks` is a comma list ("conjMC,mainT,flabby,strucZ,smB,deodhar");
/// NULL runs all of them. `max_degree < 0` uses the default bound l(w).
/// On success `*out` owns the run. A run whose checks failed still
/// returns a handle, with status `CHECK_FAILED`.
///
/// # Safety
/// String arguments must be NUL-terminated C strings or NULL where
/// documented; `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn mg_run_new(
    cartan_type: *const c_char,
    affine: bool,
    word: *const c_char,
    field: *const c_char,
    max_degree: c_int,
    checks: *const c_char,
    out: *mut *mut MgRun,
) -> MgStatus {
    if out.is_null() {
        set_error("out must not be NULL");
        return MgStatus::InputError;
    }
    *out = ptr::null_mut();
    let run = (|| -> Result<MgRun, RunError> {
        let ctype = req_str(cartan_type, "cartan_type")?;
        let word = req_str(word, "word")?;
        let field = opt_str(field)?.unwrap_or("Q");
        let checks = opt_str(checks)?;
        let cfg = config_from(ctype, affine, word, field, max_degree, checks)?;
        let outcome = cmd_verify(&cfg, false, false)?;
        let json = CString::new(serde_json::to_string(&outcome.report).unwrap()).unwrap();
        let checks = [
            ("conjMC", &outcome.report.checks.conj_mc),
            ("mainT", &outcome.report.checks.main_t),
            ("flabby", &outcome.report.checks.flabby),
            ("strucZ", &outcome.report.checks.struc_z),
            ("smB", &outcome.report.checks.sm_b),
            ("deodhar", &outcome.report.checks.deodhar),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), CString::new(v.as_str()).unwrap()))
        .collect();
        let failures = CString::new(outcome.failures.join("\n")).unwrap();
        let status = match outcome.report.exit_code() {
            0 => MgStatus::Ok,
            3 => MgStatus::Uncertified,
            _ => MgStatus::CheckFailed,
        };
        Ok(MgRun { json, checks, failures, status })
    })();
    match run {
        Ok(r) => {
            let status = r.status;
            if status != MgStatus::Ok {
                set_error(&format!("run finished with status {status:?}"));
            }
            *out = Box::into_raw(Box::new(r));
            status
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// The JSON report of a run. Borrowed from the handle.
///
/// # Safety
/// `run` must be a live handle from [`mg_run_new`].
#[no_mangle]
pub unsafe extern "C" fn mg_run_json(run: *const MgRun) -> *const c_char {
    if run.is_null() {
        return ptr::null();
    }
    (*run).json.as_ptr()
}

/// Verdict string of one named check ("pass", "fail", "skipped(...)"), or
/// NULL for an unknown name. Borrowed from the handle.
///
/// # Safety
/// `run` must be a live handle; `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mg_run_check(run: *const MgRun, name: *const c_char) -> *const c_char {
    if run.is_null() || name.is_null() {
        return ptr::null();
    }
    let Ok(name) = CStr::from_ptr(name).to_str() else {
        return ptr::null();
    };
    match (*run).checks.get(name) {
        Some(v) => v.as_ptr(),
        None => ptr::null(),
    }
}

/// Newline-separated failure details (empty string when everything
/// passed). Borrowed from the handle.
///
/// # Safety
/// `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mg_run_failures(run: *const MgRun) -> *const c_char {
    if run.is_null() {
        return ptr::null();
    }
    (*run).failures.as_ptr()
}

/// Status the run finished with.
///
/// # Safety
/// `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mg_run_status(run: *const MgRun) -> MgStatus {
    if run.is_null() {
        return MgStatus::InputError;
    }
    (*run).status
}

/// Release a run handle. NULL is ignored.
///
/// # Safety
/// `run` must be NULL or a handle not freed before; it is invalid after.
#[no_mangle]
pub unsafe extern "C" fn mg_run_free(run: *mut MgRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Kazhdan-Lusztig table of the interval below `word` as TSV
/// ("x\tw\tc0,c1,..."). The returned string is owned by the caller; free
/// with [`mg_string_free`]. NULL on error.
///
/// # Safety
/// String arguments as in [`mg_run_new`].
#[no_mangle]
pub unsafe extern "C" fn mg_kl_tsv(
    cartan_type: *const c_char,
    affine: bool,
    word: *const c_char,
) -> *mut c_char {
    let res = (|| -> Result<CString, RunError> {
        let ctype = req_str(cartan_type, "cartan_type")?;
        let word = req_str(word, "word")?;
        let cfg = config_from(ctype, affine, word, "Q", -1, Some(""))?;
        let out = cmd_kl(&cfg)?;
        Ok(CString::new(out.tsv).unwrap())
    })();
    match res {
        Ok(s) => s.into_raw(),
        Err(e) => {
            set_error(&e.to_string());
            ptr::null_mut()
        }
    }
}

/// DOT rendering of the moment graph. Owned by the caller; free with
/// [`mg_string_free`]. NULL on error (including zero labels over F_p).
///
/// # Safety
/// String arguments as in [`mg_run_new`].
#[no_mangle]
pub unsafe extern "C" fn mg_graph_dot(
    cartan_type: *const c_char,
    affine: bool,
    word: *const c_char,
    field: *const c_char,
) -> *mut c_char {
    let res = (|| -> Result<CString, RunError> {
        let ctype = req_str(cartan_type, "cartan_type")?;
        let word = req_str(word, "word")?;
        let field = opt_str(field)?.unwrap_or("Q");
        let cfg = config_from(ctype, affine, word, field, -1, Some(""))?;
        let out = cmd_build(&cfg, true, false)?;
        Ok(CString::new(out.dot.unwrap_or_default()).unwrap())
    })();
    match res {
        Ok(s) => s.into_raw(),
        Err(e) => {
            set_error(&e.to_string());
            ptr::null_mut()
        }
    }
}

/// Release a string returned as `*mut c_char`. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or an owned string from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn mg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
