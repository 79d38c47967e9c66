//! C interface to `ibpkit`.
//!
//! Algebras live behind an opaque [`IbpAlgebra`] handle. Every function
//! returns an [`IbpStatus`]; results are written through out-pointers as
//! JSON strings that the caller releases with [`ibp_string_free`]. The
//! message of the last failure on the calling thread is available from
//! [`ibp_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ibpkit::ibp0::{Algebra, Ibp0};
use ibpkit::io::{self, Document};
use ibpkit::scan::Window;
use ibpkit::{states, Error};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IbpStatus {
    Ok = 0,
    CheckFailed = 1,
    InputError = 2,
    NullPointer = 3,
    InvalidUtf8 = 4,
    Panic = 5,
}

/// A parsed algebra. Create with [`ibp_algebra_from_json`], release with
/// [`ibp_algebra_free`].
pub struct IbpAlgebra {
    algebra: Algebra,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = CString::new(message.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

struct Failure(IbpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = if e.is_check_failure() { IbpStatus::CheckFailed } else { IbpStatus::InputError };
        Failure(status, e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<IbpStatus, Failure>) -> IbpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            IbpStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(IbpStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(IbpStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn write_string(out: *mut *mut c_char, value: String) -> Result<(), Failure> {
    let c = CString::new(value).map_err(|_| Failure(IbpStatus::InputError, "output contains a NUL byte".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn check_out<T>(out: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure(IbpStatus::NullPointer, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

unsafe fn algebra<'a>(handle: *const IbpAlgebra) -> Result<&'a IbpAlgebra, Failure> {
    handle
        .as_ref()
        .ok_or_else(|| Failure(IbpStatus::NullPointer, "algebra handle is null".into()))
}

fn window(bound: u32) -> Result<Window, Failure> {
    if bound == 0 {
        return Err(Failure(IbpStatus::InputError, "window must be at least 1".into()));
    }
    Ok(Window::new(bound))
}

fn report_status(valid: bool) -> IbpStatus {
    if valid {
        IbpStatus::Ok
    } else {
        IbpStatus::CheckFailed
    }
}

/// Parses an algebra document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ibp_algebra_from_json(json: *const c_char, out: *mut *mut IbpAlgebra) -> IbpStatus {
    guard(|| {
        check_out(out)?;
        let doc = io::parse_document(text(json, "json")?)?;
        let Document::Algebra(algebra) = doc else {
            return Err(Failure(IbpStatus::InputError, format!("expected an algebra, found a {}", doc.kind())));
        };
        *out = Box::into_raw(Box::new(IbpAlgebra { algebra }));
        Ok(IbpStatus::Ok)
    })
}

/// # Safety
/// `handle` must come from [`ibp_algebra_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ibp_algebra_free(handle: *mut IbpAlgebra) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of direct factors of the algebra.
///
/// # Safety
/// `handle` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ibp_algebra_factor_count(handle: *const IbpAlgebra, out: *mut usize) -> IbpStatus {
    guard(|| {
        check_out(out)?;
        *out = algebra(handle)?.algebra.factors().len();
        Ok(IbpStatus::Ok)
    })
}

/// Runs the MTL validator, or the IBP0 validator when `ibp0` is nonzero, and
/// writes the report as JSON. Returns `CheckFailed` when a check fails.
///
/// # Safety
/// `handle` must be a live handle and `report` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ibp_algebra_validate(
    handle: *const IbpAlgebra,
    window_bound: u32,
    ibp0: i32,
    report: *mut *mut c_char,
) -> IbpStatus {
    guard(|| {
        check_out(report)?;
        let a = &algebra(handle)?.algebra;
        let window = window(window_bound)?;
        let r = if ibp0 != 0 {
            a.validate(&window)
        } else {
            ibpkit::ibp0::validate_mtl(a, &window)
        };
        let json = serde_json::to_value(&r).map_err(|e| Failure(IbpStatus::InputError, e.to_string()))?;
        write_string(report, io::to_canonical(&json))?;
        Ok(report_status(r.is_valid()))
    })
}

/// Splits a hyperstate on the algebra and writes the recovered measure and
/// radical state as a hyperstate document.
///
/// # Safety
/// `handle` must be a live handle, `state_json` a NUL-terminated string and
/// `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ibp_hyperstate_split(
    handle: *const IbpAlgebra,
    state_json: *const c_char,
    window_bound: u32,
    out: *mut *mut c_char,
) -> IbpStatus {
    guard(|| {
        check_out(out)?;
        let a = algebra(handle)?.algebra.clone();
        let ibp = Ibp0::new(a, window(window_bound)?)?;
        let doc = match io::parse_document(text(state_json, "state_json")?)? {
            Document::Hyperstate(doc) => doc,
            other => return Err(Failure(IbpStatus::InputError, format!("expected a hyperstate, found a {}", other.kind()))),
        };
        let s = doc.resolve(&ibp)?;
        let split = states::split_hyperstate(&ibp, &s)?;
        let joined = states::Hyperstate::Split { measure: split.measure, state: split.state };
        let value = io::hyperstate_to_value(&io::HyperstateDoc::from_hyperstate(&joined));
        write_string(out, io::to_canonical(&value))?;
        Ok(report_status(split.report.is_valid()))
    })
}

/// Runs the command line in-process with `argc` arguments (excluding the
/// program name). Writes the printed report and the process exit status.
///
/// # Safety
/// `argv` must point to `argc` NUL-terminated strings; `out` and
/// `exit_status` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ibp_run(
    argv: *const *const c_char,
    argc: usize,
    out: *mut *mut c_char,
    exit_status: *mut i32,
) -> IbpStatus {
    guard(|| {
        check_out(out)?;
        check_out(exit_status)?;
        if argv.is_null() && argc > 0 {
            return Err(Failure(IbpStatus::NullPointer, "argv is null".into()));
        }
        let mut args = vec!["ibpkit".to_string()];
        for i in 0..argc {
            args.push(text(*argv.add(i), "argument")?.to_string());
        }
        let outcome = ibpkit::cli::run(args);
        *exit_status = outcome.status;
        write_string(out, format!("{}{}", outcome.stdout, outcome.stderr))?;
        Ok(IbpStatus::Ok)
    })
}

/// # Safety
/// `s` must be a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ibp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ibp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOOLEAN2: &str = r#"{"size": 2, "times": [[0,0],[0,1]], "impl": [[1,1],[0,1]],
        "meet": [[0,0],[0,1]], "join": [[0,1],[1,1]], "bot": 0, "top": 1}"#;

    const LUKASIEWICZ3: &str = r#"{"size": 3, "times": [[0,0,0],[0,0,1],[0,1,2]],
        "impl": [[2,2,2],[1,2,2],[0,1,2]], "meet": [[0,0,0],[0,1,1],[0,1,2]],
        "join": [[0,1,2],[1,1,2],[2,2,2]], "bot": 0, "top": 2}"#;

    fn parse(json: &str) -> (IbpStatus, *mut IbpAlgebra) {
        let c = CString::new(json).unwrap();
        let mut handle = ptr::null_mut();
        let status = unsafe { ibp_algebra_from_json(c.as_ptr(), &mut handle) };
        (status, handle)
    }

    fn last_error() -> String {
        unsafe { CStr::from_ptr(ibp_last_error()) }.to_string_lossy().into_owned()
    }

    fn take(s: *mut c_char) -> String {
        let text = unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned();
        unsafe { ibp_string_free(s) };
        text
    }

    #[test]
    fn validate_roundtrip() {
        let (status, handle) = parse(BOOLEAN2);
        assert_eq!(status, IbpStatus::Ok);
        let mut count = 0;
        assert_eq!(unsafe { ibp_algebra_factor_count(handle, &mut count) }, IbpStatus::Ok);
        assert_eq!(count, 1);
        let mut report = ptr::null_mut();
        assert_eq!(unsafe { ibp_algebra_validate(handle, 8, 1, &mut report) }, IbpStatus::Ok);
        assert!(take(report).contains("\"prelinearity\""));
        unsafe { ibp_algebra_free(handle) };
    }

    #[test]
    fn failed_check_is_reported() {
        let (_, handle) = parse(LUKASIEWICZ3);
        let mut report = ptr::null_mut();
        assert_eq!(unsafe { ibp_algebra_validate(handle, 8, 1, &mut report) }, IbpStatus::CheckFailed);
        assert!(take(report).contains("\"DL\""));
        let mut report = ptr::null_mut();
        assert_eq!(unsafe { ibp_algebra_validate(handle, 8, 0, &mut report) }, IbpStatus::Ok);
        unsafe { ibp_string_free(report) };
        unsafe { ibp_algebra_free(handle) };
    }

    #[test]
    fn input_errors() {
        let (status, handle) = parse(r#"{"size": 2, "times": [[0,0],[0,7]]}"#);
        assert_eq!(status, IbpStatus::InputError);
        assert!(handle.is_null());
        assert!(last_error().contains("times[1][1]"), "{}", last_error());

        let mut out = ptr::null_mut();
        assert_eq!(unsafe { ibp_algebra_from_json(ptr::null(), &mut out) }, IbpStatus::NullPointer);
        let bad = [0xffu8, 0];
        assert_eq!(unsafe { ibp_algebra_from_json(bad.as_ptr().cast(), &mut out) }, IbpStatus::InvalidUtf8);
        let mut report = ptr::null_mut();
        assert_eq!(unsafe { ibp_algebra_validate(ptr::null(), 8, 1, &mut report) }, IbpStatus::NullPointer);
    }

    #[test]
    fn split_on_chang() {
        let (_, handle) = parse(r#"{"kind": "rotation", "rank": 1}"#);
        let state = CString::new(r#"{"table": {"pos(0)": "1+e0"}}"#).unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { ibp_hyperstate_split(handle, state.as_ptr(), 2, &mut out) }, IbpStatus::InputError);

        let state = CString::new(r#"{"measure": {"0": "1"}, "lambda": ["2"]}"#).unwrap();
        assert_eq!(unsafe { ibp_hyperstate_split(handle, state.as_ptr(), 8, &mut out) }, IbpStatus::Ok);
        let text = take(out);
        assert!(text.contains("\"lambda\": [\"2\"]"), "{text}");
        unsafe { ibp_algebra_free(handle) };
    }

    #[test]
    fn run_in_process() {
        let args = [CString::new("corpus").unwrap(), CString::new("--help").unwrap()];
        let ptrs: Vec<*const c_char> = args.iter().map(|a| a.as_ptr()).collect();
        let (mut out, mut exit) = (ptr::null_mut(), -1);
        assert_eq!(unsafe { ibp_run(ptrs.as_ptr(), ptrs.len(), &mut out, &mut exit) }, IbpStatus::Ok);
        assert_eq!(exit, 0);
        assert!(take(out).contains("--out"));
    }
}
