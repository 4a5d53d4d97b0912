//! C interface to `igc`: opaque handles, status codes and owned strings.
//!
//! Every fallible call returns an [`IgcStatus`]; on failure the message is
//! available from [`igc_last_error`] on the same thread. Strings returned
//! through out-parameters must be released with [`igc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use igc::automata::Automaton;
use igc::compiler::{compile, CompiledMachine};
use igc::execution::ExecOptions;
use igc::measurement::{orthogonal_to_test, parse_test};
use igc::rational::fmt_q;
use igc::words::canonical;
use igc::Error;

/// Result of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IgcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Scope = 5,
    Truncation = 6,
    Parameter = 7,
    Numeric = 8,
}

/// A validated automaton.
pub struct IgcAutomaton(Automaton);

/// An automaton compiled to a graphing.
pub struct IgcCompiled {
    machine: CompiledMachine,
    heads: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: IgcStatus, msg: impl Into<String>) -> IgcStatus {
    let text = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
    status
}

fn from_error(e: Error) -> IgcStatus {
    let status = match &e {
        Error::Parse { .. } => IgcStatus::Parse,
        Error::Validation(_) => IgcStatus::Validation,
        Error::Scope(_) => IgcStatus::Scope,
        Error::Truncation(_) => IgcStatus::Truncation,
        Error::Parameter(_) => IgcStatus::Parameter,
        Error::InvalidTarget(_) | Error::Discretization(_) | Error::ClosureViolation(_) => IgcStatus::Numeric,
    };
    fail(status, e.to_string())
}

/// # Safety
/// `s` must be null or a valid NUL-terminated string.
unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, IgcStatus> {
    if s.is_null() {
        return Err(fail(IgcStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(IgcStatus::InvalidUtf8, "argument is not UTF-8"))
}

/// # Safety
/// `out` must be null or valid for a pointer write.
unsafe fn put_string(out: *mut *mut c_char, s: String) -> IgcStatus {
    if out.is_null() {
        return fail(IgcStatus::NullPointer, "null output pointer");
    }
    *out = CString::new(s).unwrap_or_default().into_raw();
    IgcStatus::Ok
}

/// Message of the last failed call on this thread; owned by the library.
#[no_mangle]
pub extern "C" fn igc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses and validates the automaton text format.
///
/// # Safety
/// `text_ptr` must be a NUL-terminated string and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn igc_automaton_parse(text_ptr: *const c_char, out: *mut *mut IgcAutomaton) -> IgcStatus {
    let src = match text(text_ptr) {
        Ok(s) => s,
        Err(st) => return st,
    };
    if out.is_null() {
        return fail(IgcStatus::NullPointer, "null output pointer");
    }
    match Automaton::parse(src) {
        Ok(a) => {
            *out = Box::into_raw(Box::new(IgcAutomaton(a)));
            IgcStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Looks up a machine of the built-in corpus by name.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn igc_automaton_from_corpus(name: *const c_char, out: *mut *mut IgcAutomaton) -> IgcStatus {
    let n = match text(name) {
        Ok(s) => s,
        Err(st) => return st,
    };
    if out.is_null() {
        return fail(IgcStatus::NullPointer, "null output pointer");
    }
    match igc::corpus::by_name(n) {
        Some(e) => {
            *out = Box::into_raw(Box::new(IgcAutomaton(e.automaton)));
            IgcStatus::Ok
        }
        None => fail(IgcStatus::Parameter, format!("no corpus machine `{n}`")),
    }
}

/// # Safety
/// `a` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn igc_automaton_free(a: *mut IgcAutomaton) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Acceptance probability of `word` as an exact rational string `p/q`.
/// `exact` is set to false when the stack depth cut some runs.
///
/// # Safety
/// Pointers must be valid; `a` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn igc_accept_probability(
    a: *const IgcAutomaton,
    word: *const c_char,
    stack_depth: usize,
    out: *mut *mut c_char,
    exact: *mut bool,
) -> IgcStatus {
    let Some(a) = a.as_ref() else {
        return fail(IgcStatus::NullPointer, "null automaton");
    };
    let w = match text(word) {
        Ok(s) => s,
        Err(st) => return st,
    };
    match a.0.accept_probability(w, stack_depth) {
        Ok(r) => {
            if !exact.is_null() {
                *exact = r.exact;
            }
            put_string(out, fmt_q(&r.accept))
        }
        Err(e) => from_error(e),
    }
}

/// Compiles an automaton.
///
/// # Safety
/// `a` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn igc_compile(a: *const IgcAutomaton, out: *mut *mut IgcCompiled) -> IgcStatus {
    let Some(a) = a.as_ref() else {
        return fail(IgcStatus::NullPointer, "null automaton");
    };
    if out.is_null() {
        return fail(IgcStatus::NullPointer, "null output pointer");
    }
    match compile(&a.0) {
        Ok(machine) => {
            *out = Box::into_raw(Box::new(IgcCompiled { machine, heads: a.0.heads }));
            IgcStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// # Safety
/// `c` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn igc_compiled_free(c: *mut IgcCompiled) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of dialect states, or 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn igc_compiled_dialect_size(c: *const IgcCompiled) -> u64 {
    c.as_ref().map_or(0, |c| c.machine.dialect_size() as u64)
}

/// Mass of the accepting cycles of the compiled machine against `word`.
///
/// # Safety
/// Pointers must be valid; `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn igc_path_sum(
    c: *const IgcCompiled,
    word: *const c_char,
    stack_depth: usize,
    out: *mut *mut c_char,
    exact: *mut bool,
) -> IgcStatus {
    let Some(c) = c.as_ref() else {
        return fail(IgcStatus::NullPointer, "null machine");
    };
    let w = match text(word) {
        Ok(s) => s,
        Err(st) => return st,
    };
    let opts = ExecOptions { stack_depth, ..ExecOptions::default() };
    let result = canonical(w).and_then(|rep| c.machine.accept_reject(&rep, &opts));
    match result {
        Ok((acc, _)) => {
            if !exact.is_null() {
                *exact = acc.exact;
            }
            put_string(out, fmt_q(&acc.neutral()))
        }
        Err(e) => from_error(e),
    }
}

/// Membership of `word` through orthogonality to `test` (`neg`, `pos`, `prob:<eps>`).
///
/// # Safety
/// Pointers must be valid; `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn igc_membership(
    c: *const IgcCompiled,
    word: *const c_char,
    test: *const c_char,
    out: *mut bool,
) -> IgcStatus {
    let Some(c) = c.as_ref() else {
        return fail(IgcStatus::NullPointer, "null machine");
    };
    let (w, t) = match (text(word), text(test)) {
        (Ok(w), Ok(t)) => (w, t),
        (Err(st), _) | (_, Err(st)) => return st,
    };
    if out.is_null() {
        return fail(IgcStatus::NullPointer, "null output pointer");
    }
    let verdict = parse_test(t, c.heads + 1).and_then(|test| {
        let rep = canonical(w)?;
        orthogonal_to_test(&c.machine, &rep, &test, &ExecOptions::default())
    });
    match verdict {
        Ok(o) => {
            *out = o.orthogonal;
            IgcStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn igc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
