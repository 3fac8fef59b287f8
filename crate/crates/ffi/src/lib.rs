//! C interface to the question answering pipeline.
//!
//! A `TopSession` owns a database, a lexicon and a speech time. Strings
//! handed out by this library must be released with `top_string_free`;
//! sessions with `top_session_free`. After a call returns anything other
//! than `TOP_STATUS_OK`, `top_last_error` describes the failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use top_nlidb::cli::{run_batch, CliError, Options, Readings, Session};
use top_nlidb::lexgram::load_lexicon;
use top_nlidb::tdb::load_database;

/// Print the TOP formula of each reading.
pub const TOP_SHOW_TOP: u32 = 1;
/// Print the generated TSQL2 text of each reading.
pub const TOP_SHOW_TSQL2: u32 = 2;
/// Evaluate each reading on both paths and report divergences.
pub const TOP_CHECK: u32 = 4;
/// Answer only the first reading.
pub const TOP_FIRST_READING: u32 = 8;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// The database or lexicon text could not be loaded.
    LoadError = 3,
    /// The speech time is not on the database axis.
    ConfigError = 4,
    /// At least one question could not be answered.
    QuestionError = 5,
    /// Check mode found answers that differ between the two paths.
    Divergence = 6,
    /// An internal panic was caught at the boundary.
    Panic = 7,
}

/// Opaque session handle.
pub struct TopSession {
    inner: Session,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn top_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, TopStatus> {
    if p.is_null() {
        set_error(&format!("{what} is null"));
        return Err(TopStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(&format!("{what} is not UTF-8"));
        TopStatus::InvalidUtf8
    })
}

fn guard(f: impl FnOnce() -> TopStatus) -> TopStatus {
    set_error("");
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| {
        set_error("internal panic");
        TopStatus::Panic
    })
}

fn hand_out(s: String, out: *mut *mut c_char) {
    let c = CString::new(s.replace('\0', " ")).unwrap_or_default();
    // SAFETY: callers checked `out` for null.
    unsafe { *out = c.into_raw() };
}

fn options(flags: u32) -> Options {
    Options {
        show_top: flags & TOP_SHOW_TOP != 0,
        show_tsql2: flags & TOP_SHOW_TSQL2 != 0,
        check: flags & TOP_CHECK != 0,
        readings: if flags & TOP_FIRST_READING != 0 {
            Readings::First
        } else {
            Readings::All
        },
    }
}

/// Builds a session from database text, lexicon text and a speech time
/// (`D/M/YYYY` or `D/M/YYYY HH:MM`). `flags` combines the `TOP_*` option
/// bits. On success `*out` receives the new handle.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn top_session_new(
    database: *const c_char,
    lexicon: *const c_char,
    now: *const c_char,
    flags: u32,
    out: *mut *mut TopSession,
) -> TopStatus {
    guard(|| {
        if out.is_null() {
            set_error("out is null");
            return TopStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let (db, lex, now) = match (text(database, "database"), text(lexicon, "lexicon"), text(now, "now")) {
            (Ok(a), Ok(b), Ok(c)) => (a, b, c),
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => return e,
        };
        let db = match load_database(db) {
            Ok(d) => d,
            Err(e) => {
                set_error(&format!("database: {e}"));
                return TopStatus::LoadError;
            }
        };
        let lex = match load_lexicon(lex) {
            Ok(l) => l,
            Err(e) => {
                set_error(&e.to_string());
                return TopStatus::LoadError;
            }
        };
        match Session::new(db, lex, now, options(flags)) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(TopSession { inner }));
                TopStatus::Ok
            }
            Err(e @ CliError::Now(_)) => {
                set_error(&e.to_string());
                TopStatus::ConfigError
            }
            Err(e) => {
                set_error(&e.to_string());
                TopStatus::LoadError
            }
        }
    })
}

/// Releases a session; null is ignored.
///
/// # Safety
/// `session` must be null or a handle from `top_session_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn top_session_free(session: *mut TopSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Answers one question. `*out` receives the answer lines (formula, query
/// text, answer and check lines as enabled), newline-terminated, even when
/// the status reports a question error or a divergence.
///
/// # Safety
/// `session` must be a live handle; `question` a NUL-terminated string;
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn top_session_ask(
    session: *const TopSession,
    question: *const c_char,
    out: *mut *mut c_char,
) -> TopStatus {
    guard(|| {
        if session.is_null() || out.is_null() {
            set_error("session or out is null");
            return TopStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let q = match text(question, "question") {
            Ok(q) => q,
            Err(e) => return e,
        };
        let report = (*session).inner.answer(q);
        let mut body = String::new();
        for l in &report.lines {
            body.push_str(l);
            body.push('\n');
        }
        let status = if report.divergences > 0 {
            set_error(&format!("{} divergent reading(s)", report.divergences));
            TopStatus::Divergence
        } else if report.failed {
            set_error(report.lines.iter().find(|l| l.starts_with("error")).map_or("", String::as_str));
            TopStatus::QuestionError
        } else {
            TopStatus::Ok
        };
        hand_out(body, out);
        status
    })
}

/// Runs batch mode over newline-separated questions. `*out` receives the
/// full batch output. Questions that fail to parse are reported in the
/// text only. Divergences give `TOP_STATUS_DIVERGENCE`; evaluation errors
/// give `TOP_STATUS_QUESTION_ERROR`.
///
/// # Safety
/// As for `top_session_ask`.
#[no_mangle]
pub unsafe extern "C" fn top_session_batch(
    session: *const TopSession,
    questions: *const c_char,
    out: *mut *mut c_char,
) -> TopStatus {
    guard(|| {
        if session.is_null() || out.is_null() {
            set_error("session or out is null");
            return TopStatus::NullArgument;
        }
        *out = ptr::null_mut();
        let qs = match text(questions, "questions") {
            Ok(q) => q,
            Err(e) => return e,
        };
        let mut buf = Vec::new();
        let summary = run_batch(&(*session).inner, qs, &mut buf).expect("writing to memory");
        hand_out(String::from_utf8_lossy(&buf).into_owned(), out);
        match summary.exit_code() {
            0 => TopStatus::Ok,
            2 => {
                set_error(&format!("{} divergent reading(s)", summary.divergences));
                TopStatus::Divergence
            }
            _ => {
                set_error(&format!("{} internal error(s)", summary.internal_errors));
                TopStatus::QuestionError
            }
        }
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn top_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
