//! C ABI over the `sp70` library.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free` function. Every fallible call returns an
//! [`Sp70Status`]; on failure a message is available from
//! [`sp70_last_error`] on the same thread until the next failing call.
//! Strings handed out by the library are NUL terminated and released with
//! [`sp70_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sp70::io::{format_grammar, format_metrics, parse_corpus, Tokenization};
use sp70::{CostMode, Corpus, Error, RunOutcome, RunParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sp70Status {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidUtf8 = 3,
    Parse = 4,
    Data = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sp70Tokenization {
    Chars = 0,
    Tokens = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sp70CostMode {
    Ideal = 0,
    Sfe = 1,
}

/// Run parameters. Start from [`sp70_params_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sp70Params {
    pub beam_width: usize,
    pub best_few: usize,
    pub max_cycles: usize,
    pub min_hit_len: usize,
    pub grammar_beam: usize,
    pub max_members_per_stage: usize,
    /// An [`Sp70CostMode`] value.
    pub cost_mode: u32,
    /// 0 for no batching.
    pub batch_size: usize,
    /// Non-positive for the default.
    pub provisional_cost: f64,
}

/// A parsed corpus.
pub struct Sp70Corpus(Corpus);

/// The outcome of a run.
pub struct Sp70Result(RunOutcome);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    let c = CString::new(message).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> Sp70Status {
    match e {
        Error::InvalidArgument(_) => Sp70Status::InvalidArgument,
        Error::Parse { .. } | Error::NamespaceCollision { .. } => Sp70Status::Parse,
        Error::Io { .. } => Sp70Status::Io,
        _ => Sp70Status::Data,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (Sp70Status, String)>) -> Sp70Status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => Sp70Status::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            Sp70Status::Panic
        }
    }
}

fn fail(e: Error) -> (Sp70Status, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (Sp70Status, String) {
    (Sp70Status::NullPointer, format!("{what} is null"))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failure on this thread, or null. Valid until the next
/// failing call on this thread.
#[no_mangle]
pub extern "C" fn sp70_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn sp70_params_default() -> Sp70Params {
    let d = RunParams::default();
    Sp70Params {
        beam_width: d.align.beam_width,
        best_few: d.align.best_few,
        max_cycles: d.align.max_cycles,
        min_hit_len: d.align.min_hit_len,
        grammar_beam: d.search.grammar_beam,
        max_members_per_stage: d.search.max_members_per_stage,
        cost_mode: Sp70CostMode::Ideal as u32,
        batch_size: 0,
        provisional_cost: 0.0,
    }
}

/// Parse `text`, one pattern per line, into a new corpus. `tokenization`
/// is an [`Sp70Tokenization`] value.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sp70_corpus_parse(
    text: *const c_char,
    tokenization: u32,
    out: *mut *mut Sp70Corpus,
) -> Sp70Status {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| (Sp70Status::InvalidUtf8, e.to_string()))?;
        let tok = match tokenization {
            0 => Tokenization::Chars,
            1 => Tokenization::WhitespaceTokens,
            t => return Err((Sp70Status::InvalidArgument, format!("unknown tokenization {t}"))),
        };
        let corpus = parse_corpus(text, tok).map_err(fail)?;
        *out = Box::into_raw(Box::new(Sp70Corpus(corpus)));
        Ok(())
    })
}

/// Number of patterns in the corpus; 0 for null.
///
/// # Safety
/// `corpus` must be null or a handle from [`sp70_corpus_parse`].
#[no_mangle]
pub unsafe extern "C" fn sp70_corpus_len(corpus: *const Sp70Corpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.0.len())
}

/// # Safety
/// `corpus` must be null or a handle from [`sp70_corpus_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp70_corpus_free(corpus: *mut Sp70Corpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Learn a grammar from `corpus`. `params` may be null for the defaults.
///
/// # Safety
/// `corpus` must be a live corpus handle, `params` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn sp70_run(
    corpus: *const Sp70Corpus,
    params: *const Sp70Params,
    out: *mut *mut Sp70Result,
) -> Sp70Status {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let corpus = corpus.as_ref().ok_or_else(|| null("corpus"))?;
        let p = params.as_ref().copied().unwrap_or_else(|| sp70_params_default());
        let mut run = RunParams {
            mode: match p.cost_mode {
                0 => CostMode::Ideal,
                1 => CostMode::Sfe,
                m => return Err((Sp70Status::InvalidArgument, format!("unknown cost mode {m}"))),
            },
            batch_size: (p.batch_size > 0).then_some(p.batch_size),
            provisional_cost: (p.provisional_cost > 0.0).then_some(p.provisional_cost),
            ..RunParams::default()
        };
        run.align.beam_width = p.beam_width;
        run.align.best_few = p.best_few;
        run.align.max_cycles = p.max_cycles;
        run.align.min_hit_len = p.min_hit_len;
        run.search.grammar_beam = p.grammar_beam;
        run.search.max_members_per_stage = p.max_members_per_stage;
        let outcome = sp70::sp70_run(&corpus.0, &run).map_err(fail)?;
        *out = Box::into_raw(Box::new(Sp70Result(outcome)));
        Ok(())
    })
}

/// The tidied best grammar, one pattern per line. Free with [`sp70_string_free`].
///
/// # Safety
/// `result` must be a live result handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn sp70_result_grammar(result: *const Sp70Result, out: *mut *mut c_char) -> Sp70Status {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        let (grammar, repo) = &r.0.sift.tidied;
        *out = into_c_string(format_grammar(grammar, repo).map_err(fail)?);
        Ok(())
    })
}

/// Per-stage metrics as CSV. Free with [`sp70_string_free`].
///
/// # Safety
/// `result` must be a live result handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn sp70_result_metrics_csv(result: *const Sp70Result, out: *mut *mut c_char) -> Sp70Status {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        *out = into_c_string(format_metrics(&r.0.sift.metrics));
        Ok(())
    })
}

/// Sizes of the best grammar in bits and its member count. Any output
/// pointer may be null.
///
/// # Safety
/// `result` must be a live result handle; non-null outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn sp70_result_scores(
    result: *const Sp70Result,
    g: *mut f64,
    e: *mut f64,
    t: *mut f64,
    members: *mut usize,
) -> Sp70Status {
    guard(|| {
        let r = result.as_ref().ok_or_else(|| null("result"))?;
        let best = &r.0.sift.tidied.0;
        if let Some(g) = g.as_mut() {
            *g = best.g;
        }
        if let Some(e) = e.as_mut() {
            *e = best.e;
        }
        if let Some(t) = t.as_mut() {
            *t = best.t;
        }
        if let Some(m) = members.as_mut() {
            *m = best.members.len();
        }
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a handle from [`sp70_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp70_result_free(result: *mut Sp70Result) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sp70_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
