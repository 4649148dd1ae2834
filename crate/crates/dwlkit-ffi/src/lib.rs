//! C ABI for the dwlkit toolkit.
//!
//! Conventions: every function returns a [`DwlkitStatus`] code; results come
//! back through out-pointers. Graphs are opaque handles created by the load
//! functions and released with [`dwlkit_graph_free`]. Strings returned by
//! the library are NUL-terminated, owned by the caller and released with
//! [`dwlkit_string_free`]. On any non-zero status,
//! [`dwlkit_last_error_message`] returns a human-readable description.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use dwlkit::dwl::dwl_distinguish;
use dwlkit::encode::mite_raw;
use dwlkit::harness::{average_precision, expressiveness_suite, roc_auc, SuiteConfig};
use dwlkit::temporal::{build_dat, load_events, Dat, DynamicGraph, GraphFormat};

/// Status codes returned by every API call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DwlkitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    ParseError = 4,
    IoError = 5,
    SizeBound = 6,
    Internal = 7,
}

/// Opaque graph handle: an immutable event stream plus its pair timelines.
pub struct DwlkitGraph {
    graph: DynamicGraph,
    dat: Dat,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let cstring = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn status_of(err: &dwlkit::Error) -> DwlkitStatus {
    match err {
        dwlkit::Error::Parse { .. } => DwlkitStatus::ParseError,
        dwlkit::Error::Io(_) => DwlkitStatus::IoError,
        dwlkit::Error::SearchBound { .. } => DwlkitStatus::SizeBound,
        dwlkit::Error::InvalidNode { .. }
        | dwlkit::Error::UnsupportedOrder(_)
        | dwlkit::Error::InvalidInput(_) => DwlkitStatus::InvalidArgument,
        _ => DwlkitStatus::Internal,
    }
}

fn fail(err: &dwlkit::Error) -> DwlkitStatus {
    set_error(&err.to_string());
    status_of(err)
}

/// Shields the C boundary from panics.
fn guarded(body: impl FnOnce() -> DwlkitStatus) -> DwlkitStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            DwlkitStatus::Internal
        }
    }
}

unsafe fn cstr<'a>(ptr: *const c_char) -> Result<&'a str, DwlkitStatus> {
    if ptr.is_null() {
        set_error("null string pointer");
        return Err(DwlkitStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string is not valid UTF-8");
        DwlkitStatus::InvalidUtf8
    })
}

fn emit_string(text: String, out: *mut *mut c_char) -> DwlkitStatus {
    match CString::new(text) {
        Ok(cstring) => {
            unsafe { *out = cstring.into_raw() };
            DwlkitStatus::Ok
        }
        Err(_) => {
            set_error("output contained an interior NUL byte");
            DwlkitStatus::Internal
        }
    }
}

/// Returns the message of the most recent error on this thread, or NULL if
/// none occurred. The caller owns the string.
#[no_mangle]
pub extern "C" fn dwlkit_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be a pointer previously returned by a dwlkit function and not
/// yet freed; NULL is accepted and ignored.
#[no_mangle]
pub unsafe extern "C" fn dwlkit_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads an event stream from a file. `format` is "edge_list" or
/// "jodie_csv". On success writes a new handle to `out`.
///
/// # Safety
/// `path` and `format` must be NUL-terminated strings; `out` must be a valid
/// pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn dwlkit_graph_load(
    path: *const c_char,
    format: *const c_char,
    out: *mut *mut DwlkitGraph,
) -> DwlkitStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return DwlkitStatus::NullPointer;
        }
        let path = match cstr(path) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let format = match cstr(format) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let format = match GraphFormat::parse_name(format) {
            Ok(f) => f,
            Err(e) => return fail(&e),
        };
        let mut file = match std::fs::File::open(Path::new(path)) {
            Ok(f) => f,
            Err(e) => return fail(&dwlkit::Error::Io(e)),
        };
        match load_events(&mut file, format) {
            Ok(graph) => {
                let dat = build_dat(&graph);
                *out = Box::into_raw(Box::new(DwlkitGraph { graph, dat }));
                DwlkitStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Parses an edge-list event stream held in memory.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dwlkit_graph_parse_edge_list(
    text: *const c_char,
    out: *mut *mut DwlkitGraph,
) -> DwlkitStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null output pointer");
            return DwlkitStatus::NullPointer;
        }
        let text = match cstr(text) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match dwlkit::temporal::parse_events(text, GraphFormat::EdgeList) {
            Ok(graph) => {
                let dat = build_dat(&graph);
                *out = Box::into_raw(Box::new(DwlkitGraph { graph, dat }));
                DwlkitStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a graph handle.
///
/// # Safety
/// `g` must come from a dwlkit load function and not be freed twice; NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn dwlkit_graph_free(g: *mut DwlkitGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

unsafe fn graph_ref<'a>(g: *const DwlkitGraph) -> Result<&'a DwlkitGraph, DwlkitStatus> {
    if g.is_null() {
        set_error("null graph handle");
        return Err(DwlkitStatus::NullPointer);
    }
    Ok(&*g)
}

/// Number of nodes of the graph.
///
/// # Safety
/// `g` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dwlkit_graph_node_count(
    g: *const DwlkitGraph,
    out: *mut u64,
) -> DwlkitStatus {
    guarded(|| match graph_ref(g) {
        Ok(handle) => {
            *out = handle.graph.node_count() as u64;
            DwlkitStatus::Ok
        }
        Err(status) => status,
    })
}

/// Number of events of the graph.
///
/// # Safety
/// `g` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dwlkit_graph_event_count(
    g: *const DwlkitGraph,
    out: *mut u64,
) -> DwlkitStatus {
    guarded(|| match graph_ref(g) {
        Ok(handle) => {
            *out = handle.graph.events().len() as u64;
            DwlkitStatus::Ok
        }
        Err(status) => status,
    })
}

/// Runs the order-`k` dynamic WL distinguishing test on two graphs at time
/// `t` and writes the verdict as a JSON string.
///
/// # Safety
/// Both handles must be live; `out_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dwlkit_dwl_distinguish(
    ga: *const DwlkitGraph,
    gb: *const DwlkitGraph,
    t: f64,
    k: u32,
    max_rounds: u32,
    out_json: *mut *mut c_char,
) -> DwlkitStatus {
    guarded(|| {
        if out_json.is_null() {
            set_error("null output pointer");
            return DwlkitStatus::NullPointer;
        }
        let (ga, gb) = match (graph_ref(ga), graph_ref(gb)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match dwl_distinguish(&ga.graph, &gb.graph, t, k as usize, max_rounds as usize) {
            Ok(verdict) => match serde_json::to_string(&verdict) {
                Ok(json) => emit_string(json, out_json),
                Err(e) => fail(&dwlkit::Error::Json(e)),
            },
            Err(e) => fail(&e),
        }
    })
}

/// Multi-interacted time encoding of node `w` w.r.t. the pair (`u`, `v`) at
/// time `t`: writes `2 * k` values into `out`, which must hold at least
/// `2 * k` doubles.
///
/// # Safety
/// `g` must be a live handle; `out` must point at `out_len` writable
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn dwlkit_mite(
    g: *const DwlkitGraph,
    u: u64,
    v: u64,
    w: u64,
    t: f64,
    k: u64,
    out: *mut f64,
    out_len: u64,
) -> DwlkitStatus {
    guarded(|| {
        let handle = match graph_ref(g) {
            Ok(h) => h,
            Err(status) => return status,
        };
        if out.is_null() {
            set_error("null output pointer");
            return DwlkitStatus::NullPointer;
        }
        if out_len < 2 * k {
            set_error("output buffer shorter than 2 * k");
            return DwlkitStatus::InvalidArgument;
        }
        match mite_raw(
            &handle.dat,
            u as usize,
            v as usize,
            w as usize,
            t,
            k as usize,
        ) {
            Ok(mite) => {
                std::ptr::copy_nonoverlapping(mite.values().as_ptr(), out, 2 * k as usize);
                DwlkitStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

unsafe fn slice_pair<'a>(
    scores: *const f64,
    labels: *const f64,
    len: u64,
) -> Result<(&'a [f64], &'a [f64]), DwlkitStatus> {
    if scores.is_null() || labels.is_null() {
        set_error("null score or label pointer");
        return Err(DwlkitStatus::NullPointer);
    }
    Ok((
        std::slice::from_raw_parts(scores, len as usize),
        std::slice::from_raw_parts(labels, len as usize),
    ))
}

/// Average precision of a scored, 0/1-labeled sample.
///
/// # Safety
/// `scores` and `labels` must point at `len` readable doubles; `out` must be
/// valid.
#[no_mangle]
pub unsafe extern "C" fn dwlkit_average_precision(
    scores: *const f64,
    labels: *const f64,
    len: u64,
    out: *mut f64,
) -> DwlkitStatus {
    guarded(|| {
        let (scores, labels) = match slice_pair(scores, labels, len) {
            Ok(pair) => pair,
            Err(status) => return status,
        };
        match average_precision(scores, labels) {
            Ok(ap) => {
                *out = ap;
                DwlkitStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// ROC AUC of a scored, 0/1-labeled sample.
///
/// # Safety
/// `scores` and `labels` must point at `len` readable doubles; `out` must be
/// valid.
#[no_mangle]
pub unsafe extern "C" fn dwlkit_roc_auc(
    scores: *const f64,
    labels: *const f64,
    len: u64,
    out: *mut f64,
) -> DwlkitStatus {
    guarded(|| {
        let (scores, labels) = match slice_pair(scores, labels, len) {
            Ok(pair) => pair,
            Err(status) => return status,
        };
        match roc_auc(scores, labels) {
            Ok(auc) => {
                *out = auc;
                DwlkitStatus::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Runs the expressiveness property suite and writes the report as JSON.
///
/// # Safety
/// `out_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dwlkit_suite(
    trials: u64,
    seed: u64,
    searches: u64,
    out_json: *mut *mut c_char,
) -> DwlkitStatus {
    guarded(|| {
        if out_json.is_null() {
            set_error("null output pointer");
            return DwlkitStatus::NullPointer;
        }
        let config = SuiteConfig {
            trials: trials as usize,
            seed,
            searches: searches as usize,
            ..SuiteConfig::default()
        };
        match expressiveness_suite(&config) {
            Ok(report) => match serde_json::to_string(&report) {
                Ok(json) => emit_string(json, out_json),
                Err(e) => fail(&dwlkit::Error::Json(e)),
            },
            Err(e) => fail(&e),
        }
    })
}
