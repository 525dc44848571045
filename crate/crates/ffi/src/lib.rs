//! C ABI for the parcut minimum-cut library.
//!
//! Graphs and reports are opaque handles created and destroyed through
//! this interface; every entry point returns a status code and never
//! unwinds across the boundary. Error details for the calling thread are
//! available via `parcut_last_error`.

// Entry points null-check every pointer before dereferencing; the usual
// C-ABI contract (valid pointers from the caller) applies beyond that.
#![allow(clippy::not_unsafe_ptr_arg_deref)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use parcut::driver::{minimum_cut, RunConfig, RunReport};
use parcut::packing::PackingParams;
use parcut::stoer_wagner::stoer_wagner;
use parcut::ParsedGraph;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum ParcutStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    RuntimeError = 5,
}

/// Tunables for a minimum-cut run; initialize with
/// `parcut_options_default` and override fields as needed.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct ParcutOptions {
    /// RNG seed; identical seeds give identical results.
    pub seed: u64,
    /// Worker threads; 0 auto-detects.
    pub threads: usize,
    /// Tree-packing accuracy in (0,1).
    pub epsilon: f64,
    /// Multiplier on the ceil(ln n) spanning trees tried.
    pub tree_multiplier: f64,
    /// Extra restarts with derived seeds.
    pub retries: u32,
    /// Nonzero verifies the result against the Stoer-Wagner oracle.
    pub oracle_check: u8,
}

/// Opaque parsed graph handle.
pub struct ParcutGraph {
    parsed: ParsedGraph,
}

/// Opaque result handle.
pub struct ParcutReport {
    report: RunReport,
    side_tokens: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("error").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn parcut_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Default options: seed 0, auto threads, epsilon 0.2, multiplier 3,
/// no retries, no oracle check.
#[no_mangle]
pub extern "C" fn parcut_options_default(out: *mut ParcutOptions) {
    if out.is_null() {
        return;
    }
    let packing = PackingParams::default();
    unsafe {
        *out = ParcutOptions {
            seed: 0,
            threads: 0,
            epsilon: packing.epsilon,
            tree_multiplier: packing.tree_count_multiplier,
            retries: 0,
            oracle_check: 0,
        };
    }
}

/// Parse an edge-list document (one `u v w` edge per line, `#` comments).
/// On success stores a graph handle in `out`; release it with
/// `parcut_graph_free`.
#[no_mangle]
pub extern "C" fn parcut_graph_parse(
    text: *const c_char,
    out: *mut *mut ParcutGraph,
) -> ParcutStatus {
    if text.is_null() || out.is_null() {
        set_error("null argument".into());
        return ParcutStatus::NullArgument;
    }
    let text = match unsafe { CStr::from_ptr(text) }.to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("graph text is not valid UTF-8".into());
            return ParcutStatus::InvalidUtf8;
        }
    };
    match catch_unwind(|| parcut::parse_graph(text)) {
        Ok(Ok(parsed)) => {
            unsafe { *out = Box::into_raw(Box::new(ParcutGraph { parsed })) };
            ParcutStatus::Ok
        }
        Ok(Err(err)) => {
            set_error(err.to_string());
            ParcutStatus::ParseError
        }
        Err(_) => {
            set_error("internal panic during parse".into());
            ParcutStatus::RuntimeError
        }
    }
}

#[no_mangle]
pub extern "C" fn parcut_graph_free(g: *mut ParcutGraph) {
    if !g.is_null() {
        drop(unsafe { Box::from_raw(g) });
    }
}

#[no_mangle]
pub extern "C" fn parcut_graph_vertices(g: *const ParcutGraph) -> usize {
    if g.is_null() {
        return 0;
    }
    unsafe { &*g }.parsed.graph.vertex_count()
}

#[no_mangle]
pub extern "C" fn parcut_graph_edges(g: *const ParcutGraph) -> usize {
    if g.is_null() {
        return 0;
    }
    unsafe { &*g }.parsed.graph.edge_count()
}

/// Run the randomized minimum-cut pipeline. On success stores a report
/// handle in `out`; release it with `parcut_report_free`.
#[no_mangle]
pub extern "C" fn parcut_minimum_cut(
    g: *const ParcutGraph,
    options: *const ParcutOptions,
    out: *mut *mut ParcutReport,
) -> ParcutStatus {
    if g.is_null() || out.is_null() {
        set_error("null argument".into());
        return ParcutStatus::NullArgument;
    }
    let graph = unsafe { &*g };
    let mut opts = ParcutOptions {
        seed: 0,
        threads: 0,
        epsilon: 0.2,
        tree_multiplier: 3.0,
        retries: 0,
        oracle_check: 0,
    };
    if !options.is_null() {
        opts = unsafe { *options };
    }
    if !(opts.epsilon > 0.0 && opts.epsilon < 1.0) || opts.tree_multiplier < 1.0 {
        set_error("epsilon must lie in (0,1) and tree_multiplier must be >= 1".into());
        return ParcutStatus::InvalidArgument;
    }
    let cfg = RunConfig {
        seed: opts.seed,
        threads: opts.threads,
        packing: PackingParams {
            epsilon: opts.epsilon,
            tree_count_multiplier: opts.tree_multiplier,
            ..Default::default()
        },
        retries: opts.retries,
        oracle_check: opts.oracle_check != 0,
    };
    match catch_unwind(AssertUnwindSafe(|| minimum_cut(&graph.parsed.graph, &cfg))) {
        Ok(Ok(report)) => {
            let side_tokens = report
                .side
                .iter()
                .map(|&v| {
                    CString::new(graph.parsed.tokens[v as usize].as_str())
                        .unwrap_or_else(|_| CString::new("?").unwrap())
                })
                .collect();
            unsafe { *out = Box::into_raw(Box::new(ParcutReport { report, side_tokens })) };
            ParcutStatus::Ok
        }
        Ok(Err(err)) => {
            set_error(err.to_string());
            ParcutStatus::InvalidArgument
        }
        Err(_) => {
            set_error("internal panic during minimum cut".into());
            ParcutStatus::RuntimeError
        }
    }
}

/// Exact Stoer-Wagner minimum cut value (sequential oracle).
#[no_mangle]
pub extern "C" fn parcut_stoer_wagner(
    g: *const ParcutGraph,
    out_value: *mut i64,
) -> ParcutStatus {
    if g.is_null() || out_value.is_null() {
        set_error("null argument".into());
        return ParcutStatus::NullArgument;
    }
    let graph = unsafe { &*g };
    if graph.parsed.graph.vertex_count() < 2 {
        set_error("graph has fewer than 2 vertices".into());
        return ParcutStatus::InvalidArgument;
    }
    match catch_unwind(AssertUnwindSafe(|| stoer_wagner(&graph.parsed.graph))) {
        Ok((value, _)) => {
            unsafe { *out_value = value };
            ParcutStatus::Ok
        }
        Err(_) => {
            set_error("internal panic during stoer-wagner".into());
            ParcutStatus::RuntimeError
        }
    }
}

#[no_mangle]
pub extern "C" fn parcut_report_value(r: *const ParcutReport) -> i64 {
    if r.is_null() {
        return -1;
    }
    unsafe { &*r }.report.value
}

#[no_mangle]
pub extern "C" fn parcut_report_trees_tried(r: *const ParcutReport) -> u64 {
    if r.is_null() {
        return 0;
    }
    unsafe { &*r }.report.trees_tried
}

/// 1 if the oracle check ran and agreed, 0 if it disagreed, -1 if it was
/// not requested.
#[no_mangle]
pub extern "C" fn parcut_report_oracle_agreement(r: *const ParcutReport) -> i32 {
    if r.is_null() {
        return -1;
    }
    match unsafe { &*r }.report.oracle_agreement {
        Some(true) => 1,
        Some(false) => 0,
        None => -1,
    }
}

#[no_mangle]
pub extern "C" fn parcut_report_side_len(r: *const ParcutReport) -> usize {
    if r.is_null() {
        return 0;
    }
    unsafe { &*r }.side_tokens.len()
}

/// Token of the i-th vertex on the reported side, or null when out of
/// range. Borrowed from the report; valid until `parcut_report_free`.
#[no_mangle]
pub extern "C" fn parcut_report_side_token(
    r: *const ParcutReport,
    i: usize,
) -> *const c_char {
    if r.is_null() {
        return ptr::null();
    }
    let report = unsafe { &*r };
    match report.side_tokens.get(i) {
        Some(tok) => tok.as_ptr(),
        None => ptr::null(),
    }
}

#[no_mangle]
pub extern "C" fn parcut_report_free(r: *mut ParcutReport) {
    if !r.is_null() {
        drop(unsafe { Box::from_raw(r) });
    }
}
