//! C ABI for the distance-backbone toolkit.
//!
//! Handles are opaque pointers owned by this library: create them with the
//! `bb_*_new`-style constructors, release them with the matching `bb_*_free`.
//! Every fallible call returns a [`BbStatus`]; on failure,
//! [`bb_last_error_message`] describes the problem for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;

use backbone_core::algebra::Operator;
use backbone_core::backbone::{extract_backbone, Backbone, DEFAULT_CLASSIFICATION_TOL};
use backbone_core::closure::{
    mean_closure_length_streaming, sp_closure_dijkstra, ClosureError, ClosureOptions,
};
use backbone_core::graph::{DistanceGraph, EdgeKey, SymmetrizeRule, WeightKind};
use backbone_core::io::{self, datasets, IoError, ReadOptions};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BbStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    ParseError = 4,
    IoError = 5,
    ResourceLimit = 6,
    InvariantViolation = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("NULs removed");
    });
}

fn io_status(e: &IoError) -> BbStatus {
    match e {
        IoError::Closure(ClosureError::NodeCapExceeded { .. }) => BbStatus::ResourceLimit,
        IoError::Closure(ClosureError::OperatorRejected { .. }) => BbStatus::InvariantViolation,
        IoError::File { .. } => BbStatus::IoError,
        _ => BbStatus::ParseError,
    }
}

/// Message for the most recent error on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Opaque distance-graph handle.
pub struct BbGraph {
    inner: DistanceGraph,
}

/// Opaque backbone handle; keeps a copy of its parent graph so exports
/// and label lookups need no second handle.
pub struct BbBackbone {
    backbone: Backbone,
    parent: DistanceGraph,
}

/// Interpretation of input edge weights.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BbWeightKind {
    /// Weights are distances in `[0, inf)`.
    Distance = 0,
    /// Weights are proximities in `(0, 1]`, converted via `d = 1/p - 1`.
    Proximity = 1,
}

unsafe fn cstr_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, BbStatus> {
    if ptr.is_null() {
        set_error(&format!("{what} is NULL"));
        return Err(BbStatus::NullArgument);
    }
    match unsafe { CStr::from_ptr(ptr) }.to_str() {
        Ok(s) => Ok(s),
        Err(_) => {
            set_error(&format!("{what} is not valid UTF-8"));
            Err(BbStatus::InvalidUtf8)
        }
    }
}

/// Reads a delimited edge list (`source target weight` per line, `#`
/// comments) into a new graph handle.
///
/// `delimiter` is a single byte, or 0 to split on any whitespace.
/// On success writes the handle to `out`.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be a valid
/// pointer. The returned handle must be released with [`bb_graph_free`].
#[no_mangle]
pub unsafe extern "C" fn bb_graph_read_edge_list(
    path: *const c_char,
    weight_kind: BbWeightKind,
    delimiter: c_char,
    out: *mut *mut BbGraph,
) -> BbStatus {
    if out.is_null() {
        set_error("out is NULL");
        return BbStatus::NullArgument;
    }
    let path = match unsafe { cstr_arg(path, "path") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    let opts = ReadOptions {
        delimiter: if delimiter == 0 {
            None
        } else {
            Some(delimiter as u8 as char)
        },
        weight_kind: match weight_kind {
            BbWeightKind::Distance => WeightKind::Distance,
            BbWeightKind::Proximity => WeightKind::Proximity,
        },
        symmetrize: SymmetrizeRule::Min,
    };
    match io::read_edge_list(path, &opts) {
        Ok((graph, _)) => {
            unsafe { *out = Box::into_raw(Box::new(BbGraph { inner: graph })) };
            BbStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            io_status(&e)
        }
    }
}

/// Loads a bundled dataset (largest connected component, normalized
/// distances). `cache_dir` may be NULL to use the default search path.
///
/// # Safety
/// `name` must be a valid NUL-terminated string; `cache_dir` NULL or
/// valid; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bb_graph_load_dataset(
    name: *const c_char,
    cache_dir: *const c_char,
    out: *mut *mut BbGraph,
) -> BbStatus {
    if out.is_null() {
        set_error("out is NULL");
        return BbStatus::NullArgument;
    }
    let name = match unsafe { cstr_arg(name, "name") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    let cache: Option<PathBuf> = if cache_dir.is_null() {
        None
    } else {
        match unsafe { cstr_arg(cache_dir, "cache_dir") } {
            Ok(s) => Some(PathBuf::from(s)),
            Err(status) => return status,
        }
    };
    match datasets::load_dataset(name, cache.as_deref()) {
        Ok((graph, _)) => {
            unsafe { *out = Box::into_raw(Box::new(BbGraph { inner: graph })) };
            BbStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            io_status(&e)
        }
    }
}

/// Releases a graph handle. NULL is ignored.
///
/// # Safety
/// `g` must be NULL or a pointer returned by a `bb_graph_*` constructor,
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bb_graph_free(g: *mut BbGraph) {
    if !g.is_null() {
        drop(unsafe { Box::from_raw(g) });
    }
}

/// # Safety
/// `g` must be a valid graph handle.
#[no_mangle]
pub unsafe extern "C" fn bb_graph_node_count(g: *const BbGraph) -> u64 {
    if g.is_null() {
        return 0;
    }
    unsafe { &*g }.inner.node_count() as u64
}

/// # Safety
/// `g` must be a valid graph handle.
#[no_mangle]
pub unsafe extern "C" fn bb_graph_edge_count(g: *const BbGraph) -> u64 {
    if g.is_null() {
        return 0;
    }
    unsafe { &*g }.inner.edge_count() as u64
}

/// Edge density `m / (n(n-1)/2)`; needs at least two nodes.
///
/// # Safety
/// `g` must be a valid graph handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bb_graph_density(g: *const BbGraph, out: *mut f64) -> BbStatus {
    if g.is_null() || out.is_null() {
        set_error("NULL argument");
        return BbStatus::NullArgument;
    }
    match unsafe { &*g }.inner.density() {
        Ok(d) => {
            unsafe { *out = d };
            BbStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            BbStatus::InvalidArgument
        }
    }
}

/// 1 when the graph is connected, 0 otherwise.
///
/// # Safety
/// `g` must be a valid graph handle.
#[no_mangle]
pub unsafe extern "C" fn bb_graph_is_connected(g: *const BbGraph) -> i32 {
    if g.is_null() {
        return 0;
    }
    unsafe { &*g }.inner.is_connected() as i32
}

/// Extracts the largest connected component into a new handle.
///
/// # Safety
/// `g` must be a valid graph handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bb_graph_largest_component(
    g: *const BbGraph,
    out: *mut *mut BbGraph,
) -> BbStatus {
    if g.is_null() || out.is_null() {
        set_error("NULL argument");
        return BbStatus::NullArgument;
    }
    let (lcc, _) = unsafe { &*g }.inner.largest_connected_component();
    unsafe { *out = Box::into_raw(Box::new(BbGraph { inner: lcc })) };
    BbStatus::Ok
}

fn parse_operator(id: &str) -> Result<Operator, BbStatus> {
    id.parse::<Operator>().map_err(|e| {
        set_error(&e.to_string());
        BbStatus::InvalidArgument
    })
}

/// Mean shortest-path length under the given operator id (e.g. "sum",
/// "max", "minkowski(r=2)"), ignoring unreachable pairs.
///
/// # Safety
/// `g` must be a valid graph handle; `operator` a valid NUL-terminated
/// string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bb_graph_mean_closure_length(
    g: *const BbGraph,
    operator: *const c_char,
    out: *mut f64,
) -> BbStatus {
    if g.is_null() || out.is_null() {
        set_error("NULL argument");
        return BbStatus::NullArgument;
    }
    let op_id = match unsafe { cstr_arg(operator, "operator") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    let op = match parse_operator(op_id) {
        Ok(op) => op,
        Err(status) => return status,
    };
    match mean_closure_length_streaming(&unsafe { &*g }.inner, &op) {
        Ok(mean) => {
            unsafe { *out = mean };
            BbStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            BbStatus::InvalidArgument
        }
    }
}

/// Computes the distance backbone of `g` under the given operator id.
/// `tol` is the relative classification tolerance; pass a negative value
/// for the default.
///
/// # Safety
/// `g` must be a valid graph handle; `operator` a valid NUL-terminated
/// string; `out` a valid pointer. The returned handle must be released
/// with [`bb_backbone_free`].
#[no_mangle]
pub unsafe extern "C" fn bb_backbone_extract(
    g: *const BbGraph,
    operator: *const c_char,
    tol: f64,
    out: *mut *mut BbBackbone,
) -> BbStatus {
    if g.is_null() || out.is_null() {
        set_error("NULL argument");
        return BbStatus::NullArgument;
    }
    let op_id = match unsafe { cstr_arg(operator, "operator") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    let op = match parse_operator(op_id) {
        Ok(op) => op,
        Err(status) => return status,
    };
    let tol = if tol < 0.0 { DEFAULT_CLASSIFICATION_TOL } else { tol };
    let graph = &unsafe { &*g }.inner;
    let closure = match sp_closure_dijkstra(graph, &op, &ClosureOptions::edge_only()) {
        Ok(c) => c,
        Err(ClosureError::OperatorRejected { operator, detail }) => {
            set_error(&format!("operator {operator} rejected: {detail}"));
            return BbStatus::InvariantViolation;
        }
        Err(e) => {
            set_error(&e.to_string());
            return BbStatus::InvalidArgument;
        }
    };
    match extract_backbone(graph, &closure, tol) {
        Ok(backbone) => {
            unsafe {
                *out = Box::into_raw(Box::new(BbBackbone {
                    backbone,
                    parent: graph.clone(),
                }))
            };
            BbStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            BbStatus::InvariantViolation
        }
    }
}

/// Releases a backbone handle. NULL is ignored.
///
/// # Safety
/// `b` must be NULL or a pointer returned by [`bb_backbone_extract`],
/// not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bb_backbone_free(b: *mut BbBackbone) {
    if !b.is_null() {
        drop(unsafe { Box::from_raw(b) });
    }
}

/// # Safety
/// `b` must be a valid backbone handle.
#[no_mangle]
pub unsafe extern "C" fn bb_backbone_kept_count(b: *const BbBackbone) -> u64 {
    if b.is_null() {
        return 0;
    }
    unsafe { &*b }.backbone.kept_edges().len() as u64
}

/// # Safety
/// `b` must be a valid backbone handle.
#[no_mangle]
pub unsafe extern "C" fn bb_backbone_removed_count(b: *const BbBackbone) -> u64 {
    if b.is_null() {
        return 0;
    }
    unsafe { &*b }.backbone.removed_edges().len() as u64
}

/// Fraction of triangular (kept) edges.
///
/// # Safety
/// `b` must be a valid backbone handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bb_backbone_tau(b: *const BbBackbone, out: *mut f64) -> BbStatus {
    if b.is_null() || out.is_null() {
        set_error("NULL argument");
        return BbStatus::NullArgument;
    }
    match unsafe { &*b }.backbone.tau() {
        Ok(tau) => {
            unsafe { *out = tau };
            BbStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            BbStatus::InvalidArgument
        }
    }
}

/// Edge redundancy, exactly `1 - tau`.
///
/// # Safety
/// `b` must be a valid backbone handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bb_backbone_sigma(b: *const BbBackbone, out: *mut f64) -> BbStatus {
    if b.is_null() || out.is_null() {
        set_error("NULL argument");
        return BbStatus::NullArgument;
    }
    match unsafe { &*b }.backbone.sigma() {
        Ok(sigma) => {
            unsafe { *out = sigma };
            BbStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            BbStatus::InvalidArgument
        }
    }
}

/// Distortion of the edge joining two node labels: 1 for kept edges,
/// `direct/closure` for removed ones.
///
/// # Safety
/// `b` must be a valid backbone handle; `u_label`/`v_label` valid
/// NUL-terminated strings; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bb_backbone_distortion(
    b: *const BbBackbone,
    u_label: *const c_char,
    v_label: *const c_char,
    out: *mut f64,
) -> BbStatus {
    if b.is_null() || out.is_null() {
        set_error("NULL argument");
        return BbStatus::NullArgument;
    }
    let u = match unsafe { cstr_arg(u_label, "u_label") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    let v = match unsafe { cstr_arg(v_label, "v_label") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    let handle = unsafe { &*b };
    let (Some(ui), Some(vi)) = (handle.parent.node_id(u), handle.parent.node_id(v)) else {
        set_error("unknown node label");
        return BbStatus::InvalidArgument;
    };
    let Some(key) = EdgeKey::new(ui, vi) else {
        set_error("self-pairs have no edge");
        return BbStatus::InvalidArgument;
    };
    match handle.backbone.distortion(key) {
        Some(s) => {
            unsafe { *out = s };
            BbStatus::Ok
        }
        None => {
            set_error("edge not present in the parent graph");
            BbStatus::InvalidArgument
        }
    }
}

/// Writes the backbone TSV (canonical edge order, labels, distances,
/// closure values, distortions, classes).
///
/// # Safety
/// `b` must be a valid backbone handle and `path` a valid NUL-terminated
/// string.
#[no_mangle]
pub unsafe extern "C" fn bb_backbone_write_tsv(
    b: *const BbBackbone,
    path: *const c_char,
) -> BbStatus {
    if b.is_null() {
        set_error("backbone is NULL");
        return BbStatus::NullArgument;
    }
    let path = match unsafe { cstr_arg(path, "path") } {
        Ok(s) => s,
        Err(status) => return status,
    };
    let handle = unsafe { &*b };
    match io::write_backbone(&handle.backbone, &handle.parent, path) {
        Ok(()) => BbStatus::Ok,
        Err(e) => {
            set_error(&e.to_string());
            BbStatus::IoError
        }
    }
}
