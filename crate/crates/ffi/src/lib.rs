//! C ABI over `rtprof`.
//!
//! Objects are opaque handles created by `rtprof_*_new`/`_build` functions and
//! released with the matching `_free`. Every fallible call returns an
//! [`RtStatus`]; on failure [`rtprof_last_error`] describes the error for the
//! calling thread. Strings returned to the caller are released with
//! [`rtprof_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rtprof::congestion::{certify, BfsPaths, CongestionCertificate, YkRouter};
use rtprof::poincare::{h1_sweep, h2_exact, hp_minimize, MinimizerSettings};
use rtprof::profiles::{cut_exact, cut_heuristic, Epsilon, EXACT_CUT_LIMIT};
use rtprof::round_tree::build_half_plane;
use rtprof::{build_round_tree, Budget, Error, Graph, GraphJson, YkGraph};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Budget = 3,
    Disconnected = 4,
    Io = 5,
    Panic = 6,
}

/// Resource limits; pass `NULL` wherever accepted to use the defaults.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RtBudget {
    pub vertices: u64,
    pub work: u64,
}

/// Undirected simple graph.
pub struct RtGraph(Graph);

/// Witness subgraph Y_k together with its graph.
pub struct RtYk(YkGraph);

/// Congestion lower-bound certificate.
pub struct RtCertificate(CongestionCertificate);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> RtStatus {
    match err {
        Error::Budget { .. } => RtStatus::Budget,
        Error::Disconnected => RtStatus::Disconnected,
        Error::Io(_) => RtStatus::Io,
        _ => RtStatus::InvalidInput,
    }
}

/// Runs `f`, records any error or panic, and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), (RtStatus, String)>) -> RtStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RtStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            RtStatus::Panic
        }
    }
}

fn lift<T>(r: rtprof::Result<T>) -> Result<T, (RtStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (RtStatus, String) {
    (RtStatus::NullPointer, format!("{what} is NULL"))
}

fn invalid(msg: impl Into<String>) -> (RtStatus, String) {
    (RtStatus::InvalidInput, msg.into())
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (RtStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn budget_of(b: *const RtBudget) -> Budget {
    match b.as_ref() {
        Some(b) => Budget {
            vertices: b.vertices,
            work: b.work,
        },
        None => Budget::default(),
    }
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), (RtStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn emit_f64(out: *mut f64, value: f64) -> Result<(), (RtStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = value;
    Ok(())
}

unsafe fn emit_string(out: *mut *mut c_char, s: String) -> Result<(), (RtStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = CString::new(s)
        .map_err(|_| invalid("string contains NUL"))?
        .into_raw();
    Ok(())
}

/// Message for the last failed call on this thread, or `NULL`. Valid until
/// the next `rtprof_*` call on the same thread.
#[no_mangle]
pub extern "C" fn rtprof_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rtprof_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be `NULL` or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn rtprof_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Graph on `n` vertices from `edge_count` pairs stored flat in `edges`.
///
/// # Safety
/// `edges` must point to `2 * edge_count` values (or be `NULL` when
/// `edge_count` is 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rtprof_graph_new(
    n: usize,
    edges: *const usize,
    edge_count: usize,
    out: *mut *mut RtGraph,
) -> RtStatus {
    guard(|| {
        let flat: &[usize] = if edge_count == 0 {
            &[]
        } else if edges.is_null() {
            return Err(null("edges"));
        } else {
            std::slice::from_raw_parts(edges, 2 * edge_count)
        };
        let g = lift(Graph::from_edges(
            n,
            flat.chunks_exact(2).map(|e| (e[0], e[1])),
        ))?;
        emit(out, RtGraph(g))
    })
}

/// Graph from the JSON graph format.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rtprof_graph_from_json(
    json: *const c_char,
    out: *mut *mut RtGraph,
) -> RtStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let s = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| invalid("json is not UTF-8"))?;
        let g = lift(GraphJson::parse(s).and_then(|j| j.to_graph()))?;
        emit(out, RtGraph(g))
    })
}

/// # Safety
/// `g` must be `NULL` or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rtprof_graph_free(g: *mut RtGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Vertex count, or 0 for `NULL`.
///
/// # Safety
/// `g` must be `NULL` or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rtprof_graph_vertex_count(g: *const RtGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// Edge count, or 0 for `NULL`.
///
/// # Safety
/// `g` must be `NULL` or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rtprof_graph_edge_count(g: *const RtGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Canonical JSON encoding; free with [`rtprof_string_free`].
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rtprof_graph_to_json(
    g: *const RtGraph,
    out: *mut *mut c_char,
) -> RtStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        emit_string(out, GraphJson::from_graph(&g.0).to_json_string())
    })
}

/// Round tree RT^{H,V} truncated at `depth`.
///
/// # Safety
/// `budget` must be `NULL` or valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rtprof_round_tree_build(
    h: usize,
    v: usize,
    depth: usize,
    budget: *const RtBudget,
    out: *mut *mut RtGraph,
) -> RtStatus {
    guard(|| {
        let rt = lift(build_round_tree(h, v, depth, &budget_of(budget)))?;
        emit(out, RtGraph(rt.graph))
    })
}

/// Half-plane RT^{H,1} truncated at `depth`.
///
/// # Safety
/// `budget` must be `NULL` or valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rtprof_half_plane_build(
    h: usize,
    depth: usize,
    budget: *const RtBudget,
    out: *mut *mut RtGraph,
) -> RtStatus {
    guard(|| {
        let rt = lift(build_half_plane(h, depth, &budget_of(budget)))?;
        emit(out, RtGraph(rt.graph))
    })
}

/// Witness subgraph Y_k of RT^{H,V} sized for exponent `p`.
///
/// # Safety
/// `budget` must be `NULL` or valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rtprof_yk_build(
    h: usize,
    v: usize,
    p: f64,
    k: usize,
    budget: *const RtBudget,
    out: *mut *mut RtYk,
) -> RtStatus {
    guard(|| {
        let yk = lift(YkGraph::build(h, v, p, k, &budget_of(budget)))?;
        emit(out, RtYk(yk))
    })
}

/// # Safety
/// `yk` must be `NULL` or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rtprof_yk_free(yk: *mut RtYk) {
    if !yk.is_null() {
        drop(Box::from_raw(yk));
    }
}

/// Independent copy of the graph underlying `yk`.
///
/// # Safety
/// `yk` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rtprof_yk_graph(yk: *const RtYk, out: *mut *mut RtGraph) -> RtStatus {
    guard(|| {
        let yk = deref(yk, "yk")?;
        emit(out, RtGraph(yk.0.graph.clone()))
    })
}

/// Base length T of Y_k, or 0 for `NULL`.
///
/// # Safety
/// `yk` must be `NULL` or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rtprof_yk_base_length(yk: *const RtYk) -> usize {
    yk.as_ref().map_or(0, |yk| yk.0.big_t)
}

/// Exact h^2 from the spectral gap.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rtprof_h2(g: *const RtGraph, out: *mut f64) -> RtStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        emit_f64(out, lift(h2_exact(&g.0))?.value)
    })
}

/// Two-valued upper bound on h^1; exact on small graphs.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rtprof_h1(g: *const RtGraph, out: *mut f64) -> RtStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        emit_f64(out, lift(h1_sweep(&g.0))?.value)
    })
}

/// Numeric upper bound on h^p from `restarts` seeded descents.
///
/// # Safety
/// `g` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rtprof_hp(
    g: *const RtGraph,
    p: f64,
    restarts: usize,
    seed: u64,
    out: *mut f64,
) -> RtStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        let r = lift(hp_minimize(
            &g.0,
            p,
            restarts,
            seed,
            &MinimizerSettings::default(),
        ))?;
        emit_f64(out, r.value)
    })
}

/// Congestion certificate for breadth-first routing on a connected graph.
///
/// # Safety
/// `g` must be a live handle; `budget` `NULL` or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rtprof_certify_bfs(
    g: *const RtGraph,
    p: f64,
    budget: *const RtBudget,
    out: *mut *mut RtCertificate,
) -> RtStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        let cert = lift(certify(&BfsPaths::new(&g.0), p, &budget_of(budget)))?;
        emit(out, RtCertificate(cert))
    })
}

/// Congestion certificate for the canonical routing of Y_k.
///
/// # Safety
/// `yk` must be a live handle; `budget` `NULL` or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rtprof_certify_yk(
    yk: *const RtYk,
    p: f64,
    budget: *const RtBudget,
    out: *mut *mut RtCertificate,
) -> RtStatus {
    guard(|| {
        let yk = deref(yk, "yk")?;
        let cert = lift(certify(&YkRouter::new(&yk.0), p, &budget_of(budget)))?;
        emit(out, RtCertificate(cert))
    })
}

/// # Safety
/// `c` must be `NULL` or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rtprof_certificate_free(c: *mut RtCertificate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Lower bound on h^p, or NaN for `NULL`.
///
/// # Safety
/// `c` must be `NULL` or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rtprof_certificate_bound(c: *const RtCertificate) -> f64 {
    c.as_ref().map_or(f64::NAN, |c| c.0.bound)
}

/// Largest edge load, or 0 for `NULL`.
///
/// # Safety
/// `c` must be `NULL` or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rtprof_certificate_max_edge_load(c: *const RtCertificate) -> u64 {
    c.as_ref()
        .map_or(0, |c| c.0.m_e.iter().copied().max().unwrap_or(0))
}

/// Certificate JSON record; free with [`rtprof_string_free`].
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rtprof_certificate_to_json(
    c: *const RtCertificate,
    out: *mut *mut c_char,
) -> RtStatus {
    guard(|| {
        let c = deref(c, "certificate")?;
        let s = serde_json::to_string(&c.0.to_json()).map_err(|e| invalid(e.to_string()))?;
        emit_string(out, s)
    })
}

/// Size of an ε-cut with ε = `num/den`. Exact up to the exact-search limit,
/// heuristic above it; `optimal` (if non-`NULL`) reports which.
///
/// # Safety
/// `g` must be a live handle; `size` writable; `optimal` `NULL` or writable.
#[no_mangle]
pub unsafe extern "C" fn rtprof_cut_size(
    g: *const RtGraph,
    num: u64,
    den: u64,
    size: *mut usize,
    optimal: *mut bool,
) -> RtStatus {
    guard(|| {
        let g = deref(g, "graph")?;
        if size.is_null() {
            return Err(null("size"));
        }
        let eps = lift(Epsilon::new(num, den))?;
        let cut = if g.0.n() <= EXACT_CUT_LIMIT {
            lift(cut_exact(&g.0, eps))?
        } else {
            lift(cut_heuristic(&g.0, eps))?
        };
        *size = cut.size;
        if !optimal.is_null() {
            *optimal = cut.optimal;
        }
        Ok(())
    })
}
