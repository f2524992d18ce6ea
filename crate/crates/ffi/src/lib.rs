//! C ABI for the graphsim library. All functions return a status code;
//! results come back through out-pointers. Graphs are opaque handles
//! created and destroyed here; never free them with anything else.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use graphsim::align::{align_metric, AlignmentMetricKind};
use graphsim::frac::{frac_metric, FracNorm};
use graphsim::graph::Graph;
use graphsim::hom::{emb, hom, semb};
use graphsim::ot::{ot_metric, OtKind};
use graphsim::sampling::{sampling_distance, SampleMode};
use graphsim::wl::{wl_kernel, wl_metric, KernelMode};
use graphsim::GraphsimError;

/// Status codes returned by every fallible call.
pub const GS_OK: i32 = 0;
pub const GS_ERR_NULL: i32 = 1;
pub const GS_ERR_PARSE: i32 = 2;
pub const GS_ERR_INVALID: i32 = 3;
pub const GS_ERR_ORDER_MISMATCH: i32 = 4;
pub const GS_ERR_BUDGET: i32 = 5;
pub const GS_ERR_NO_CONVERGENCE: i32 = 6;
pub const GS_ERR_INTERNAL: i32 = 7;

/// Opaque graph handle.
pub struct GsGraph {
    inner: Graph,
}

fn code_of(e: &GraphsimError) -> i32 {
    match e {
        GraphsimError::Parse(..) => GS_ERR_PARSE,
        GraphsimError::InvalidGraph(_) | GraphsimError::InvalidArgument(_) => GS_ERR_INVALID,
        GraphsimError::OrderMismatch(..) => GS_ERR_ORDER_MISMATCH,
        GraphsimError::BudgetExceeded(_) => GS_ERR_BUDGET,
        GraphsimError::NoConvergence { .. } => GS_ERR_NO_CONVERGENCE,
        GraphsimError::Internal(_) => GS_ERR_INTERNAL,
    }
}

fn guarded(body: impl FnOnce() -> i32) -> i32 {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(GS_ERR_INTERNAL)
}

/// Builds a graph from an order and a flat [u0,v0,u1,v1,...] edge array.
#[no_mangle]
pub extern "C" fn gs_graph_new(
    n: usize,
    edges: *const usize,
    num_edges: usize,
    out: *mut *mut GsGraph,
) -> i32 {
    guarded(|| {
        if out.is_null() || (edges.is_null() && num_edges > 0) {
            return GS_ERR_NULL;
        }
        let flat = if num_edges == 0 {
            &[][..]
        } else {
            unsafe { std::slice::from_raw_parts(edges, 2 * num_edges) }
        };
        let pairs: Vec<(usize, usize)> = flat.chunks(2).map(|c| (c[0], c[1])).collect();
        match Graph::new(n, &pairs) {
            Ok(g) => {
                unsafe { *out = Box::into_raw(Box::new(GsGraph { inner: g })) };
                GS_OK
            }
            Err(e) => code_of(&e),
        }
    })
}

/// Parses the JSON form {"n": int, "edges": [[u,v],...]}.
#[no_mangle]
pub extern "C" fn gs_graph_from_json(text: *const c_char, out: *mut *mut GsGraph) -> i32 {
    guarded(|| {
        if text.is_null() || out.is_null() {
            return GS_ERR_NULL;
        }
        let s = match unsafe { CStr::from_ptr(text) }.to_str() {
            Ok(s) => s,
            Err(_) => return GS_ERR_PARSE,
        };
        match Graph::from_json(s) {
            Ok(g) => {
                unsafe { *out = Box::into_raw(Box::new(GsGraph { inner: g })) };
                GS_OK
            }
            Err(e) => code_of(&e),
        }
    })
}

#[no_mangle]
pub extern "C" fn gs_graph_free(g: *mut GsGraph) {
    if !g.is_null() {
        drop(unsafe { Box::from_raw(g) });
    }
}

#[no_mangle]
pub extern "C" fn gs_graph_order(g: *const GsGraph) -> usize {
    if g.is_null() {
        return 0;
    }
    unsafe { &*g }.inner.order()
}

#[no_mangle]
pub extern "C" fn gs_graph_num_edges(g: *const GsGraph) -> usize {
    if g.is_null() {
        return 0;
    }
    unsafe { &*g }.inner.num_edges()
}

fn two_graphs<'a>(g: *const GsGraph, h: *const GsGraph) -> Option<(&'a Graph, &'a Graph)> {
    if g.is_null() || h.is_null() {
        return None;
    }
    Some((unsafe { &(*g).inner }, unsafe { &(*h).inner }))
}

/// Alignment metric kinds: 0 entrywise-1, 1 local operator, 2 cut,
/// 3 distortion, 4 isomorphism indicator.
#[no_mangle]
pub extern "C" fn gs_align_metric(
    g: *const GsGraph,
    h: *const GsGraph,
    kind: i32,
    value: *mut f64,
    normalized: *mut f64,
) -> i32 {
    guarded(|| {
        let Some((g, h)) = two_graphs(g, h) else { return GS_ERR_NULL };
        if value.is_null() || normalized.is_null() {
            return GS_ERR_NULL;
        }
        let kind = match kind {
            0 => AlignmentMetricKind::EditEntrywise1,
            1 => AlignmentMetricKind::LocalOperator,
            2 => AlignmentMetricKind::CutDistance,
            3 => AlignmentMetricKind::Distortion,
            4 => AlignmentMetricKind::IsomorphismDistance,
            _ => return GS_ERR_INVALID,
        };
        match align_metric(g, h, kind) {
            Ok(rep) => {
                unsafe {
                    *value = rep.value;
                    *normalized = rep.normalized_value;
                }
                GS_OK
            }
            Err(e) => code_of(&e),
        }
    })
}

/// Minimum edge edits to an isomorph of the other graph.
#[no_mangle]
pub extern "C" fn gs_edit_distance(
    g: *const GsGraph,
    h: *const GsGraph,
    value: *mut f64,
) -> i32 {
    guarded(|| {
        let Some((g, h)) = two_graphs(g, h) else { return GS_ERR_NULL };
        if value.is_null() {
            return GS_ERR_NULL;
        }
        match graphsim::align::edit_distance(g, h) {
            Ok(rep) => {
                unsafe { *value = rep.value };
                GS_OK
            }
            Err(e) => code_of(&e),
        }
    })
}

/// Fractional relaxation over couplings; norm 0 = entrywise-1, 1 = cut.
/// `exact` is set to 1 when the solver certified convergence.
#[no_mangle]
pub extern "C" fn gs_frac_metric(
    g: *const GsGraph,
    h: *const GsGraph,
    norm: i32,
    tol: f64,
    value: *mut f64,
    exact: *mut i32,
) -> i32 {
    guarded(|| {
        let Some((g, h)) = two_graphs(g, h) else { return GS_ERR_NULL };
        if value.is_null() || exact.is_null() {
            return GS_ERR_NULL;
        }
        let norm = match norm {
            0 => FracNorm::Entrywise1,
            1 => FracNorm::Cut,
            _ => return GS_ERR_INVALID,
        };
        match frac_metric(g, h, norm, tol) {
            Ok(res) => {
                unsafe {
                    *value = res.report.value;
                    *exact = res.report.exact as i32;
                }
                GS_OK
            }
            Err(e) => code_of(&e),
        }
    })
}

/// Transport metric upper bound; kind 0 = entrywise-1, 1 = cut,
/// 2 = distance-matrix (Gromov-Wasserstein style).
#[no_mangle]
pub extern "C" fn gs_ot_metric(
    g: *const GsGraph,
    h: *const GsGraph,
    kind: i32,
    restarts: usize,
    seed: u64,
    value: *mut f64,
) -> i32 {
    guarded(|| {
        let Some((g, h)) = two_graphs(g, h) else { return GS_ERR_NULL };
        if value.is_null() {
            return GS_ERR_NULL;
        }
        let kind = match kind {
            0 => OtKind::OtL1,
            1 => OtKind::OtCut,
            2 => OtKind::GwDist,
            _ => return GS_ERR_INVALID,
        };
        match ot_metric(g, h, kind, None, None, restarts, seed) {
            Ok(res) => {
                unsafe { *value = res.report.value };
                GS_OK
            }
            Err(e) => code_of(&e),
        }
    })
}

/// Color-refinement kernel and the induced metric. A negative `level`
/// selects the geometrically weighted kernel; otherwise the truncated
/// kernel up to `level`.
#[no_mangle]
pub extern "C" fn gs_wl_kernel(
    g: *const GsGraph,
    h: *const GsGraph,
    level: i32,
    kernel: *mut f64,
    metric: *mut f64,
) -> i32 {
    guarded(|| {
        let Some((g, h)) = two_graphs(g, h) else { return GS_ERR_NULL };
        if kernel.is_null() || metric.is_null() {
            return GS_ERR_NULL;
        }
        let mode = if level < 0 {
            KernelMode::Geometric
        } else {
            KernelMode::Truncated(level as usize)
        };
        unsafe {
            *kernel = wl_kernel(g, h, mode);
            *metric = wl_metric(g, h, mode);
        }
        GS_OK
    })
}

/// Map counts of a pattern in a target; mode 0 = homomorphisms,
/// 1 = embeddings, 2 = strong embeddings.
#[no_mangle]
pub extern "C" fn gs_hom_count(
    pattern: *const GsGraph,
    target: *const GsGraph,
    mode: i32,
    value: *mut i64,
) -> i32 {
    guarded(|| {
        let Some((f, g)) = two_graphs(pattern, target) else { return GS_ERR_NULL };
        if value.is_null() {
            return GS_ERR_NULL;
        }
        let v = match mode {
            0 => hom(f, g),
            1 => emb(f, g),
            2 => semb(f, g),
            _ => return GS_ERR_INVALID,
        };
        unsafe { *value = v };
        GS_OK
    })
}

/// Exact truncated sampling distance with sizes up to `k_max`.
#[no_mangle]
pub extern "C" fn gs_sampling_distance(
    g: *const GsGraph,
    h: *const GsGraph,
    k_max: usize,
    value: *mut f64,
) -> i32 {
    guarded(|| {
        let Some((g, h)) = two_graphs(g, h) else { return GS_ERR_NULL };
        if value.is_null() {
            return GS_ERR_NULL;
        }
        match sampling_distance(g, h, k_max, SampleMode::Exact) {
            Ok(out) => {
                unsafe { *value = out.value };
                GS_OK
            }
            Err(e) => code_of(&e),
        }
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn gs_status_message(code: i32) -> *const c_char {
    let msg: &'static [u8] = match code {
        GS_OK => b"ok\0",
        GS_ERR_NULL => b"null pointer argument\0",
        GS_ERR_PARSE => b"parse error\0",
        GS_ERR_INVALID => b"invalid argument or graph\0",
        GS_ERR_ORDER_MISMATCH => b"graphs have different orders\0",
        GS_ERR_BUDGET => b"instance exceeds the size budget\0",
        GS_ERR_NO_CONVERGENCE => b"solver did not converge\0",
        _ => b"internal error\0",
    };
    msg.as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn make(n: usize, edges: &[(usize, usize)]) -> *mut GsGraph {
        let flat: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        let mut out: *mut GsGraph = ptr::null_mut();
        let code = gs_graph_new(n, flat.as_ptr(), edges.len(), &mut out);
        assert_eq!(code, GS_OK);
        out
    }

    #[test]
    fn round_trip_and_metrics() {
        let g = make(4, &[(0, 1), (0, 2), (1, 2)]);
        let h = make(4, &[(0, 1), (2, 3)]);
        assert_eq!(gs_graph_order(g), 4);
        assert_eq!(gs_graph_num_edges(h), 2);
        let mut v = 0.0;
        assert_eq!(gs_edit_distance(g, h, &mut v), GS_OK);
        assert_eq!(v, 3.0);
        let (mut raw, mut norm) = (0.0, 0.0);
        assert_eq!(gs_align_metric(g, h, 0, &mut raw, &mut norm), GS_OK);
        assert_eq!(raw, 6.0);
        let mut count = 0i64;
        assert_eq!(gs_hom_count(h, g, 0, &mut count), GS_OK);
        gs_graph_free(g);
        gs_graph_free(h);
    }

    #[test]
    fn null_and_bad_arguments() {
        let mut v = 0.0;
        assert_eq!(gs_edit_distance(ptr::null(), ptr::null(), &mut v), GS_ERR_NULL);
        let g = make(3, &[(0, 1)]);
        let h = make(4, &[]);
        assert_eq!(gs_edit_distance(g, h, &mut v), GS_ERR_ORDER_MISMATCH);
        assert_eq!(gs_align_metric(g, h, 9, &mut v, &mut v), GS_ERR_INVALID);
        assert!(!gs_status_message(GS_ERR_BUDGET).is_null());
        gs_graph_free(g);
        gs_graph_free(h);
    }

    #[test]
    fn json_parse_paths() {
        let mut out: *mut GsGraph = ptr::null_mut();
        let good = std::ffi::CString::new(r#"{"n": 3, "edges": [[0,1],[1,2]]}"#).unwrap();
        assert_eq!(gs_graph_from_json(good.as_ptr(), &mut out), GS_OK);
        assert_eq!(gs_graph_order(out), 3);
        gs_graph_free(out);
        let bad = std::ffi::CString::new("not json").unwrap();
        let mut out2: *mut GsGraph = ptr::null_mut();
        assert_eq!(gs_graph_from_json(bad.as_ptr(), &mut out2), GS_ERR_PARSE);
    }
}
