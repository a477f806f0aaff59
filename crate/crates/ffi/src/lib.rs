//! C ABI over the `hyperideal` crate.
//!
//! Objects cross the boundary as opaque handles created by
//! `hi_triangulation_from_*` or `hi_flow_run` and released with the matching
//! `*_free`. Every fallible call
//! returns an [`HiStatus`]; the message for the most recent failure on the
//! calling thread is available through [`hi_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hyperideal::bounds::{b_n, xi_infinity};
use hyperideal::flow::{curvature, default_initial_metric, run_flow, FlowConfig, FlowTrace};
use hyperideal::functional::lobachevsky;
use hyperideal::io::TriangulationFile;
use hyperideal::tetra::{dihedral_angles, is_hyperideal, EdgeLengths6};
use hyperideal::{Metric, Triangulation};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    /// The flow stopped before reaching its residual tolerance. The result
    /// handle is still written.
    NotConverged = 3,
    Numerical = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

/// Opaque triangulation handle.
pub struct HiTriangulation(Triangulation);

/// Opaque result of one flow run.
pub struct HiFlowResult(FlowTrace);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: HiStatus, msg: impl Into<String>) -> HiStatus {
    set_error(msg);
    status
}

/// Runs `f`, turning a panic into [`HiStatus::Panic`].
fn guard(f: impl FnOnce() -> HiStatus) -> HiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_owned());
            fail(HiStatus::Panic, msg)
        }
    }
}

/// Copies `values` into the caller's buffer, reporting the needed length.
///
/// # Safety
/// `out` must be valid for `cap` writes when non-null.
unsafe fn write_slice(values: &[f64], out: *mut f64, cap: usize, len: *mut usize) -> HiStatus {
    if !len.is_null() {
        *len = values.len();
    }
    if values.len() > cap {
        return fail(
            HiStatus::BufferTooSmall,
            format!("buffer holds {cap} values, {} needed", values.len()),
        );
    }
    if out.is_null() && !values.is_empty() {
        return fail(HiStatus::NullPointer, "output buffer is null");
    }
    if !values.is_empty() {
        ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    }
    HiStatus::Ok
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hi_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to fit) and returns the full message length in bytes.
///
/// # Safety
/// `buf` must be valid for `cap` bytes when non-null.
#[no_mangle]
pub unsafe extern "C" fn hi_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Builds a triangulation from `tets` rows of six edge-class labels stored
/// contiguously in `labels`.
///
/// # Safety
/// `labels` must point to `6 * tets` readable values and `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hi_triangulation_from_labels(
    labels: *const usize,
    tets: usize,
    out: *mut *mut HiTriangulation,
) -> HiStatus {
    guard(|| {
        if labels.is_null() || out.is_null() {
            return fail(HiStatus::NullPointer, "null argument");
        }
        let flat = std::slice::from_raw_parts(labels, 6 * tets);
        let rows = flat
            .chunks_exact(6)
            .map(|c| c.try_into().expect("chunk of six"))
            .collect();
        match Triangulation::from_edge_labels(rows) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(HiTriangulation(t)));
                HiStatus::Ok
            }
            Err(e) => fail(HiStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Parses a triangulation from the JSON input format (either edge labels or
/// face gluings).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hi_triangulation_from_json(
    json: *const c_char,
    out: *mut *mut HiTriangulation,
) -> HiStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(HiStatus::NullPointer, "null argument");
        }
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(e) => return fail(HiStatus::InvalidInput, e.to_string()),
        };
        match TriangulationFile::parse(text).and_then(|f| f.build()) {
            Ok(t) => {
                *out = Box::into_raw(Box::new(HiTriangulation(t)));
                HiStatus::Ok
            }
            Err(e) => fail(HiStatus::InvalidInput, e.to_string()),
        }
    })
}

/// # Safety
/// `tri` must come from a `hi_triangulation_from_*` call and not be freed
/// twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn hi_triangulation_free(tri: *mut HiTriangulation) {
    if !tri.is_null() {
        drop(Box::from_raw(tri));
    }
}

/// Number of edge classes; 0 for a null handle.
///
/// # Safety
/// `tri` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hi_triangulation_edge_classes(tri: *const HiTriangulation) -> usize {
    tri.as_ref().map_or(0, |t| t.0.edge_class_count())
}

/// Number of tetrahedra; 0 for a null handle.
///
/// # Safety
/// `tri` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hi_triangulation_tetrahedra(tri: *const HiTriangulation) -> usize {
    tri.as_ref().map_or(0, |t| t.0.tet_count())
}

/// Writes the valence of each edge class into `out`.
///
/// # Safety
/// `tri` must be a live handle and `out` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn hi_triangulation_valences(
    tri: *const HiTriangulation,
    out: *mut usize,
    cap: usize,
) -> HiStatus {
    guard(|| {
        let Some(t) = tri.as_ref() else {
            return fail(HiStatus::NullPointer, "null triangulation");
        };
        let v = t.0.valences();
        if v.len() > cap {
            return fail(HiStatus::BufferTooSmall, format!("{} valences", v.len()));
        }
        if out.is_null() {
            return fail(HiStatus::NullPointer, "output buffer is null");
        }
        ptr::copy_nonoverlapping(v.as_ptr(), out, v.len());
        HiStatus::Ok
    })
}

/// Writes the default starting lengths (one per edge class) into `out`.
///
/// # Safety
/// `tri` must be a live handle, `out` valid for `cap` writes and `len` null
/// or writable.
#[no_mangle]
pub unsafe extern "C" fn hi_default_initial_metric(
    tri: *const HiTriangulation,
    out: *mut f64,
    cap: usize,
    len: *mut usize,
) -> HiStatus {
    guard(|| {
        let Some(t) = tri.as_ref() else {
            return fail(HiStatus::NullPointer, "null triangulation");
        };
        match default_initial_metric(&t.0) {
            Ok(init) => write_slice(init.metric.lengths(), out, cap, len),
            Err(e) => fail(HiStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Curvature of each edge class at the given lengths.
///
/// # Safety
/// `lengths` must hold `n` values, `out` must be valid for `n` writes.
#[no_mangle]
pub unsafe extern "C" fn hi_curvature(
    tri: *const HiTriangulation,
    lengths: *const f64,
    n: usize,
    out: *mut f64,
) -> HiStatus {
    guard(|| {
        let Some(t) = tri.as_ref() else {
            return fail(HiStatus::NullPointer, "null triangulation");
        };
        if lengths.is_null() || out.is_null() {
            return fail(HiStatus::NullPointer, "null buffer");
        }
        let metric = match Metric::new(std::slice::from_raw_parts(lengths, n).to_vec()) {
            Ok(m) => m,
            Err(e) => return fail(HiStatus::InvalidInput, e.to_string()),
        };
        match curvature(&t.0, &metric) {
            Ok(k) => write_slice(k.values(), out, n, ptr::null_mut()),
            Err(e) => fail(HiStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Flow settings. Start from [`hi_flow_config_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct HiFlowConfig {
    pub residual_tolerance: f64,
    pub max_time: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub step_tolerance: f64,
    pub quadrature_tolerance: f64,
}

impl From<HiFlowConfig> for FlowConfig {
    fn from(c: HiFlowConfig) -> Self {
        FlowConfig {
            residual_tolerance: c.residual_tolerance,
            max_time: c.max_time,
            initial_step: c.initial_step,
            min_step: c.min_step,
            max_step: c.max_step,
            step_tolerance: c.step_tolerance,
            quadrature_tolerance: c.quadrature_tolerance,
            ..FlowConfig::default()
        }
    }
}

#[no_mangle]
pub extern "C" fn hi_flow_config_default() -> HiFlowConfig {
    let d = FlowConfig::default();
    HiFlowConfig {
        residual_tolerance: d.residual_tolerance,
        max_time: d.max_time,
        initial_step: d.initial_step,
        min_step: d.min_step,
        max_step: d.max_step,
        step_tolerance: d.step_tolerance,
        quadrature_tolerance: d.quadrature_tolerance,
    }
}

/// Runs the flow. `initial` may be null to start from the default metric;
/// otherwise it holds one length per edge class. `config` may be null for
/// defaults. On [`HiStatus::Ok`] and [`HiStatus::NotConverged`] a result
/// handle is written to `out`.
///
/// # Safety
/// `tri` must be a live handle, `initial` null or valid for `n` reads,
/// `config` null or valid, and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hi_flow_run(
    tri: *const HiTriangulation,
    initial: *const f64,
    n: usize,
    config: *const HiFlowConfig,
    out: *mut *mut HiFlowResult,
) -> HiStatus {
    guard(|| {
        let Some(t) = tri.as_ref() else {
            return fail(HiStatus::NullPointer, "null triangulation");
        };
        if out.is_null() {
            return fail(HiStatus::NullPointer, "null output pointer");
        }
        let start = if initial.is_null() {
            match default_initial_metric(&t.0) {
                Ok(i) => i.metric,
                Err(e) => return fail(HiStatus::InvalidInput, e.to_string()),
            }
        } else {
            if n != t.0.edge_class_count() {
                return fail(
                    HiStatus::InvalidInput,
                    format!("{n} lengths for {} edge classes", t.0.edge_class_count()),
                );
            }
            match Metric::new(std::slice::from_raw_parts(initial, n).to_vec()) {
                Ok(m) => m,
                Err(e) => return fail(HiStatus::InvalidInput, e.to_string()),
            }
        };
        let cfg = config
            .as_ref()
            .map_or_else(FlowConfig::default, |c| FlowConfig::from(*c));
        match run_flow(&t.0, &start, &cfg) {
            Ok(trace) => {
                let converged = trace.converged;
                *out = Box::into_raw(Box::new(HiFlowResult(trace)));
                if converged {
                    HiStatus::Ok
                } else {
                    fail(
                        HiStatus::NotConverged,
                        "flow did not reach the residual tolerance",
                    )
                }
            }
            Err(e @ hyperideal::flow::FlowError::NonFinite { .. }) => {
                fail(HiStatus::Numerical, e.to_string())
            }
            Err(e) => fail(HiStatus::InvalidInput, e.to_string()),
        }
    })
}

/// # Safety
/// `result` must come from [`hi_flow_run`] and not be freed twice. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn hi_flow_result_free(result: *mut HiFlowResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hi_flow_result_converged(result: *const HiFlowResult) -> bool {
    result.as_ref().is_some_and(|r| r.0.converged)
}

/// Final `max |K_e|`; NaN for a null handle.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hi_flow_result_residual(result: *const HiFlowResult) -> f64 {
    result.as_ref().map_or(f64::NAN, |r| r.0.final_residual())
}

/// Flow time reached; NaN for a null handle.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hi_flow_result_time(result: *const HiFlowResult) -> f64 {
    result
        .as_ref()
        .and_then(|r| r.0.times.last().copied())
        .unwrap_or(f64::NAN)
}

/// Number of accepted integrator steps.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn hi_flow_result_steps(result: *const HiFlowResult) -> usize {
    result.as_ref().map_or(0, |r| r.0.steps)
}

/// Writes the final lengths. `len` receives the class count even when the
/// buffer is too small.
///
/// # Safety
/// `result` must be a live handle, `out` valid for `cap` writes and `len`
/// null or writable.
#[no_mangle]
pub unsafe extern "C" fn hi_flow_result_lengths(
    result: *const HiFlowResult,
    out: *mut f64,
    cap: usize,
    len: *mut usize,
) -> HiStatus {
    guard(|| match result.as_ref() {
        Some(r) => write_slice(r.0.final_metric.lengths(), out, cap, len),
        None => fail(HiStatus::NullPointer, "null result"),
    })
}

/// Extended dihedral angles of one tetrahedron from its six edge lengths.
///
/// # Safety
/// `lengths` must hold 6 readable values and `out` 6 writable ones.
#[no_mangle]
pub unsafe extern "C" fn hi_dihedral_angles(lengths: *const f64, out: *mut f64) -> HiStatus {
    guard(|| {
        if lengths.is_null() || out.is_null() {
            return fail(HiStatus::NullPointer, "null buffer");
        }
        let l: [f64; 6] = std::slice::from_raw_parts(lengths, 6)
            .try_into()
            .expect("six values");
        match dihedral_angles(&EdgeLengths6(l)) {
            Ok(a) => write_slice(&a.alpha, out, 6, ptr::null_mut()),
            Err(e) => fail(HiStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Whether six edge lengths describe a genuine hyper-ideal tetrahedron.
///
/// # Safety
/// `lengths` must hold 6 readable values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn hi_is_hyperideal(lengths: *const f64, out: *mut bool) -> HiStatus {
    guard(|| {
        if lengths.is_null() || out.is_null() {
            return fail(HiStatus::NullPointer, "null buffer");
        }
        let l: [f64; 6] = std::slice::from_raw_parts(lengths, 6)
            .try_into()
            .expect("six values");
        match is_hyperideal(&EdgeLengths6(l)) {
            Ok(v) => {
                *out = v;
                HiStatus::Ok
            }
            Err(e) => fail(HiStatus::InvalidInput, e.to_string()),
        }
    })
}

#[no_mangle]
pub extern "C" fn hi_lobachevsky(theta: f64) -> f64 {
    lobachevsky(theta)
}

#[no_mangle]
pub extern "C" fn hi_xi_infinity() -> f64 {
    xi_infinity()
}

/// `b_n` for valence `n >= 9`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hi_b_n(n: usize, out: *mut f64) -> HiStatus {
    guard(|| {
        if out.is_null() {
            return fail(HiStatus::NullPointer, "null output");
        }
        match b_n(n) {
            Ok(v) => {
                *out = v;
                HiStatus::Ok
            }
            Err(e) => fail(HiStatus::InvalidInput, e.to_string()),
        }
    })
}
