//! C ABI for elfscan.
//!
//! Every fallible function returns an [`ElfscanStatus`]; on failure a message for the calling
//! thread is available from [`elfscan_last_error`]. Handles are opaque and must be released
//! with their `_free` function. Strings returned through `char **` are released with
//! [`elfscan_string_free`]. No function unwinds across the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use elfscan::field::{rms, FieldSample};
use elfscan::hazard::{classify_point, limit_for, IcnirpUnit, PointClass, SafetyStandard};
use elfscan::kmedians::{run_kmedians, ClusteringParams, ClusteringResult, InitStrategy};
use elfscan::pipeline::{analyze, RunConfig};
use elfscan::sim::{model_field, Vec3, WireModel, WireSegmentPath};
use elfscan::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElfscanStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Singularity = 3,
    InfeasibleK = 4,
    TooLarge = 5,
    InvalidStandard = 6,
    Parse = 7,
    Io = 8,
    /// Analysis finished but at least one experiment cell failed; output is still valid.
    PartialFailure = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElfscanStandardKind {
    Fixed = 0,
    IcnirpPublic = 1,
    IcnirpOccupational = 2,
    Tco2 = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElfscanIcnirpUnit {
    Millitesla = 0,
    Microtesla = 1,
}

/// Result of a K-Medians run.
pub struct ElfscanClustering(ClusteringResult);

/// Conductor geometry for field evaluation.
pub struct ElfscanWireModel(WireModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> ElfscanStatus {
    match err {
        Error::InvalidInput(_) | Error::EmptyInput(_) | Error::Json(_) => ElfscanStatus::InvalidInput,
        Error::Singularity { .. } => ElfscanStatus::Singularity,
        Error::InfeasibleK { .. } => ElfscanStatus::InfeasibleK,
        Error::TooLarge { .. } => ElfscanStatus::TooLarge,
        Error::InvalidStandard(_) => ElfscanStatus::InvalidStandard,
        Error::Parse { .. } | Error::Unit { .. } => ElfscanStatus::Parse,
        Error::Io { .. } => ElfscanStatus::Io,
    }
}

fn fail(status: ElfscanStatus, msg: impl Into<String>) -> ElfscanStatus {
    set_last_error(msg);
    status
}

/// Runs `f`, recording the error message and mapping panics to `Panic`.
fn guard(f: impl FnOnce() -> Result<ElfscanStatus, ElfscanStatus>) -> ElfscanStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) | Ok(Err(s)) => s,
        Err(_) => fail(ElfscanStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: elfscan::Result<T>) -> Result<T, ElfscanStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), ElfscanStatus> {
    if p.is_null() {
        Err(fail(ElfscanStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, ElfscanStatus> {
    non_null(p, what)?;
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(ElfscanStatus::InvalidInput, format!("{what} is not UTF-8")))
}

/// Message describing the last failure on this thread, or null. Valid until the next call
/// into this library from the same thread.
#[no_mangle]
pub extern "C" fn elfscan_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn elfscan_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// RMS magnitude of one tri-axial sample, µT.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn elfscan_rms(bx: f64, by: f64, bz: f64, out: *mut f64) -> ElfscanStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = lift(rms(&FieldSample::new(bx, by, bz)))?;
        Ok(ElfscanStatus::Ok)
    })
}

/// Limit of a safety standard in µT. `fixed_limit_ut` is read only for `Fixed`,
/// `frequency_hz` and `unit` only for the ICNIRP kinds.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn elfscan_limit_for(
    kind: ElfscanStandardKind,
    fixed_limit_ut: f64,
    frequency_hz: f64,
    unit: ElfscanIcnirpUnit,
    out: *mut f64,
) -> ElfscanStatus {
    guard(|| {
        non_null(out, "out")?;
        let unit = match unit {
            ElfscanIcnirpUnit::Millitesla => IcnirpUnit::Millitesla,
            ElfscanIcnirpUnit::Microtesla => IcnirpUnit::Microtesla,
        };
        let standard = match kind {
            ElfscanStandardKind::Fixed => SafetyStandard::FixedLimit { limit_ut: fixed_limit_ut },
            ElfscanStandardKind::IcnirpPublic => SafetyStandard::IcnirpPublic { frequency_hz, unit },
            ElfscanStandardKind::IcnirpOccupational => SafetyStandard::IcnirpOccupational { frequency_hz, unit },
            ElfscanStandardKind::Tco2 => SafetyStandard::Tco2,
        };
        *out = lift(limit_for(&standard))?;
        Ok(ElfscanStatus::Ok)
    })
}

/// 1 if `value` strictly exceeds `limit`, else 0.
#[no_mangle]
pub extern "C" fn elfscan_classify_point(value: f64, limit: f64) -> i32 {
    i32::from(classify_point(value, limit) == PointClass::Dangerous)
}

/// Clusters `n` values into `k` groups. With `use_seed` zero the first run is quantile
/// seeded; otherwise it is randomly seeded from `seed`.
///
/// # Safety
/// `data` must point to `n` doubles and `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn elfscan_kmedians_run(
    data: *const f64,
    n: usize,
    k: usize,
    restarts: usize,
    use_seed: i32,
    seed: u64,
    out: *mut *mut ElfscanClustering,
) -> ElfscanStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = ptr::null_mut();
        non_null(data, "data")?;
        let values = std::slice::from_raw_parts(data, n);
        let init = if use_seed != 0 {
            InitStrategy::SeededRandom(seed)
        } else {
            InitStrategy::QuantileSeed
        };
        let params = ClusteringParams::new(k).with_restarts(restarts).with_init(init);
        let result = lift(run_kmedians(values, &params))?;
        *out = Box::into_raw(Box::new(ElfscanClustering(result)));
        Ok(ElfscanStatus::Ok)
    })
}

/// # Safety
/// `c` must come from `elfscan_kmedians_run` and not be freed yet; null is allowed.
#[no_mangle]
pub unsafe extern "C" fn elfscan_clustering_free(c: *mut ElfscanClustering) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn elfscan_clustering_k(c: *const ElfscanClustering) -> usize {
    c.as_ref().map_or(0, |c| c.0.centroids.len())
}

/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn elfscan_clustering_len(c: *const ElfscanClustering) -> usize {
    c.as_ref().map_or(0, |c| c.0.assignments.len())
}

/// Objective J in µT; NaN for a null handle.
///
/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn elfscan_clustering_objective(c: *const ElfscanClustering) -> f64 {
    c.as_ref().map_or(f64::NAN, |c| c.0.objective)
}

/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn elfscan_clustering_iterations(c: *const ElfscanClustering) -> usize {
    c.as_ref().map_or(0, |c| c.0.iterations)
}

/// # Safety
/// `c` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn elfscan_clustering_converged(c: *const ElfscanClustering) -> i32 {
    c.as_ref().map_or(0, |c| i32::from(c.0.converged))
}

/// Copies the centroids, sorted descending, into `out` which holds `len` doubles.
///
/// # Safety
/// `c` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn elfscan_clustering_centroids(c: *const ElfscanClustering, out: *mut f64, len: usize) -> ElfscanStatus {
    guard(|| {
        non_null(c, "handle")?;
        non_null(out, "out")?;
        let src = &(*c).0.centroids;
        if len < src.len() {
            return Err(fail(ElfscanStatus::InvalidInput, format!("buffer holds {len}, need {}", src.len())));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
        Ok(ElfscanStatus::Ok)
    })
}

/// Copies per-datum cluster indices, in input order, into `out` which holds `len` entries.
///
/// # Safety
/// `c` must be a live handle and `out` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn elfscan_clustering_assignments(c: *const ElfscanClustering, out: *mut usize, len: usize) -> ElfscanStatus {
    guard(|| {
        non_null(c, "handle")?;
        non_null(out, "out")?;
        let src = &(*c).0.assignments;
        if len < src.len() {
            return Err(fail(ElfscanStatus::InvalidInput, format!("buffer holds {len}, need {}", src.len())));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
        Ok(ElfscanStatus::Ok)
    })
}

/// Empty wire model. Never null.
#[no_mangle]
pub extern "C" fn elfscan_wire_model_new() -> *mut ElfscanWireModel {
    Box::into_raw(Box::new(ElfscanWireModel(WireModel::new(Vec::new()))))
}

/// # Safety
/// `m` must come from `elfscan_wire_model_new` and not be freed yet; null is allowed.
#[no_mangle]
pub unsafe extern "C" fn elfscan_wire_model_free(m: *mut ElfscanWireModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Appends a polyline carrying `current_a` amperes. `xyz` holds `n_vertices` packed
/// `x, y, z` triples in meters.
///
/// # Safety
/// `m` must be a live handle and `xyz` must point to `3 * n_vertices` doubles.
#[no_mangle]
pub unsafe extern "C" fn elfscan_wire_model_add_path(
    m: *mut ElfscanWireModel,
    xyz: *const f64,
    n_vertices: usize,
    current_a: f64,
) -> ElfscanStatus {
    guard(|| {
        non_null(m, "handle")?;
        non_null(xyz, "xyz")?;
        let coords = std::slice::from_raw_parts(xyz, n_vertices.saturating_mul(3));
        let vertices = coords.chunks_exact(3).map(|v| Vec3::new(v[0], v[1], v[2])).collect();
        let path = lift(WireSegmentPath::new(vertices, current_a))?;
        (*m).0.paths.push(path);
        Ok(ElfscanStatus::Ok)
    })
}

/// Field at `(x, y, z)` meters, written to `out` as `bx, by, bz` in µT.
///
/// # Safety
/// `m` must be a live handle and `out` valid for three writes.
#[no_mangle]
pub unsafe extern "C" fn elfscan_wire_model_field(
    m: *const ElfscanWireModel,
    x: f64,
    y: f64,
    z: f64,
    out: *mut f64,
) -> ElfscanStatus {
    guard(|| {
        non_null(m, "handle")?;
        non_null(out, "out")?;
        let s = lift(model_field(&(*m).0, Vec3::new(x, y, z)))?;
        *out = s.bx;
        *out.add(1) = s.by;
        *out.add(2) = s.bz;
        Ok(ElfscanStatus::Ok)
    })
}

/// Analyses a survey CSV and returns the JSON report through `out_json`.
///
/// `standard` uses the CLI selector syntax (`fixed:0.3`, `icnirp-public`, ...), evaluated at
/// `frequency_hz` with ICNIRP levels in mT. Returns `PartialFailure` with a valid report when
/// some cells failed.
///
/// # Safety
/// `path` and `standard` must be NUL-terminated strings; `out_json` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn elfscan_analyze_csv(
    path: *const c_char,
    standard: *const c_char,
    frequency_hz: f64,
    k: usize,
    restarts: usize,
    out_json: *mut *mut c_char,
) -> ElfscanStatus {
    guard(|| {
        non_null(out_json, "out_json")?;
        *out_json = ptr::null_mut();
        let path = str_arg(path, "path")?;
        let standard = str_arg(standard, "standard")?;
        let standard = lift(SafetyStandard::parse(standard, frequency_hz, IcnirpUnit::Millitesla))?;
        let config = RunConfig {
            inputs: vec![PathBuf::from(path)],
            k,
            restarts,
            standard,
            ..RunConfig::default()
        };
        let report = lift(analyze(&config))?;
        let json = lift(report.to_json())?;
        let json = CString::new(json).map_err(|_| fail(ElfscanStatus::InvalidInput, "report contains NUL"))?;
        *out_json = json.into_raw();
        let failed = report.failed_cells();
        if failed > 0 {
            Ok(fail(ElfscanStatus::PartialFailure, format!("{failed} cell(s) failed")))
        } else {
            Ok(ElfscanStatus::Ok)
        }
    })
}

/// Releases a string returned by this library; null is allowed.
///
/// # Safety
/// `s` must come from this library and not be freed yet.
#[no_mangle]
pub unsafe extern "C" fn elfscan_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
