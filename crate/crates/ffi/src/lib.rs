//! C interface to roadnet.
//!
//! Objects are opaque handles created by `roadnet_*_new`/`_load`/`_from_*`
//! functions and released with the matching `_free`. Every fallible call
//! returns a [`RoadnetStatus`]; on failure a message is available from
//! [`roadnet_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use roadnet::cli::{from_geojson_str, run_reconstruct, run_synth, to_geojson_string, Config};
use roadnet::eval::{evaluate, EvalParams};
use roadnet::netgraph::RoadGraph;
use roadnet::raster::{load_mask, GeoTransform, MaskClass, RasterMask};
use roadnet::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoadnetStatus {
    Ok = 0,
    NullArgument = 1,
    /// Unreadable or malformed input: files, rasters, GeoJSON, strings.
    Input = 2,
    Config = 3,
    /// A pipeline stage or computation failed.
    Stage = 4,
    InvalidArgument = 5,
    Panic = 6,
}

pub struct RoadnetMask(RasterMask);
pub struct RoadnetConfig(Config);
pub struct RoadnetGraph(RoadGraph);

/// Evaluation counts and metrics; undefined metrics are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoadnetEvalSummary {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub avg_hausdorff: f64,
    /// Kilometers.
    pub gt_length: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RoadnetStatus {
    match e {
        Error::Config(_) => RoadnetStatus::Config,
        Error::Io { .. }
        | Error::Image(_)
        | Error::WorldFile(_)
        | Error::LabelOutOfRange { .. }
        | Error::Parse { .. }
        | Error::Dimension { .. } => RoadnetStatus::Input,
        Error::Parameter(_) => RoadnetStatus::InvalidArgument,
        _ => RoadnetStatus::Stage,
    }
}

/// Run `f`, converting errors and panics to a status.
fn guard(f: impl FnOnce() -> Result<(), (RoadnetStatus, String)>) -> RoadnetStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RoadnetStatus::Ok,
        Ok(Err((s, m))) => {
            set_error(m);
            s
        }
        Err(p) => {
            let m = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {m}"));
            RoadnetStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (RoadnetStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (RoadnetStatus, String) {
    (RoadnetStatus::NullArgument, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (RoadnetStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (RoadnetStatus::Input, format!("{what} is not valid UTF-8")))
}

unsafe fn put<T>(out: *mut *mut T, v: T) {
    *out = Box::into_raw(Box::new(v));
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library.
#[no_mangle]
pub extern "C" fn roadnet_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version string (static).
#[no_mangle]
pub extern "C" fn roadnet_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Mask from `width * height` row-major class labels (0 other, 1 interior,
/// 2 contour). `transform` holds the six world-file values in file order:
/// pixel width, row rotation, column rotation, pixel height, and the center
/// of the upper-left pixel.
///
/// # Safety
/// `labels` must point to `width * height` bytes, `transform` to 6 doubles.
#[no_mangle]
pub unsafe extern "C" fn roadnet_mask_new(
    width: usize,
    height: usize,
    labels: *const u8,
    transform: *const f64,
    out: *mut *mut RoadnetMask,
) -> RoadnetStatus {
    guard(|| {
        if labels.is_null() || transform.is_null() || out.is_null() {
            return Err(null("labels, transform or out"));
        }
        let n = width.checked_mul(height).ok_or((RoadnetStatus::InvalidArgument, "size overflow".into()))?;
        let raw = std::slice::from_raw_parts(labels, n);
        let t = std::slice::from_raw_parts(transform, 6);
        let mut classes = Vec::with_capacity(n);
        for (i, &v) in raw.iter().enumerate() {
            classes.push(MaskClass::try_from(v).map_err(|_| {
                lib_err(Error::LabelOutOfRange {
                    value: v,
                    col: i % width,
                    row: i / width,
                })
            })?);
        }
        let gt = GeoTransform {
            pixel_width: t[0],
            rot_y: t[1],
            rot_x: t[2],
            pixel_height: t[3],
            origin_x: t[4],
            origin_y: t[5],
        };
        let m = RasterMask::from_labels(width, height, classes, gt).map_err(lib_err)?;
        put(out, RoadnetMask(m));
        Ok(())
    })
}

/// Load a mask image (PNG/PGM) and its world file.
///
/// # Safety
/// Paths must be nul-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn roadnet_mask_load(
    pixel_path: *const c_char,
    worldfile_path: *const c_char,
    out: *mut *mut RoadnetMask,
) -> RoadnetStatus {
    guard(|| {
        let p = str_arg(pixel_path, "pixel_path")?;
        let w = str_arg(worldfile_path, "worldfile_path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        put(out, RoadnetMask(load_mask(p, w).map_err(lib_err)?));
        Ok(())
    })
}

/// # Safety
/// `mask` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn roadnet_mask_free(mask: *mut RoadnetMask) {
    if !mask.is_null() {
        drop(Box::from_raw(mask));
    }
}

/// Parse a JSON config; null `json` gives the defaults.
///
/// # Safety
/// `json` must be null or a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn roadnet_config_from_json(json: *const c_char, out: *mut *mut RoadnetConfig) -> RoadnetStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = if json.is_null() {
            Config::default()
        } else {
            Config::from_json(str_arg(json, "json")?).map_err(lib_err)?
        };
        put(out, RoadnetConfig(cfg));
        Ok(())
    })
}

/// # Safety
/// `cfg` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn roadnet_config_free(cfg: *mut RoadnetConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Vectorize a mask. A null `cfg` uses the defaults.
///
/// # Safety
/// Handles must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn roadnet_reconstruct(
    mask: *const RoadnetMask,
    cfg: *const RoadnetConfig,
    out: *mut *mut RoadnetGraph,
) -> RoadnetStatus {
    guard(|| {
        if mask.is_null() || out.is_null() {
            return Err(null("mask or out"));
        }
        let default = Config::default();
        let c = cfg.as_ref().map_or(&default, |c| &c.0);
        put(out, RoadnetGraph(run_reconstruct(&(*mask).0, c).map_err(lib_err)?));
        Ok(())
    })
}

/// Synthetic scene from the `synth` section of `cfg` (null for defaults):
/// its mask and ground-truth network. Either output may be null.
///
/// # Safety
/// Non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn roadnet_synth(
    seed: u64,
    cfg: *const RoadnetConfig,
    mask_out: *mut *mut RoadnetMask,
    truth_out: *mut *mut RoadnetGraph,
) -> RoadnetStatus {
    guard(|| {
        let default = Config::default();
        let c = cfg.as_ref().map_or(&default, |c| &c.0);
        let s = run_synth(seed, &c.synth).map_err(lib_err)?;
        if !mask_out.is_null() {
            put(mask_out, RoadnetMask(s.mask));
        }
        if !truth_out.is_null() {
            put(truth_out, RoadnetGraph(s.ground_truth));
        }
        Ok(())
    })
}

/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn roadnet_graph_from_geojson(json: *const c_char, out: *mut *mut RoadnetGraph) -> RoadnetStatus {
    guard(|| {
        let s = str_arg(json, "json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        put(out, RoadnetGraph(from_geojson_str(s).map_err(lib_err)?));
        Ok(())
    })
}

/// GeoJSON text of a graph; release with [`roadnet_string_free`].
///
/// # Safety
/// `graph` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn roadnet_graph_to_geojson(graph: *const RoadnetGraph, out: *mut *mut c_char) -> RoadnetStatus {
    guard(|| {
        if graph.is_null() || out.is_null() {
            return Err(null("graph or out"));
        }
        let text = to_geojson_string(&(*graph).0);
        *out = CString::new(text).expect("JSON has no nul bytes").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn roadnet_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of nodes; 0 for null.
///
/// # Safety
/// `graph` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn roadnet_graph_node_count(graph: *const RoadnetGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.node_count())
}

/// Number of edges; 0 for null.
///
/// # Safety
/// `graph` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn roadnet_graph_edge_count(graph: *const RoadnetGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Total edge length in meters; 0 for null.
///
/// # Safety
/// `graph` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn roadnet_graph_total_length(graph: *const RoadnetGraph) -> f64 {
    graph.as_ref().map_or(0.0, |g| g.0.total_length())
}

/// # Safety
/// `graph` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn roadnet_graph_free(graph: *mut RoadnetGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Buffered evaluation of `pred` against `truth`. A non-positive `buffer`
/// uses the default of 2 m.
///
/// # Safety
/// Handles must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn roadnet_evaluate(
    pred: *const RoadnetGraph,
    truth: *const RoadnetGraph,
    buffer: f64,
    out: *mut RoadnetEvalSummary,
) -> RoadnetStatus {
    guard(|| {
        if pred.is_null() || truth.is_null() || out.is_null() {
            return Err(null("pred, truth or out"));
        }
        let mut p = EvalParams::default();
        if buffer > 0.0 {
            p.buffer = buffer;
        }
        let r = evaluate(&(*pred).0, &(*truth).0, &p).map_err(lib_err)?;
        *out = RoadnetEvalSummary {
            true_positives: r.true_positives,
            false_positives: r.false_positives,
            false_negatives: r.false_negatives,
            precision: r.precision.unwrap_or(f64::NAN),
            recall: r.recall.unwrap_or(f64::NAN),
            f1: r.f1.unwrap_or(f64::NAN),
            avg_hausdorff: r.avg_hausdorff.unwrap_or(f64::NAN),
            gt_length: r.gt_length,
        };
        Ok(())
    })
}
