//! C ABI over `hdl-core`: load a checkpoint and predict, compute the
//! distribution metrics, and fit the segmented time-series regression.
//!
//! Every fallible function returns an [`HdlStatus`]; on failure the message is
//! available from [`hdl_last_error_message`] until the next call on the same
//! thread. Panics never cross the boundary; they surface as `HDL_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use hdl_core::analysis::{its_fit, ItsSeries, SeriesPoint};
use hdl_core::metrics::{canberra, clark, cosine, intersection};
use hdl_core::models::{load_checkpoint, Model, ModelKind};
use hdl_core::schema::LabelSchema;
use hdl_core::Error;
use libc::{c_char, size_t};

/// Length of a prediction: the five label blocks concatenated.
pub const HDL_OUTPUT_DIM: usize = 21;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HdlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Shape = 3,
    Io = 4,
    Checkpoint = 5,
    NonFinite = 6,
    RankDeficient = 7,
    BufferTooSmall = 8,
    Panic = 9,
    Other = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HdlModelKind {
    EmbedMlp = 1,
    Hdln = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HdlMetric {
    Clark = 0,
    Canberra = 1,
    Cosine = 2,
    Intersection = 3,
}

/// Coefficients are ordered intercept, pre-trend, level change, slope change.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HdlItsResult {
    pub coefficients: [f64; 4],
    pub std_errors: [f64; 4],
    pub p_values: [f64; 4],
    pub ci95_low: [f64; 4],
    pub ci95_high: [f64; 4],
    pub r_squared: f64,
    pub df: size_t,
}

/// Opaque model handle.
pub struct HdlModel {
    model: Model,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> HdlStatus {
    match e {
        Error::Shape(_) | Error::MixedDims { .. } => HdlStatus::Shape,
        Error::Io { .. } => HdlStatus::Io,
        Error::Checkpoint(_) => HdlStatus::Checkpoint,
        Error::NonFinite(_) => HdlStatus::NonFinite,
        Error::RankDeficient(_) => HdlStatus::RankDeficient,
        Error::InvalidArgument(_) | Error::InvalidDistribution { .. } | Error::Empty(_) => {
            HdlStatus::InvalidArgument
        }
        _ => HdlStatus::Other,
    }
}

fn fail(status: HdlStatus, message: &str) -> HdlStatus {
    set_error(message);
    status
}

fn guard(f: impl FnOnce() -> Result<(), HdlStatus>) -> HdlStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HdlStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(HdlStatus::Panic, "internal panic"),
    }
}

fn core_err(e: Error) -> HdlStatus {
    fail(status_of(&e), &e.to_string())
}

unsafe fn slice<'a, T>(ptr: *const T, len: size_t, what: &str) -> Result<&'a [T], HdlStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(fail(HdlStatus::NullPointer, &format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn out_ref<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, HdlStatus> {
    ptr.as_mut()
        .ok_or_else(|| fail(HdlStatus::NullPointer, &format!("{what} is null")))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hdl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Fingerprint of the label schema compiled into the library.
#[no_mangle]
pub extern "C" fn hdl_schema_fingerprint() -> u64 {
    LabelSchema::standard().fingerprint()
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn hdl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads a checkpoint. On success `*out` owns a handle to release with [`hdl_model_free`].
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn hdl_model_load(path: *const c_char, out: *mut *mut HdlModel) -> HdlStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = std::ptr::null_mut();
        if path.is_null() {
            return Err(fail(HdlStatus::NullPointer, "path is null"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| fail(HdlStatus::InvalidArgument, "path is not UTF-8"))?;
        let ckpt = load_checkpoint(Path::new(path)).map_err(core_err)?;
        *out = Box::into_raw(Box::new(HdlModel { model: ckpt.model }));
        Ok(())
    })
}

/// Releases a handle from [`hdl_model_load`]. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hdl_model_free(model: *mut HdlModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn hdl_model_input_dim(
    model: *const HdlModel,
    out: *mut size_t,
) -> HdlStatus {
    guard(|| {
        let m = model
            .as_ref()
            .ok_or_else(|| fail(HdlStatus::NullPointer, "model is null"))?;
        *out_ref(out, "out")? = m.model.input_dim();
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn hdl_model_kind(
    model: *const HdlModel,
    out: *mut HdlModelKind,
) -> HdlStatus {
    guard(|| {
        let m = model
            .as_ref()
            .ok_or_else(|| fail(HdlStatus::NullPointer, "model is null"))?;
        *out_ref(out, "out")? = match m.model.kind() {
            ModelKind::EmbedMlp => HdlModelKind::EmbedMlp,
            ModelKind::Hdln => HdlModelKind::Hdln,
        };
        Ok(())
    })
}

/// Predicts one post into `out` (at least [`HDL_OUTPUT_DIM`] doubles): the
/// lonely, duration, context, interpersonal and interaction distributions in
/// that order. `beta` blends HDLN local and global heads; pass NaN for the
/// default (global only). EmbedMlp models require NaN.
///
/// # Safety
/// `features` must point to `n_features` floats and `out` to `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hdl_model_predict(
    model: *const HdlModel,
    features: *const f32,
    n_features: size_t,
    beta: f64,
    out: *mut f64,
    out_len: size_t,
) -> HdlStatus {
    guard(|| {
        let m = model
            .as_ref()
            .ok_or_else(|| fail(HdlStatus::NullPointer, "model is null"))?;
        let x = slice(features, n_features, "features")?;
        if out.is_null() {
            return Err(fail(HdlStatus::NullPointer, "out is null"));
        }
        if out_len < HDL_OUTPUT_DIM {
            return Err(fail(
                HdlStatus::BufferTooSmall,
                &format!("out holds {out_len} values, need {HDL_OUTPUT_DIM}"),
            ));
        }
        let beta = (!beta.is_nan()).then_some(beta);
        let pred = m.model.predict(x, beta).map_err(core_err)?;
        let flat: Vec<f64> = pred.blocks().iter().flatten().copied().collect();
        std::slice::from_raw_parts_mut(out, HDL_OUTPUT_DIM).copy_from_slice(&flat);
        Ok(())
    })
}

/// Distance or similarity between a target and a predicted distribution of length `len`.
///
/// # Safety
/// `target` and `pred` must each point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hdl_metric(
    metric: HdlMetric,
    target: *const f64,
    pred: *const f64,
    len: size_t,
    out: *mut f64,
) -> HdlStatus {
    guard(|| {
        let t = slice(target, len, "target")?;
        let p = slice(pred, len, "pred")?;
        let out = out_ref(out, "out")?;
        let f = match metric {
            HdlMetric::Clark => clark,
            HdlMetric::Canberra => canberra,
            HdlMetric::Cosine => cosine,
            HdlMetric::Intersection => intersection,
        };
        *out = f(t, p).map_err(core_err)?;
        Ok(())
    })
}

/// Fits `y = b0 + b1·T + b2·D + b3·M` with `D = [T ≥ t0]`, `M = max(0, T − t0)`.
/// `months` must be consecutive and increasing.
///
/// # Safety
/// `months` and `values` must each point to `n` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hdl_its_fit(
    months: *const i64,
    values: *const f64,
    n: size_t,
    intervention_month: i64,
    out: *mut HdlItsResult,
) -> HdlStatus {
    guard(|| {
        let months = slice(months, n, "months")?;
        let values = slice(values, n, "values")?;
        let out = out_ref(out, "out")?;
        let series = ItsSeries {
            intervention_month,
            points: months
                .iter()
                .zip(values)
                .map(|(&month, &v)| SeriesPoint {
                    month,
                    value: Some(v),
                    n_posts: 0,
                })
                .collect(),
        };
        let fit = its_fit(&series).map_err(core_err)?;
        *out = HdlItsResult {
            coefficients: fit.coefficients,
            std_errors: fit.std_errors,
            p_values: fit.p_values,
            ci95_low: fit.ci95.map(|c| c.0),
            ci95_high: fit.ci95.map(|c| c.1),
            r_squared: fit.r_squared,
            df: fit.df,
        };
        Ok(())
    })
}
