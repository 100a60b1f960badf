use std::ffi::{CStr, CString};
use std::ptr;

use hdl_core::models::{save_checkpoint, Checkpoint, Model, ModelKind};
use hdl_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(hdl_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn saved(kind: ModelKind, dir: &tempfile::TempDir) -> (Model, CString) {
    let model = Model::init(kind, 8, 4);
    let path = dir.path().join(format!("{kind}.ckpt"));
    save_checkpoint(
        &path,
        &Checkpoint {
            model: model.clone(),
            seed: 4,
        },
    )
    .unwrap();
    (model, CString::new(path.to_str().unwrap()).unwrap())
}

#[test]
fn predictions_match_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let x: Vec<f32> = (0..8).map(|i| i as f32 * 0.25 - 1.0).collect();
    for (kind, beta, core_beta) in [
        (ModelKind::EmbedMlp, f64::NAN, None),
        (ModelKind::Hdln, f64::NAN, None),
        (ModelKind::Hdln, 0.3, Some(0.3)),
    ] {
        let (model, path) = saved(kind, &dir);
        let mut handle = ptr::null_mut();
        unsafe {
            assert_eq!(hdl_model_load(path.as_ptr(), &mut handle), HdlStatus::Ok);
            let mut dim = 0;
            assert_eq!(hdl_model_input_dim(handle, &mut dim), HdlStatus::Ok);
            assert_eq!(dim, 8);
            let mut k = HdlModelKind::EmbedMlp;
            assert_eq!(hdl_model_kind(handle, &mut k), HdlStatus::Ok);
            assert_eq!(k == HdlModelKind::Hdln, kind == ModelKind::Hdln);
            let mut out = [0.0; HDL_OUTPUT_DIM];
            let status = hdl_model_predict(
                handle,
                x.as_ptr(),
                x.len(),
                beta,
                out.as_mut_ptr(),
                out.len(),
            );
            assert_eq!(status, HdlStatus::Ok, "{}", last_error());
            let want: Vec<f64> = model
                .predict(&x, core_beta)
                .unwrap()
                .blocks()
                .iter()
                .flatten()
                .copied()
                .collect();
            assert_eq!(out.to_vec(), want);
            hdl_model_free(handle);
        }
    }
}

#[test]
fn predict_reports_bad_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let (_, path) = saved(ModelKind::EmbedMlp, &dir);
    let mut handle = ptr::null_mut();
    let x = [0.0f32; 8];
    let mut out = [0.0; HDL_OUTPUT_DIM];
    unsafe {
        assert_eq!(hdl_model_load(path.as_ptr(), &mut handle), HdlStatus::Ok);
        let status =
            hdl_model_predict(handle, x.as_ptr(), 7, f64::NAN, out.as_mut_ptr(), out.len());
        assert_eq!(status, HdlStatus::Shape);
        assert!(last_error().contains("8-dim"));
        let status = hdl_model_predict(handle, x.as_ptr(), 8, f64::NAN, out.as_mut_ptr(), 20);
        assert_eq!(status, HdlStatus::BufferTooSmall);
        let status = hdl_model_predict(handle, x.as_ptr(), 8, 0.5, out.as_mut_ptr(), out.len());
        assert_eq!(status, HdlStatus::InvalidArgument);
        let status = hdl_model_predict(
            handle,
            ptr::null(),
            8,
            f64::NAN,
            out.as_mut_ptr(),
            out.len(),
        );
        assert_eq!(status, HdlStatus::NullPointer);
        let status =
            hdl_model_predict(handle, x.as_ptr(), 8, f64::NAN, out.as_mut_ptr(), out.len());
        assert_eq!(status, HdlStatus::Ok);
        assert_eq!(last_error(), "");
        hdl_model_free(handle);
        hdl_model_free(ptr::null_mut());
    }
}

#[test]
fn load_failures_leave_null_handle() {
    let dir = tempfile::tempdir().unwrap();
    let missing = CString::new(dir.path().join("none.ckpt").to_str().unwrap()).unwrap();
    let garbage_path = dir.path().join("garbage.ckpt");
    std::fs::write(&garbage_path, b"not a checkpoint at all, definitely not").unwrap();
    let garbage = CString::new(garbage_path.to_str().unwrap()).unwrap();
    let mut handle = ptr::null_mut();
    unsafe {
        assert_eq!(hdl_model_load(missing.as_ptr(), &mut handle), HdlStatus::Io);
        assert!(handle.is_null());
        assert_eq!(
            hdl_model_load(garbage.as_ptr(), &mut handle),
            HdlStatus::Checkpoint
        );
        assert!(handle.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(
            hdl_model_load(ptr::null(), &mut handle),
            HdlStatus::NullPointer
        );
        assert_eq!(
            hdl_model_load(missing.as_ptr(), ptr::null_mut()),
            HdlStatus::NullPointer
        );
    }
}

#[test]
fn metrics_on_the_hand_case() {
    let t = [1.0, 0.0];
    let p = [0.5, 0.5];
    let cases = [
        (HdlMetric::Clark, 1.05409),
        (HdlMetric::Canberra, 1.33333),
        (HdlMetric::Cosine, std::f64::consts::FRAC_1_SQRT_2),
        (HdlMetric::Intersection, 0.5),
    ];
    for (metric, want) in cases {
        let mut v = f64::NAN;
        assert_eq!(
            unsafe { hdl_metric(metric, t.as_ptr(), p.as_ptr(), 2, &mut v) },
            HdlStatus::Ok
        );
        assert!((v - want).abs() < 1e-5, "{metric:?} {v}");
    }
    let mut v = 0.0;
    let zero = [0.0, 0.0];
    let status = unsafe { hdl_metric(HdlMetric::Cosine, t.as_ptr(), zero.as_ptr(), 2, &mut v) };
    assert_eq!(status, HdlStatus::InvalidArgument);
    let status = unsafe { hdl_metric(HdlMetric::Clark, t.as_ptr(), p.as_ptr(), 0, &mut v) };
    assert_eq!(status, HdlStatus::Shape);
}

#[test]
fn its_fit_recovers_an_exact_line() {
    let months: Vec<i64> = (0..36).collect();
    let y: Vec<f64> = months
        .iter()
        .map(|&t| 0.03 + 0.001 * t as f64 + if t >= 26 { 0.004 } else { 0.0 })
        .collect();
    let mut out = HdlItsResult::default();
    let status = unsafe { hdl_its_fit(months.as_ptr(), y.as_ptr(), 36, 26, &mut out) };
    assert_eq!(status, HdlStatus::Ok, "{}", last_error());
    for (got, want) in out.coefficients.iter().zip([0.03, 0.001, 0.004, 0.0]) {
        assert!((got - want).abs() < 1e-10);
    }
    assert_eq!(out.df, 32);

    let status = unsafe { hdl_its_fit(months.as_ptr(), y.as_ptr(), 36, 40, &mut out) };
    assert_ne!(status, HdlStatus::Ok);
}

#[test]
fn version_and_fingerprint_are_exposed() {
    let v = unsafe { CStr::from_ptr(hdl_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    assert_eq!(
        hdl_schema_fingerprint(),
        hdl_core::schema::LabelSchema::standard().fingerprint()
    );
}

#[test]
fn generated_header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/hdl.h");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{header}\"\nint main(void) {{ HdlModel *m = 0; HdlStatus s = hdl_model_load(\"x\", &m); hdl_model_free(m); return s == HDL_STATUS_OK ? 0 : (int)HDL_OUTPUT_DIM; }}\n"
        ),
    )
    .unwrap();
    let status = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"])
        .arg(&src)
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success());
}
