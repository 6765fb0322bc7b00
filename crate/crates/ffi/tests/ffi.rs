use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use mcn_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 512];
    let n = unsafe { mcn_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn reference_model() -> *mut McnModel {
    let mut params = std::mem::MaybeUninit::<McnModelParams>::uninit();
    assert_eq!(unsafe { mcn_model_params_reference(params.as_mut_ptr()) }, McnStatus::Ok);
    let params = unsafe { params.assume_init() };
    let mut model = ptr::null_mut();
    assert_eq!(unsafe { mcn_model_new(&params, &mut model) }, McnStatus::Ok);
    assert!(!model.is_null());
    model
}

#[test]
fn evaluate_matches_core() {
    let model = reference_model();
    let mut res = McnResult::default();
    let status = unsafe { mcn_model_evaluate(model, 8.3e4, 6.4, 18.4, 130e-9, &mut res) };
    assert_eq!(status, McnStatus::Ok);
    unsafe { mcn_model_free(model) };

    let drive = mcn_core::model::DriveConfig::new(6.4, 18.4, 130e-9).unwrap();
    let b = mcn_core::model::mcn(
        8.3e4,
        &drive,
        &mcn_core::model::EnsembleGeometry::hollow_core_fiber(),
        &mcn_core::model::AtomSpecies::rb87_d1(),
        0.07,
        &mcn_core::numerics::QuadratureSpec::default(),
    )
    .unwrap();
    assert_eq!(res.n_mc, b.n_mc);
    assert_eq!(res.eta_s, b.eta_s);
    assert_eq!(res.mean_rate_r, b.mean_rate_r);
    let delay = mcn_core::model::mean_delay(b.n_mc, b.mean_rate_r, 8.3e4).unwrap();
    assert_eq!(res.mean_delay, delay);
}

#[test]
fn invalid_drive_reports_message() {
    let model = reference_model();
    let mut res = McnResult::default();
    let status = unsafe { mcn_model_evaluate(model, 8.3e4, 6.4, 0.0, 130e-9, &mut res) };
    unsafe { mcn_model_free(model) };
    assert_eq!(status, McnStatus::InvalidArgument);
    assert!(!last_error().is_empty());
}

#[test]
fn null_pointers_are_rejected() {
    let mut out = 0.0;
    assert_eq!(unsafe { mcn_model_evaluate(ptr::null(), 1e4, 6.4, 18.4, 130e-9, ptr::null_mut()) }, McnStatus::NullPointer);
    assert_eq!(unsafe { mcn_model_new(ptr::null(), ptr::null_mut()) }, McnStatus::NullPointer);
    assert_eq!(unsafe { mcn_mean_delay(1.0, 1.0, 10.0, ptr::null_mut()) }, McnStatus::NullPointer);
    assert_eq!(unsafe { mcn_fit_burst(ptr::null(), ptr::null(), 0, 0, 0, 0.0, ptr::null_mut()) }, McnStatus::NullPointer);
    assert_eq!(unsafe { mcn_gamma_n_from_delay(1e-7, 1.0, &mut out) }, McnStatus::InvalidArgument);
    unsafe { mcn_model_free(ptr::null_mut()) };
}

#[test]
fn delay_round_trip() {
    let (n_c, rate, n) = (380.0, 2.0e5, 8.3e4);
    let mut t_d = 0.0;
    let mut gn = 0.0;
    assert_eq!(unsafe { mcn_mean_delay(n_c, rate, n, &mut t_d) }, McnStatus::Ok);
    assert_eq!(unsafe { mcn_gamma_n_from_delay(t_d, n, &mut gn) }, McnStatus::Ok);
    assert!((gn - n_c * rate).abs() <= 1e-12 * n_c * rate);
}

#[test]
fn fit_burst_recovers_pulse() {
    let dt = 1e-9;
    let (t0, tau, amp) = (200e-9, 12e-9, 3e-6);
    let t: Vec<f64> = (0..400).map(|i| i as f64 * dt).collect();
    let p: Vec<f64> = t.iter().map(|&x| amp / ((x - t0) / tau).cosh().powi(2)).collect();
    let mut out = McnBurst::default();
    let status = unsafe { mcn_fit_burst(t.as_ptr(), p.as_ptr(), t.len(), 120, 280, 0.0, &mut out) };
    assert_eq!(status, McnStatus::Ok);
    assert_eq!(out.converged, 1);
    assert!((out.t_d - t0).abs() < 1e-12);
    assert!((out.p_s - amp).abs() < 1e-9 * amp);
    assert!((out.tau_b - 1.762_747_174_039_086 * tau).abs() < 1e-12);

    let status = unsafe { mcn_fit_burst(t.as_ptr(), p.as_ptr(), t.len(), 300, 500, 0.0, &mut out) };
    assert_eq!(status, McnStatus::InvalidArgument);
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(mcn_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/mcn.h")).unwrap();
    for name in [
        "typedef struct McnModel McnModel;",
        "MCN_STATUS_OK = 0",
        "mcn_model_new(",
        "mcn_model_evaluate(",
        "mcn_model_free(",
        "mcn_fit_burst(",
        "mcn_last_error_message(",
        "mcn_version(",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

fn staticlib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libmcn_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_and_runs() {
    let Some(lib) = staticlib() else {
        eprintln!("static library not found; skipping C link check");
        return;
    };
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping C link check");
        return;
    }
    let dir = env!("CARGO_MANIFEST_DIR");
    let exe = std::env::temp_dir().join(format!("mcn_ffi_smoke_{}", std::process::id()));
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(format!("{dir}/include"))
        .arg(format!("{dir}/tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    let _ = std::fs::remove_file(&exe);
    assert!(out.status.success(), "smoke program exited with {:?}", out.status);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with(env!("CARGO_PKG_VERSION")));
}
