//! Exercises the C ABI from Rust: handle lifecycles, status codes, error
//! messages and agreement with the library it wraps.

use kbm_lab::geometry::{model_space, ModelSpace};
use kbm_lab::kbm::{self, CsvState, EuclideanState};
use kbm_lab::sde::{NoiseStream, StepScheme};
use kbm_lab_ffi::*;
use std::ffi::CStr;
use std::ptr;

fn last_error() -> String {
    unsafe { CStr::from_ptr(kbm_last_error_message()) }.to_string_lossy().into_owned()
}

fn metric(family: KbmFamily, parameter: f64) -> *mut KbmMetric {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { kbm_metric_new(family, parameter, &mut m) }, KbmStatus::Ok, "{}", last_error());
    assert!(!m.is_null());
    m
}

#[test]
fn curvature_matches_the_model_spaces() {
    let h = metric(KbmFamily::Hyperbolic, 0.0);
    let (mut k, mut l) = (0.0, 0.0);
    assert_eq!(unsafe { kbm_metric_curvature(h, 2.0, &mut k, &mut l) }, KbmStatus::Ok);
    assert!((k + 1.0).abs() < 1e-12);
    assert!((l - 1.0 / 2.0f64.tanh()).abs() < 1e-12);
    unsafe { kbm_metric_free(h) };

    let p = metric(KbmFamily::Polynomial, 3.0);
    assert_eq!(unsafe { kbm_metric_curvature(p, 4.0, &mut k, &mut l) }, KbmStatus::Ok);
    assert!((k + 6.0 / 16.0).abs() < 1e-12, "K = {k}");
    assert!((l - 0.75).abs() < 1e-12);
    unsafe { kbm_metric_free(p) };
}

#[test]
fn integrability_verdicts_cross_the_boundary() {
    let p = metric(KbmFamily::Polynomial, 3.0);
    let mut rep = KbmIntegrability {
        transience_integral: 0.0,
        angle_integral: 0.0,
        transience_truncated: 0.0,
        angle_truncated: 0.0,
        radial_transient: false,
        angle_converges: false,
    };
    assert_eq!(unsafe { kbm_metric_integrability(p, 3, 1e6, &mut rep) }, KbmStatus::Ok, "{}", last_error());
    // f = C r³ on r ≥ 1, so ∫₁^∞ f^{−2} = 1/(5C²).
    let c = model_space(ModelSpace::Polynomial { beta: 3.0 }).unwrap().f(1.0).unwrap();
    assert!(rep.radial_transient && (rep.transience_integral * 5.0 * c * c - 1.0).abs() < 1e-8, "{rep:?}");
    assert!(rep.angle_converges);
    unsafe { kbm_metric_free(p) };

    let e = metric(KbmFamily::Euclidean, 0.0);
    assert_eq!(unsafe { kbm_metric_integrability(e, 3, 1e6, &mut rep) }, KbmStatus::Ok);
    assert!(rep.radial_transient && !rep.angle_converges);
    assert!(rep.angle_integral.is_infinite() && rep.angle_truncated.is_finite());
    unsafe { kbm_metric_free(e) };
}

#[test]
fn euclidean_trajectory_matches_the_library() {
    let mut t = ptr::null_mut();
    let status = unsafe { kbm_simulate_euclidean(3, 1.0, 1.0, 1e-3, KbmScheme::ItoEulerProject, 10, 7, 2, &mut t) };
    assert_eq!(status, KbmStatus::Ok, "{}", last_error());
    let expected = kbm::simulate_euclidean(3, 1.0, 1.0, StepScheme::euler(1e-3).unwrap(), 10, &mut NoiseStream::new(7, 2), &EuclideanState::at_origin(3)).unwrap();
    let (rows, cols) = unsafe { (kbm_trajectory_rows(t), kbm_trajectory_columns(t)) };
    assert_eq!(rows, expected.len());
    assert_eq!(cols, 7);
    let names: Vec<String> = (0..cols).map(|j| unsafe { CStr::from_ptr(kbm_trajectory_column_name(t, j)) }.to_str().unwrap().to_string()).collect();
    let mut header = vec!["t".to_string()];
    header.extend(expected.states[0].header());
    assert_eq!(names, header);
    assert!(unsafe { kbm_trajectory_column_name(t, cols) }.is_null());
    let fp = unsafe { CStr::from_ptr(kbm_trajectory_fingerprint(t)) }.to_str().unwrap().to_string();
    assert_eq!(fp, expected.fingerprint);

    let mut row = vec![0.0; cols];
    let mut values = Vec::new();
    for i in [0, rows / 2, rows - 1] {
        assert_eq!(unsafe { kbm_trajectory_copy_row(t, i, row.as_mut_ptr(), cols) }, KbmStatus::Ok);
        values.clear();
        expected.states[i].values(&mut values);
        assert_eq!(row[0], expected.times[i]);
        assert_eq!(&row[1..], &values[..]);
    }
    assert_eq!(unsafe { kbm_trajectory_copy_row(t, rows, row.as_mut_ptr(), cols) }, KbmStatus::InvalidArgument);
    assert!(last_error().contains("out of range"));
    assert_eq!(unsafe { kbm_trajectory_copy_row(t, 0, row.as_mut_ptr(), cols - 1) }, KbmStatus::InvalidArgument);
    unsafe { kbm_trajectory_free(t) };
}

#[test]
fn polar_trajectory_keeps_unit_speed() {
    let m = metric(KbmFamily::Hyperbolic, 0.0);
    let mut t = ptr::null_mut();
    let status = unsafe { kbm_simulate_polar(m, 3, 1.0, 1.0, 1e-3, KbmScheme::StratonovichHeunProject, 5, 3, 0, 1.0, 0.2, &mut t) };
    assert_eq!(status, KbmStatus::Ok, "{}", last_error());
    let cols = unsafe { kbm_trajectory_columns(t) };
    assert_eq!(unsafe { CStr::from_ptr(kbm_trajectory_column_name(t, 2)) }.to_str().unwrap(), "rdot");
    let hyperbolic = model_space(ModelSpace::Hyperbolic).unwrap();
    let mut row = vec![0.0; cols];
    for i in 0..unsafe { kbm_trajectory_rows(t) } {
        unsafe { kbm_trajectory_copy_row(t, i, row.as_mut_ptr(), cols) };
        let (r, rdot) = (row[1], row[2]);
        let v2: f64 = row[6..9].iter().map(|x| x * x).sum();
        let f = hyperbolic.f(r).unwrap();
        // The polar state stores a unit velocity direction: f²|v|² is carried by 1 − ṙ².
        assert!((v2 - 1.0).abs() < 1e-12 && rdot.abs() < 1.0 && f > 0.0);
    }
    unsafe {
        kbm_trajectory_free(t);
        kbm_metric_free(m);
    }
}

#[test]
fn failures_report_status_and_message() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { kbm_metric_new(KbmFamily::Polynomial, -1.0, &mut m) }, KbmStatus::InvalidArgument);
    assert!(m.is_null());
    assert!(last_error().contains("beta"), "{}", last_error());
    assert_eq!(unsafe { kbm_metric_new(KbmFamily::Hyperbolic, 0.0, ptr::null_mut()) }, KbmStatus::NullPointer);
    assert!(last_error().contains("out"));

    let mut out = ptr::null_mut();
    assert_eq!(unsafe { kbm_simulate_euclidean(3, -1.0, 1.0, 1e-3, KbmScheme::ItoEulerProject, 1, 0, 0, &mut out) }, KbmStatus::InvalidArgument);
    assert_eq!(unsafe { kbm_simulate_euclidean(1, 1.0, 1.0, 1e-3, KbmScheme::ItoEulerProject, 1, 0, 0, &mut out) }, KbmStatus::InvalidArgument);
    assert!(out.is_null());
    let (mut k, mut l) = (0.0, 0.0);
    assert_eq!(unsafe { kbm_metric_curvature(ptr::null(), 1.0, &mut k, &mut l) }, KbmStatus::NullPointer);

    // Without a pole the exponential family lets a geodesic fall into r = 0.
    let e = metric(KbmFamily::Exponential, 1.0);
    let status = unsafe { kbm_simulate_polar(e, 3, 0.0, 1.0, 1e-3, KbmScheme::ItoEulerProject, 1, 0, 0, 0.01, -0.9, &mut out) };
    assert_eq!(status, KbmStatus::DomainExit, "{}", last_error());
    assert!(out.is_null());
    unsafe { kbm_metric_free(e) };

    let h = metric(KbmFamily::Hyperbolic, 0.0);
    assert_eq!(unsafe { kbm_metric_curvature(h, 1.0, &mut k, &mut l) }, KbmStatus::Ok);
    assert_eq!(last_error(), "");
    unsafe { kbm_metric_free(h) };
}

#[test]
fn null_handles_are_tolerated() {
    unsafe {
        kbm_metric_free(ptr::null_mut());
        kbm_trajectory_free(ptr::null_mut());
        assert_eq!(kbm_trajectory_rows(ptr::null()), 0);
        assert_eq!(kbm_trajectory_columns(ptr::null()), 0);
        assert!(kbm_trajectory_column_name(ptr::null(), 0).is_null());
        assert!(kbm_trajectory_fingerprint(ptr::null()).is_null());
    }
    let v = unsafe { CStr::from_ptr(kbm_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
