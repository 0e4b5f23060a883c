//! C ABI for the kbm-lab simulation library.
//!
//! Metrics and trajectories cross the boundary as opaque handles that the
//! caller releases with the matching `_free` function. Every fallible call
//! returns a [`KbmStatus`]; on failure a description of the most recent error
//! on the calling thread is available from [`kbm_last_error_message`].
//! Output parameters are written only on success.
//!
//! The generated header lives at `include/kbm_lab.h`.

#![allow(clippy::too_many_arguments)]

use kbm_lab::geometry::{model_space, IntegralValue, ModelSpace, WarpedMetric};
use kbm_lab::kbm::{self, CsvState, EuclideanState, PolarState, Trajectory};
use kbm_lab::sde::{NoiseStream, SchemeKind, StepScheme};
use kbm_lab::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KbmStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A parameter, index or configuration value is out of range.
    InvalidArgument = 2,
    /// A trajectory left the domain of the metric.
    DomainExit = 3,
    /// An integrator or quadrature failed numerically.
    Numerical = 4,
    /// The library panicked; the message names the cause.
    Panic = 5,
}

/// Warping-function family.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KbmFamily {
    /// `f(r) = r`; the parameter is ignored.
    Euclidean = 0,
    /// `f(r) = sinh r`; the parameter is ignored.
    Hyperbolic = 1,
    /// `f(r) ∝ r^β`; the parameter is `β`.
    Polynomial = 2,
    /// `f(r) ∝ exp(r^β)`; the parameter is `β`.
    Subexponential = 3,
    /// `f(r) = exp(c·r)`; the parameter is `c`.
    Exponential = 4,
}

/// Time-stepping scheme.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KbmScheme {
    /// Projected Euler–Maruyama on the Itô form.
    ItoEulerProject = 0,
    /// Projected Heun on the Stratonovich form.
    StratonovichHeunProject = 1,
}

/// Transience and angle-convergence integrals of a metric.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KbmIntegrability {
    /// `∫₁^∞ f^{1−d}`, or `+∞` when it diverges.
    pub transience_integral: f64,
    /// The angle-clock integral, or `+∞` when it diverges.
    pub angle_integral: f64,
    /// Value on `[1, r_max]` when the transience integral diverges.
    pub transience_truncated: f64,
    /// Value on `[1, r_max]` when the angle integral diverges.
    pub angle_truncated: f64,
    /// The radial process is transient.
    pub radial_transient: bool,
    /// The angular clock converges.
    pub angle_converges: bool,
}

/// Opaque warped-product metric.
pub struct KbmMetric {
    inner: WarpedMetric,
}

/// Opaque recorded trajectory: a row-major table whose first column is `t`.
pub struct KbmTrajectory {
    columns: Vec<CString>,
    values: Vec<f64>,
    fingerprint: CString,
}

enum Failure {
    Null(&'static str),
    Invalid(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: String) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> KbmStatus {
    match e {
        Error::DomainExit { .. } | Error::Domain { .. } => KbmStatus::DomainExit,
        _ if e.exit_code() == 3 => KbmStatus::Numerical,
        _ => KbmStatus::InvalidArgument,
    }
}

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> KbmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(String::new());
            KbmStatus::Ok
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("argument `{name}` is null"));
            KbmStatus::NullPointer
        }
        Ok(Err(Failure::Invalid(message))) => {
            set_error(message);
            KbmStatus::InvalidArgument
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {what}"));
            KbmStatus::Panic
        }
    }
}

fn non_null<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    // SAFETY: the caller guarantees that a non-null pointer refers to a live value.
    unsafe { p.as_ref() }.ok_or(Failure::Null(name))
}

fn check_out<T>(p: *mut T, name: &'static str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure::Null(name))
    } else {
        Ok(())
    }
}

fn scheme(kind: KbmScheme, dt: f64) -> Result<StepScheme, Failure> {
    let kind = match kind {
        KbmScheme::ItoEulerProject => SchemeKind::ItoEulerProject,
        KbmScheme::StratonovichHeunProject => SchemeKind::StratonovichHeunProject,
    };
    Ok(StepScheme::new(kind, dt)?)
}

fn table<S: CsvState>(traj: &Trajectory<S>) -> Result<KbmTrajectory, Failure> {
    let first = traj.states.first().ok_or_else(|| Failure::Invalid("empty trajectory".into()))?;
    let names = std::iter::once("t".to_string()).chain(first.header());
    let columns: Vec<CString> = names.map(|n| CString::new(n).unwrap_or_default()).collect();
    let mut values = Vec::with_capacity(traj.len() * columns.len());
    let mut row = Vec::new();
    for (t, s) in traj.times.iter().zip(&traj.states) {
        row.clear();
        s.values(&mut row);
        values.push(*t);
        values.extend_from_slice(&row);
    }
    Ok(KbmTrajectory { columns, values, fingerprint: CString::new(traj.fingerprint.clone()).unwrap_or_default() })
}

fn emit(traj: KbmTrajectory, out: *mut *mut KbmTrajectory) {
    // SAFETY: `out` was checked to be non-null and points to writable storage.
    unsafe { *out = Box::into_raw(Box::new(traj)) };
}

/// Library version as a NUL-terminated string with static lifetime.
#[no_mangle]
pub extern "C" fn kbm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the most recent failure on this thread, or an empty string.
///
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn kbm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a metric of the given family. `parameter` is `β` or `c` where the
/// family has one and is ignored otherwise.
///
/// # Safety
/// `out` must be null or point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn kbm_metric_new(family: KbmFamily, parameter: f64, out: *mut *mut KbmMetric) -> KbmStatus {
    guard(|| {
        check_out(out, "out")?;
        let name = match family {
            KbmFamily::Euclidean => ModelSpace::Euclidean,
            KbmFamily::Hyperbolic => ModelSpace::Hyperbolic,
            KbmFamily::Polynomial => ModelSpace::Polynomial { beta: parameter },
            KbmFamily::Subexponential => ModelSpace::Subexponential { beta: parameter },
            KbmFamily::Exponential => ModelSpace::Exponential { c: parameter },
        };
        let inner = model_space(name)?;
        *out = Box::into_raw(Box::new(KbmMetric { inner }));
        Ok(())
    })
}

/// Releases a metric. Null is ignored.
///
/// # Safety
/// `metric` must be null or a handle from [`kbm_metric_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kbm_metric_free(metric: *mut KbmMetric) {
    if !metric.is_null() {
        drop(Box::from_raw(metric));
    }
}

/// Radial sectional curvature `K(r) = −f″/f` and log-derivative `f′/f` at `r`.
///
/// # Safety
/// `metric` must be a live handle; the outputs must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn kbm_metric_curvature(metric: *const KbmMetric, r: f64, curvature: *mut f64, log_derivative: *mut f64) -> KbmStatus {
    guard(|| {
        let m = non_null(metric, "metric")?;
        check_out(curvature, "curvature")?;
        check_out(log_derivative, "log_derivative")?;
        let rep = m.inner.curvature(r)?;
        *curvature = rep.k;
        *log_derivative = rep.log_derivative;
        Ok(())
    })
}

/// Transience and angle-convergence integrals in dimension `d`, truncated at `r_max`.
///
/// # Safety
/// `metric` must be a live handle and `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn kbm_metric_integrability(metric: *const KbmMetric, d: usize, r_max: f64, out: *mut KbmIntegrability) -> KbmStatus {
    guard(|| {
        let m = non_null(metric, "metric")?;
        check_out(out, "out")?;
        let rep = m.inner.integrability_report(d, r_max)?;
        let truncated = |v: IntegralValue| match v {
            IntegralValue::Finite { value } => value,
            IntegralValue::Infinite { truncated } => truncated,
        };
        *out = KbmIntegrability {
            transience_integral: rep.transience_integral.value(),
            angle_integral: rep.angle_integral.value(),
            transience_truncated: truncated(rep.transience_integral),
            angle_truncated: truncated(rep.angle_integral),
            radial_transient: rep.radial_transient,
            angle_converges: rep.angle_converges,
        };
        Ok(())
    })
}

/// Simulates the polar system from `r = r0`, `ṙ = rdot0`, with the standard
/// initial direction and velocity. Path `path_index` of stream `seed` is used.
///
/// # Safety
/// `metric` must be a live handle and `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn kbm_simulate_polar(
    metric: *const KbmMetric,
    d: usize,
    sigma: f64,
    horizon: f64,
    dt: f64,
    kind: KbmScheme,
    stride: usize,
    seed: u64,
    path_index: u64,
    r0: f64,
    rdot0: f64,
    out: *mut *mut KbmTrajectory,
) -> KbmStatus {
    guard(|| {
        let m = non_null(metric, "metric")?;
        check_out(out, "out")?;
        if d < 3 {
            return Err(Failure::Invalid(format!("invariant `d >= 3` violated: d = {d}")));
        }
        let mut stream = NoiseStream::new(seed, path_index);
        let run = kbm::simulate_polar(&m.inner, d, sigma, horizon, scheme(kind, dt)?, stride, &mut stream, &PolarState::standard(d, r0, rdot0))?;
        emit(table(&run.trajectory)?, out);
        Ok(())
    })
}

/// Simulates the Euclidean system in `ℝ^d` from the origin.
///
/// # Safety
/// `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn kbm_simulate_euclidean(
    d: usize,
    sigma: f64,
    horizon: f64,
    dt: f64,
    kind: KbmScheme,
    stride: usize,
    seed: u64,
    path_index: u64,
    out: *mut *mut KbmTrajectory,
) -> KbmStatus {
    guard(|| {
        check_out(out, "out")?;
        if d < 2 {
            return Err(Failure::Invalid(format!("invariant `d >= 2` violated: d = {d}")));
        }
        let mut stream = NoiseStream::new(seed, path_index);
        let traj = kbm::simulate_euclidean(d, sigma, horizon, scheme(kind, dt)?, stride, &mut stream, &EuclideanState::at_origin(d))?;
        emit(table(&traj)?, out);
        Ok(())
    })
}

/// Releases a trajectory. Null is ignored.
///
/// # Safety
/// `traj` must be null or a handle from a simulate call not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kbm_trajectory_free(traj: *mut KbmTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of recorded rows, or 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kbm_trajectory_rows(traj: *const KbmTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.values.len() / t.columns.len())
}

/// Number of columns, including the leading `t`, or 0 for a null handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kbm_trajectory_columns(traj: *const KbmTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.columns.len())
}

/// Name of column `j`, or null when out of range. The string is owned by the handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kbm_trajectory_column_name(traj: *const KbmTrajectory, j: usize) -> *const c_char {
    traj.as_ref().and_then(|t| t.columns.get(j)).map_or(ptr::null(), |c| c.as_ptr())
}

/// SHA-256 fingerprint of the simulation parameters, owned by the handle.
///
/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kbm_trajectory_fingerprint(traj: *const KbmTrajectory) -> *const c_char {
    traj.as_ref().map_or(ptr::null(), |t| t.fingerprint.as_ptr())
}

/// Copies row `i` into `buffer`, which must hold at least `capacity` values.
///
/// # Safety
/// `traj` must be a live handle and `buffer` valid for `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn kbm_trajectory_copy_row(traj: *const KbmTrajectory, i: usize, buffer: *mut f64, capacity: usize) -> KbmStatus {
    guard(|| {
        let t = non_null(traj, "traj")?;
        check_out(buffer, "buffer")?;
        let width = t.columns.len();
        let rows = t.values.len() / width;
        if i >= rows {
            return Err(Failure::Invalid(format!("row {i} is out of range for {rows} rows")));
        }
        if capacity < width {
            return Err(Failure::Invalid(format!("buffer holds {capacity} values but a row has {width}")));
        }
        ptr::copy_nonoverlapping(t.values[i * width..].as_ptr(), buffer, width);
        Ok(())
    })
}
