//! C ABI over the growth fitting, closure simulation and discovery routines.
//!
//! Every fallible call returns an [`EqStatus`]; on failure a message is
//! available from [`eq_last_error`] until the next call on the same thread.
//! Handles are opaque and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use eqgrowth::closure::{simulate_ode, ClosureParams};
use eqgrowth::discovery::{discover, ArchConfig, FilterKind, GeneratorKind, Trajectory};
use eqgrowth::growth::{fit_nonlinear, select_model, FitResult, GrowthSeries, ModelKind};
use eqgrowth::term::{Domain, Substrate};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    Panic = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EqModel {
    PowerLaw = 0,
    StretchedExp = 1,
    SaturatingPl = 2,
    Linear = 3,
    LogNormal = 4,
}

impl From<EqModel> for ModelKind {
    fn from(m: EqModel) -> Self {
        match m {
            EqModel::PowerLaw => ModelKind::PowerLaw,
            EqModel::StretchedExp => ModelKind::StretchedExp,
            EqModel::SaturatingPl => ModelKind::SaturatingPl,
            EqModel::Linear => ModelKind::Linear,
            EqModel::LogNormal => ModelKind::LogNormal,
        }
    }
}

impl From<ModelKind> for EqModel {
    fn from(m: ModelKind) -> Self {
        match m {
            ModelKind::PowerLaw => EqModel::PowerLaw,
            ModelKind::StretchedExp => EqModel::StretchedExp,
            ModelKind::SaturatingPl => EqModel::SaturatingPl,
            ModelKind::Linear => EqModel::Linear,
            ModelKind::LogNormal => EqModel::LogNormal,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub enum EqDomain {
    Arith = 0,
    Bool = 1,
    List = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub enum EqGenerator {
    Random = 0,
    Compositional = 1,
    Freq = 2,
    MdlGreedy = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub enum EqFilter {
    Any = 0,
    Novelty = 1,
}

/// Architecture of one discovery run.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct EqArchConfig {
    pub domain: EqDomain,
    pub generator: EqGenerator,
    pub filter: EqFilter,
    pub depth: u32,
    pub batch_size: usize,
    pub seed: u64,
    pub epochs: usize,
    /// Non-zero admits depths and batch sizes outside the sweep sets.
    pub allow_override: bool,
}

/// Closure-model parameters; `big_k` is the generator throughput K.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct EqClosureParams {
    pub big_k: f64,
    pub k: f64,
    pub mu: f64,
    pub n0: f64,
}

/// A growth series `(t, n)`.
pub struct EqSeries(GrowthSeries);

/// One fitted model.
pub struct EqFit(FitResult);

/// A discovery trajectory.
pub struct EqTrajectory(Trajectory);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("interior nuls replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(status: EqStatus, msg: impl Into<String>) -> EqStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> EqStatus) -> EqStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            fail(EqStatus::Panic, msg)
        }
    }
}

fn boxed<T>(out: *mut *mut T, value: T) -> EqStatus {
    // SAFETY: callers check `out` for null before computing `value`.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    EqStatus::Ok
}

/// Message for the last failed call on this thread, or NULL. Owned by the
/// library; valid until the next call.
#[no_mangle]
pub extern "C" fn eq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn eq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a series from `len` pairs. `t` must be positive and strictly
/// increasing; `n` finite and non-negative.
///
/// # Safety
/// `t` and `n` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_series_new(t: *const f64, n: *const f64, len: usize, out: *mut *mut EqSeries) -> EqStatus {
    guard(|| {
        if out.is_null() || (len > 0 && (t.is_null() || n.is_null())) {
            return fail(EqStatus::NullPointer, "null argument");
        }
        let (t, n) = if len == 0 {
            (Vec::new(), Vec::new())
        } else {
            (std::slice::from_raw_parts(t, len).to_vec(), std::slice::from_raw_parts(n, len).to_vec())
        };
        match GrowthSeries::new(t, n) {
            Ok(s) => boxed(out, EqSeries(s)),
            Err(e) => fail(EqStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Number of points, or 0 for NULL.
///
/// # Safety
/// `series` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eq_series_len(series: *const EqSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.len())
}

/// Copies the series into caller buffers of capacity `cap`.
///
/// # Safety
/// `series` must be a live handle; `t` and `n` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn eq_series_copy(series: *const EqSeries, t: *mut f64, n: *mut f64, cap: usize) -> EqStatus {
    guard(|| {
        let Some(s) = series.as_ref() else { return fail(EqStatus::NullPointer, "null series") };
        if t.is_null() || n.is_null() {
            return fail(EqStatus::NullPointer, "null buffer");
        }
        if cap < s.0.len() {
            return fail(EqStatus::BufferTooSmall, format!("need {} slots", s.0.len()));
        }
        ptr::copy_nonoverlapping(s.0.t().as_ptr(), t, s.0.len());
        ptr::copy_nonoverlapping(s.0.n().as_ptr(), n, s.0.len());
        EqStatus::Ok
    })
}

/// # Safety
/// `series` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eq_series_free(series: *mut EqSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Fits one model by damped least squares in linear space.
///
/// # Safety
/// `series` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_fit(series: *const EqSeries, model: EqModel, out: *mut *mut EqFit) -> EqStatus {
    guard(|| {
        let Some(s) = series.as_ref() else { return fail(EqStatus::NullPointer, "null series") };
        if out.is_null() {
            return fail(EqStatus::NullPointer, "null output");
        }
        let m = ModelKind::from(model);
        if s.0.len() <= m.n_params() {
            return fail(EqStatus::InvalidArgument, format!("{m} needs more than {} points", m.n_params()));
        }
        boxed(out, EqFit(fit_nonlinear(m, &s.0)))
    })
}

/// Fits every model and writes the lowest-AIC usable one to `best`.
///
/// # Safety
/// `series` must be a live handle; `best` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_select_model(series: *const EqSeries, best: *mut *mut EqFit) -> EqStatus {
    guard(|| {
        let Some(s) = series.as_ref() else { return fail(EqStatus::NullPointer, "null series") };
        if best.is_null() {
            return fail(EqStatus::NullPointer, "null output");
        }
        match select_model(&s.0, &ModelKind::ALL) {
            Ok(fits) => boxed(best, EqFit(fits.into_iter().next().expect("five fits"))),
            Err(e) => fail(EqStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `fit` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn eq_fit_model(fit: *const EqFit) -> EqModel {
    (*fit).0.model.into()
}

/// Number of parameters, or 0 for NULL.
///
/// # Safety
/// `fit` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eq_fit_n_params(fit: *const EqFit) -> usize {
    fit.as_ref().map_or(0, |f| f.0.params.len())
}

/// Parameter `index` in the model's order (`a, b`; `a, tau, beta`; `a, k, mu`; `a, b`; `a, m, s`).
///
/// # Safety
/// `fit` must be a live handle; `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_fit_param(fit: *const EqFit, index: usize, value: *mut f64) -> EqStatus {
    guard(|| {
        let (Some(f), false) = (fit.as_ref(), value.is_null()) else { return fail(EqStatus::NullPointer, "null argument") };
        match f.0.params.get(index) {
            Some(&v) => {
                *value = v;
                EqStatus::Ok
            }
            None => fail(EqStatus::InvalidArgument, format!("parameter index {index} out of range")),
        }
    })
}

/// # Safety
/// `fit` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn eq_fit_rss(fit: *const EqFit) -> f64 {
    (*fit).0.rss
}

/// # Safety
/// `fit` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn eq_fit_aic(fit: *const EqFit) -> f64 {
    (*fit).0.aic
}

/// # Safety
/// `fit` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn eq_fit_converged(fit: *const EqFit) -> bool {
    (*fit).0.converged
}

/// # Safety
/// `fit` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn eq_fit_degenerate(fit: *const EqFit) -> bool {
    (*fit).0.degenerate
}

/// # Safety
/// `fit` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eq_fit_free(fit: *mut EqFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

/// RK4 integration of the closure growth equation, sampled at t = 1, 2, ….
///
/// # Safety
/// `params` must be readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_simulate_ode(
    params: *const EqClosureParams,
    t_end: f64,
    dt: f64,
    out: *mut *mut EqSeries,
) -> EqStatus {
    guard(|| {
        let (Some(p), false) = (params.as_ref(), out.is_null()) else { return fail(EqStatus::NullPointer, "null argument") };
        let params = ClosureParams { big_k: p.big_k, k: p.k, mu: p.mu, n0: p.n0 };
        match simulate_ode(&params, t_end, dt) {
            Ok(s) => boxed(out, EqSeries(s)),
            Err(e) => fail(EqStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Runs one discovery configuration.
///
/// # Safety
/// `config` must be readable; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_discover(config: *const EqArchConfig, out: *mut *mut EqTrajectory) -> EqStatus {
    guard(|| {
        let (Some(c), false) = (config.as_ref(), out.is_null()) else { return fail(EqStatus::NullPointer, "null argument") };
        let domain = match c.domain {
            EqDomain::Arith => Domain::Arith,
            EqDomain::Bool => Domain::Bool,
            EqDomain::List => Domain::List,
        };
        let generator = match c.generator {
            EqGenerator::Random => GeneratorKind::Random,
            EqGenerator::Compositional => GeneratorKind::Compositional,
            EqGenerator::Freq => GeneratorKind::Freq,
            EqGenerator::MdlGreedy => GeneratorKind::MdlGreedy,
        };
        let filter = match c.filter {
            EqFilter::Any => FilterKind::Any,
            EqFilter::Novelty => FilterKind::Novelty,
        };
        let arch = ArchConfig {
            domain,
            generator,
            filter,
            depth: c.depth,
            batch_size: c.batch_size,
            seed: c.seed,
            epochs: c.epochs,
        };
        if let Err(e) = arch.validate(c.allow_override) {
            return fail(EqStatus::InvalidArgument, e.to_string());
        }
        boxed(out, EqTrajectory(discover(&Substrate::new(domain), &arch)))
    })
}

/// Number of epochs, or 0 for NULL.
///
/// # Safety
/// `traj` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eq_trajectory_len(traj: *const EqTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.sizes.len())
}

/// Copies cumulative rule counts into `sizes` (capacity `cap`).
///
/// # Safety
/// `traj` must be a live handle; `sizes` must hold `cap` values.
#[no_mangle]
pub unsafe extern "C" fn eq_trajectory_sizes(traj: *const EqTrajectory, sizes: *mut u64, cap: usize) -> EqStatus {
    guard(|| {
        let (Some(t), false) = (traj.as_ref(), sizes.is_null()) else { return fail(EqStatus::NullPointer, "null argument") };
        if cap < t.0.sizes.len() {
            return fail(EqStatus::BufferTooSmall, format!("need {} slots", t.0.sizes.len()));
        }
        for (i, &s) in t.0.sizes.iter().enumerate() {
            *sizes.add(i) = s as u64;
        }
        EqStatus::Ok
    })
}

/// The trajectory as one JSON line; release with [`eq_string_free`].
///
/// # Safety
/// `traj` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn eq_trajectory_json(traj: *const EqTrajectory) -> *mut c_char {
    traj.as_ref()
        .and_then(|t| CString::new(t.0.to_json_line()).ok())
        .map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `traj` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eq_trajectory_free(traj: *mut EqTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn eq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a model name such as `saturating_pl`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `model` must be writable.
#[no_mangle]
pub unsafe extern "C" fn eq_model_from_name(name: *const c_char, model: *mut EqModel) -> EqStatus {
    guard(|| {
        if name.is_null() || model.is_null() {
            return fail(EqStatus::NullPointer, "null argument");
        }
        let Ok(s) = CStr::from_ptr(name).to_str() else { return fail(EqStatus::InvalidArgument, "name is not UTF-8") };
        match s.parse::<ModelKind>() {
            Ok(m) => {
                *model = m.into();
                EqStatus::Ok
            }
            Err(e) => fail(EqStatus::InvalidArgument, e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(t: &[f64], n: &[f64]) -> *mut EqSeries {
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { eq_series_new(t.as_ptr(), n.as_ptr(), t.len(), &mut out) }, EqStatus::Ok);
        out
    }

    #[test]
    fn fit_round_trip() {
        let t: Vec<f64> = (1..=40).map(f64::from).collect();
        let n: Vec<f64> = t.iter().map(|t| 3.0 * t.powf(0.7)).collect();
        let s = series(&t, &n);
        let mut f = ptr::null_mut();
        unsafe {
            assert_eq!(eq_fit(s, EqModel::PowerLaw, &mut f), EqStatus::Ok);
            assert!(eq_fit_converged(f));
            assert_eq!(eq_fit_n_params(f), 2);
            let mut b = 0.0;
            assert_eq!(eq_fit_param(f, 1, &mut b), EqStatus::Ok);
            assert!((b - 0.7).abs() < 1e-8);
            assert_eq!(eq_fit_param(f, 2, &mut b), EqStatus::InvalidArgument);
            assert!(!eq_last_error().is_null());
            eq_fit_free(f);
            eq_series_free(s);
        }
    }

    #[test]
    fn invalid_series_reports_error() {
        let mut out = ptr::null_mut();
        let st = unsafe { eq_series_new([2.0, 1.0].as_ptr(), [0.0, 1.0].as_ptr(), 2, &mut out) };
        assert_eq!(st, EqStatus::InvalidArgument);
        assert!(out.is_null());
        let msg = unsafe { CStr::from_ptr(eq_last_error()) }.to_str().unwrap();
        assert!(msg.contains("increasing"), "{msg}");
        assert_eq!(unsafe { eq_series_new(ptr::null(), ptr::null(), 3, &mut out) }, EqStatus::NullPointer);
    }

    #[test]
    fn ode_and_copy_out() {
        let p = EqClosureParams { big_k: 2.0, k: 0.0, mu: 0.0, n0: 0.0 };
        let mut s = ptr::null_mut();
        unsafe {
            assert_eq!(eq_simulate_ode(&p, 10.0, 0.01, &mut s), EqStatus::Ok);
            let len = eq_series_len(s);
            assert_eq!(len, 10);
            let (mut t, mut n) = (vec![0.0; len], vec![0.0; len]);
            assert_eq!(eq_series_copy(s, t.as_mut_ptr(), n.as_mut_ptr(), len - 1), EqStatus::BufferTooSmall);
            assert_eq!(eq_series_copy(s, t.as_mut_ptr(), n.as_mut_ptr(), len), EqStatus::Ok);
            assert!((n[9] - 20.0).abs() < 1e-9);
            eq_series_free(s);
        }
    }

    #[test]
    fn discovery_matches_the_library() {
        let c = EqArchConfig {
            domain: EqDomain::Bool,
            generator: EqGenerator::Random,
            filter: EqFilter::Any,
            depth: 3,
            batch_size: 80,
            seed: 0,
            epochs: 5,
            allow_override: false,
        };
        let mut tr = ptr::null_mut();
        unsafe {
            assert_eq!(eq_discover(&c, &mut tr), EqStatus::Ok);
            let mut sizes = vec![0u64; eq_trajectory_len(tr)];
            assert_eq!(eq_trajectory_sizes(tr, sizes.as_mut_ptr(), sizes.len()), EqStatus::Ok);
            let json = eq_trajectory_json(tr);
            let line = CStr::from_ptr(json).to_str().unwrap().to_string();
            eq_string_free(json);
            eq_trajectory_free(tr);
            let t = Trajectory::from_json_line(&line).unwrap();
            assert_eq!(t.sizes.iter().map(|&s| s as u64).collect::<Vec<_>>(), sizes);
        }
        let bad = EqArchConfig { batch_size: 7, ..c };
        assert_eq!(unsafe { eq_discover(&bad, &mut tr) }, EqStatus::InvalidArgument);
    }

    #[test]
    fn model_names() {
        let mut m = EqModel::Linear;
        let name = CString::new("saturating_pl").unwrap();
        assert_eq!(unsafe { eq_model_from_name(name.as_ptr(), &mut m) }, EqStatus::Ok);
        assert_eq!(m, EqModel::SaturatingPl);
        let bad = CString::new("logistic").unwrap();
        assert_eq!(unsafe { eq_model_from_name(bad.as_ptr(), &mut m) }, EqStatus::InvalidArgument);
    }

    #[test]
    fn free_functions_accept_null() {
        unsafe {
            eq_series_free(ptr::null_mut());
            eq_fit_free(ptr::null_mut());
            eq_trajectory_free(ptr::null_mut());
            eq_string_free(ptr::null_mut());
        }
        assert_eq!(unsafe { eq_series_len(ptr::null()) }, 0);
    }
}
