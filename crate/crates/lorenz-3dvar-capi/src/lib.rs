// Validation uses `!(x >= 0.0)` so that NaN fails the check too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! C ABI for the `lorenz-3dvar` library.
//!
//! Handles are opaque pointers created and destroyed by the paired
//! `*_new`/`*_free` functions; every fallible call returns an [`L63Status`]
//! and writes results through out-pointers. The generated header lives at
//! `include/lorenz_3dvar.h`.

use std::ffi::c_char;

use lorenz_3dvar::bounds::asymptotic_bounds;
use lorenz_3dvar::dynamics::{solve, spin_up, LorenzParams, Scheme, StateVec, Trajectory};
use lorenz_3dvar::error::Error;
use lorenz_3dvar::filter_continuous::{run_continuous, FilterConfigContinuous};
use lorenz_3dvar::filter_discrete::{run_filter, ErrorRecord, FilterConfigDiscrete};
use lorenz_3dvar::harness::experiments::initial_mean;
use lorenz_3dvar::observation::{observe_discrete, ObsConfig};

/// Call outcome. Anything other than `OK` leaves out-pointers untouched.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L63Status {
    Ok = 0,
    /// A pointer argument was null.
    NullPointer = 1,
    /// A numeric argument failed validation.
    InvalidArgument = 2,
    /// Integration exceeded the overflow guard (unstable step).
    Divergence = 3,
    /// Two time grids that must nest exactly do not.
    GridMismatch = 4,
    /// No contraction certificate exists for this inflation ratio.
    NoContraction = 5,
}

fn status_of(err: &Error) -> L63Status {
    match err {
        Error::Divergence { .. } => L63Status::Divergence,
        Error::GridMismatch(_) => L63Status::GridMismatch,
        Error::NoContraction { .. } => L63Status::NoContraction,
        _ => L63Status::InvalidArgument,
    }
}

/// Lorenz parameters plus cached attractor constants (opaque).
pub struct L63Params(LorenzParams);

/// Uniformly sampled truth trajectory (opaque).
pub struct L63Trajectory(Trajectory);

/// Output of one filter run (opaque): means and error records on the
/// analysis grid.
pub struct L63FilterRun {
    times: Vec<f64>,
    means: Vec<StateVec>,
    errors: Vec<ErrorRecord>,
}

/// Every theoretical constant and bound for one configuration. Fields that
/// have no certificate in the configuration are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct L63BoundReport {
    pub k: f64,
    pub beta: f64,
    pub eta: f64,
    pub eps: f64,
    pub h: f64,
    pub m1: f64,
    pub m2: f64,
    pub m_max: f64,
    pub lambda_discrete: f64,
    pub h_c: f64,
    pub recursion_constant_sharp: f64,
    pub asymptotic_discrete: f64,
    pub lambda_continuous: f64,
    pub asymptotic_continuous: f64,
    pub eta_c: f64,
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn l63_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn l63_status_message(status: L63Status) -> *const c_char {
    let msg: &'static str = match status {
        L63Status::Ok => "ok\0",
        L63Status::NullPointer => "null pointer argument\0",
        L63Status::InvalidArgument => "invalid argument\0",
        L63Status::Divergence => "integration diverged (unstable step)\0",
        L63Status::GridMismatch => "time grids do not nest\0",
        L63Status::NoContraction => "no contraction certificate for this eta\0",
    };
    msg.as_ptr() as *const c_char
}

/// Create a parameter handle; requires `alpha, b > 1` and `r > 0`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn l63_params_new(
    alpha: f64,
    b: f64,
    r: f64,
    out: *mut *mut L63Params,
) -> L63Status {
    if out.is_null() {
        return L63Status::NullPointer;
    }
    match LorenzParams::new(alpha, b, r) {
        Ok(p) => {
            unsafe { *out = Box::into_raw(Box::new(L63Params(p))) };
            L63Status::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// # Safety
/// `p` must be null or a pointer previously returned by [`l63_params_new`]
/// and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn l63_params_free(p: *mut L63Params) {
    if !p.is_null() {
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Attractor radius-squared bound `K`; NaN on null.
///
/// # Safety
/// `p` must be null or a live parameter handle.
#[no_mangle]
pub unsafe extern "C" fn l63_params_k(p: *const L63Params) -> f64 {
    match unsafe { p.as_ref() } {
        Some(p) => p.0.k(),
        None => f64::NAN,
    }
}

/// Separation exponent `beta`; NaN on null.
///
/// # Safety
/// `p` must be null or a live parameter handle.
#[no_mangle]
pub unsafe extern "C" fn l63_params_beta(p: *const L63Params) -> f64 {
    match unsafe { p.as_ref() } {
        Some(p) => p.0.beta(),
        None => f64::NAN,
    }
}

/// Critical inflation ratio `eta_c = 4/K`; NaN on null.
///
/// # Safety
/// `p` must be null or a live parameter handle.
#[no_mangle]
pub unsafe extern "C" fn l63_params_eta_c(p: *const L63Params) -> f64 {
    match unsafe { p.as_ref() } {
        Some(p) => p.0.eta_c(),
        None => f64::NAN,
    }
}

/// Evaluate the full bound report for `(eta, eps, h)`.
///
/// # Safety
/// `p` must be a live parameter handle; `out` must point to writable storage
/// for one `L63BoundReport`.
#[no_mangle]
pub unsafe extern "C" fn l63_bound_report(
    p: *const L63Params,
    eta: f64,
    eps: f64,
    h: f64,
    out: *mut L63BoundReport,
) -> L63Status {
    let Some(params) = (unsafe { p.as_ref() }) else {
        return L63Status::NullPointer;
    };
    if out.is_null() {
        return L63Status::NullPointer;
    }
    match asymptotic_bounds(eta, eps, h, &params.0) {
        Ok(r) => {
            unsafe {
                *out = L63BoundReport {
                    k: r.k,
                    beta: r.beta,
                    eta: r.eta,
                    eps: r.eps,
                    h: r.h,
                    m1: r.m1,
                    m2: r.m2,
                    m_max: r.m_max,
                    lambda_discrete: r.lambda_discrete,
                    h_c: r.h_c,
                    recursion_constant_sharp: r.recursion_constant_sharp,
                    asymptotic_discrete: r.asymptotic_discrete.unwrap_or(f64::NAN),
                    lambda_continuous: r.lambda_continuous,
                    asymptotic_continuous: r.asymptotic_continuous.unwrap_or(f64::NAN),
                    eta_c: r.eta_c,
                };
            }
            L63Status::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Spin up from `(1, 1, 1)` for `t_burn` time units, then integrate the
/// horizon at step `dt` (explicit Euler, or RK4 when `use_rk4` is true).
///
/// # Safety
/// `p` must be a live parameter handle; `out` must point to writable storage
/// for one pointer.
#[no_mangle]
pub unsafe extern "C" fn l63_truth_generate(
    p: *const L63Params,
    t_burn: f64,
    horizon: f64,
    dt: f64,
    use_rk4: bool,
    out: *mut *mut L63Trajectory,
) -> L63Status {
    let Some(params) = (unsafe { p.as_ref() }) else {
        return L63Status::NullPointer;
    };
    if out.is_null() {
        return L63Status::NullPointer;
    }
    if !(t_burn >= 0.0) {
        return L63Status::InvalidArgument;
    }
    let scheme = if use_rk4 { Scheme::Rk4 } else { Scheme::ExplicitEuler };
    let result = spin_up(StateVec::new(1.0, 1.0, 1.0), t_burn, dt, &params.0)
        .and_then(|u0| solve(u0, horizon, dt, &params.0, scheme));
    match result {
        Ok(traj) => {
            unsafe { *out = Box::into_raw(Box::new(L63Trajectory(traj))) };
            L63Status::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// # Safety
/// `t` must be null or a pointer previously returned by
/// [`l63_truth_generate`] and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn l63_trajectory_free(t: *mut L63Trajectory) {
    if !t.is_null() {
        drop(unsafe { Box::from_raw(t) });
    }
}

/// Number of states in the trajectory; 0 on null.
///
/// # Safety
/// `t` must be null or a live trajectory handle.
#[no_mangle]
pub unsafe extern "C" fn l63_trajectory_len(t: *const L63Trajectory) -> usize {
    match unsafe { t.as_ref() } {
        Some(t) => t.0.len(),
        None => 0,
    }
}

/// Grid step of the trajectory; NaN on null.
///
/// # Safety
/// `t` must be null or a live trajectory handle.
#[no_mangle]
pub unsafe extern "C" fn l63_trajectory_dt(t: *const L63Trajectory) -> f64 {
    match unsafe { t.as_ref() } {
        Some(t) => t.0.dt,
        None => f64::NAN,
    }
}

/// Copy the states as `len x 3` row-major doubles `(x, y, z)`.
/// `cap` is the capacity of `out` in doubles and must be at least `3 len`.
///
/// # Safety
/// `t` must be a live trajectory handle; `out` must point to at least `cap`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn l63_trajectory_copy(
    t: *const L63Trajectory,
    out: *mut f64,
    cap: usize,
) -> L63Status {
    let Some(traj) = (unsafe { t.as_ref() }) else {
        return L63Status::NullPointer;
    };
    if out.is_null() {
        return L63Status::NullPointer;
    }
    let needed = traj.0.len() * 3;
    if cap < needed {
        return L63Status::InvalidArgument;
    }
    let dst = unsafe { std::slice::from_raw_parts_mut(out, needed) };
    for (k, s) in traj.0.states.iter().enumerate() {
        dst[3 * k] = s.x;
        dst[3 * k + 1] = s.y;
        dst[3 * k + 2] = s.z;
    }
    L63Status::Ok
}

fn make_run(times: Vec<f64>, means: Vec<StateVec>, errors: Vec<ErrorRecord>) -> *mut L63FilterRun {
    Box::into_raw(Box::new(L63FilterRun { times, means, errors }))
}

/// Run the discrete 3DVAR filter against a truth trajectory.
///
/// Observations `y_k = v_x(k h) + eps xi_k` are synthesized from `seed`; the
/// initial mean is the truth state plus a `delta0`-sized perturbation in a
/// seed-derived direction. `dt_model` must divide `h`, and `h` must sit on
/// the trajectory grid.
///
/// # Safety
/// `p` and `truth` must be live handles; `out` must point to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn l63_filter_discrete_run(
    p: *const L63Params,
    truth: *const L63Trajectory,
    eta: f64,
    eps: f64,
    h: f64,
    dt_model: f64,
    seed: u64,
    delta0: f64,
    out: *mut *mut L63FilterRun,
) -> L63Status {
    let (Some(params), Some(truth)) = (unsafe { p.as_ref() }, unsafe { truth.as_ref() }) else {
        return L63Status::NullPointer;
    };
    if out.is_null() {
        return L63Status::NullPointer;
    }
    if !(delta0 >= 0.0) {
        return L63Status::InvalidArgument;
    }
    let result = (|| {
        let cfg = FilterConfigDiscrete::new(eta, eps, h, dt_model)?;
        let data = observe_discrete(&truth.0, &ObsConfig::new(eps, h, seed)?)?;
        let m0 = initial_mean(truth.0.state(0), delta0, seed);
        run_filter(&truth.0, &data, m0, &cfg, &params.0)
    })();
    match result {
        Ok(run) => {
            unsafe { *out = make_run(run.times, run.means, run.errors) };
            L63Status::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Run the continuous 3DVAR filter along a truth trajectory (Euler-Maruyama
/// on the trajectory grid, noise drawn from `seed`).
///
/// # Safety
/// `p` and `truth` must be live handles; `out` must point to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn l63_filter_continuous_run(
    p: *const L63Params,
    truth: *const L63Trajectory,
    eta: f64,
    eps: f64,
    seed: u64,
    delta0: f64,
    out: *mut *mut L63FilterRun,
) -> L63Status {
    let (Some(params), Some(truth)) = (unsafe { p.as_ref() }, unsafe { truth.as_ref() }) else {
        return L63Status::NullPointer;
    };
    if out.is_null() {
        return L63Status::NullPointer;
    }
    if !(delta0 >= 0.0) {
        return L63Status::InvalidArgument;
    }
    let result = (|| {
        let cfg = FilterConfigContinuous::new(eta, eps, truth.0.dt, seed)?;
        let m0 = initial_mean(truth.0.state(0), delta0, seed);
        run_continuous(&truth.0, m0, &cfg, &params.0)
    })();
    match result {
        Ok(run) => {
            unsafe { *out = make_run(run.times, run.means, run.errors) };
            L63Status::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// # Safety
/// `r` must be null or a pointer previously returned by one of the filter
/// run constructors and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn l63_filter_run_free(r: *mut L63FilterRun) {
    if !r.is_null() {
        drop(unsafe { Box::from_raw(r) });
    }
}

/// Number of records in the run; 0 on null.
///
/// # Safety
/// `r` must be null or a live filter-run handle.
#[no_mangle]
pub unsafe extern "C" fn l63_filter_run_len(r: *const L63FilterRun) -> usize {
    match unsafe { r.as_ref() } {
        Some(r) => r.times.len(),
        None => 0,
    }
}

/// Copy the error process as `len x 4` row-major doubles
/// `(t, |d|^2, |Pd|^2, ||d||^2)`. `cap` must be at least `4 len`.
///
/// # Safety
/// `r` must be a live filter-run handle; `out` must point to at least `cap`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn l63_filter_run_copy_errors(
    r: *const L63FilterRun,
    out: *mut f64,
    cap: usize,
) -> L63Status {
    let Some(run) = (unsafe { r.as_ref() }) else {
        return L63Status::NullPointer;
    };
    if out.is_null() {
        return L63Status::NullPointer;
    }
    let needed = run.errors.len() * 4;
    if cap < needed {
        return L63Status::InvalidArgument;
    }
    let dst = unsafe { std::slice::from_raw_parts_mut(out, needed) };
    for (k, e) in run.errors.iter().enumerate() {
        dst[4 * k] = e.t;
        dst[4 * k + 1] = e.delta_sq;
        dst[4 * k + 2] = e.p_delta_sq;
        dst[4 * k + 3] = e.norm_sq;
    }
    L63Status::Ok
}

/// Copy the mean path as `len x 4` row-major doubles `(t, mx, my, mz)`.
/// `cap` must be at least `4 len`.
///
/// # Safety
/// `r` must be a live filter-run handle; `out` must point to at least `cap`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn l63_filter_run_copy_means(
    r: *const L63FilterRun,
    out: *mut f64,
    cap: usize,
) -> L63Status {
    let Some(run) = (unsafe { r.as_ref() }) else {
        return L63Status::NullPointer;
    };
    if out.is_null() {
        return L63Status::NullPointer;
    }
    let needed = run.times.len() * 4;
    if cap < needed {
        return L63Status::InvalidArgument;
    }
    let dst = unsafe { std::slice::from_raw_parts_mut(out, needed) };
    for (k, (&t, m)) in run.times.iter().zip(&run.means).enumerate() {
        dst[4 * k] = t;
        dst[4 * k + 1] = m.x;
        dst[4 * k + 2] = m.y;
        dst[4 * k + 3] = m.z;
    }
    L63Status::Ok
}
