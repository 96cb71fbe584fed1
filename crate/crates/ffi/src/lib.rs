//! C ABI for the dephasing toolkit: opaque parameter handles, status codes,
//! out-parameters. The header `include/dephase.h` is generated at build time
//! by cbindgen.
//!
//! Conventions: every function returning [`DephaseStatus`] writes its result
//! through out-pointers only on `Ok`. Bloch vectors cross the boundary as
//! `double[3]` in (rx, ry, rz) order. All times are in inverse-cutoff units
//! and angles in radians, as in the core crate.

use dephase_core::bloch::{Axis, BlochVector};
use dephase_core::maps::{
    cp_audit, propagate_fixed_dissipator, propagate_microscopic, propagate_uncontrolled,
    ControlProtocol, Mode, Pulse,
};
use dephase_core::optimizer;
use dephase_core::spectral::SpectralParams;
use dephase_core::Error;
use std::os::raw::c_char;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DephaseStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument was malformed (bad protocol, zero steps, ...).
    InvalidArgument = 2,
    /// An argument lay outside the mathematical domain.
    DomainError = 3,
    /// The requested protocol cannot be realized (no rate zero crossing,
    /// horizon too short, unsatisfiable boundary constraint).
    Infeasible = 4,
    /// The caller-supplied buffer cannot hold the result.
    BufferTooSmall = 5,
}

fn status_of(e: &Error) -> DephaseStatus {
    match e {
        Error::Domain(_) => DephaseStatus::DomainError,
        Error::Config(_) | Error::Input(_) | Error::UnsupportedProtocol(_)
        | Error::SingularState { .. } | Error::Io(_) => DephaseStatus::InvalidArgument,
        Error::NoCrossing { .. } | Error::HorizonTooShort { .. } | Error::Infeasible(_) => {
            DephaseStatus::Infeasible
        }
    }
}

/// Rotation axis selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DephaseAxis {
    X = 0,
    Y = 1,
    Z = 2,
}

impl DephaseAxis {
    fn to_axis(self) -> Axis {
        match self {
            DephaseAxis::X => Axis::X,
            DephaseAxis::Y => Axis::Y,
            DephaseAxis::Z => Axis::Z,
        }
    }
}

/// Opaque handle wrapping the bath parameters.
pub struct DephaseParams(SpectralParams);

/// Two-leg protocol summary produced by `dephase_controlled_optimum`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DephaseOptimum {
    pub t_tilde: f64,
    pub phi_in: f64,
    pub pulse_angle: f64,
    pub cbar_uncontrolled: f64,
    pub cbar_controlled: f64,
    pub cbar_controlled_microscopic: f64,
    pub feasible: bool,
}

/// Aggregated verdict of a complete-positivity audit.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DephaseCpReport {
    pub min_choi_eigenvalue: f64,
    pub worst_choi_time: f64,
    pub max_bloch_norm: f64,
    pub worst_norm_time: f64,
    pub cp_violating: bool,
}

/// Build a parameter handle for Ohmicity exponent `s` (1 < s <= 8). On
/// success the caller owns the handle and must release it with
/// `dephase_params_free`.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn dephase_params_new(
    s: f64,
    out: *mut *mut DephaseParams,
) -> DephaseStatus {
    if out.is_null() {
        return DephaseStatus::NullPointer;
    }
    match SpectralParams::new(s) {
        Ok(p) => {
            unsafe { *out = Box::into_raw(Box::new(DephaseParams(p))) };
            DephaseStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Release a handle created by `dephase_params_new`. Null is a no-op.
///
/// # Safety
/// `params` must be a handle from `dephase_params_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dephase_params_free(params: *mut DephaseParams) {
    if !params.is_null() {
        drop(unsafe { Box::from_raw(params) });
    }
}

unsafe fn borrow<'a>(p: *const DephaseParams) -> Option<&'a SpectralParams> {
    unsafe { p.as_ref() }.map(|h| &h.0)
}

macro_rules! scalar_eval {
    ($(#[$doc:meta])* $name:ident, |$p:ident, $x:ident| $body:expr) => {
        $(#[$doc])*
        ///
        /// # Safety
        /// `params` must be a live handle; `out` must point to a double.
        #[no_mangle]
        pub unsafe extern "C" fn $name(
            params: *const DephaseParams,
            $x: f64,
            out: *mut f64,
        ) -> DephaseStatus {
            let Some($p) = (unsafe { borrow(params) }) else {
                return DephaseStatus::NullPointer;
            };
            if out.is_null() {
                return DephaseStatus::NullPointer;
            }
            match $body {
                Ok(v) => {
                    unsafe { *out = v };
                    DephaseStatus::Ok
                }
                Err(e) => status_of(&e),
            }
        }
    };
}

scalar_eval!(
    /// Spectral density J(omega) = omega^s e^{-omega}.
    dephase_spectral_density,
    |p, omega| p.spectral_density(omega)
);
scalar_eval!(
    /// Dephasing decay rate gamma(t).
    dephase_decay_rate,
    |p, t| p.decay_rate(t)
);
scalar_eval!(
    /// Decoherence function Gamma(t); coherences decay as e^{-Gamma}.
    dephase_decoherence,
    |p, t| p.decoherence(t)
);
scalar_eval!(
    /// Phase generator (sine transform of the spectral density over omega^2).
    dephase_phase_generator,
    |p, t| p.phase_generator(t)
);

/// Post-pulse control phase y(t) for a pulse at `t_pulse` <= `t`.
///
/// # Safety
/// `params` must be a live handle; `out` must point to a double.
#[no_mangle]
pub unsafe extern "C" fn dephase_control_phase(
    params: *const DephaseParams,
    t: f64,
    t_pulse: f64,
    out: *mut f64,
) -> DephaseStatus {
    let Some(p) = (unsafe { borrow(params) }) else {
        return DephaseStatus::NullPointer;
    };
    if out.is_null() {
        return DephaseStatus::NullPointer;
    }
    match p.control_phase(t, t_pulse) {
        Ok(v) => {
            unsafe { *out = v };
            DephaseStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// All positive zero crossings of the decay rate, ascending. Writes at most
/// `capacity` values into `buf` and the true count into `n_written`; returns
/// `BufferTooSmall` when the count exceeds the capacity (the count is still
/// written).
///
/// # Safety
/// `buf` must point to at least `capacity` doubles; `n_written` to a size_t.
#[no_mangle]
pub unsafe extern "C" fn dephase_rate_zero_crossings(
    params: *const DephaseParams,
    buf: *mut f64,
    capacity: usize,
    n_written: *mut usize,
) -> DephaseStatus {
    let Some(p) = (unsafe { borrow(params) }) else {
        return DephaseStatus::NullPointer;
    };
    if n_written.is_null() || (capacity > 0 && buf.is_null()) {
        return DephaseStatus::NullPointer;
    }
    let roots = p.rate_zero_crossings();
    unsafe { *n_written = roots.len() };
    for (i, r) in roots.iter().take(capacity).enumerate() {
        unsafe { *buf.add(i) = *r };
    }
    if roots.len() > capacity {
        DephaseStatus::BufferTooSmall
    } else {
        DephaseStatus::Ok
    }
}

/// Dephasing interval for the control problem: pulse instant (first rate
/// zero crossing) and horizon (second crossing if any, else `default_t`).
///
/// # Safety
/// `params` must be a live handle; both out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn dephase_horizon(
    params: *const DephaseParams,
    default_t: f64,
    out_t_tilde: *mut f64,
    out_horizon: *mut f64,
) -> DephaseStatus {
    let Some(p) = (unsafe { borrow(params) }) else {
        return DephaseStatus::NullPointer;
    };
    if out_t_tilde.is_null() || out_horizon.is_null() {
        return DephaseStatus::NullPointer;
    }
    match p.horizon(default_t) {
        Ok(h) => {
            unsafe {
                *out_t_tilde = h.t_tilde;
                *out_horizon = h.t_horizon;
            }
            DephaseStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

unsafe fn read_bloch(r: *const f64) -> Option<BlochVector> {
    if r.is_null() {
        return None;
    }
    Some(unsafe { BlochVector::new(*r.add(0), *r.add(1), *r.add(2)) })
}

unsafe fn write_bloch(out: *mut f64, v: BlochVector) {
    unsafe {
        *out.add(0) = v.rx;
        *out.add(1) = v.ry;
        *out.add(2) = v.rz;
    }
}

/// Free dephasing of `r_in` (double[3]) to time `t`.
///
/// # Safety
/// `r_in` and `r_out` must each point to three doubles.
#[no_mangle]
pub unsafe extern "C" fn dephase_propagate_uncontrolled(
    params: *const DephaseParams,
    r_in: *const f64,
    t: f64,
    r_out: *mut f64,
) -> DephaseStatus {
    let Some(p) = (unsafe { borrow(params) }) else {
        return DephaseStatus::NullPointer;
    };
    let Some(r0) = (unsafe { read_bloch(r_in) }) else {
        return DephaseStatus::NullPointer;
    };
    if r_out.is_null() {
        return DephaseStatus::NullPointer;
    }
    if t < 0.0 {
        return DephaseStatus::DomainError;
    }
    unsafe { write_bloch(r_out, propagate_uncontrolled(r0, t, p)) };
    DephaseStatus::Ok
}

/// Fixed-dissipator evolution with one instantaneous pulse. The output may
/// leave the unit ball; that excursion is the point of the audit tooling.
///
/// # Safety
/// `r_in` and `r_out` must each point to three doubles.
#[no_mangle]
pub unsafe extern "C" fn dephase_propagate_fixed(
    params: *const DephaseParams,
    r_in: *const f64,
    pulse_time: f64,
    pulse_axis: DephaseAxis,
    pulse_angle: f64,
    t: f64,
    r_out: *mut f64,
) -> DephaseStatus {
    let Some(p) = (unsafe { borrow(params) }) else {
        return DephaseStatus::NullPointer;
    };
    let Some(r0) = (unsafe { read_bloch(r_in) }) else {
        return DephaseStatus::NullPointer;
    };
    if r_out.is_null() {
        return DephaseStatus::NullPointer;
    }
    if t < 0.0 {
        return DephaseStatus::DomainError;
    }
    let proto = match ControlProtocol::new(vec![Pulse {
        time: pulse_time,
        axis: pulse_axis.to_axis(),
        angle: pulse_angle,
    }]) {
        Ok(p) => p,
        Err(e) => return status_of(&e),
    };
    unsafe { write_bloch(r_out, propagate_fixed_dissipator(r0, &proto, t, p)) };
    DephaseStatus::Ok
}

/// Exact microscopic evolution with one instantaneous y pulse.
///
/// # Safety
/// `r_in` and `r_out` must each point to three doubles.
#[no_mangle]
pub unsafe extern "C" fn dephase_propagate_microscopic(
    params: *const DephaseParams,
    r_in: *const f64,
    pulse_time: f64,
    pulse_angle: f64,
    t: f64,
    r_out: *mut f64,
) -> DephaseStatus {
    let Some(p) = (unsafe { borrow(params) }) else {
        return DephaseStatus::NullPointer;
    };
    let Some(r0) = (unsafe { read_bloch(r_in) }) else {
        return DephaseStatus::NullPointer;
    };
    if r_out.is_null() {
        return DephaseStatus::NullPointer;
    }
    if t < 0.0 {
        return DephaseStatus::DomainError;
    }
    let proto = match ControlProtocol::single_y(pulse_time, pulse_angle) {
        Ok(p) => p,
        Err(e) => return status_of(&e),
    };
    match propagate_microscopic(r0, &proto, t, p) {
        Ok(v) => {
            unsafe { write_bloch(r_out, v) };
            DephaseStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Initial polar angle fixed by |r(0)| = |r(T)| = 1 for a pulse at `t_tilde`.
///
/// # Safety
/// `out` must point to a double.
#[no_mangle]
pub unsafe extern "C" fn dephase_solve_initial_angle(
    params: *const DephaseParams,
    t_horizon: f64,
    t_tilde: f64,
    out: *mut f64,
) -> DephaseStatus {
    let Some(p) = (unsafe { borrow(params) }) else {
        return DephaseStatus::NullPointer;
    };
    if out.is_null() {
        return DephaseStatus::NullPointer;
    }
    match optimizer::solve_initial_angle(p, t_horizon, t_tilde) {
        Ok(v) => {
            unsafe { *out = v };
            DephaseStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Build and evaluate the two-leg protocol over `[0, t_horizon]` with
/// `steps` quadrature intervals (0 selects the default resolution). When no
/// pulse instant exists, `feasible` is false and only the uncontrolled
/// average is meaningful.
///
/// # Safety
/// `out` must point to a `DephaseOptimum`.
#[no_mangle]
pub unsafe extern "C" fn dephase_controlled_optimum(
    params: *const DephaseParams,
    t_horizon: f64,
    steps: usize,
    out: *mut DephaseOptimum,
) -> DephaseStatus {
    let Some(p) = (unsafe { borrow(params) }) else {
        return DephaseStatus::NullPointer;
    };
    if out.is_null() {
        return DephaseStatus::NullPointer;
    }
    let steps = if steps == 0 { optimizer::DEFAULT_CBAR_STEPS } else { steps };
    match optimizer::controlled_average_coherence(p, t_horizon, steps) {
        Ok(r) => {
            unsafe {
                *out = DephaseOptimum {
                    t_tilde: r.t_tilde.unwrap_or(f64::NAN),
                    phi_in: r.phi_in.unwrap_or(f64::NAN),
                    pulse_angle: r.pulse_angle.unwrap_or(f64::NAN),
                    cbar_uncontrolled: r.cbar_uncontrolled,
                    cbar_controlled: r.cbar_controlled.unwrap_or(f64::NAN),
                    cbar_controlled_microscopic: r
                        .cbar_controlled_microscopic
                        .unwrap_or(f64::NAN),
                    feasible: r.feasible,
                };
            }
            DephaseStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Complete-positivity audit of the fixed-dissipator dynamics with one
/// y pulse, scanning `steps` times over `[0, t_max]` and `samples` initial
/// pure states.
///
/// # Safety
/// `out` must point to a `DephaseCpReport`.
#[no_mangle]
pub unsafe extern "C" fn dephase_cp_audit_fixed(
    params: *const DephaseParams,
    pulse_time: f64,
    pulse_angle: f64,
    t_max: f64,
    steps: usize,
    samples: usize,
    out: *mut DephaseCpReport,
) -> DephaseStatus {
    let Some(p) = (unsafe { borrow(params) }) else {
        return DephaseStatus::NullPointer;
    };
    if out.is_null() {
        return DephaseStatus::NullPointer;
    }
    let proto = match ControlProtocol::single_y(pulse_time, pulse_angle) {
        Ok(p) => p,
        Err(e) => return status_of(&e),
    };
    match cp_audit(&proto, p, t_max, steps, samples, Mode::Fixed) {
        Ok((_, r)) => {
            unsafe {
                *out = DephaseCpReport {
                    min_choi_eigenvalue: r.min_choi_eigenvalue,
                    worst_choi_time: r.worst_choi_time,
                    max_bloch_norm: r.max_bloch_norm,
                    worst_norm_time: r.worst_norm_time,
                    cp_violating: r.cp_violating,
                };
            }
            DephaseStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Static library version string (NUL-terminated, never freed).
#[no_mangle]
pub extern "C" fn dephase_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
