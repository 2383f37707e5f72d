//! C ABI for the chemorep solver.
//!
//! Opaque handles (`ChemorepConfig`, `ChemorepSim`) own all Rust state;
//! every call returns a [`ChemorepStatus`] code (or a null pointer for
//! constructors) and panics are caught at the boundary. The most recent
//! error message is kept per thread and readable through
//! [`chemorep_last_error_message`].
//!
//! The generated header lives at `include/chemorep.h`.

use chemorep::fem::{scalar_norms, vector_norms};
use chemorep::mesh::Mesh;
use chemorep::mms::ExactSolution;
use chemorep::projection::Projector;
use chemorep::scheme::{Method, SolverConfig, Spaces, State, Stepper};
use chemorep::vtk::write_vtk;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChemorepStatus {
    ChemorepOk = 0,
    ChemorepNullArgument = 1,
    ChemorepInvalidArgument = 2,
    ChemorepSolverFailure = 3,
    ChemorepIoError = 4,
    ChemorepPanic = 5,
}

use ChemorepStatus::*;

/// Per-step diagnostics mirrored across the ABI.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ChemorepStepInfo {
    pub step: u64,
    pub time: f64,
    /// E(u, sigma) = 1/2 ||u||^2 + 1/4 ||sigma||^2.
    pub energy: f64,
    /// Residual of the discrete energy law (zero for homogeneous runs up
    /// to solver tolerance).
    pub energy_law_residual: f64,
    /// Total mass of u.
    pub mass: f64,
    /// Residual of the v balance identity.
    pub v_mass_balance_residual: f64,
    pub nonlinear_iterations: u32,
}

/// Builder for a simulation; not thread-shareable.
pub struct ChemorepConfig {
    m: usize,
    k: f64,
    t_final: f64,
    method: Method,
    tol: f64,
    linear_tol: f64,
    forced: bool,
}

impl Default for ChemorepConfig {
    fn default() -> Self {
        ChemorepConfig {
            m: 40,
            k: 1e-5,
            t_final: 1e-3,
            method: Method::Newton,
            tol: 1e-6,
            linear_tol: 1e-10,
            forced: true,
        }
    }
}

/// A live simulation: spaces, operators and the current state.
pub struct ChemorepSim {
    stepper: Stepper,
    state: State,
    last_info: ChemorepStepInfo,
    forced: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

/// Most recent error message on this thread; the pointer stays valid until
/// the next failing call on the same thread. Never null.
#[no_mangle]
pub extern "C" fn chemorep_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

fn guard<T>(default: T, body: impl FnOnce() -> T) -> T {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(v) => v,
        Err(_) => {
            set_error("panic across the FFI boundary");
            default
        }
    }
}

/// Creates a config with the reference defaults (m = 40, k = 1e-5,
/// T = 1e-3, Newton, tol = 1e-6, manufactured forcing on).
#[no_mangle]
pub extern "C" fn chemorep_config_new() -> *mut ChemorepConfig {
    Box::into_raw(Box::new(ChemorepConfig::default()))
}

/// Frees a config; null is ignored.
///
/// # Safety
/// `config` must come from [`chemorep_config_new`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn chemorep_config_free(config: *mut ChemorepConfig) {
    if !config.is_null() {
        drop(unsafe { Box::from_raw(config) });
    }
}

unsafe fn config_mut<'a>(config: *mut ChemorepConfig) -> Option<&'a mut ChemorepConfig> {
    unsafe { config.as_mut() }
}

/// Sets the mesh subdivisions of the unit square (m >= 1).
///
/// # Safety
/// `config` must be a live pointer from [`chemorep_config_new`].
#[no_mangle]
pub unsafe extern "C" fn chemorep_config_set_mesh(
    config: *mut ChemorepConfig,
    m: u32,
) -> ChemorepStatus {
    let Some(config) = (unsafe { config_mut(config) }) else {
        set_error("config is null");
        return ChemorepNullArgument;
    };
    if m == 0 {
        set_error("mesh subdivisions must be >= 1");
        return ChemorepInvalidArgument;
    }
    config.m = m as usize;
    ChemorepOk
}

/// Sets the time step and final time; T/k must be a positive integer.
///
/// # Safety
/// `config` must be a live pointer from [`chemorep_config_new`].
#[no_mangle]
pub unsafe extern "C" fn chemorep_config_set_time(
    config: *mut ChemorepConfig,
    k: f64,
    t_final: f64,
) -> ChemorepStatus {
    let Some(config) = (unsafe { config_mut(config) }) else {
        set_error("config is null");
        return ChemorepNullArgument;
    };
    let probe = SolverConfig::new(k, t_final);
    if let Err(e) = probe.validate() {
        set_error(&e.to_string());
        return ChemorepInvalidArgument;
    }
    config.k = k;
    config.t_final = t_final;
    ChemorepOk
}

/// Selects the nonlinear method: "picard" or "newton".
///
/// # Safety
/// `config` must be live; `method` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn chemorep_config_set_method(
    config: *mut ChemorepConfig,
    method: *const c_char,
) -> ChemorepStatus {
    let Some(config) = (unsafe { config_mut(config) }) else {
        set_error("config is null");
        return ChemorepNullArgument;
    };
    if method.is_null() {
        set_error("method is null");
        return ChemorepNullArgument;
    }
    let name = match unsafe { CStr::from_ptr(method) }.to_str() {
        Ok(s) => s,
        Err(_) => {
            set_error("method is not valid UTF-8");
            return ChemorepInvalidArgument;
        }
    };
    match chemorep::config::parse_method(name) {
        Ok(m) => {
            config.method = m;
            ChemorepOk
        }
        Err(e) => {
            set_error(&e.to_string());
            ChemorepInvalidArgument
        }
    }
}

/// Sets the nonlinear stopping tolerance.
///
/// # Safety
/// `config` must be a live pointer from [`chemorep_config_new`].
#[no_mangle]
pub unsafe extern "C" fn chemorep_config_set_tolerance(
    config: *mut ChemorepConfig,
    tol: f64,
) -> ChemorepStatus {
    let Some(config) = (unsafe { config_mut(config) }) else {
        set_error("config is null");
        return ChemorepNullArgument;
    };
    if !(tol > 0.0) {
        set_error("tol must be positive");
        return ChemorepInvalidArgument;
    }
    config.tol = tol;
    ChemorepOk
}

/// Sets the relative residual of the linear solves.
///
/// # Safety
/// `config` must be a live pointer from [`chemorep_config_new`].
#[no_mangle]
pub unsafe extern "C" fn chemorep_config_set_linear_tolerance(
    config: *mut ChemorepConfig,
    linear_tol: f64,
) -> ChemorepStatus {
    let Some(config) = (unsafe { config_mut(config) }) else {
        set_error("config is null");
        return ChemorepNullArgument;
    };
    if !(linear_tol > 0.0) {
        set_error("linear_tol must be positive");
        return ChemorepInvalidArgument;
    }
    config.linear_tol = linear_tol;
    ChemorepOk
}

/// Enables (nonzero) or disables (zero) the manufactured-solution forcing
/// terms. Disabled means the homogeneous, energy-decreasing model.
///
/// # Safety
/// `config` must be a live pointer from [`chemorep_config_new`].
#[no_mangle]
pub unsafe extern "C" fn chemorep_config_set_manufactured_forcing(
    config: *mut ChemorepConfig,
    enabled: i32,
) -> ChemorepStatus {
    let Some(config) = (unsafe { config_mut(config) }) else {
        set_error("config is null");
        return ChemorepNullArgument;
    };
    config.forced = enabled != 0;
    ChemorepOk
}

/// Builds a simulation from a config: P1/P1/P2 spaces on the uniform
/// unit-square mesh, initial data projected from the reference fields.
/// Returns null on failure (see [`chemorep_last_error_message`]).
///
/// # Safety
/// `config` must be a live pointer from [`chemorep_config_new`].
#[no_mangle]
pub unsafe extern "C" fn chemorep_sim_new(config: *const ChemorepConfig) -> *mut ChemorepSim {
    let Some(config) = (unsafe { config.as_ref() }) else {
        set_error("config is null");
        return std::ptr::null_mut();
    };
    guard(std::ptr::null_mut(), || {
        let build = || -> chemorep::Result<ChemorepSim> {
            let exact = ExactSolution::new();
            let mesh = Arc::new(Mesh::unit_square(config.m)?);
            let spaces = Spaces::standard(mesh)?;
            let projector = Projector::new(&spaces)?;
            let state = projector.initialize(&exact.u, &exact.sigma, &exact.v)?;
            let mut sc = SolverConfig::new(config.k, config.t_final);
            sc.method = config.method;
            sc.tol = config.tol;
            sc.linear_tol = config.linear_tol;
            let forcing = config.forced.then(|| exact.forcing());
            let stepper = Stepper::new(spaces, sc, forcing)?;
            Ok(ChemorepSim {
                stepper,
                state,
                last_info: ChemorepStepInfo::default(),
                forced: config.forced,
            })
        };
        match build() {
            Ok(sim) => Box::into_raw(Box::new(sim)),
            Err(e) => {
                set_error(&e.to_string());
                std::ptr::null_mut()
            }
        }
    })
}

/// Frees a simulation; null is ignored.
///
/// # Safety
/// `sim` must come from [`chemorep_sim_new`] and not be used again.
#[no_mangle]
pub unsafe extern "C" fn chemorep_sim_free(sim: *mut ChemorepSim) {
    if !sim.is_null() {
        drop(unsafe { Box::from_raw(sim) });
    }
}

/// Advances one backward-Euler step; fills `info` when non-null.
///
/// # Safety
/// `sim` must be live; `info` must be null or valid for writing.
#[no_mangle]
pub unsafe extern "C" fn chemorep_sim_advance(
    sim: *mut ChemorepSim,
    info: *mut ChemorepStepInfo,
) -> ChemorepStatus {
    let Some(sim) = (unsafe { sim.as_mut() }) else {
        set_error("sim is null");
        return ChemorepNullArgument;
    };
    guard(ChemorepPanic, || match sim.stepper.step(&sim.state) {
        Ok((state, report)) => {
            sim.state = state;
            sim.last_info = ChemorepStepInfo {
                step: report.n as u64,
                time: report.t,
                energy: report.energy,
                energy_law_residual: report.energy_law_residual,
                mass: report.mass,
                v_mass_balance_residual: report.v_mass_balance_residual,
                nonlinear_iterations: report.nonlinear_iterations as u32,
            };
            if let Some(out) = unsafe { info.as_mut() } {
                *out = sim.last_info;
            }
            ChemorepOk
        }
        Err(e) => {
            set_error(&e.to_string());
            ChemorepSolverFailure
        }
    })
}

/// Advances `n_steps` steps.
///
/// # Safety
/// `sim` must be a live pointer from [`chemorep_sim_new`].
#[no_mangle]
pub unsafe extern "C" fn chemorep_sim_run(sim: *mut ChemorepSim, n_steps: u64) -> ChemorepStatus {
    for _ in 0..n_steps {
        let status = unsafe { chemorep_sim_advance(sim, std::ptr::null_mut()) };
        if status != ChemorepOk {
            return status;
        }
    }
    ChemorepOk
}

/// Step index of the current state (0 before the first advance).
///
/// # Safety
/// `sim` must be a live pointer or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn chemorep_sim_step_count(sim: *const ChemorepSim) -> u64 {
    unsafe { sim.as_ref() }.map_or(0, |s| s.state.n as u64)
}

/// Simulation time of the current state.
///
/// # Safety
/// `sim` must be a live pointer or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn chemorep_sim_time(sim: *const ChemorepSim) -> f64 {
    unsafe { sim.as_ref() }.map_or(0.0, |s| s.state.t)
}

/// Diagnostics of the most recent step.
///
/// # Safety
/// `sim` must be live; `info` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn chemorep_sim_last_step_info(
    sim: *const ChemorepSim,
    info: *mut ChemorepStepInfo,
) -> ChemorepStatus {
    let Some(sim) = (unsafe { sim.as_ref() }) else {
        set_error("sim is null");
        return ChemorepNullArgument;
    };
    let Some(out) = (unsafe { info.as_mut() }) else {
        set_error("info is null");
        return ChemorepNullArgument;
    };
    *out = sim.last_info;
    ChemorepOk
}

/// L2 and H1 errors of a field ("u", "sigma" or "v") against the
/// manufactured solution at the current time. Only meaningful when the
/// manufactured forcing is enabled.
///
/// # Safety
/// `sim` must be live; `field` NUL-terminated; the out pointers null or
/// valid for writing.
#[no_mangle]
pub unsafe extern "C" fn chemorep_sim_error_norms(
    sim: *const ChemorepSim,
    field: *const c_char,
    l2_out: *mut f64,
    h1_out: *mut f64,
) -> ChemorepStatus {
    let Some(sim) = (unsafe { sim.as_ref() }) else {
        set_error("sim is null");
        return ChemorepNullArgument;
    };
    if field.is_null() {
        set_error("field is null");
        return ChemorepNullArgument;
    }
    if !sim.forced {
        set_error("error norms need the manufactured forcing enabled");
        return ChemorepInvalidArgument;
    }
    let name = match unsafe { CStr::from_ptr(field) }.to_str() {
        Ok(s) => s,
        Err(_) => {
            set_error("field is not valid UTF-8");
            return ChemorepInvalidArgument;
        }
    };
    guard(ChemorepPanic, || {
        let exact = ExactSolution::new();
        let t = sim.state.t;
        let (l2, h1) = match name {
            "u" => {
                let n = scalar_norms(&sim.state.u, Some((&exact.u, t)));
                (n.l2, n.h1)
            }
            "sigma" => {
                let n = vector_norms(&sim.state.sigma, Some((&exact.sigma, t)));
                (n.l2, n.h1)
            }
            "v" => {
                let n = scalar_norms(&sim.state.v, Some((&exact.v, t)));
                (n.l2, n.h1)
            }
            other => {
                set_error(&format!("unknown field '{other}' (expected u|sigma|v)"));
                return ChemorepInvalidArgument;
            }
        };
        if let Some(out) = unsafe { l2_out.as_mut() } {
            *out = l2;
        }
        if let Some(out) = unsafe { h1_out.as_mut() } {
            *out = h1;
        }
        ChemorepOk
    })
}

/// Writes the current state as legacy ASCII VTK.
///
/// # Safety
/// `sim` must be live; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn chemorep_sim_write_vtk(
    sim: *const ChemorepSim,
    path: *const c_char,
) -> ChemorepStatus {
    let Some(sim) = (unsafe { sim.as_ref() }) else {
        set_error("sim is null");
        return ChemorepNullArgument;
    };
    if path.is_null() {
        set_error("path is null");
        return ChemorepNullArgument;
    }
    let path = match unsafe { CStr::from_ptr(path) }.to_str() {
        Ok(s) => s,
        Err(_) => {
            set_error("path is not valid UTF-8");
            return ChemorepInvalidArgument;
        }
    };
    guard(ChemorepPanic, || {
        match write_vtk(&sim.state, Path::new(path)) {
            Ok(()) => ChemorepOk,
            Err(e) => {
                set_error(&e.to_string());
                ChemorepIoError
            }
        }
    })
}
