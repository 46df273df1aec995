//! C ABI for the ahlfors tensor calculus library.
//!
//! The surface is handle-based: a metric handle is built from the same
//! JSON document the `ahlfors` CLI consumes, and all field data crosses
//! the boundary as flat `double` buffers in the grid's row-major order
//! (last axis fastest).
//!
//! Buffer conventions, with `points = ahlfors_metric_point_count(m)` and
//! `n = ahlfors_metric_dimension(m)`:
//!
//! * scalar field: `points` doubles;
//! * one-form: `n` consecutive scalar blocks, component a at offset
//!   `a * points`;
//! * symmetric 2-tensor: `n * (n + 1) / 2` consecutive scalar blocks
//!   holding the upper triangle in lexicographic pair order
//!   (0,0), (0,1), ..., (0,n-1), (1,1), (1,2), ...
//!
//! Every function returns [`AhlforsStatus`]; on any failure a
//! human-readable message is stored per thread and can be read back with
//! [`ahlfors_last_error`]. Functions never unwind across the boundary:
//! a Rust panic is caught and reported as [`AhlforsStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ahlfors::ahlfors::{cauchy_ahlfors, div_sym};
use ahlfors::config::RunConfig;
use ahlfors::constraints::{hamiltonian_residual, momentum_residual, InitialData};
use ahlfors::decomp::{decompose_traceless, SolverConfig};
use ahlfors::fields::{OneForm, SymTensor2};
use ahlfors::grid::{GridSpec, ScalarField};
use ahlfors::report::{execute, Command};
use ahlfors::soliton::fit_almost_soliton;
use ahlfors::tensor::{metric_from_spec, ricci, scalar_curvature, Metric};
use ahlfors::Error;

/// Outcome of an API call. Anything other than `Ok` leaves a message
/// readable through `ahlfors_last_error`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AhlforsStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Malformed JSON, a band-limit violation, a degenerate metric, or
    /// any other rejected input.
    InvalidArgument = 2,
    /// The iterative solver ran out of iterations before reaching its
    /// tolerance.
    SolverFailure = 3,
    /// The linear system is inconsistent (right-hand side meets the
    /// operator kernel).
    InconsistentSystem = 4,
    /// An internal invariant failed; the library state is still valid
    /// but the call produced nothing.
    Panic = 5,
}

/// Opaque metric handle: a realized metric on its grid plus the solver
/// settings the configuration document selected.
pub struct AhlforsMetric {
    metric: Metric,
    solver: SolverConfig,
}

/// Convergence record of the traceless decomposition.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AhlforsDecompositionInfo {
    /// Conjugate-gradient iterations spent on the potential equation.
    pub cg_iterations: usize,
    /// Relative residual of the linear solve at termination.
    pub final_residual: f64,
    /// |<S theta, phi_tt>| scaled by the part norms; 0 when either part
    /// vanishes numerically.
    pub orthogonality_defect: f64,
    /// L2 norm of the divergence of the transverse part.
    pub tt_divergence_norm: f64,
    /// L2 norm of the metric trace of the transverse part.
    pub trace_norm: f64,
}

/// Summary of an almost-soliton fit.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AhlforsSolitonInfo {
    /// Relative size of the transverse remainder; 0 means the metric is
    /// an almost Ricci soliton on this grid.
    pub deviation: f64,
    /// sup - inf of the fitted soliton function; 0 for a genuine
    /// (constant-coefficient) soliton.
    pub lambda_variation: f64,
    /// Grid mean of the fitted soliton function.
    pub lambda_mean: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn remember(message: String) {
    // interior nul would truncate the CString constructor
    let clean = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(clean).unwrap_or_default();
    });
}

fn fail(status: AhlforsStatus, message: impl Into<String>) -> AhlforsStatus {
    remember(message.into());
    status
}

fn fail_error(err: Error) -> AhlforsStatus {
    let status = match err {
        Error::SolverFailure { .. } => AhlforsStatus::SolverFailure,
        Error::InconsistentSystem(_) => AhlforsStatus::InconsistentSystem,
        _ => AhlforsStatus::InvalidArgument,
    };
    fail(status, err.to_string())
}

/// Runs the body under a panic guard so no unwind crosses the ABI.
fn entry<F: FnOnce() -> AhlforsStatus>(body: F) -> AhlforsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| (*s).to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unidentified panic".to_string());
            fail(AhlforsStatus::Panic, format!("internal panic: {message}"))
        }
    }
}

/// Message from the most recent failing call on this thread, as a
/// nul-terminated UTF-8 string; empty if no call has failed yet. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ahlfors_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn ahlfors_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

unsafe fn read_str<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, AhlforsStatus> {
    if ptr.is_null() {
        return Err(fail(AhlforsStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(AhlforsStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

fn handle_ref<'a>(ptr: *const AhlforsMetric) -> Result<&'a AhlforsMetric, AhlforsStatus> {
    if ptr.is_null() {
        return Err(fail(AhlforsStatus::NullPointer, "metric handle is null"));
    }
    Ok(unsafe { &*ptr })
}

fn require<T>(ptr: *const T, name: &str) -> Result<(), AhlforsStatus> {
    if ptr.is_null() {
        return Err(fail(AhlforsStatus::NullPointer, format!("{name} is null")));
    }
    Ok(())
}

unsafe fn scalar_from_raw(grid: &GridSpec, ptr: *const f64) -> ScalarField {
    let values = std::slice::from_raw_parts(ptr, grid.total_points()).to_vec();
    ScalarField::from_values(grid, values)
}

unsafe fn oneform_from_raw(grid: &GridSpec, ptr: *const f64) -> OneForm {
    let points = grid.total_points();
    let components = (0..grid.dimension())
        .map(|a| scalar_from_raw(grid, ptr.add(a * points)))
        .collect();
    OneForm::from_components(components)
}

unsafe fn sym_from_raw(grid: &GridSpec, ptr: *const f64) -> SymTensor2 {
    let points = grid.total_points();
    let n = grid.dimension();
    let components = (0..n * (n + 1) / 2)
        .map(|block| scalar_from_raw(grid, ptr.add(block * points)))
        .collect();
    SymTensor2::from_components(grid, components)
}

unsafe fn write_scalar(field: &ScalarField, ptr: *mut f64) {
    let values = field.values();
    std::slice::from_raw_parts_mut(ptr, values.len()).copy_from_slice(values);
}

unsafe fn write_blocks(components: &[ScalarField], points: usize, ptr: *mut f64) {
    for (block, field) in components.iter().enumerate() {
        write_scalar(field, ptr.add(block * points));
    }
}

/// Builds a metric handle from a JSON configuration document. The
/// document uses the CLI schema: a `grid` block (resolution, optional
/// periods), a `metric` block (flat / conformal / perturbation) and an
/// optional `solver` block; command-specific blocks are accepted and
/// ignored. On success `*out` owns the handle; release it with
/// `ahlfors_metric_free`.
///
/// # Safety
/// `config_json` must be a nul-terminated string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn ahlfors_metric_new(
    config_json: *const c_char,
    out: *mut *mut AhlforsMetric,
) -> AhlforsStatus {
    entry(|| {
        if let Err(status) = require(out, "out") {
            return status;
        }
        let text = match read_str(config_json, "config_json") {
            Ok(text) => text,
            Err(status) => return status,
        };
        let config = match RunConfig::from_json(text) {
            Ok(config) => config,
            Err(err) => return fail_error(err),
        };
        let built = config
            .grid
            .build()
            .and_then(|grid| metric_from_spec(&config.metric, &grid))
            .and_then(|metric| Ok((metric, config.solver.build()?)));
        match built {
            Ok((metric, solver)) => {
                *out = Box::into_raw(Box::new(AhlforsMetric { metric, solver }));
                AhlforsStatus::Ok
            }
            Err(err) => fail_error(err),
        }
    })
}

/// Releases a handle returned by `ahlfors_metric_new`. Null is a no-op.
///
/// # Safety
/// `metric` must be null or a pointer obtained from `ahlfors_metric_new`
/// that has not been freed before.
#[no_mangle]
pub unsafe extern "C" fn ahlfors_metric_free(metric: *mut AhlforsMetric) {
    if !metric.is_null() {
        drop(Box::from_raw(metric));
    }
}

/// Number of grid axes, or 0 for a null handle.
#[no_mangle]
pub extern "C" fn ahlfors_metric_dimension(metric: *const AhlforsMetric) -> usize {
    match handle_ref(metric) {
        Ok(handle) => handle.metric.grid().dimension(),
        Err(_) => 0,
    }
}

/// Total number of grid points, or 0 for a null handle.
#[no_mangle]
pub extern "C" fn ahlfors_metric_point_count(metric: *const AhlforsMetric) -> usize {
    match handle_ref(metric) {
        Ok(handle) => handle.metric.grid().total_points(),
        Err(_) => 0,
    }
}

/// Copies the metric components into `out` (symmetric-tensor layout).
///
/// # Safety
/// `out` must point to `n*(n+1)/2 * points` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ahlfors_metric_components(
    metric: *const AhlforsMetric,
    out: *mut f64,
) -> AhlforsStatus {
    entry(|| {
        let handle = match handle_ref(metric) {
            Ok(handle) => handle,
            Err(status) => return status,
        };
        if let Err(status) = require(out, "out") {
            return status;
        }
        let grid = handle.metric.grid();
        write_blocks(handle.metric.components().components(), grid.total_points(), out);
        AhlforsStatus::Ok
    })
}

/// Evaluates the scalar curvature of the metric into `out` (scalar
/// layout).
///
/// # Safety
/// `out` must point to `points` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ahlfors_scalar_curvature(
    metric: *const AhlforsMetric,
    out: *mut f64,
) -> AhlforsStatus {
    entry(|| {
        let handle = match handle_ref(metric) {
            Ok(handle) => handle,
            Err(status) => return status,
        };
        if let Err(status) = require(out, "out") {
            return status;
        }
        let s = scalar_curvature(&handle.metric, &ricci(&handle.metric));
        write_scalar(&s, out);
        AhlforsStatus::Ok
    })
}

/// Applies the trace-adjusted conformal Killing operator to the
/// one-form in `theta` and writes the resulting trace-free symmetric
/// tensor to `out`.
///
/// # Safety
/// `theta` must point to `n * points` readable doubles and `out` to
/// `n*(n+1)/2 * points` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ahlfors_conformal_killing(
    metric: *const AhlforsMetric,
    theta: *const f64,
    out: *mut f64,
) -> AhlforsStatus {
    entry(|| {
        let handle = match handle_ref(metric) {
            Ok(handle) => handle,
            Err(status) => return status,
        };
        if let Err(status) = require(theta, "theta").and_then(|()| require(out, "out")) {
            return status;
        }
        let grid = handle.metric.grid();
        let theta = oneform_from_raw(grid, theta);
        let phi = cauchy_ahlfors(&handle.metric, &theta);
        write_blocks(phi.components(), grid.total_points(), out);
        AhlforsStatus::Ok
    })
}

/// Writes the divergence of the symmetric tensor in `phi` (taken in the
/// metric's volume-weighted sense, the exact adjoint of the conformal
/// Killing operator) to the one-form buffer `out`.
///
/// # Safety
/// `phi` must point to `n*(n+1)/2 * points` readable doubles and `out`
/// to `n * points` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ahlfors_divergence(
    metric: *const AhlforsMetric,
    phi: *const f64,
    out: *mut f64,
) -> AhlforsStatus {
    entry(|| {
        let handle = match handle_ref(metric) {
            Ok(handle) => handle,
            Err(status) => return status,
        };
        if let Err(status) = require(phi, "phi").and_then(|()| require(out, "out")) {
            return status;
        }
        let grid = handle.metric.grid();
        let phi = sym_from_raw(grid, phi);
        let theta = div_sym(&handle.metric, &phi);
        write_blocks(theta.components(), grid.total_points(), out);
        AhlforsStatus::Ok
    })
}

/// Splits the trace-free symmetric tensor in `phi` into a conformal
/// Killing image plus a transverse-traceless remainder, using the
/// handle's solver settings. Output pointers may be null to skip a
/// part: `out_theta` receives the potential one-form, `out_s_theta` its
/// image under the conformal Killing operator, `out_phi_tt` the
/// transverse remainder, and `info` the convergence record. Rejects
/// input whose metric trace is not numerically zero.
///
/// # Safety
/// `phi` must point to `n*(n+1)/2 * points` readable doubles; non-null
/// outputs must be writable with the layouts documented at the top of
/// the header.
#[no_mangle]
pub unsafe extern "C" fn ahlfors_decompose(
    metric: *const AhlforsMetric,
    phi: *const f64,
    out_theta: *mut f64,
    out_s_theta: *mut f64,
    out_phi_tt: *mut f64,
    info: *mut AhlforsDecompositionInfo,
) -> AhlforsStatus {
    entry(|| {
        let handle = match handle_ref(metric) {
            Ok(handle) => handle,
            Err(status) => return status,
        };
        if let Err(status) = require(phi, "phi") {
            return status;
        }
        let grid = handle.metric.grid();
        let points = grid.total_points();
        let phi = sym_from_raw(grid, phi);
        let dec = match decompose_traceless(&handle.metric, &phi, &handle.solver) {
            Ok(dec) => dec,
            Err(err) => return fail_error(err),
        };
        if !out_theta.is_null() {
            write_blocks(dec.theta.components(), points, out_theta);
        }
        if !out_s_theta.is_null() {
            write_blocks(dec.s_theta.components(), points, out_s_theta);
        }
        if !out_phi_tt.is_null() {
            write_blocks(dec.phi_tt.components(), points, out_phi_tt);
        }
        if !info.is_null() {
            let d = &dec.diagnostics;
            *info = AhlforsDecompositionInfo {
                cg_iterations: d.cg_iterations,
                final_residual: d.final_residual,
                orthogonality_defect: d.orthogonality_defect,
                tt_divergence_norm: d.tt_divergence_norm,
                trace_norm: d.trace_norm,
            };
        }
        AhlforsStatus::Ok
    })
}

/// Fits the almost-soliton structure of the metric: decomposes the
/// trace-free Ricci tensor and returns the potential one-form
/// (`out_theta`), the pointwise soliton function (`out_lambda`, scalar
/// layout), the transverse remainder (`out_phi_tt`) and a fit summary
/// (`info`). Output pointers may be null to skip a part.
///
/// # Safety
/// Non-null outputs must be writable with the documented layouts.
#[no_mangle]
pub unsafe extern "C" fn ahlfors_soliton_fit(
    metric: *const AhlforsMetric,
    out_theta: *mut f64,
    out_lambda: *mut f64,
    out_phi_tt: *mut f64,
    info: *mut AhlforsSolitonInfo,
) -> AhlforsStatus {
    entry(|| {
        let handle = match handle_ref(metric) {
            Ok(handle) => handle,
            Err(status) => return status,
        };
        let points = handle.metric.grid().total_points();
        let fit = match fit_almost_soliton(&handle.metric, &handle.solver) {
            Ok(fit) => fit,
            Err(err) => return fail_error(err),
        };
        if !out_theta.is_null() {
            write_blocks(fit.theta.components(), points, out_theta);
        }
        if !out_lambda.is_null() {
            write_scalar(&fit.lambda_field, out_lambda);
        }
        if !out_phi_tt.is_null() {
            write_blocks(fit.phi_tt.components(), points, out_phi_tt);
        }
        if !info.is_null() {
            *info = AhlforsSolitonInfo {
                deviation: fit.deviation,
                lambda_variation: fit.lambda_variation,
                lambda_mean: fit.lambda_field.mean(),
            };
        }
        AhlforsStatus::Ok
    })
}

/// Evaluates the vacuum constraint residuals of the initial data set
/// `(g, K)` with `K` the symmetric tensor in `second_fundamental`: the
/// scalar (Hamiltonian) residual into `out_hamiltonian` (scalar layout)
/// and the vector (momentum) residual into `out_momentum` (one-form
/// layout). Either output may be null to skip it. Both residuals vanish
/// exactly when the data set satisfies the vacuum constraints.
///
/// # Safety
/// `second_fundamental` must point to `n*(n+1)/2 * points` readable
/// doubles; non-null outputs must be writable with the documented
/// layouts.
#[no_mangle]
pub unsafe extern "C" fn ahlfors_constraint_residuals(
    metric: *const AhlforsMetric,
    second_fundamental: *const f64,
    out_hamiltonian: *mut f64,
    out_momentum: *mut f64,
) -> AhlforsStatus {
    entry(|| {
        let handle = match handle_ref(metric) {
            Ok(handle) => handle,
            Err(status) => return status,
        };
        if let Err(status) = require(second_fundamental, "second_fundamental") {
            return status;
        }
        let grid = handle.metric.grid();
        let points = grid.total_points();
        let k = sym_from_raw(grid, second_fundamental);
        let data = match InitialData::new(handle.metric.clone(), k) {
            Ok(data) => data,
            Err(err) => return fail_error(err),
        };
        if !out_hamiltonian.is_null() {
            write_scalar(&hamiltonian_residual(&data), out_hamiltonian);
        }
        if !out_momentum.is_null() {
            write_blocks(momentum_residual(&data).components(), points, out_momentum);
        }
        AhlforsStatus::Ok
    })
}

/// Runs one batch command (`"verify"`, `"decompose"`, `"soliton"`,
/// `"constraints"` or `"gen-tt"`) against a JSON configuration document
/// and hands back the JSON report through `out_report`. The status
/// reflects execution only; whether the report's checks passed is the
/// `"passed"` field inside the document. Free the returned string with
/// `ahlfors_string_free`.
///
/// # Safety
/// `command` and `config_json` must be nul-terminated strings and
/// `out_report` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ahlfors_run_json(
    command: *const c_char,
    config_json: *const c_char,
    out_report: *mut *mut c_char,
) -> AhlforsStatus {
    entry(|| {
        if let Err(status) = require(out_report, "out_report") {
            return status;
        }
        let name = match read_str(command, "command") {
            Ok(name) => name,
            Err(status) => return status,
        };
        let text = match read_str(config_json, "config_json") {
            Ok(text) => text,
            Err(status) => return status,
        };
        let all = [
            Command::Verify,
            Command::Decompose,
            Command::Soliton,
            Command::Constraints,
            Command::GenTt,
        ];
        let Some(command) = all.into_iter().find(|c| c.name() == name) else {
            return fail(
                AhlforsStatus::InvalidArgument,
                format!("unknown command {name:?}; expected one of verify, decompose, soliton, constraints, gen-tt"),
            );
        };
        let config = match RunConfig::from_json(text) {
            Ok(config) => config,
            Err(err) => return fail_error(err),
        };
        match execute(command, &config) {
            Ok(output) => {
                let json = CString::new(output.report.to_json()).unwrap_or_default();
                *out_report = json.into_raw();
                AhlforsStatus::Ok
            }
            Err(err) => fail_error(err),
        }
    })
}

/// Frees a string returned by `ahlfors_run_json`. Null is a no-op.
///
/// # Safety
/// `text` must be null or a pointer obtained from this library that has
/// not been freed before.
#[no_mangle]
pub unsafe extern "C" fn ahlfors_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}
