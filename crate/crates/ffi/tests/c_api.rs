//! Exercises the C ABI through the same raw-pointer surface a C caller
//! sees: JSON-built handles, flat buffers, status codes and the
//! thread-local error message.

use std::ffi::{CStr, CString};
use std::ptr;

use ahlfors::fields::{OneForm, SymTensor2};
use ahlfors::grid::{GridSpec, ScalarField};
use ahlfors_ffi::{
    ahlfors_conformal_killing, ahlfors_constraint_residuals, ahlfors_decompose,
    ahlfors_divergence, ahlfors_last_error, ahlfors_metric_components, ahlfors_metric_dimension,
    ahlfors_metric_free, ahlfors_metric_new, ahlfors_metric_point_count, ahlfors_run_json,
    ahlfors_scalar_curvature, ahlfors_soliton_fit, ahlfors_string_free, ahlfors_version,
    AhlforsDecompositionInfo, AhlforsMetric, AhlforsSolitonInfo, AhlforsStatus,
};

fn last_error() -> String {
    unsafe { CStr::from_ptr(ahlfors_last_error()) }
        .to_str()
        .unwrap()
        .to_string()
}

fn new_metric(config: &str) -> *mut AhlforsMetric {
    let json = CString::new(config).unwrap();
    let mut handle: *mut AhlforsMetric = ptr::null_mut();
    let status = unsafe { ahlfors_metric_new(json.as_ptr(), &mut handle) };
    assert_eq!(status, AhlforsStatus::Ok, "{}", last_error());
    assert!(!handle.is_null());
    handle
}

fn scalar_buffer<F: FnMut(&[f64]) -> f64>(grid: &GridSpec, f: F) -> Vec<f64> {
    ScalarField::from_fn(grid, f).values().to_vec()
}

fn oneform_buffer(form: &OneForm) -> Vec<f64> {
    form.components()
        .iter()
        .flat_map(|c| c.values().iter().copied())
        .collect()
}

fn sym_buffer(tensor: &SymTensor2) -> Vec<f64> {
    tensor
        .components()
        .iter()
        .flat_map(|c| c.values().iter().copied())
        .collect()
}

fn sup(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

const FLAT_3D: &str = r#"{ "grid": { "resolution": [8, 8, 8] }, "metric": { "kind": "flat" } }"#;
const CONFORMAL_2D: &str = r#"{ "grid": { "resolution": [16, 16] },
    "metric": { "kind": "conformal", "modes": [ { "amplitude": 0.1, "wavevector": [1, 0] } ] } }"#;

#[test]
fn version_is_a_static_string() {
    let version = unsafe { CStr::from_ptr(ahlfors_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn generated_header_covers_the_surface() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/ahlfors.h"
    ))
    .unwrap();
    for symbol in [
        "AhlforsStatus",
        "AhlforsMetric",
        "AhlforsDecompositionInfo",
        "AhlforsSolitonInfo",
        "ahlfors_last_error",
        "ahlfors_version",
        "ahlfors_metric_new",
        "ahlfors_metric_free",
        "ahlfors_metric_dimension",
        "ahlfors_metric_point_count",
        "ahlfors_metric_components",
        "ahlfors_scalar_curvature",
        "ahlfors_conformal_killing",
        "ahlfors_divergence",
        "ahlfors_decompose",
        "ahlfors_soliton_fit",
        "ahlfors_constraint_residuals",
        "ahlfors_run_json",
        "ahlfors_string_free",
    ] {
        assert!(header.contains(symbol), "header is missing {symbol}");
    }
}

#[test]
fn metric_handle_reports_its_shape() {
    let handle = new_metric(FLAT_3D);
    assert_eq!(ahlfors_metric_dimension(handle), 3);
    assert_eq!(ahlfors_metric_point_count(handle), 512);

    // flat metric components are the identity at every point
    let mut components = vec![0.0; 6 * 512];
    let status = unsafe { ahlfors_metric_components(handle, components.as_mut_ptr()) };
    assert_eq!(status, AhlforsStatus::Ok);
    let (diag, off) = components.split_at(512); // block (0,0) then (0,1)
    assert!(diag.iter().all(|&v| v == 1.0));
    assert!(off[..512].iter().all(|&v| v == 0.0));

    let mut curvature = vec![1.0; 512];
    let status = unsafe { ahlfors_scalar_curvature(handle, curvature.as_mut_ptr()) };
    assert_eq!(status, AhlforsStatus::Ok);
    assert!(sup(&curvature) <= 1e-12);

    unsafe { ahlfors_metric_free(handle) };
}

#[test]
fn null_handles_are_rejected_not_crashed() {
    assert_eq!(ahlfors_metric_dimension(ptr::null()), 0);
    assert_eq!(ahlfors_metric_point_count(ptr::null()), 0);

    let mut out = vec![0.0; 8];
    let status = unsafe { ahlfors_scalar_curvature(ptr::null(), out.as_mut_ptr()) };
    assert_eq!(status, AhlforsStatus::NullPointer);
    assert!(last_error().contains("null"));

    let json = CString::new(FLAT_3D).unwrap();
    let status = unsafe { ahlfors_metric_new(json.as_ptr(), ptr::null_mut()) };
    assert_eq!(status, AhlforsStatus::NullPointer);

    // freeing null is a documented no-op
    unsafe { ahlfors_metric_free(ptr::null_mut()) };
    unsafe { ahlfors_string_free(ptr::null_mut()) };
}

#[test]
fn malformed_configs_are_invalid_argument() {
    let mut handle: *mut AhlforsMetric = ptr::null_mut();

    let json = CString::new("{ not json").unwrap();
    let status = unsafe { ahlfors_metric_new(json.as_ptr(), &mut handle) };
    assert_eq!(status, AhlforsStatus::InvalidArgument);
    assert!(last_error().contains("schema"));

    let json = CString::new(
        r#"{ "grid": { "resolution": [9, 9] }, "metric": { "kind": "flat" } }"#,
    )
    .unwrap();
    let status = unsafe { ahlfors_metric_new(json.as_ptr(), &mut handle) };
    assert_eq!(status, AhlforsStatus::InvalidArgument);
    assert!(last_error().contains("even"));

    let json = CString::new(
        r#"{ "grid": { "resolution": [16, 16] },
             "metric": { "kind": "conformal", "modes": [ { "amplitude": 0.1, "wavevector": [5, 0] } ] } }"#,
    )
    .unwrap();
    let status = unsafe { ahlfors_metric_new(json.as_ptr(), &mut handle) };
    assert_eq!(status, AhlforsStatus::InvalidArgument);
    assert!(last_error().contains("band limit"));
    assert!(handle.is_null());
}

#[test]
fn killing_operator_and_divergence_compose_to_the_eigenvalue() {
    // On the flat 2-torus the operator pipeline applied to sin(x1) dx1
    // returns half of it.
    let config = r#"{ "grid": { "resolution": [16, 16] }, "metric": { "kind": "flat" } }"#;
    let handle = new_metric(config);
    let grid = GridSpec::square(2, 16).unwrap();
    let points = grid.total_points();

    let mut theta = scalar_buffer(&grid, |x| x[0].sin());
    theta.extend(std::iter::repeat(0.0).take(points));

    let mut phi = vec![0.0; 3 * points];
    let status = unsafe { ahlfors_conformal_killing(handle, theta.as_ptr(), phi.as_mut_ptr()) };
    assert_eq!(status, AhlforsStatus::Ok);

    let mut back = vec![0.0; 2 * points];
    let status = unsafe { ahlfors_divergence(handle, phi.as_ptr(), back.as_mut_ptr()) };
    assert_eq!(status, AhlforsStatus::Ok);

    let defect: f64 = back
        .iter()
        .zip(theta.iter())
        .map(|(b, t)| (b - 0.5 * t).abs())
        .fold(0.0, f64::max);
    assert!(defect <= 1e-11, "defect {defect:.3e}");

    unsafe { ahlfors_metric_free(handle) };
}

#[test]
fn decompose_round_trips_a_potential_input() {
    let handle = new_metric(FLAT_3D);
    let grid = GridSpec::square(3, 8).unwrap();
    let points = grid.total_points();
    let blocks = 6;

    let mut theta_hat = scalar_buffer(&grid, |x| x[0].sin());
    theta_hat.extend(std::iter::repeat(0.0).take(2 * points));

    let mut phi = vec![0.0; blocks * points];
    let status =
        unsafe { ahlfors_conformal_killing(handle, theta_hat.as_ptr(), phi.as_mut_ptr()) };
    assert_eq!(status, AhlforsStatus::Ok);

    let mut s_theta = vec![0.0; blocks * points];
    let mut phi_tt = vec![0.0; blocks * points];
    let mut info = AhlforsDecompositionInfo {
        cg_iterations: 0,
        final_residual: 1.0,
        orthogonality_defect: 1.0,
        tt_divergence_norm: 1.0,
        trace_norm: 1.0,
    };
    let status = unsafe {
        ahlfors_decompose(
            handle,
            phi.as_ptr(),
            ptr::null_mut(),
            s_theta.as_mut_ptr(),
            phi_tt.as_mut_ptr(),
            &mut info,
        )
    };
    assert_eq!(status, AhlforsStatus::Ok, "{}", last_error());

    // a pure-image input comes back entirely in the image part
    let scale = sup(&phi);
    assert!(sup(&phi_tt) <= 1e-9 * scale, "remainder {:.3e}", sup(&phi_tt));
    assert!(info.cg_iterations > 0);
    assert!(info.trace_norm <= 1e-10);
    assert!(info.orthogonality_defect <= 1e-8);

    // the remainder is the input minus the image part, exactly as written
    let defect: f64 = phi
        .iter()
        .zip(&s_theta)
        .zip(&phi_tt)
        .map(|((p, s), t)| ((p - s) - t).abs())
        .fold(0.0, f64::max);
    assert_eq!(defect, 0.0);

    unsafe { ahlfors_metric_free(handle) };
}

#[test]
fn decompose_rejects_tensors_with_trace() {
    let handle = new_metric(FLAT_3D);
    let grid = GridSpec::square(3, 8).unwrap();
    let identity = sym_buffer(&SymTensor2::kronecker(&grid));

    let status = unsafe {
        ahlfors_decompose(
            handle,
            identity.as_ptr(),
            ptr::null_mut(),
            ptr::null_mut(),
            ptr::null_mut(),
            ptr::null_mut(),
        )
    };
    assert_eq!(status, AhlforsStatus::InvalidArgument);
    assert!(last_error().contains("trace"));

    unsafe { ahlfors_metric_free(handle) };
}

#[test]
fn solver_override_and_failure_status() {
    // One CG iteration cannot resolve a generic right-hand side on a
    // curved metric; the failure must surface as a status, not a panic.
    let config = r#"{ "grid": { "resolution": [8, 8, 8] },
        "metric": { "kind": "perturbation", "entries": [
            { "a": 0, "b": 1, "amplitude": 0.05, "wavevector": [1, 0, 0] },
            { "a": 1, "b": 2, "amplitude": 0.04, "wavevector": [0, 1, 0] } ] },
        "solver": { "max_iterations": 1 } }"#;
    let handle = new_metric(config);
    let grid = GridSpec::square(3, 8).unwrap();
    let points = grid.total_points();

    let mut theta = scalar_buffer(&grid, |x| x[0].sin() + x[1].cos());
    theta.extend(scalar_buffer(&grid, |x| x[2].sin()));
    theta.extend(std::iter::repeat(0.0).take(points));

    let mut phi = vec![0.0; 6 * points];
    let status = unsafe { ahlfors_conformal_killing(handle, theta.as_ptr(), phi.as_mut_ptr()) };
    assert_eq!(status, AhlforsStatus::Ok);

    let status = unsafe {
        ahlfors_decompose(
            handle,
            phi.as_ptr(),
            ptr::null_mut(),
            ptr::null_mut(),
            ptr::null_mut(),
            ptr::null_mut(),
        )
    };
    assert_eq!(status, AhlforsStatus::SolverFailure);
    assert!(last_error().contains("converge"));

    unsafe { ahlfors_metric_free(handle) };
}

#[test]
fn constraint_residuals_flow_through_buffers() {
    let handle = new_metric(FLAT_3D);
    let grid = GridSpec::square(3, 8).unwrap();
    let points = grid.total_points();
    let amplitude = 0.1;

    // transverse-traceless second fundamental form with zero trace
    let k = SymTensor2::from_fn(&grid, |a, b, x| match (a, b) {
        (0, 0) => amplitude * x[2].cos(),
        (1, 1) => -amplitude * x[2].cos(),
        _ => 0.0,
    });
    let k_buffer = sym_buffer(&k);

    let mut hamiltonian = vec![0.0; points];
    let mut momentum = vec![0.0; 3 * points];
    let status = unsafe {
        ahlfors_constraint_residuals(
            handle,
            k_buffer.as_ptr(),
            hamiltonian.as_mut_ptr(),
            momentum.as_mut_ptr(),
        )
    };
    assert_eq!(status, AhlforsStatus::Ok, "{}", last_error());

    // momentum residual vanishes for transverse data with zero trace
    assert!(sup(&momentum) <= 1e-12);

    // scalar residual, with zero mean curvature, is -|K|^2
    let expected = scalar_buffer(&grid, |x| {
        -2.0 * amplitude * amplitude * x[2].cos() * x[2].cos()
    });
    let defect: f64 = hamiltonian
        .iter()
        .zip(&expected)
        .map(|(h, e)| (h - e).abs())
        .fold(0.0, f64::max);
    assert!(defect <= 1e-12, "defect {defect:.3e}");

    unsafe { ahlfors_metric_free(handle) };
}

#[test]
fn soliton_fit_reports_the_two_dimensional_structure() {
    let handle = new_metric(CONFORMAL_2D);
    let grid = GridSpec::square(2, 16).unwrap();
    let points = grid.total_points();

    let mut theta = vec![0.0; 2 * points];
    let mut lambda = vec![0.0; points];
    let mut phi_tt = vec![0.0; 3 * points];
    let mut info = AhlforsSolitonInfo {
        deviation: 1.0,
        lambda_variation: 0.0,
        lambda_mean: f64::NAN,
    };
    let status = unsafe {
        ahlfors_soliton_fit(
            handle,
            theta.as_mut_ptr(),
            lambda.as_mut_ptr(),
            phi_tt.as_mut_ptr(),
            &mut info,
        )
    };
    assert_eq!(status, AhlforsStatus::Ok, "{}", last_error());

    // every metric on a 2-torus fits exactly, with a varying coefficient
    assert!(info.deviation <= 1e-8, "deviation {:.3e}", info.deviation);
    assert!(info.lambda_variation > 1e-3);
    assert!(info.lambda_mean.is_finite());
    let lambda_mean = lambda.iter().sum::<f64>() / points as f64;
    assert!((lambda_mean - info.lambda_mean).abs() <= 1e-12);

    // in two dimensions the trace-free Ricci part vanishes pointwise, so
    // the potential is zero and the coefficient is half the curvature
    assert!(sup(&theta) <= 1e-10);
    let mut curvature = vec![0.0; points];
    let status = unsafe { ahlfors_scalar_curvature(handle, curvature.as_mut_ptr()) };
    assert_eq!(status, AhlforsStatus::Ok);
    let defect: f64 = lambda
        .iter()
        .zip(&curvature)
        .map(|(l, s)| (l - 0.5 * s).abs())
        .fold(0.0, f64::max);
    assert!(defect <= 1e-12, "coefficient defect {defect:.3e}");

    unsafe { ahlfors_metric_free(handle) };
}

#[test]
fn run_json_returns_a_report_document() {
    let command = CString::new("verify").unwrap();
    let config = CString::new(
        r#"{ "grid": { "resolution": [16, 16] }, "metric": { "kind": "flat" } }"#,
    )
    .unwrap();
    let mut report: *mut std::ffi::c_char = ptr::null_mut();
    let status = unsafe { ahlfors_run_json(command.as_ptr(), config.as_ptr(), &mut report) };
    assert_eq!(status, AhlforsStatus::Ok, "{}", last_error());
    assert!(!report.is_null());

    let text = unsafe { CStr::from_ptr(report) }.to_str().unwrap().to_string();
    unsafe { ahlfors_string_free(report) };

    let document: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(document["command"], "verify");
    assert_eq!(document["passed"], true);
    assert!(document["checks"].as_array().unwrap().len() > 1);

    // a command whose config block is missing reports a clean error
    let command = CString::new("decompose").unwrap();
    let mut report: *mut std::ffi::c_char = ptr::null_mut();
    let status = unsafe { ahlfors_run_json(command.as_ptr(), config.as_ptr(), &mut report) };
    assert_eq!(status, AhlforsStatus::InvalidArgument);
    assert!(report.is_null());

    let command = CString::new("no-such-command").unwrap();
    let status = unsafe { ahlfors_run_json(command.as_ptr(), config.as_ptr(), &mut report) };
    assert_eq!(status, AhlforsStatus::InvalidArgument);
    assert!(last_error().contains("unknown command"));
}
