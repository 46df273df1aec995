//! Command pipelines: execute one configured batch command and produce a
//! structured report plus optional field dumps for external plotting.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::ahlfors::{calibrate_ricci_sign, delta_oneform, delta_star, div_sym, ext_d_scalar};
use crate::config::RunConfig;
use crate::constraints::{constraint_report, split_extrinsic_curvature, InitialData};
use crate::decomp::{
    decompose_traceless, kernel_basis, split_traceless_ricci, Decomposition, SolverConfig,
};
use crate::error::{Error, Result};
use crate::fields::{OneForm, SymTensor2};
use crate::grid::{random_bandlimited_field, GridSpec, ScalarField};
use crate::samples::{random_oneform, random_traceless};
use crate::soliton::{fit_almost_soliton, reconstruction_defect};
use crate::tensor::{
    l2_inner_oneform, l2_inner_scalar, l2_inner_sym, l2_norm_oneform, l2_norm_sym,
    metric_from_spec, ricci, scalar_curvature, trace_g, Metric,
};

const NORM_FLOOR: f64 = 1e-14;

// Bars applied by the verify pipeline; each one is echoed in the report
// next to the measured value.
const ADJOINTNESS_REL: f64 = 1e-9;
const BIANCHI_REL: f64 = 1e-7;
const CALIBRATED_REL: f64 = 1e-7;
const REJECTED_SIGN_MIN: f64 = 0.1;
const GRADIENT_REL: f64 = 1e-6;
const ENERGY_REL: f64 = 1e-6;
const ORTHOGONALITY_REL: f64 = 1e-8;
const TRACE_SUP: f64 = 1e-10;
const TRACE_IDENTITY_SUP: f64 = 1e-10;
const PLANAR_DEVIATION: f64 = 1e-8;

/// The five batch commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Decompose,
    Soliton,
    Constraints,
    GenTt,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Decompose => "decompose",
            Command::Soliton => "soliton",
            Command::Constraints => "constraints",
            Command::GenTt => "gen-tt",
        }
    }
}

/// Which side of the bound a check must fall on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Requirement {
    AtMost,
    AtLeast,
}

/// One named residual check: the measured value, the bound applied to it,
/// and the verdict. Every tolerance a command uses appears here.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub requirement: Requirement,
    pub passed: bool,
}

/// Report for one command run. Field order is fixed by the struct;
/// `timestamp` (seconds since the epoch) is the only field allowed to
/// differ between identical runs.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub timestamp: u64,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub values: BTreeMap<String, f64>,
    pub passed: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

/// A scalar field paired with the basename of its dump file.
#[derive(Debug, Clone)]
pub struct FieldDump {
    pub name: String,
    pub field: ScalarField,
}

/// Everything a command produces: the report and the fields to dump.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: Report,
    pub dumps: Vec<FieldDump>,
}

/// Renders a field as CSV: header x1,...,xn,value then one row per grid
/// point in row-major order, coordinates in [0, L_a).
pub fn field_csv(grid: &GridSpec, field: &ScalarField) -> String {
    let n = grid.dimension();
    let mut out = String::new();
    for a in 1..=n {
        let _ = write!(out, "x{a},");
    }
    out.push_str("value\n");
    for (index, value) in field.values().iter().enumerate() {
        for coord in grid.point_coords(index) {
            let _ = write!(out, "{coord:e},");
        }
        let _ = writeln!(out, "{value:e}");
    }
    out
}

struct ReportBuilder {
    checks: Vec<Check>,
    values: BTreeMap<String, f64>,
}

impl ReportBuilder {
    fn new() -> Self {
        ReportBuilder {
            checks: Vec::new(),
            values: BTreeMap::new(),
        }
    }

    fn at_most(&mut self, name: &str, measured: f64, threshold: f64) {
        self.checks.push(Check {
            name: name.into(),
            measured,
            threshold,
            requirement: Requirement::AtMost,
            passed: measured <= threshold,
        });
    }

    fn at_least(&mut self, name: &str, measured: f64, threshold: f64) {
        self.checks.push(Check {
            name: name.into(),
            measured,
            threshold,
            requirement: Requirement::AtLeast,
            passed: measured >= threshold,
        });
    }

    fn value(&mut self, name: &str, value: f64) {
        self.values.insert(name.into(), value);
    }

    fn decomposition_checks(&mut self, dec: &Decomposition, solver: &SolverConfig, rhs_scale: f64) {
        self.at_most(
            "decomposition_orthogonality",
            dec.diagnostics.orthogonality_defect,
            ORTHOGONALITY_REL,
        );
        self.at_most("decomposition_trace", dec.diagnostics.trace_norm, TRACE_SUP);
        self.at_most(
            "decomposition_divergence",
            dec.diagnostics.tt_divergence_norm,
            10.0 * solver.rel_tolerance * rhs_scale.max(NORM_FLOOR),
        );
        self.value("cg_iterations", dec.diagnostics.cg_iterations as f64);
        self.value("cg_final_residual", dec.diagnostics.final_residual);
    }

    fn finish(self, command: Command, config: &RunConfig) -> Report {
        let passed = self.checks.iter().all(|c| c.passed);
        Report {
            command: command.name(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .unwrap_or_default()
                .as_secs(),
            config: config.clone(),
            checks: self.checks,
            values: self.values,
            passed,
        }
    }
}

/// Runs one command against its configuration.
pub fn execute(command: Command, config: &RunConfig) -> Result<RunOutput> {
    let grid = config.grid.build()?;
    let g = metric_from_spec(&config.metric, &grid)?;
    let solver = config.solver.build()?;
    match command {
        Command::Verify => run_verify(config, &grid, &g, &solver),
        Command::Decompose => run_decompose(config, &grid, &g, &solver),
        Command::Soliton => run_soliton(config, &grid, &g, &solver),
        Command::Constraints => run_constraints(config, &grid, &g, &solver),
        Command::GenTt => run_gen_tt(config, &grid, &g, &solver),
    }
}

fn oneform_dumps(dumps: &mut Vec<FieldDump>, name: &str, theta: &OneForm) {
    for (a, component) in theta.components().iter().enumerate() {
        dumps.push(FieldDump {
            name: format!("{name}_{}", a + 1),
            field: component.clone(),
        });
    }
}

fn symtensor_dumps(dumps: &mut Vec<FieldDump>, name: &str, phi: &SymTensor2) {
    let n = phi.dimension();
    for a in 0..n {
        for b in a..n {
            dumps.push(FieldDump {
                name: format!("{name}_{}{}", a + 1, b + 1),
                field: phi.get(a, b).clone(),
            });
        }
    }
}

fn run_verify(
    config: &RunConfig,
    grid: &GridSpec,
    g: &Metric,
    solver: &SolverConfig,
) -> Result<RunOutput> {
    let mut builder = ReportBuilder::new();
    let n = grid.dimension();

    // Adjointness of (d, delta) and of (delta_star, div) on seeded
    // band-limited fields; worst relative defect over the draws.
    let mut worst_gradient: f64 = 0.0;
    let mut worst_deformation: f64 = 0.0;
    for draw in 0..5u64 {
        let f = random_bandlimited_field(grid, 900 + draw, 2, 1.0)?;
        let theta = random_oneform(grid, 910 + draw, 2, 1.0)?;
        let phi = random_traceless(grid, g, 920 + draw, 2, 1.0)?;

        let df = ext_d_scalar(&f);
        let lhs = l2_inner_oneform(g, &df, &theta);
        let rhs = l2_inner_scalar(g, &f, &delta_oneform(g, &theta));
        let scale = (l2_norm_oneform(g, &df) * l2_norm_oneform(g, &theta)).max(NORM_FLOOR);
        worst_gradient = worst_gradient.max((lhs - rhs).abs() / scale);

        let dstar = delta_star(g, &theta);
        let lhs = l2_inner_sym(g, &dstar, &phi);
        let rhs = l2_inner_oneform(g, &theta, &div_sym(g, &phi));
        let scale = (l2_norm_sym(g, &dstar) * l2_norm_oneform(g, &theta)).max(NORM_FLOOR);
        worst_deformation = worst_deformation.max((lhs - rhs).abs() / scale);
    }
    builder.at_most("adjoint_gradient_divergence", worst_gradient, ADJOINTNESS_REL);
    builder.at_most(
        "adjoint_deformation_divergence",
        worst_deformation,
        ADJOINTNESS_REL,
    );

    // Contracted second Bianchi identity, relative to ||ds||.
    let ric = ricci(g);
    let s = scalar_curvature(g, &ric);
    let ds = ext_d_scalar(&s);
    let mut bianchi = div_sym(g, &ric);
    bianchi.add_scaled(0.5, &ds);
    let ds_norm = l2_norm_oneform(g, &ds);
    let bianchi_rel = if ds_norm > NORM_FLOOR {
        l2_norm_oneform(g, &bianchi) / ds_norm
    } else {
        0.0
    };
    builder.at_most("contracted_bianchi", bianchi_rel, BIANCHI_REL);
    builder.value("scalar_curvature_sup", s.sup_norm());

    // Curvature-term sign of the Laplacian identity. The wrong sign is
    // only visible when curvature is present, so the separation check is
    // emitted for curved metrics alone.
    let probe = random_oneform(grid, 1234, 1, 1.0)?;
    let calibration = calibrate_ricci_sign(g, &probe);
    builder.at_most(
        "curvature_term_calibrated",
        calibration.residual_negative,
        CALIBRATED_REL,
    );
    let ric_sup = ric.sup_norm();
    builder.value("ricci_sup", ric_sup);
    if ric_sup > 1e-10 {
        builder.at_least(
            "curvature_term_rejected_sign",
            calibration.residual_positive,
            REJECTED_SIGN_MIN,
        );
    }

    // Decomposition diagnostics on a seeded trace-free input.
    let phi0 = random_traceless(grid, g, 17, 2, 0.5)?;
    let rhs_scale = l2_norm_oneform(g, &div_sym(g, &phi0));
    let dec = decompose_traceless(g, &phi0, solver)?;
    builder.decomposition_checks(&dec, solver, rhs_scale);
    builder.value("kernel_dimension", kernel_basis(g).len() as f64);

    // Gradient form and energy identity of the traceless Ricci split.
    if n >= 3 {
        let split = split_traceless_ricci(g, solver)?;
        builder.at_most(
            "traceless_ricci_gradient",
            split.gradient_residual,
            GRADIENT_REL,
        );
        builder.at_most("traceless_ricci_energy", split.energy_residual, ENERGY_REL);
        builder.value("gradient_constant", split.gradient_constant);
        builder.value("gradient_residual_doubled", split.gradient_residual_doubled);
        builder.value("energy_lhs", split.energy_lhs);
        builder.value("energy_rhs", split.energy_rhs);
        builder.value("energy_residual_doubled", split.energy_residual_doubled);
    }

    Ok(RunOutput {
        report: builder.finish(Command::Verify, config),
        dumps: Vec::new(),
    })
}

fn run_decompose(
    config: &RunConfig,
    grid: &GridSpec,
    g: &Metric,
    solver: &SolverConfig,
) -> Result<RunOutput> {
    let block = config.decompose.as_ref().ok_or_else(|| {
        Error::InvalidArgument("decompose command needs a \"decompose\" block".into())
    })?;
    let phi0 = block.tensor.realize(g)?;
    let _ = grid;

    let mut builder = ReportBuilder::new();
    let rhs_scale = l2_norm_oneform(g, &div_sym(g, &phi0));
    let dec = decompose_traceless(g, &phi0, solver)?;
    builder.decomposition_checks(&dec, solver, rhs_scale);

    let input_l2 = l2_norm_sym(g, &phi0);
    let tt_l2 = l2_norm_sym(g, &dec.phi_tt);
    builder.value("input_l2", input_l2);
    builder.value("theta_l2", l2_norm_oneform(g, &dec.theta));
    builder.value("s_theta_l2", l2_norm_sym(g, &dec.s_theta));
    builder.value("phi_tt_l2", tt_l2);
    builder.value("phi_tt_relative", tt_l2 / input_l2.max(NORM_FLOOR));
    let mut residue = &phi0 - &dec.s_theta;
    residue.add_scaled(-1.0, &dec.phi_tt);
    builder.value("reconstruction_sup", residue.sup_norm());

    let mut dumps = Vec::new();
    oneform_dumps(&mut dumps, "theta", &dec.theta);
    symtensor_dumps(&mut dumps, "s_theta", &dec.s_theta);
    symtensor_dumps(&mut dumps, "phi_tt", &dec.phi_tt);

    Ok(RunOutput {
        report: builder.finish(Command::Decompose, config),
        dumps,
    })
}

fn run_soliton(
    config: &RunConfig,
    grid: &GridSpec,
    g: &Metric,
    solver: &SolverConfig,
) -> Result<RunOutput> {
    let mut builder = ReportBuilder::new();
    let fit = fit_almost_soliton(g, solver)?;

    // s = -delta theta + n lambda is exact for the fitted lambda.
    let n = grid.dimension() as f64;
    let ric = ricci(g);
    let s = scalar_curvature(g, &ric);
    let delta_theta = delta_oneform(g, &fit.theta);
    let identity = s
        .zip(&delta_theta, |sv, dv| sv + dv)
        .zip(&fit.lambda_field, |acc, lv| acc - n * lv);
    builder.at_most("trace_identity", identity.sup_norm(), TRACE_IDENTITY_SUP);

    // Every 2-dimensional metric fits exactly.
    if grid.dimension() == 2 {
        builder.at_most("planar_deviation", fit.deviation, PLANAR_DEVIATION);
    }

    builder.value("deviation", fit.deviation);
    builder.value("lambda_variation", fit.lambda_variation);
    builder.value("lambda_mean", fit.lambda_field.mean());
    builder.value("reconstruction_defect", reconstruction_defect(g, &fit));
    builder.value("ricci_l2", l2_norm_sym(g, &ric));
    builder.value("phi_tt_l2", l2_norm_sym(g, &fit.phi_tt));

    let mut dumps = Vec::new();
    oneform_dumps(&mut dumps, "theta", &fit.theta);
    dumps.push(FieldDump {
        name: "lambda".into(),
        field: fit.lambda_field.clone(),
    });
    symtensor_dumps(&mut dumps, "phi_tt", &fit.phi_tt);

    Ok(RunOutput {
        report: builder.finish(Command::Soliton, config),
        dumps,
    })
}

fn run_constraints(
    config: &RunConfig,
    grid: &GridSpec,
    g: &Metric,
    solver: &SolverConfig,
) -> Result<RunOutput> {
    let block = config.constraints.as_ref().ok_or_else(|| {
        Error::InvalidArgument("constraints command needs a \"constraints\" block".into())
    })?;
    let k = block.second_fundamental.realize(g)?;
    let _ = grid;
    let data = InitialData::new(g.clone(), k)?;

    let mut builder = ReportBuilder::new();
    let report = constraint_report(&data);
    builder.value("hamiltonian_l2", report.hamiltonian_l2);
    builder.value("hamiltonian_sup", report.hamiltonian_sup);
    builder.value("momentum_l2", report.momentum_l2);
    builder.value("momentum_sup", report.momentum_sup);

    let split = split_extrinsic_curvature(&data, solver)?;
    builder.at_most(
        "potential_equation",
        split.relative_potential_defect(),
        10.0 * solver.rel_tolerance,
    );
    builder.value("potential_defect", split.potential_defect);
    builder.value("potential_scale", split.potential_scale);
    builder.value(
        "umbilicity_defect",
        crate::constraints::umbilicity_defect(&data),
    );
    builder.value("mean_curvature_sup", data.mean_curvature().sup_norm());
    builder.value(
        "cg_iterations",
        split.decomposition.diagnostics.cg_iterations as f64,
    );
    builder.value(
        "cg_final_residual",
        split.decomposition.diagnostics.final_residual,
    );

    let mut dumps = Vec::new();
    dumps.push(FieldDump {
        name: "hamiltonian".into(),
        field: report.hamiltonian.clone(),
    });
    oneform_dumps(&mut dumps, "momentum", &report.momentum);
    oneform_dumps(&mut dumps, "theta", &split.decomposition.theta);
    symtensor_dumps(&mut dumps, "phi_tt", &split.decomposition.phi_tt);

    Ok(RunOutput {
        report: builder.finish(Command::Constraints, config),
        dumps,
    })
}

fn run_gen_tt(
    config: &RunConfig,
    grid: &GridSpec,
    g: &Metric,
    solver: &SolverConfig,
) -> Result<RunOutput> {
    let block = config.gen_tt.as_ref().ok_or_else(|| {
        Error::InvalidArgument("gen-tt command needs a \"gen_tt\" block".into())
    })?;
    let raw = crate::samples::random_symtensor(grid, block.seed, block.max_mode, block.amplitude)?;

    // Remove the trace, then the image of S; what is left is TT.
    let trace = trace_g(&raw, g);
    let n = grid.dimension() as f64;
    let trace_part = g
        .components()
        .map_components(|c| c.zip(&trace, |gv, tv| gv * tv / n));
    let traceless = &raw - &trace_part;
    let rhs_scale = l2_norm_oneform(g, &div_sym(g, &traceless));
    let dec = decompose_traceless(g, &traceless, solver)?;

    let mut builder = ReportBuilder::new();
    builder.at_most(
        "tt_trace",
        trace_g(&dec.phi_tt, g).sup_norm(),
        TRACE_SUP,
    );
    builder.at_most(
        "tt_divergence",
        dec.diagnostics.tt_divergence_norm,
        10.0 * solver.rel_tolerance * rhs_scale.max(NORM_FLOOR),
    );
    builder.value("input_l2", l2_norm_sym(g, &raw));
    builder.value("tt_l2", l2_norm_sym(g, &dec.phi_tt));
    builder.value("cg_iterations", dec.diagnostics.cg_iterations as f64);
    builder.value("cg_final_residual", dec.diagnostics.final_residual);
    builder.value("seed", block.seed as f64);

    let mut dumps = Vec::new();
    symtensor_dumps(&mut dumps, "tt", &dec.phi_tt);

    Ok(RunOutput {
        report: builder.finish(Command::GenTt, config),
        dumps,
    })
}

/// Exit code the binary should use for an error: 1 for computational
/// failures on valid inputs, 2 for configuration problems.
pub fn error_exit_code(err: &Error) -> u8 {
    match err {
        Error::SolverFailure { .. } | Error::InconsistentSystem(_) => 1,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    fn flat_config(extra: &str) -> RunConfig {
        let text = format!(
            r#"{{
                "grid": {{ "resolution": [16, 16, 16] }},
                "metric": {{ "kind": "flat" }}{extra}
            }}"#
        );
        RunConfig::from_json(&text).unwrap()
    }

    fn strip_timestamp(json: &str) -> String {
        json.lines()
            .filter(|line| !line.trim_start().starts_with("\"timestamp\""))
            .collect::<Vec<_>>()
            .join("\n")
    }

    #[test]
    fn verify_passes_on_flat_metric() {
        let config = flat_config("");
        let output = execute(Command::Verify, &config).unwrap();
        assert!(output.report.passed, "checks: {:?}", output.report.checks);
        // No curvature, so the sign-separation check must not be emitted.
        assert!(!output
            .report
            .checks
            .iter()
            .any(|c| c.name == "curvature_term_rejected_sign"));
        assert_eq!(output.report.values["kernel_dimension"], 3.0);
    }

    #[test]
    fn verify_passes_on_conformal_metric() {
        let config = RunConfig::from_json(
            r#"{
                "grid": { "resolution": [32, 32] },
                "metric": { "kind": "conformal", "modes": [
                    { "amplitude": 0.1, "wavevector": [1, 0] },
                    { "amplitude": 0.05, "wavevector": [0, 1], "phase": -1.5707963267948966 }
                ] }
            }"#,
        )
        .unwrap();
        let output = execute(Command::Verify, &config).unwrap();
        assert!(output.report.passed, "checks: {:?}", output.report.checks);
        let names: Vec<_> = output.report.checks.iter().map(|c| c.name.as_str()).collect();
        assert!(names.contains(&"curvature_term_rejected_sign"));
        // The gradient-structure checks need three dimensions.
        assert!(!names.contains(&"traceless_ricci_gradient"));
    }

    #[test]
    fn decompose_recovers_pure_image_input() {
        // S of sin(x1) dx1 on the flat torus, written out as cosine modes.
        let config = flat_config(
            r#",
            "decompose": { "tensor": { "entries": [
                { "a": 0, "b": 0, "amplitude": 0.6666666666666666, "wavevector": [1, 0, 0] },
                { "a": 1, "b": 1, "amplitude": -0.3333333333333333, "wavevector": [1, 0, 0] },
                { "a": 2, "b": 2, "amplitude": -0.3333333333333333, "wavevector": [1, 0, 0] }
            ] } }"#,
        );
        let output = execute(Command::Decompose, &config).unwrap();
        assert!(output.report.passed, "checks: {:?}", output.report.checks);
        assert!(output.report.values["phi_tt_relative"] <= 1e-9);
        assert!(output.report.values["reconstruction_sup"] <= 1e-14);
        assert_eq!(output.dumps.len(), 3 + 6 + 6);
        assert!(output.dumps.iter().any(|d| d.name == "theta_1"));
        assert!(output.dumps.iter().any(|d| d.name == "phi_tt_23"));
    }

    #[test]
    fn decompose_requires_its_block() {
        let config = flat_config("");
        let err = execute(Command::Decompose, &config).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
        assert_eq!(error_exit_code(&err), 2);
    }

    #[test]
    fn constraints_cmc_example_is_momentum_free() {
        // K = (H0/n) g + TT with H0 = 0.5: the vector constraint holds
        // identically.
        let config = flat_config(
            r#",
            "constraints": { "second_fundamental": {
                "trace_coefficient": 0.16666666666666666,
                "entries": [
                    { "a": 0, "b": 0, "amplitude": 0.1, "wavevector": [0, 0, 1] },
                    { "a": 1, "b": 1, "amplitude": -0.1, "wavevector": [0, 0, 1] }
                ]
            } }"#,
        );
        let output = execute(Command::Constraints, &config).unwrap();
        assert!(output.report.passed, "checks: {:?}", output.report.checks);
        assert!(output.report.values["momentum_l2"] <= 1e-8);
        assert!(output.report.values["umbilicity_defect"] > 0.1);
        assert!(output.dumps.iter().any(|d| d.name == "hamiltonian"));
    }

    #[test]
    fn soliton_on_conformal_surface_fits_exactly() {
        let config = RunConfig::from_json(
            r#"{
                "grid": { "resolution": [32, 32] },
                "metric": { "kind": "conformal", "modes": [
                    { "amplitude": 0.1, "wavevector": [1, 0] }
                ] }
            }"#,
        )
        .unwrap();
        let output = execute(Command::Soliton, &config).unwrap();
        assert!(output.report.passed, "checks: {:?}", output.report.checks);
        assert!(output.report.values["deviation"] <= 1e-8);
        assert!(output.dumps.iter().any(|d| d.name == "lambda"));
    }

    #[test]
    fn gen_tt_is_deterministic() {
        let config = flat_config(r#", "gen_tt": { "seed": 7 }"#);
        let a = execute(Command::GenTt, &config).unwrap();
        let b = execute(Command::GenTt, &config).unwrap();
        assert!(a.report.passed);
        assert_eq!(
            strip_timestamp(&a.report.to_json()),
            strip_timestamp(&b.report.to_json())
        );
        let grid = config.grid.build().unwrap();
        for (da, db) in a.dumps.iter().zip(&b.dumps) {
            assert_eq!(da.name, db.name);
            assert_eq!(field_csv(&grid, &da.field), field_csv(&grid, &db.field));
        }
    }

    #[test]
    fn csv_layout_is_row_major_with_coordinates() {
        let grid = GridSpec::square(2, 8).unwrap();
        let field = ScalarField::from_fn(&grid, |x| x[0] + 10.0 * x[1]);
        let csv = field_csv(&grid, &field);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "x1,x2,value");
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 3);
        assert_eq!(first[0].parse::<f64>().unwrap(), 0.0);
        // Second row advances the last axis: row-major order.
        let second: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(second[0].parse::<f64>().unwrap(), 0.0);
        let step = std::f64::consts::TAU / 8.0;
        assert!((second[1].parse::<f64>().unwrap() - step).abs() < 1e-15);
        let value: f64 = second[2].parse().unwrap();
        assert!((value - 10.0 * step).abs() < 1e-14);
        assert_eq!(csv.lines().count(), 1 + 64);
    }

    #[test]
    fn every_threshold_is_echoed_next_to_its_measurement() {
        let config = flat_config("");
        let output = execute(Command::Verify, &config).unwrap();
        let json = output.report.to_json();
        for check in &output.report.checks {
            assert!(json.contains(&check.name), "missing check {}", check.name);
        }
        // Thresholds live inside the serialized checks, one per check.
        assert_eq!(
            json.matches("\"threshold\"").count(),
            output.report.checks.len()
        );
    }
}
