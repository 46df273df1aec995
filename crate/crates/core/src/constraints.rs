//! Vacuum initial-data toolkit: constraint residuals for a pair (g, K),
//! the trace/potential/transverse split of K, constant-mean-curvature
//! data construction, TT projection, and umbilicity diagnostics.

use crate::ahlfors::{ahlfors_laplacian, div_sym, ext_d_scalar};
use crate::decomp::{decompose_traceless, Decomposition, SolverConfig};
use crate::error::{Error, Result};
use crate::fields::{OneForm, SymTensor2};
use crate::grid::ScalarField;
use crate::tensor::{
    l2_norm_oneform, l2_norm_scalar, l2_norm_sym, pointwise_inner_sym, ricci, scalar_curvature,
    trace_g, Metric,
};

/// Sup bound on the metric trace of a tensor offered as transverse-traceless.
pub const TT_TRACE_SUP: f64 = 1e-8;
/// Relative L² bound on the divergence of a tensor offered as
/// transverse-traceless: ||div phi|| <= ratio * ||phi||.
pub const TT_DIVERGENCE_RATIO: f64 = 1e-6;

// Guard against 0/0 in relative quantities.
const NORM_FLOOR: f64 = 1e-14;
// Below this scale the potential equation was never solved (the right hand
// side is round-off), so the relative defect is reported as zero.
const NEGLIGIBLE_SCALE: f64 = 1e-13;

/// A Riemannian metric together with a candidate second fundamental form.
/// The mean curvature is fixed at construction as the metric trace of K,
/// so the pair always satisfies H = tr_g K exactly.
#[derive(Debug, Clone)]
pub struct InitialData {
    metric: Metric,
    second_fundamental: SymTensor2,
    mean_curvature: ScalarField,
}

impl InitialData {
    pub fn new(metric: Metric, second_fundamental: SymTensor2) -> Result<InitialData> {
        if second_fundamental.grid() != metric.grid() {
            return Err(Error::InvalidArgument(
                "metric and second fundamental form live on different grids".into(),
            ));
        }
        let mean_curvature = trace_g(&second_fundamental, &metric);
        Ok(InitialData {
            metric,
            second_fundamental,
            mean_curvature,
        })
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn second_fundamental(&self) -> &SymTensor2 {
        &self.second_fundamental
    }

    /// tr_g K, cached at construction.
    pub fn mean_curvature(&self) -> &ScalarField {
        &self.mean_curvature
    }
}

/// Pointwise residual of the scalar constraint: s - g(K, K) + H^2.
/// Vanishes exactly on vacuum data.
pub fn hamiltonian_residual(data: &InitialData) -> ScalarField {
    let g = data.metric();
    let ric = ricci(g);
    let s = scalar_curvature(g, &ric);
    let kk = pointwise_inner_sym(g, data.second_fundamental(), data.second_fundamental());
    s.zip(&kk, |sv, kv| sv - kv)
        .zip(data.mean_curvature(), |acc, h| acc + h * h)
}

/// Residual of the vector constraint, as the one-form -delta K - dH.
/// Vanishes exactly on vacuum data.
pub fn momentum_residual(data: &InitialData) -> OneForm {
    let mut out = div_sym(data.metric(), data.second_fundamental()).scale(-1.0);
    out.add_scaled(-1.0, &ext_d_scalar(data.mean_curvature()));
    out
}

/// Both constraint residuals with their L² and sup norms.
#[derive(Debug, Clone)]
pub struct ConstraintReport {
    pub hamiltonian: ScalarField,
    pub momentum: OneForm,
    pub hamiltonian_l2: f64,
    pub momentum_l2: f64,
    pub hamiltonian_sup: f64,
    pub momentum_sup: f64,
}

pub fn constraint_report(data: &InitialData) -> ConstraintReport {
    let g = data.metric();
    let hamiltonian = hamiltonian_residual(data);
    let momentum = momentum_residual(data);
    let hamiltonian_l2 = l2_norm_scalar(g, &hamiltonian);
    let momentum_l2 = l2_norm_oneform(g, &momentum);
    let hamiltonian_sup = hamiltonian.sup_norm();
    let momentum_sup = momentum.sup_norm();
    ConstraintReport {
        hamiltonian,
        momentum,
        hamiltonian_l2,
        momentum_l2,
        hamiltonian_sup,
        momentum_sup,
    }
}

// (f/n) g: the pure-trace tensor with metric trace f.
fn pure_trace_part(g: &Metric, f: &ScalarField) -> SymTensor2 {
    let n = g.dimension() as f64;
    g.components()
        .map_components(|c| c.zip(f, |gv, fv| gv * fv / n))
}

/// K split as (H/n) g + S theta + phi_tt.
#[derive(Debug, Clone)]
pub struct ExtrinsicSplit {
    /// (H/n) g, the umbilic part of K.
    pub trace_part: SymTensor2,
    /// Split of the remaining trace-free part K0.
    pub decomposition: Decomposition,
    /// ||lap_A theta - (delta K + (1/n) dH)||: the potential equation
    /// assembled from the raw data rather than from K0, so it measures
    /// both the solve and the splitting consistently.
    pub potential_defect: f64,
    /// ||delta K0||, the natural scale for the defect.
    pub potential_scale: f64,
}

impl ExtrinsicSplit {
    /// Defect relative to its scale; reported as zero when the right hand
    /// side was below the solver's short-circuit threshold.
    pub fn relative_potential_defect(&self) -> f64 {
        if self.potential_scale <= NEGLIGIBLE_SCALE {
            0.0
        } else {
            self.potential_defect / self.potential_scale
        }
    }
}

/// Splits K into its pure-trace part and the potential/transverse
/// decomposition of the rest, and measures how well the recovered
/// potential satisfies lap_A theta = delta K + (1/n) dH.
pub fn split_extrinsic_curvature(
    data: &InitialData,
    config: &SolverConfig,
) -> Result<ExtrinsicSplit> {
    let g = data.metric();
    let n = g.dimension() as f64;
    let trace_part = pure_trace_part(g, data.mean_curvature());
    let k0 = data.second_fundamental() - &trace_part;
    let decomposition = decompose_traceless(g, &k0, config)?;

    let mut rhs = div_sym(g, data.second_fundamental());
    rhs.add_scaled(1.0 / n, &ext_d_scalar(data.mean_curvature()));
    let mut defect = ahlfors_laplacian(g, &decomposition.theta);
    defect.add_scaled(-1.0, &rhs);
    let potential_defect = l2_norm_oneform(g, &defect);
    let potential_scale = l2_norm_oneform(g, &div_sym(g, &k0));

    Ok(ExtrinsicSplit {
        trace_part,
        decomposition,
        potential_defect,
        potential_scale,
    })
}

/// Builds initial data with constant mean curvature H0 from a
/// transverse-traceless tensor: K = (H0/n) g + phi_tt. The result
/// satisfies the vector constraint identically (delta phi_tt = 0 and
/// dH = 0). Rejects inputs that are not trace-free and divergence-free,
/// reporting the measured violation.
pub fn build_cmc_data(g: &Metric, phi_tt: &SymTensor2, mean_curvature: f64) -> Result<InitialData> {
    if phi_tt.grid() != g.grid() {
        return Err(Error::InvalidArgument(
            "tensor lives on a different grid than the metric".into(),
        ));
    }
    let trace_sup = trace_g(phi_tt, g).sup_norm();
    if trace_sup > TT_TRACE_SUP {
        return Err(Error::InvalidArgument(format!(
            "tensor has metric trace {trace_sup:.3e} (sup), exceeds {TT_TRACE_SUP:.0e}"
        )));
    }
    let tt_norm = l2_norm_sym(g, phi_tt);
    if tt_norm > 0.0 {
        let div_norm = l2_norm_oneform(g, &div_sym(g, phi_tt));
        if div_norm > TT_DIVERGENCE_RATIO * tt_norm {
            return Err(Error::InvalidArgument(format!(
                "tensor is not transverse: ||div phi|| = {div_norm:.3e} exceeds \
                 {TT_DIVERGENCE_RATIO:.0e} * ||phi|| = {:.3e}",
                TT_DIVERGENCE_RATIO * tt_norm
            )));
        }
    }
    let constant_h = ScalarField::constant(g.grid(), mean_curvature);
    let mut k = pure_trace_part(g, &constant_h);
    k.add_scaled(1.0, phi_tt);
    InitialData::new(g.clone(), k)
}

/// Projects an arbitrary symmetric tensor onto its transverse-traceless
/// part: removes the metric trace, then the image of S.
pub fn tt_project(g: &Metric, phi: &SymTensor2, config: &SolverConfig) -> Result<SymTensor2> {
    let trace = trace_g(phi, g);
    let traceless = phi - &pure_trace_part(g, &trace);
    Ok(decompose_traceless(g, &traceless, config)?.phi_tt)
}

/// ||K0|| / ||K|| in L²: zero for pure-trace (umbilic) data, one for
/// trace-free data.
pub fn umbilicity_defect(data: &InitialData) -> f64 {
    let g = data.metric();
    let trace_part = pure_trace_part(g, data.mean_curvature());
    let k0 = data.second_fundamental() - &trace_part;
    l2_norm_sym(g, &k0) / l2_norm_sym(g, data.second_fundamental()).max(NORM_FLOOR)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ahlfors::{cauchy_ahlfors, delta_star};
    use crate::fields::OneForm;
    use crate::grid::GridSpec;
    use crate::samples::{conformal_metric_2d, perturbed_metric_3d, random_symtensor};
    use crate::tensor::l2_inner_sym;

    fn sine_oneform(grid: &GridSpec) -> OneForm {
        let mut components = vec![ScalarField::zeros(grid); grid.dimension()];
        components[0] = ScalarField::from_fn(grid, |x| x[0].sin());
        OneForm::from_components(components)
    }

    // A cos(x3) (dx1 dx1 - dx2 dx2): trace-free and divergence-free for
    // the flat 3-torus.
    fn tt_example(grid: &GridSpec, amplitude: f64) -> SymTensor2 {
        SymTensor2::from_fn(grid, |a, b, x| match (a, b) {
            (0, 0) => amplitude * x[2].cos(),
            (1, 1) => -amplitude * x[2].cos(),
            _ => 0.0,
        })
    }

    fn centered(theta: &OneForm) -> OneForm {
        theta.map_components(|c| {
            let mean = c.mean();
            c.map(|v| v - mean)
        })
    }

    #[test]
    fn mean_curvature_is_the_metric_trace() {
        let grid = GridSpec::square(3, 8).unwrap();
        let g = perturbed_metric_3d(&grid).unwrap();
        let k = random_symtensor(&grid, 11, 2, 0.3).unwrap();
        let data = InitialData::new(g.clone(), k.clone()).unwrap();
        let drift = (data.mean_curvature() - &trace_g(&k, &g)).sup_norm();
        assert!(drift <= 1e-12, "cached trace drifted: {drift:.3e}");
    }

    #[test]
    fn mismatched_grids_rejected() {
        let grid = GridSpec::square(3, 8).unwrap();
        let other = GridSpec::square(3, 16).unwrap();
        let g = Metric::flat(&grid);
        let k = SymTensor2::zeros(&other);
        assert!(matches!(
            InitialData::new(g, k),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn time_symmetric_flat_data_is_vacuum() {
        let grid = GridSpec::square(3, 16).unwrap();
        let g = Metric::flat(&grid);
        let data = InitialData::new(g, SymTensor2::zeros(&grid)).unwrap();
        let report = constraint_report(&data);
        assert!(report.hamiltonian_sup <= 1e-13);
        assert!(report.momentum_sup <= 1e-13);
    }

    #[test]
    fn transverse_traceless_curvature_sources_the_scalar_constraint() {
        let grid = GridSpec::square(3, 16).unwrap();
        let g = Metric::flat(&grid);
        let amplitude = 0.1;
        let data = InitialData::new(g, tt_example(&grid, amplitude)).unwrap();

        // H = 0 and s = 0, so the residual is -g(K, K) = -2 A^2 cos^2(x3).
        let expected = ScalarField::from_fn(&grid, |x| {
            -2.0 * amplitude * amplitude * x[2].cos() * x[2].cos()
        });
        let residual = hamiltonian_residual(&data);
        assert!((&residual - &expected).sup_norm() <= 1e-12);
        assert!(momentum_residual(&data).sup_norm() <= 1e-12);
    }

    #[test]
    fn pure_trace_curvature_gives_constant_scalar_residual() {
        let grid = GridSpec::square(3, 16).unwrap();
        let g = Metric::flat(&grid);
        let c = 0.2;
        let k = g.components().map_components(|gc| gc.scale(c));
        let data = InitialData::new(g, k).unwrap();

        // K = c g: residual = 0 - n c^2 + (n c)^2 = n (n - 1) c^2.
        let expected = 3.0 * 2.0 * c * c;
        let residual = hamiltonian_residual(&data);
        assert!(residual.map(|v| v - expected).sup_norm() <= 1e-12);
        assert!(momentum_residual(&data).sup_norm() <= 1e-12);
    }

    #[test]
    fn pure_trace_curvature_is_momentum_free_on_curved_metrics() {
        let grid = GridSpec::square(2, 32).unwrap();
        let g = conformal_metric_2d(&grid).unwrap();
        let k = g.components().map_components(|gc| gc.scale(0.4));
        let data = InitialData::new(g, k).unwrap();
        assert!(momentum_residual(&data).sup_norm() <= 1e-12);
    }

    #[test]
    fn gradient_trace_sources_the_vector_constraint() {
        let grid = GridSpec::square(3, 16).unwrap();
        let g = Metric::flat(&grid);
        let f = ScalarField::from_fn(&grid, |x| x[0].sin());
        let k = g.components().map_components(|gc| gc * &f);
        let data = InitialData::new(g, k).unwrap();

        // K = sin(x1) g: -delta K - dH = cos dx1 - n cos dx1.
        let momentum = momentum_residual(&data);
        let expected = ScalarField::from_fn(&grid, |x| -2.0 * x[0].cos());
        assert!((momentum.component(0) - &expected).sup_norm() <= 1e-11);
        assert!(momentum.component(1).sup_norm() <= 1e-12);
        assert!(momentum.component(2).sup_norm() <= 1e-12);
    }

    #[test]
    fn report_norms_match_their_fields() {
        let grid = GridSpec::square(3, 16).unwrap();
        let g = Metric::flat(&grid);
        let f = ScalarField::from_fn(&grid, |x| x[0].sin());
        let k = g.components().map_components(|gc| gc * &f);
        let data = InitialData::new(g.clone(), k).unwrap();

        let report = constraint_report(&data);
        assert_eq!(
            report.hamiltonian_l2,
            l2_norm_scalar(&g, &report.hamiltonian)
        );
        assert_eq!(report.momentum_l2, l2_norm_oneform(&g, &report.momentum));
        assert_eq!(report.hamiltonian_sup, report.hamiltonian.sup_norm());
        assert_eq!(report.momentum_sup, report.momentum.sup_norm());
        assert!(report.momentum_l2 > 0.1);
    }

    #[test]
    fn split_leaves_transverse_curvature_alone() {
        let grid = GridSpec::square(3, 16).unwrap();
        let g = Metric::flat(&grid);
        let phi = tt_example(&grid, 0.1);
        let data = build_cmc_data(&g, &phi, 0.5).unwrap();

        let split = split_extrinsic_curvature(&data, &SolverConfig::default()).unwrap();
        let scale = l2_norm_sym(&g, &phi);
        assert!(l2_norm_sym(&g, &split.decomposition.s_theta) <= 1e-12 * scale);
        let recovered = (&split.decomposition.phi_tt - &phi).sup_norm();
        assert!(recovered <= 1e-12, "phi_tt drifted: {recovered:.3e}");
        // The right hand side is round-off here, so the relative defect
        // reports zero rather than 0/0 noise.
        assert!(split.potential_scale <= NEGLIGIBLE_SCALE);
        assert_eq!(split.relative_potential_defect(), 0.0);
    }

    #[test]
    fn split_inverts_pure_potential_data() {
        let grid = GridSpec::square(3, 16).unwrap();
        let g = Metric::flat(&grid);
        let theta_hat = sine_oneform(&grid);
        let f = ScalarField::from_fn(&grid, |x| 0.3 + 0.1 * x[1].cos());
        let mut k = delta_star(&g, &theta_hat);
        k.add_scaled(1.0, &g.components().map_components(|gc| gc * &f));
        let data = InitialData::new(g.clone(), k).unwrap();

        // K0 = delta_star theta_hat - (tr delta_star theta_hat / n) g is
        // exactly S theta_hat, so the split must recover theta_hat.
        let config = SolverConfig::default();
        let split = split_extrinsic_curvature(&data, &config).unwrap();
        let s_norm = l2_norm_sym(&g, &cauchy_ahlfors(&g, &theta_hat));
        assert!(l2_norm_sym(&g, &split.decomposition.phi_tt) <= 1e-8 * s_norm);
        let theta_err = (&centered(&split.decomposition.theta) - &theta_hat).sup_norm();
        assert!(theta_err <= 1e-8, "potential off by {theta_err:.3e}");
        assert!(split.relative_potential_defect() <= 10.0 * config.rel_tolerance);
    }

    #[test]
    fn split_satisfies_potential_equation_on_random_data() {
        let grid = GridSpec::square(3, 16).unwrap();
        let g = Metric::flat(&grid);
        let k = random_symtensor(&grid, 29, 3, 0.4).unwrap();
        let data = InitialData::new(g, k).unwrap();

        let config = SolverConfig::default();
        let split = split_extrinsic_curvature(&data, &config).unwrap();
        assert!(split.potential_scale > 0.01);
        assert!(
            split.relative_potential_defect() <= 10.0 * config.rel_tolerance,
            "potential equation defect {:.3e} vs scale {:.3e}",
            split.potential_defect,
            split.potential_scale
        );
        // Reconstruction: trace part + S theta + phi_tt = K.
        let mut rebuilt = split.trace_part.clone();
        rebuilt.add_scaled(1.0, &split.decomposition.s_theta);
        rebuilt.add_scaled(1.0, &split.decomposition.phi_tt);
        assert!((&rebuilt - data.second_fundamental()).sup_norm() <= 1e-12);
    }

    #[test]
    fn cmc_data_satisfies_the_vector_constraint() {
        let grid = GridSpec::square(3, 16).unwrap();
        let g = Metric::flat(&grid);
        let amplitude = 0.1;
        let h0 = 0.5;
        let data = build_cmc_data(&g, &tt_example(&grid, amplitude), h0).unwrap();

        let report = constraint_report(&data);
        assert!(report.momentum_sup <= 1e-8);
        // s = 0: residual = -2 A^2 cos^2(x3) + H0^2 (n - 1) / n.
        let expected = ScalarField::from_fn(&grid, |x| {
            -2.0 * amplitude * amplitude * x[2].cos() * x[2].cos() + h0 * h0 * 2.0 / 3.0
        });
        assert!((&report.hamiltonian - &expected).sup_norm() <= 1e-11);

        let drift = data.mean_curvature().map(|v| v - h0).sup_norm();
        assert!(drift <= 1e-12, "mean curvature not constant: {drift:.3e}");
    }

    #[test]
    fn cmc_builder_works_on_curved_metrics() {
        let grid = GridSpec::square(3, 24).unwrap();
        let g = perturbed_metric_3d(&grid).unwrap();
        let data = build_cmc_data(&g, &SymTensor2::zeros(&grid), 0.7).unwrap();
        // Umbilic data: the vector constraint holds to spectral accuracy.
        assert!(momentum_residual(&data).sup_norm() <= 1e-9);
        assert!(umbilicity_defect(&data) <= 1e-12);
    }

    #[test]
    fn builder_rejects_tensors_with_trace() {
        let grid = GridSpec::square(3, 16).unwrap();
        let g = Metric::flat(&grid);
        let phi = delta_star(&g, &sine_oneform(&grid));
        let err = build_cmc_data(&g, &phi, 0.0).unwrap_err();
        match err {
            Error::InvalidArgument(msg) => assert!(msg.contains("trace"), "wrong message: {msg}"),
            other => panic!("expected InvalidArgument, got {other:?}"),
        }
    }

    #[test]
    fn builder_rejects_tensors_with_divergence() {
        let grid = GridSpec::square(3, 16).unwrap();
        let g = Metric::flat(&grid);
        // S of a potential is trace-free but not divergence-free.
        let phi = cauchy_ahlfors(&g, &sine_oneform(&grid));
        let err = build_cmc_data(&g, &phi, 0.0).unwrap_err();
        match err {
            Error::InvalidArgument(msg) => {
                assert!(msg.contains("transverse"), "wrong message: {msg}");
                assert!(msg.contains("e-") || msg.contains("e+"), "no norm in: {msg}");
            }
            other => panic!("expected InvalidArgument, got {other:?}"),
        }
    }

    #[test]
    fn zero_tensor_is_valid_transverse_input() {
        let grid = GridSpec::square(3, 8).unwrap();
        let g = Metric::flat(&grid);
        let data = build_cmc_data(&g, &SymTensor2::zeros(&grid), 0.3).unwrap();
        assert!(constraint_report(&data).momentum_sup <= 1e-13);
    }

    #[test]
    fn projection_fixes_transverse_tensors() {
        let grid = GridSpec::square(3, 16).unwrap();
        let g = Metric::flat(&grid);
        let phi = tt_example(&grid, 0.1);
        let config = SolverConfig::default();
        let projected = tt_project(&g, &phi, &config).unwrap();
        let drift = (&projected - &phi).sup_norm();
        assert!(drift <= 1e-9, "projection moved a TT tensor: {drift:.3e}");
    }

    #[test]
    fn projection_annihilates_trace_and_potential_parts() {
        let grid = GridSpec::square(3, 16).unwrap();
        let g = Metric::flat(&grid);
        let f = ScalarField::from_fn(&grid, |x| 0.5 + 0.2 * x[2].sin());
        let mut phi = delta_star(&g, &sine_oneform(&grid));
        phi.add_scaled(1.0, &g.components().map_components(|gc| gc * &f));
        let scale = l2_norm_sym(&g, &phi);

        let config = SolverConfig::default();
        let projected = tt_project(&g, &phi, &config).unwrap();
        assert!(l2_norm_sym(&g, &projected) <= 1e-8 * scale);

        // The metric itself is pure trace.
        let of_metric = tt_project(&g, g.components(), &config).unwrap();
        assert!(l2_norm_sym(&g, &of_metric) <= 1e-12);
    }

    #[test]
    fn projection_is_idempotent_and_orthogonal() {
        let grid = GridSpec::square(3, 16).unwrap();
        let g = perturbed_metric_3d(&grid).unwrap();
        let phi = random_symtensor(&grid, 47, 2, 0.3).unwrap();
        let config = SolverConfig::default();

        let once = tt_project(&g, &phi, &config).unwrap();
        let twice = tt_project(&g, &once, &config).unwrap();
        let drift = l2_norm_sym(&g, &(&twice - &once));
        let scale = l2_norm_sym(&g, &once);
        assert!(scale > 0.0);
        assert!(drift <= 1e-8 * scale, "not idempotent: {drift:.3e}");

        // Orthogonal to any S image and to any pure-trace tensor.
        let probe = cauchy_ahlfors(&g, &sine_oneform(&grid));
        let cross = l2_inner_sym(&g, &once, &probe).abs();
        assert!(cross <= 1e-8 * scale * l2_norm_sym(&g, &probe));
        let trace_probe = pure_trace_part(&g, &ScalarField::from_fn(&grid, |x| 1.0 + x[1].cos()));
        let cross_trace = l2_inner_sym(&g, &once, &trace_probe).abs();
        assert!(cross_trace <= 1e-8 * scale * l2_norm_sym(&g, &trace_probe));
    }

    #[test]
    fn umbilicity_grades_initial_data() {
        let grid = GridSpec::square(3, 16).unwrap();
        let g = Metric::flat(&grid);

        let umbilic = InitialData::new(
            g.clone(),
            g.components().map_components(|gc| gc.scale(0.4)),
        )
        .unwrap();
        assert!(umbilicity_defect(&umbilic) <= 1e-12);

        let trace_free = InitialData::new(g.clone(), tt_example(&grid, 0.1)).unwrap();
        assert!((umbilicity_defect(&trace_free) - 1.0).abs() <= 1e-12);

        // Mixed data: the two parts are L²-orthogonal, so the defect obeys
        // Pythagoras.
        let phi = tt_example(&grid, 0.1);
        let mut k = g.components().map_components(|gc| gc.scale(0.4));
        k.add_scaled(1.0, &phi);
        let mixed = InitialData::new(g.clone(), k.clone()).unwrap();
        let expected = l2_norm_sym(&g, &phi) / l2_norm_sym(&g, &k);
        assert!((umbilicity_defect(&mixed) - expected).abs() <= 1e-10);
    }

    #[test]
    fn constant_mean_curvature_detected_through_the_potential() {
        let grid = GridSpec::square(3, 16).unwrap();
        let g = Metric::flat(&grid);
        let config = SolverConfig::default();

        // Vector constraint + constant H: the potential part must vanish.
        let cmc = build_cmc_data(&g, &tt_example(&grid, 0.1), 0.5).unwrap();
        assert!(constraint_report(&cmc).momentum_sup <= 1e-12);
        let split = split_extrinsic_curvature(&cmc, &config).unwrap();
        let k0_norm = l2_norm_sym(&g, &(cmc.second_fundamental() - &split.trace_part));
        assert!(l2_norm_sym(&g, &split.decomposition.s_theta) <= 1e-9 * k0_norm);

        // Vector constraint + varying H: the potential part cannot vanish.
        // With K = S theta_hat + (H/n) g the constraint forces
        // dH = -(n/(n-1)) lap_A theta_hat = -sin(x1) dx1, solvable in
        // closed form.
        let theta_hat = sine_oneform(&grid);
        let h = ScalarField::from_fn(&grid, |x| 1.0 + x[0].cos());
        let mut k = cauchy_ahlfors(&g, &theta_hat);
        k.add_scaled(1.0, &pure_trace_part(&g, &h));
        let sheared = InitialData::new(g.clone(), k).unwrap();
        assert!(
            constraint_report(&sheared).momentum_sup <= 1e-11,
            "constructed family violates the vector constraint"
        );
        let h_spread = h.sup_norm() - 1.0;
        assert!(h_spread > 0.5, "mean curvature should vary");
        let split = split_extrinsic_curvature(&sheared, &config).unwrap();
        let k0_norm = l2_norm_sym(&g, &(sheared.second_fundamental() - &split.trace_part));
        assert!(l2_norm_sym(&g, &split.decomposition.s_theta) >= 0.5 * k0_norm);
    }
}
