//! Splitting trace-free symmetric tensors into a conformal-Killing-operator
//! image plus a transverse-traceless remainder: phi0 = S theta + phi_tt with
//! div phi_tt = 0 and the two parts L²-orthogonal.
//!
//! The normal equation Delta theta = div phi0 (Delta the non-negative
//! self-adjoint composition div_sym . S) is solved by conjugate gradients in
//! the L²(dvol_g) inner product, deflating the kernel of S so the minimal
//! norm representative is returned.

use crate::ahlfors::{ahlfors_laplacian, cauchy_ahlfors, div_sym, ext_d_scalar};
use crate::error::{Error, Result};
use crate::fft;
use crate::fields::{OneForm, SymTensor2};
use crate::grid::{weighted_sum, ScalarField};
use crate::tensor::{
    directional_derivative, l2_inner_oneform, l2_inner_sym, l2_norm_oneform, l2_norm_sym,
    ricci, scalar_curvature, sharp, trace_g, Metric,
};

/// One-forms with S-image below this relative ratio count as kernel
/// elements.
pub const KERNEL_RATIO_THRESHOLD: f64 = 1e-8;

/// Sup-norm bound on the metric trace of a tensor offered for
/// decomposition.
pub const TRACE_FREE_INPUT_SUP: f64 = 1e-8;

/// Largest tolerated relative overlap between a right-hand side and the
/// deflated kernel before the system is declared inconsistent.
const RHS_KERNEL_OVERLAP: f64 = 1e-8;

/// Right-hand sides with L² norm at or below this are treated as zero;
/// differentiating exact constants leaves round-off of about this size.
const NEGLIGIBLE_RHS: f64 = 1e-13;

/// A recovered part whose norm falls below this fraction of the input is
/// numerically zero for diagnostic purposes.
const PART_NOISE_RATIO: f64 = 1e-9;

/// Iterative solver knobs. `max_iterations: None` caps at ten times the
/// grid point count.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub rel_tolerance: f64,
    pub max_iterations: Option<usize>,
    /// Kernel elements to deflate; orthonormalized internally.
    pub deflation: Vec<OneForm>,
    /// Scale each residual by the inverse flat-torus symbol before the CG
    /// update. Exactly symmetric only for the flat metric; off by default.
    pub flat_preconditioner: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rel_tolerance: 1e-10,
            max_iterations: None,
            deflation: Vec::new(),
            flat_preconditioner: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tolerance > 0.0 && self.rel_tolerance < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "rel_tolerance must lie in (0, 1), got {}",
                self.rel_tolerance
            )));
        }
        if let Some(0) = self.max_iterations {
            return Err(Error::InvalidArgument(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn iteration_cap(&self, total_points: usize) -> usize {
        self.max_iterations.unwrap_or(10 * total_points)
    }
}

/// Solution of one conjugate-gradient run.
#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub solution: OneForm,
    pub iterations: usize,
    /// Relative L² residual at exit.
    pub final_residual: f64,
}

fn orthonormalize(g: &Metric, basis: &[OneForm]) -> Vec<OneForm> {
    let mut ortho: Vec<OneForm> = Vec::with_capacity(basis.len());
    for candidate in basis {
        let mut v = candidate.clone();
        for u in &ortho {
            let coeff = l2_inner_oneform(g, &v, u);
            v.add_scaled(-coeff, u);
        }
        let norm = l2_norm_oneform(g, &v);
        if norm > 1e-12 {
            ortho.push(v.scale(1.0 / norm));
        }
    }
    ortho
}

fn project_out(g: &Metric, v: &mut OneForm, basis: &[OneForm]) {
    for u in basis {
        let coeff = l2_inner_oneform(g, v, u);
        v.add_scaled(-coeff, u);
    }
}

fn flat_precondition(v: &OneForm) -> OneForm {
    let grid = v.grid();
    let dims = grid.resolution().to_vec();
    let periods = grid.periods().to_vec();
    v.map_components(|c| {
        let values = fft::apply_symbol(c.values(), &dims, &periods, |omega| {
            let w2: f64 = omega.iter().map(|w| w * w).sum();
            1.0 / (1.0 + 0.5 * w2)
        });
        ScalarField::from_values(grid, values)
    })
}

/// Solves (div_sym . S) theta = rhs by deflated conjugate gradients in the
/// L²(dvol_g) inner product. The returned iterate satisfies
/// ||A theta - rhs|| <= rel_tolerance * ||rhs|| and is orthogonal to the
/// deflation basis.
pub fn cg_solve(g: &Metric, rhs: &OneForm, config: &SolverConfig) -> Result<CgOutcome> {
    config.validate()?;
    let grid = g.grid();
    let basis = orthonormalize(g, &config.deflation);

    let rhs_norm = l2_norm_oneform(g, rhs);
    if rhs_norm <= NEGLIGIBLE_RHS {
        return Ok(CgOutcome {
            solution: OneForm::zeros(grid),
            iterations: 0,
            final_residual: 0.0,
        });
    }
    for u in &basis {
        let overlap = l2_inner_oneform(g, rhs, u).abs();
        if overlap > RHS_KERNEL_OVERLAP * rhs_norm {
            return Err(Error::InconsistentSystem(format!(
                "relative kernel overlap {:.3e} exceeds {:.1e}",
                overlap / rhs_norm,
                RHS_KERNEL_OVERLAP
            )));
        }
    }

    let cap = config.iteration_cap(grid.total_points());
    let mut x = OneForm::zeros(grid);
    let mut r = rhs.clone();
    project_out(g, &mut r, &basis);
    let mut z = if config.flat_preconditioner {
        flat_precondition(&r)
    } else {
        r.clone()
    };
    let mut p = z.clone();
    let mut rz = l2_inner_oneform(g, &r, &z);
    let mut history = Vec::new();

    for iteration in 1..=cap {
        let mut ap = ahlfors_laplacian(g, &p);
        project_out(g, &mut ap, &basis);
        let p_ap = l2_inner_oneform(g, &p, &ap);
        if !(p_ap > 0.0) {
            return Err(Error::SolverFailure {
                iterations: iteration - 1,
                residual: history.last().copied().unwrap_or(1.0),
                history,
            });
        }
        let alpha = rz / p_ap;
        x.add_scaled(alpha, &p);
        r.add_scaled(-alpha, &ap);
        // re-project every iteration so round-off cannot reintroduce the
        // deflated directions
        project_out(g, &mut x, &basis);
        project_out(g, &mut r, &basis);

        let rel = l2_norm_oneform(g, &r) / rhs_norm;
        history.push(rel);
        if rel <= config.rel_tolerance {
            return Ok(CgOutcome {
                solution: x,
                iterations: iteration,
                final_residual: rel,
            });
        }

        z = if config.flat_preconditioner {
            flat_precondition(&r)
        } else {
            r.clone()
        };
        let rz_next = l2_inner_oneform(g, &r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        let mut p_next = z.clone();
        p_next.add_scaled(beta, &p);
        p = p_next;
    }

    let residual = history.last().copied().unwrap_or(1.0);
    Err(Error::SolverFailure {
        iterations: cap,
        residual,
        history,
    })
}

/// Conformal Killing one-forms of (grid, g) among the constant one-forms:
/// candidates whose S-image is below [`KERNEL_RATIO_THRESHOLD`] relative to
/// their own norm. Generic curved metrics return an empty list.
pub fn kernel_basis(g: &Metric) -> Vec<OneForm> {
    let grid = g.grid();
    let n = g.dimension();
    (0..n)
        .filter_map(|a| {
            let mut coeffs = vec![0.0; n];
            coeffs[a] = 1.0;
            let kappa = OneForm::constant(grid, &coeffs);
            let ratio =
                l2_norm_sym(g, &cauchy_ahlfors(g, &kappa)) / l2_norm_oneform(g, &kappa);
            (ratio < KERNEL_RATIO_THRESHOLD).then_some(kappa)
        })
        .collect()
}

/// Scale-free quality numbers of one decomposition.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub cg_iterations: usize,
    pub final_residual: f64,
    /// |<S theta, phi_tt>| / (||S theta|| ||phi_tt||); reported as 0 when
    /// either part is numerically zero (the angle is undefined there).
    pub orthogonality_defect: f64,
    /// L² norm of div phi_tt.
    pub tt_divergence_norm: f64,
    /// Largest pointwise metric trace over both output parts.
    pub trace_norm: f64,
}

/// Result of splitting a trace-free tensor: the potential theta, its image
/// S theta, and the transverse-traceless remainder.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub theta: OneForm,
    pub s_theta: SymTensor2,
    pub phi_tt: SymTensor2,
    pub diagnostics: Diagnostics,
}

/// Splits a trace-free symmetric tensor as phi0 = S theta + phi_tt. When
/// the config carries no deflation basis the kernel is detected
/// automatically. The remainder is formed as phi0 - S theta, so
/// reconstruction is exact by construction.
pub fn decompose_traceless(
    g: &Metric,
    phi0: &SymTensor2,
    config: &SolverConfig,
) -> Result<Decomposition> {
    let trace_sup = trace_g(phi0, g).sup_norm();
    if trace_sup > TRACE_FREE_INPUT_SUP {
        return Err(Error::InvalidArgument(format!(
            "input tensor has metric trace {trace_sup:.3e} (must be trace-free)"
        )));
    }

    let mut config = config.clone();
    if config.deflation.is_empty() {
        config.deflation = kernel_basis(g);
    }

    let rhs = div_sym(g, phi0);
    let outcome = cg_solve(g, &rhs, &config)?;
    let theta = outcome.solution;
    let s_theta = cauchy_ahlfors(g, &theta);
    let phi_tt = phi0 - &s_theta;

    let s_norm = l2_norm_sym(g, &s_theta);
    let tt_norm = l2_norm_sym(g, &phi_tt);
    // A part this far below the input is solver residue; the angle to it
    // carries no information, so it is reported as orthogonal.
    let noise = PART_NOISE_RATIO * l2_norm_sym(g, phi0);
    let orthogonality_defect = if s_norm > noise && tt_norm > noise {
        l2_inner_sym(g, &s_theta, &phi_tt).abs() / (s_norm * tt_norm)
    } else {
        0.0
    };
    let diagnostics = Diagnostics {
        cg_iterations: outcome.iterations,
        final_residual: outcome.final_residual,
        orthogonality_defect,
        tt_divergence_norm: l2_norm_oneform(g, &div_sym(g, &phi_tt)),
        trace_norm: trace_g(&s_theta, g)
            .sup_norm()
            .max(trace_g(&phi_tt, g).sup_norm()),
    };
    Ok(Decomposition {
        theta,
        s_theta,
        phi_tt,
        diagnostics,
    })
}

/// The constant c(n) = -(n-2)/(2n) relating the potential of the traceless
/// Ricci tensor to the scalar-curvature gradient: (div_sym . S) theta
/// = c(n) ds. Derived from div Ric = -ds/2 and div(s g / n) = -(1/n) ds.
pub fn scalar_gradient_constant(dimension: usize) -> f64 {
    -((dimension as f64) - 2.0) / (2.0 * dimension as f64)
}

/// Decomposition of the traceless Ricci tensor plus the scalar-curvature
/// identities tied to it.
#[derive(Debug, Clone)]
pub struct RicciSplitReport {
    pub decomposition: Decomposition,
    /// c(n) as used in the residuals below.
    pub gradient_constant: f64,
    /// ||Delta theta - c ds|| / ||ds||.
    pub gradient_residual: f64,
    /// Same residual under 2c; kept for comparison, expected to sit near
    /// |c| instead of near zero.
    pub gradient_residual_doubled: f64,
    /// <S theta, S theta>.
    pub energy_lhs: f64,
    /// c * integral of (Lie_xi s) dvol, xi = theta sharp.
    pub energy_rhs: f64,
    /// |lhs - rhs| / max(|lhs|, |rhs|).
    pub energy_residual: f64,
    /// Energy mismatch under 2c.
    pub energy_residual_doubled: f64,
}

/// Splits Ric - (s/n) g and checks the two scalar-curvature identities the
/// split satisfies. Requires n >= 3: both constants degenerate to zero in
/// two dimensions.
pub fn split_traceless_ricci(g: &Metric, config: &SolverConfig) -> Result<RicciSplitReport> {
    let n = g.dimension();
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "the scalar-gradient identities need dimension >= 3, got {n}"
        )));
    }

    let ric = ricci(g);
    let s = scalar_curvature(g, &ric);
    let mut ric0 = ric;
    let n_f = n as f64;
    for slot_a in 0..n {
        for slot_b in slot_a..n {
            let correction = s.zip(g.components().get(slot_a, slot_b), |sv, gv| sv / n_f * gv);
            ric0.get_mut(slot_a, slot_b).add_scaled(-1.0, &correction);
        }
    }

    let decomposition = decompose_traceless(g, &ric0, config)?;
    let c = scalar_gradient_constant(n);

    let lap = ahlfors_laplacian(g, &decomposition.theta);
    let ds = ext_d_scalar(&s);
    let ds_norm = l2_norm_oneform(g, &ds).max(1e-14);
    let residual_for = |constant: f64| {
        let mut diff = lap.clone();
        diff.add_scaled(-constant, &ds);
        l2_norm_oneform(g, &diff) / ds_norm
    };
    let gradient_residual = residual_for(c);
    let gradient_residual_doubled = residual_for(2.0 * c);

    let energy_lhs = l2_inner_sym(g, &decomposition.s_theta, &decomposition.s_theta);
    let xi = sharp(g, &decomposition.theta);
    let advected = directional_derivative(&xi, &s);
    let lie_integral = weighted_sum(&advected, g.volume_density());
    let energy_rhs = c * lie_integral;
    let energy_denom = energy_lhs.abs().max(energy_rhs.abs()).max(1e-14);
    let energy_residual = (energy_lhs - energy_rhs).abs() / energy_denom;
    let doubled_rhs = 2.0 * c * lie_integral;
    let doubled_denom = energy_lhs.abs().max(doubled_rhs.abs()).max(1e-14);
    let energy_residual_doubled = (energy_lhs - doubled_rhs).abs() / doubled_denom;

    Ok(RicciSplitReport {
        decomposition,
        gradient_constant: c,
        gradient_residual,
        gradient_residual_doubled,
        energy_lhs,
        energy_rhs,
        energy_residual,
        energy_residual_doubled,
    })
}
