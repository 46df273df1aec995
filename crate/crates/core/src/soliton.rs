//! Almost-Ricci-soliton residuals and fitting. A triple (g, V, lambda)
//! is an almost Ricci soliton when Ric = ½ L_V g + lambda g with lambda a
//! function (a genuine soliton when lambda is constant). Any metric splits
//! as Ric = delta_star(theta) + lambda g + phi_tt through the trace-free
//! decomposition; the soliton class is exactly phi_tt = 0, so the fitted
//! remainder measures how far a metric is from soliton form.

use crate::ahlfors::{delta_oneform, delta_star};
use crate::decomp::{decompose_traceless, SolverConfig};
use crate::error::{Error, Result};
use crate::fields::{sym_pairs, OneForm, SymTensor2};
use crate::grid::{weighted_sum, ScalarField};
use crate::tensor::{
    covariant_derivative_oneform, directional_derivative, l2_norm_sym, lie_derivative_metric,
    lower, ricci, scalar_curvature, sharp, traceless_ricci, Metric,
};

/// Norms at or below this count as zero when forming relative deviations;
/// ratios of round-off against round-off carry no information.
pub const DEVIATION_FLOOR: f64 = 1e-14;

/// Soliton-form fit of a metric: Ric = delta_star(theta) + lambda g +
/// phi_tt, exact by construction.
#[derive(Debug, Clone)]
pub struct SolitonFit {
    /// Potential one-form; the soliton vector field is its raised version.
    pub theta: OneForm,
    /// lambda = (s + delta theta)/n, equivalently s = -delta theta +
    /// n lambda pointwise.
    pub lambda_field: ScalarField,
    /// Transverse-traceless remainder; zero exactly when the metric is an
    /// almost Ricci soliton.
    pub phi_tt: SymTensor2,
    /// ||phi_tt|| / ||Ric|| in L², with both norms floored at
    /// [`DEVIATION_FLOOR`]; 0 when the remainder is at round-off.
    pub deviation: f64,
    /// sup lambda - inf lambda; 0 for a genuine (constant-lambda) soliton.
    pub lambda_variation: f64,
}

impl SolitonFit {
    /// The soliton vector field V = theta sharp, oriented so that
    /// Ric = ½ L_V g + lambda g + phi_tt holds with the stored fields.
    pub fn vector_field(&self, g: &Metric) -> OneForm {
        sharp(g, &self.theta)
    }
}

/// Pointwise soliton defect Ric - ½ L_V g - lambda g; identically zero
/// exactly when (g, V, lambda) is an almost Ricci soliton. `v` holds
/// contravariant components.
pub fn soliton_residual(g: &Metric, v: &OneForm, lambda: &ScalarField) -> SymTensor2 {
    let lie = lie_derivative_metric(g, v);
    let mut out = ricci(g);
    for (a, b, _) in sym_pairs(g.dimension()) {
        out.get_mut(a, b).add_scaled(-0.5, lie.get(a, b));
        let weighted = lambda * g.components().get(a, b);
        out.get_mut(a, b).add_scaled(-1.0, &weighted);
    }
    out
}

/// Fits soliton form to a metric by decomposing the traceless Ricci
/// tensor. The deviation is zero (to solver precision) precisely for
/// almost Ricci solitons; in two dimensions it always is, since the
/// traceless Ricci tensor vanishes identically there.
pub fn fit_almost_soliton(g: &Metric, config: &SolverConfig) -> Result<SolitonFit> {
    let ric = ricci(g);
    let s = scalar_curvature(g, &ric);
    let ric0 = traceless_ricci(g);
    let dec = decompose_traceless(g, &ric0, config)?;

    let n = g.dimension() as f64;
    let delta_theta = delta_oneform(g, &dec.theta);
    let lambda_field = s.zip(&delta_theta, |sv, dv| (sv + dv) / n);

    let tt_norm = l2_norm_sym(g, &dec.phi_tt);
    let deviation = if tt_norm <= DEVIATION_FLOOR {
        0.0
    } else {
        tt_norm / l2_norm_sym(g, &ric).max(DEVIATION_FLOOR)
    };

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in lambda_field.values() {
        lo = lo.min(v);
        hi = hi.max(v);
    }

    Ok(SolitonFit {
        theta: dec.theta,
        lambda_field,
        phi_tt: dec.phi_tt,
        deviation,
        lambda_variation: hi - lo,
    })
}

/// Both sides of the two-dimensional soliton integral identity:
/// lhs = integral of s·g(xi, xi) dvol, rhs = 2 <nabla xi, nabla xi>.
/// Reported as a pair; equality is expected only on soliton data, so
/// nothing is asserted here. `xi` holds contravariant components.
pub fn integral_identity_2d(g: &Metric, xi: &OneForm) -> Result<(f64, f64)> {
    if g.dimension() != 2 {
        return Err(Error::InvalidArgument(format!(
            "the integral identity is two-dimensional, got n = {}",
            g.dimension()
        )));
    }
    let grid = g.grid();
    let theta = lower(g, xi);

    let ric = ricci(g);
    let s = scalar_curvature(g, &ric);
    let mut speed_sq = ScalarField::zeros(grid);
    for a in 0..2 {
        speed_sq.add_scaled(1.0, &(theta.component(a) * xi.component(a)));
    }
    let lhs = weighted_sum(&(&s * &speed_sq), g.volume_density());

    // full contraction g^{ac} g^{bd} (nabla_a theta_b)(nabla_c theta_d);
    // lowering xi first costs nothing since the connection is metric
    let grad = covariant_derivative_oneform(g, &theta);
    let mut density = ScalarField::zeros(grid);
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    let pair = grad.get(a, b) * grad.get(c, d);
                    let weight = g.inverse().get(a, c) * g.inverse().get(b, d);
                    density.add_scaled(1.0, &(&pair * &weight));
                }
            }
        }
    }
    let rhs = 2.0 * weighted_sum(&density, g.volume_density());
    Ok((lhs, rhs))
}

/// Integral of the advected scalar, ∫ (V f) dvol_g. Vanishing of this
/// integral for f = s is the hypothesis of the compact-soliton rigidity
/// statements; reported as a diagnostic.
pub fn advected_integral(g: &Metric, v: &OneForm, f: &ScalarField) -> f64 {
    weighted_sum(&directional_derivative(v, f), g.volume_density())
}

/// Reconstruction defect ||Ric - delta_star(theta) - lambda g - phi_tt||
/// / ||Ric|| in L²; round-off-level for any fit output.
pub fn reconstruction_defect(g: &Metric, fit: &SolitonFit) -> f64 {
    let mut residual = ricci(g);
    let ric_norm = l2_norm_sym(g, &residual);
    let image = delta_star(g, &fit.theta);
    for (a, b, _) in sym_pairs(g.dimension()) {
        residual.get_mut(a, b).add_scaled(-1.0, image.get(a, b));
        let weighted = &fit.lambda_field * g.components().get(a, b);
        residual.get_mut(a, b).add_scaled(-1.0, &weighted);
        residual.get_mut(a, b).add_scaled(-1.0, fit.phi_tt.get(a, b));
    }
    l2_norm_sym(g, &residual) / ric_norm.max(DEVIATION_FLOOR)
}
