//! Riemannian tensor calculus on periodic grids: metrics with cached
//! Christoffel symbols, Ricci and scalar curvature, covariant and Lie
//! derivatives, musical isomorphisms, and L² inner products.
//!
//! Contravariant objects (metric inverse, sharped one-forms) reuse the
//! covariant storage types; the variance is stated at each site instead of
//! being encoded in a parallel type hierarchy.

use crate::error::{Error, Result};
use crate::fields::{sym_pairs, OneForm, SymTensor2, Tensor2Field};
use crate::grid::{integrate, weighted_sum, GridSpec, ScalarField};
use crate::linalg;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Smallest admissible metric eigenvalue; anything at or below counts as
/// degenerate.
const EIGENVALUE_FLOOR: f64 = 1e-12;

/// Levi-Civita connection coefficients. `component(c, a, b)` is
/// Γ^c_{ab}, symmetric in (a, b) by storage.
#[derive(Debug, Clone)]
pub struct Christoffel {
    gamma: Vec<SymTensor2>,
}

impl Christoffel {
    pub fn component(&self, c: usize, a: usize, b: usize) -> &ScalarField {
        self.gamma[c].get(a, b)
    }

    pub fn sup_norm(&self) -> f64 {
        self.gamma.iter().fold(0.0, |acc, g| acc.max(g.sup_norm()))
    }
}

/// Riemannian metric sampled on a grid, with inverse, volume element, and a
/// lazily computed connection.
#[derive(Debug)]
pub struct Metric {
    components: SymTensor2,
    inverse: SymTensor2,
    volume_density: ScalarField,
    christoffel: OnceLock<Christoffel>,
}

impl Clone for Metric {
    fn clone(&self) -> Self {
        Metric {
            components: self.components.clone(),
            inverse: self.inverse.clone(),
            volume_density: self.volume_density.clone(),
            christoffel: OnceLock::new(),
        }
    }
}

impl Metric {
    /// Builds a metric from its covariant components, checking positive
    /// definiteness pointwise and populating the inverse and volume element.
    pub fn from_components(components: SymTensor2) -> Result<Metric> {
        let grid = components.grid().clone();
        let n = grid.dimension();
        let total = grid.total_points();
        let mut inverse_values: Vec<Vec<f64>> = vec![Vec::with_capacity(total); n * (n + 1) / 2];
        let mut density_values = Vec::with_capacity(total);
        for index in 0..total {
            let m = components.matrix_at(index);
            let eigs = linalg::symmetric_eigenvalues(&m, n);
            if eigs[0] <= EIGENVALUE_FLOOR {
                return Err(Error::DegenerateMetric {
                    index,
                    coords: grid.point_coords(index),
                    detail: format!("smallest eigenvalue {:.3e} is not positive", eigs[0]),
                });
            }
            let (inv, det) = linalg::invert_symmetric(&m, n).ok_or(Error::DegenerateMetric {
                index,
                coords: grid.point_coords(index),
                detail: "matrix inversion broke down".into(),
            })?;
            for (slot, (a, b, _)) in sym_pairs(n).enumerate() {
                inverse_values[slot].push(inv[a * n + b]);
            }
            density_values.push(det.sqrt());
        }
        let inverse = SymTensor2::from_components(
            &grid,
            inverse_values
                .into_iter()
                .map(|v| ScalarField::from_values(&grid, v))
                .collect(),
        );
        let volume_density = ScalarField::from_values(&grid, density_values);
        Ok(Metric {
            components,
            inverse,
            volume_density,
            christoffel: OnceLock::new(),
        })
    }

    /// The flat (identity) metric.
    pub fn flat(grid: &GridSpec) -> Metric {
        Metric::from_components(SymTensor2::kronecker(grid)).expect("identity metric is definite")
    }

    pub fn grid(&self) -> &GridSpec {
        self.components.grid()
    }

    pub fn dimension(&self) -> usize {
        self.components.dimension()
    }

    /// Covariant components g_{ab}.
    pub fn components(&self) -> &SymTensor2 {
        &self.components
    }

    /// Contravariant components g^{ab}, stored in the covariant shape.
    pub fn inverse(&self) -> &SymTensor2 {
        &self.inverse
    }

    /// √det g.
    pub fn volume_density(&self) -> &ScalarField {
        &self.volume_density
    }

    /// Connection coefficients, computed on first use and cached.
    pub fn christoffel(&self) -> &Christoffel {
        self.christoffel.get_or_init(|| compute_christoffel(self))
    }
}

/// One Fourier mode of a scalar field: `amplitude * cos(k . x + phase)`
/// with `k . x = sum_a 2 pi k_a x_a / L_a`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FourierMode {
    pub amplitude: f64,
    pub wavevector: Vec<i64>,
    #[serde(default)]
    pub phase: f64,
}

impl FourierMode {
    pub(crate) fn eval(&self, coords: &[f64], periods: &[f64]) -> f64 {
        let arg: f64 = self
            .wavevector
            .iter()
            .zip(coords)
            .zip(periods)
            .map(|((&k, &x), &length)| 2.0 * PI * k as f64 * x / length)
            .sum();
        self.amplitude * (arg + self.phase).cos()
    }
}

/// One perturbation of a metric component: adds
/// `amplitude * cos(k . x + phase)` to g_{ab} (and g_{ba}).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbationEntry {
    pub a: usize,
    pub b: usize,
    pub amplitude: f64,
    pub wavevector: Vec<i64>,
    #[serde(default)]
    pub phase: f64,
}

/// Declarative metric family used by configs and tests. Axis indices are
/// zero-based; all wavevectors must respect the grid band limit.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MetricSpec {
    /// g = identity.
    Flat,
    /// g = e^{2f} * identity with f the sum of the given modes.
    Conformal { modes: Vec<FourierMode> },
    /// g_{ab} = delta_{ab} + the given cosine perturbations.
    Perturbation { entries: Vec<PerturbationEntry> },
}

/// Realizes a [`MetricSpec`] on a grid. Fails on band-limit violations,
/// out-of-range indices, or a resulting metric that is not positive
/// definite.
pub fn metric_from_spec(spec: &MetricSpec, grid: &GridSpec) -> Result<Metric> {
    let n = grid.dimension();
    match spec {
        MetricSpec::Flat => Ok(Metric::flat(grid)),
        MetricSpec::Conformal { modes } => {
            for mode in modes {
                grid.check_wavevector(&mode.wavevector)?;
            }
            let periods = grid.periods().to_vec();
            let factor = ScalarField::from_fn(grid, |x| {
                let f: f64 = modes.iter().map(|m| m.eval(x, &periods)).sum();
                (2.0 * f).exp()
            });
            let mut components = SymTensor2::zeros(grid);
            for a in 0..n {
                *components.get_mut(a, a) = factor.clone();
            }
            Metric::from_components(components)
        }
        MetricSpec::Perturbation { entries } => {
            for entry in entries {
                if entry.a >= n || entry.b >= n {
                    return Err(Error::InvalidArgument(format!(
                        "perturbation indices ({}, {}) out of range for dimension {n}",
                        entry.a, entry.b
                    )));
                }
                grid.check_wavevector(&entry.wavevector)?;
            }
            let periods = grid.periods().to_vec();
            let mut components = SymTensor2::kronecker(grid);
            for entry in entries {
                let mode = FourierMode {
                    amplitude: entry.amplitude,
                    wavevector: entry.wavevector.clone(),
                    phase: entry.phase,
                };
                let bump = ScalarField::from_fn(grid, |x| mode.eval(x, &periods));
                components.get_mut(entry.a, entry.b).add_scaled(1.0, &bump);
            }
            Metric::from_components(components)
        }
    }
}

fn mul_add_into(acc: &mut [f64], a: &ScalarField, b: &ScalarField, weight: f64) {
    for ((o, &x), &y) in acc.iter_mut().zip(a.values()).zip(b.values()) {
        *o += weight * x * y;
    }
}

fn compute_christoffel(g: &Metric) -> Christoffel {
    let grid = g.grid();
    let n = grid.dimension();
    let total = grid.total_points();

    // dg[c] holds the componentwise partials of g along axis c
    let dg: Vec<SymTensor2> = (0..n)
        .map(|c| g.components().map_components(|comp| comp.derivative(c)))
        .collect();

    let gamma = (0..n)
        .map(|c| {
            let mut fields = Vec::with_capacity(n * (n + 1) / 2);
            for a in 0..n {
                for b in a..n {
                    let mut acc = vec![0.0; total];
                    for d in 0..n {
                        let ginv = g.inverse().get(c, d);
                        mul_add_into(&mut acc, ginv, dg[a].get(b, d), 0.5);
                        mul_add_into(&mut acc, ginv, dg[b].get(a, d), 0.5);
                        mul_add_into(&mut acc, ginv, dg[d].get(a, b), -0.5);
                    }
                    fields.push(ScalarField::from_values(grid, acc));
                }
            }
            SymTensor2::from_components(grid, fields)
        })
        .collect();
    Christoffel { gamma }
}

/// Ricci tensor Ric_{ab} from the connection:
/// dGamma^c_{ab}/dx^c - d(trGamma)_{(a}/dx^{b)} + trGamma_d Gamma^d_{ab}
/// - Gamma^c_{ad} Gamma^d_{cb}, with trGamma_b = Gamma^c_{cb}. The second
/// term is written in symmetrized form so the output is symmetric by
/// construction rather than up to round-off.
pub fn ricci(g: &Metric) -> SymTensor2 {
    let grid = g.grid();
    let n = grid.dimension();
    let total = grid.total_points();
    let gamma = g.christoffel();

    let trace_gamma: Vec<ScalarField> = (0..n)
        .map(|b| {
            let mut acc = ScalarField::zeros(grid);
            for c in 0..n {
                acc.add_scaled(1.0, gamma.component(c, c, b));
            }
            acc
        })
        .collect();
    let d_trace: Vec<Vec<ScalarField>> = (0..n)
        .map(|a| (0..n).map(|b| trace_gamma[b].derivative(a)).collect())
        .collect();

    let mut fields = Vec::with_capacity(n * (n + 1) / 2);
    for a in 0..n {
        for b in a..n {
            let mut acc = ScalarField::zeros(grid);
            for c in 0..n {
                acc.add_scaled(1.0, &gamma.component(c, a, b).derivative(c));
            }
            acc.add_scaled(-0.5, &d_trace[a][b]);
            acc.add_scaled(-0.5, &d_trace[b][a]);

            let mut quad = vec![0.0; total];
            for d in 0..n {
                mul_add_into(&mut quad, &trace_gamma[d], gamma.component(d, a, b), 1.0);
                for c in 0..n {
                    mul_add_into(
                        &mut quad,
                        gamma.component(c, a, d),
                        gamma.component(d, c, b),
                        -1.0,
                    );
                }
            }
            acc.add_scaled(1.0, &ScalarField::from_values(grid, quad));
            fields.push(acc);
        }
    }
    SymTensor2::from_components(grid, fields)
}

/// Scalar curvature s = g^{ab} Ric_{ab}.
pub fn scalar_curvature(g: &Metric, ric: &SymTensor2) -> ScalarField {
    trace_g(ric, g)
}

/// Traceless Ricci tensor Ric - (s/n) g.
pub fn traceless_ricci(g: &Metric) -> SymTensor2 {
    let ric = ricci(g);
    let s = scalar_curvature(g, &ric);
    remove_trace(&ric, &s, g)
}

/// phi - (tr/n) g for a precomputed trace field.
fn remove_trace(phi: &SymTensor2, trace: &ScalarField, g: &Metric) -> SymTensor2 {
    let n = g.dimension() as f64;
    let mut out = phi.clone();
    for (a, b, _) in sym_pairs(g.dimension()) {
        let correction = trace.zip(g.components().get(a, b), |t, gab| t / n * gab);
        *out.get_mut(a, b) = &(out.get(a, b).clone()) - &correction;
    }
    out
}

/// Covariant derivative of a one-form: (a, b) entry is
/// nabla_a theta_b = d theta_b / dx^a - Gamma^c_{ab} theta_c.
pub fn covariant_derivative_oneform(g: &Metric, theta: &OneForm) -> Tensor2Field {
    let grid = g.grid();
    let n = grid.dimension();
    let total = grid.total_points();
    let gamma = g.christoffel();
    let mut out = Tensor2Field::zeros(grid);
    for a in 0..n {
        for b in 0..n {
            let mut acc = theta.component(b).derivative(a);
            let mut corr = vec![0.0; total];
            for c in 0..n {
                mul_add_into(&mut corr, gamma.component(c, a, b), theta.component(c), -1.0);
            }
            acc.add_scaled(1.0, &ScalarField::from_values(grid, corr));
            *out.get_mut(a, b) = acc;
        }
    }
    out
}

/// Covariant derivative of a symmetric 2-tensor; element `c` of the result
/// holds nabla_c phi_{ab} = d phi_{ab}/dx^c - Gamma^d_{ca} phi_{db}
/// - Gamma^d_{cb} phi_{ad}.
pub fn covariant_derivative_sym(g: &Metric, phi: &SymTensor2) -> Vec<SymTensor2> {
    let grid = g.grid();
    let n = grid.dimension();
    let total = grid.total_points();
    let gamma = g.christoffel();
    (0..n)
        .map(|c| {
            let mut fields = Vec::with_capacity(n * (n + 1) / 2);
            for a in 0..n {
                for b in a..n {
                    let mut acc = phi.get(a, b).derivative(c);
                    let mut corr = vec![0.0; total];
                    for d in 0..n {
                        mul_add_into(&mut corr, gamma.component(d, c, a), phi.get(d, b), -1.0);
                        mul_add_into(&mut corr, gamma.component(d, c, b), phi.get(a, d), -1.0);
                    }
                    acc.add_scaled(1.0, &ScalarField::from_values(grid, corr));
                    fields.push(acc);
                }
            }
            SymTensor2::from_components(grid, fields)
        })
        .collect()
}

/// Lie derivative of the metric along the vector field with contravariant
/// components `xi`: (L_xi g)_{ab} = nabla_a theta_b + nabla_b theta_a with
/// theta = xi lowered by g.
pub fn lie_derivative_metric(g: &Metric, xi: &OneForm) -> SymTensor2 {
    let theta = lower(g, xi);
    let grad = covariant_derivative_oneform(g, &theta);
    let mut out = SymTensor2::zeros(g.grid());
    for (a, b, _) in sym_pairs(g.dimension()) {
        *out.get_mut(a, b) = grad.get(a, b) + grad.get(b, a);
    }
    out
}

/// Directional derivative xi^a df/dx^a of a scalar along a contravariant
/// vector field. The Lie derivative of a function.
pub fn directional_derivative(xi: &OneForm, f: &ScalarField) -> ScalarField {
    let grid = f.grid();
    let total = grid.total_points();
    let mut acc = vec![0.0; total];
    for a in 0..grid.dimension() {
        mul_add_into(&mut acc, xi.component(a), &f.derivative(a), 1.0);
    }
    ScalarField::from_values(grid, acc)
}

/// Raises the index: xi^a = g^{ab} theta_b. The result stores contravariant
/// components in the one-form shape.
pub fn sharp(g: &Metric, theta: &OneForm) -> OneForm {
    contract_with(g.inverse(), theta)
}

/// Lowers the index: theta_a = g_{ab} xi^b.
pub fn lower(g: &Metric, xi: &OneForm) -> OneForm {
    contract_with(g.components(), xi)
}

fn contract_with(matrix: &SymTensor2, v: &OneForm) -> OneForm {
    let grid = v.grid();
    let n = grid.dimension();
    let total = grid.total_points();
    let components = (0..n)
        .map(|a| {
            let mut acc = vec![0.0; total];
            for b in 0..n {
                mul_add_into(&mut acc, matrix.get(a, b), v.component(b), 1.0);
            }
            ScalarField::from_values(grid, acc)
        })
        .collect();
    OneForm::from_components(components)
}

/// Pointwise metric trace g^{ab} phi_{ab}.
pub fn trace_g(phi: &SymTensor2, g: &Metric) -> ScalarField {
    let grid = g.grid();
    let mut acc = vec![0.0; grid.total_points()];
    for (a, b, weight) in sym_pairs(g.dimension()) {
        mul_add_into(&mut acc, g.inverse().get(a, b), phi.get(a, b), weight);
    }
    ScalarField::from_values(grid, acc)
}

/// Pointwise inner product of two one-forms, g^{ab} theta_a theta'_b.
pub fn pointwise_inner_oneform(g: &Metric, theta: &OneForm, other: &OneForm) -> ScalarField {
    let grid = g.grid();
    let n = g.dimension();
    let mut acc = vec![0.0; grid.total_points()];
    for a in 0..n {
        for b in 0..n {
            let product = theta.component(a) * other.component(b);
            mul_add_into(&mut acc, g.inverse().get(a, b), &product, 1.0);
        }
    }
    ScalarField::from_values(grid, acc)
}

/// Pointwise inner product of two symmetric 2-tensors,
/// g^{ac} g^{bd} phi_{ab} psi_{cd}.
pub fn pointwise_inner_sym(g: &Metric, phi: &SymTensor2, psi: &SymTensor2) -> ScalarField {
    let raised = raise_sym(g, phi);
    let grid = g.grid();
    let mut acc = vec![0.0; grid.total_points()];
    for (a, b, weight) in sym_pairs(g.dimension()) {
        mul_add_into(&mut acc, raised.get(a, b), psi.get(a, b), weight);
    }
    ScalarField::from_values(grid, acc)
}

/// Both indices raised: phi^{ab} = g^{ac} g^{bd} phi_{cd}, stored in the
/// covariant shape.
pub fn raise_sym(g: &Metric, phi: &SymTensor2) -> SymTensor2 {
    let grid = g.grid();
    let n = g.dimension();
    let total = grid.total_points();
    let mut fields = Vec::with_capacity(n * (n + 1) / 2);
    for a in 0..n {
        for b in a..n {
            let mut acc = vec![0.0; total];
            for c in 0..n {
                for d in 0..n {
                    mul_add_into(
                        &mut acc,
                        &(g.inverse().get(a, c) * g.inverse().get(b, d)),
                        phi.get(c, d),
                        1.0,
                    );
                }
            }
            fields.push(ScalarField::from_values(grid, acc));
        }
    }
    SymTensor2::from_components(grid, fields)
}

/// L² inner product of scalars, ∫ f f' dvol_g.
pub fn l2_inner_scalar(g: &Metric, f: &ScalarField, other: &ScalarField) -> f64 {
    weighted_sum(&(f * other), g.volume_density())
}

/// L² inner product of one-forms, ∫ g^{ab} theta_a theta'_b dvol_g.
pub fn l2_inner_oneform(g: &Metric, theta: &OneForm, other: &OneForm) -> f64 {
    weighted_sum(&pointwise_inner_oneform(g, theta, other), g.volume_density())
}

/// L² inner product of symmetric 2-tensors,
/// ∫ g^{ac} g^{bd} phi_{ab} psi_{cd} dvol_g.
pub fn l2_inner_sym(g: &Metric, phi: &SymTensor2, psi: &SymTensor2) -> f64 {
    weighted_sum(&pointwise_inner_sym(g, phi, psi), g.volume_density())
}

/// L² inner product of general 2-tensors (all four indices contracted with
/// the metric inverse pairwise).
pub fn l2_inner_tensor2(g: &Metric, t: &Tensor2Field, u: &Tensor2Field) -> f64 {
    let grid = g.grid();
    let n = g.dimension();
    let mut acc = vec![0.0; grid.total_points()];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    mul_add_into(
                        &mut acc,
                        &(g.inverse().get(a, c) * g.inverse().get(b, d)),
                        &(t.get(a, b) * u.get(c, d)),
                        1.0,
                    );
                }
            }
        }
    }
    weighted_sum(
        &ScalarField::from_values(grid, acc),
        g.volume_density(),
    )
}

pub fn l2_norm_scalar(g: &Metric, f: &ScalarField) -> f64 {
    l2_inner_scalar(g, f, f).max(0.0).sqrt()
}

pub fn l2_norm_oneform(g: &Metric, theta: &OneForm) -> f64 {
    l2_inner_oneform(g, theta, theta).max(0.0).sqrt()
}

pub fn l2_norm_sym(g: &Metric, phi: &SymTensor2) -> f64 {
    l2_inner_sym(g, phi, phi).max(0.0).sqrt()
}

/// Total volume ∫ dvol_g.
pub fn total_volume(g: &Metric) -> f64 {
    let one = ScalarField::constant(g.grid(), 1.0);
    integrate(&one, g.volume_density()).expect("volume density validated at construction")
}
