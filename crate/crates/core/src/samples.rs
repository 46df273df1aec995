//! Deterministic sample inputs: random band-limited tensor fields and the
//! stock metric families used by the verification pipelines.

use crate::error::Result;
use crate::fields::{OneForm, SymTensor2, TwoForm};
use crate::grid::{random_bandlimited_field, GridSpec};
use crate::tensor::{metric_from_spec, trace_g, FourierMode, Metric, MetricSpec, PerturbationEntry};

fn component_seed(seed: u64, index: u64) -> u64 {
    // splitmix-style stream separation so each component draws its own
    // independent field from one user-facing seed
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9))
}

/// Random band-limited one-form; componentwise independent fields.
pub fn random_oneform(grid: &GridSpec, seed: u64, max_mode: usize, amplitude: f64) -> Result<OneForm> {
    let components = (0..grid.dimension())
        .map(|a| random_bandlimited_field(grid, component_seed(seed, a as u64), max_mode, amplitude))
        .collect::<Result<Vec<_>>>()?;
    Ok(OneForm::from_components(components))
}

/// Random band-limited symmetric 2-tensor.
pub fn random_symtensor(
    grid: &GridSpec,
    seed: u64,
    max_mode: usize,
    amplitude: f64,
) -> Result<SymTensor2> {
    let n = grid.dimension();
    let components = (0..n * (n + 1) / 2)
        .map(|slot| {
            random_bandlimited_field(grid, component_seed(seed, 100 + slot as u64), max_mode, amplitude)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SymTensor2::from_components(grid, components))
}

/// Random band-limited two-form.
pub fn random_twoform(grid: &GridSpec, seed: u64, max_mode: usize, amplitude: f64) -> Result<TwoForm> {
    let n = grid.dimension();
    let components = (0..n * (n - 1) / 2)
        .map(|slot| {
            random_bandlimited_field(grid, component_seed(seed, 200 + slot as u64), max_mode, amplitude)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TwoForm::from_components(grid, components))
}

/// Random symmetric 2-tensor with the metric trace removed pointwise.
pub fn random_traceless(
    grid: &GridSpec,
    g: &Metric,
    seed: u64,
    max_mode: usize,
    amplitude: f64,
) -> Result<SymTensor2> {
    let raw = random_symtensor(grid, seed, max_mode, amplitude)?;
    let trace = trace_g(&raw, g);
    let n = g.dimension() as f64;
    let mut out = raw.clone();
    for slot_a in 0..g.dimension() {
        for slot_b in slot_a..g.dimension() {
            let correction = trace.zip(g.components().get(slot_a, slot_b), |t, gab| t / n * gab);
            *out.get_mut(slot_a, slot_b) = &(raw.get(slot_a, slot_b).clone()) - &correction;
        }
    }
    Ok(out)
}

/// Gently curved 3D metric used throughout the verification suite: a few
/// low-mode perturbations of the identity, small enough that derived
/// quantities (curvature, divergences) stay spectrally resolved on a 24
/// grid while still producing O(1e-2) curvature.
pub fn standard_perturbed_3d() -> MetricSpec {
    MetricSpec::Perturbation {
        entries: vec![
            PerturbationEntry {
                a: 0,
                b: 0,
                amplitude: 0.05,
                wavevector: vec![0, 1, 0],
                phase: 0.0,
            },
            PerturbationEntry {
                a: 0,
                b: 1,
                amplitude: 0.04,
                wavevector: vec![1, 0, 1],
                phase: 0.7,
            },
            PerturbationEntry {
                a: 1,
                b: 2,
                amplitude: 0.03,
                wavevector: vec![0, 1, 1],
                phase: 1.9,
            },
            PerturbationEntry {
                a: 2,
                b: 2,
                amplitude: 0.05,
                wavevector: vec![2, 0, 0],
                phase: 0.4,
            },
        ],
    }
}

/// More strongly curved variant of [`standard_perturbed_3d`], used where a
/// wrong-by-construction formula must visibly miss (the curvature-term
/// sign calibration needs the curvature contribution to be a sizable
/// fraction of the whole).
pub fn strong_perturbed_3d() -> MetricSpec {
    MetricSpec::Perturbation {
        entries: vec![
            PerturbationEntry {
                a: 0,
                b: 0,
                amplitude: 0.08,
                wavevector: vec![0, 1, 0],
                phase: 0.0,
            },
            PerturbationEntry {
                a: 0,
                b: 1,
                amplitude: 0.06,
                wavevector: vec![1, 0, 1],
                phase: 0.7,
            },
            PerturbationEntry {
                a: 1,
                b: 2,
                amplitude: 0.05,
                wavevector: vec![0, 1, 1],
                phase: 1.9,
            },
            PerturbationEntry {
                a: 2,
                b: 2,
                amplitude: 0.07,
                wavevector: vec![2, 0, 0],
                phase: 0.4,
            },
        ],
    }
}

/// Conformally flat 2D metric g = e^{2f} * identity with a two-mode factor.
pub fn standard_conformal_2d() -> MetricSpec {
    MetricSpec::Conformal {
        modes: vec![
            FourierMode {
                amplitude: 0.1,
                wavevector: vec![1, 0],
                phase: 0.0,
            },
            FourierMode {
                amplitude: 0.05,
                wavevector: vec![0, 1],
                phase: 1.3,
            },
        ],
    }
}

/// The standard perturbed metric realized on a grid.
pub fn perturbed_metric_3d(grid: &GridSpec) -> Result<Metric> {
    metric_from_spec(&standard_perturbed_3d(), grid)
}

/// The strongly perturbed metric realized on a grid.
pub fn strong_metric_3d(grid: &GridSpec) -> Result<Metric> {
    metric_from_spec(&strong_perturbed_3d(), grid)
}

/// The standard conformal metric realized on a grid.
pub fn conformal_metric_2d(grid: &GridSpec) -> Result<Metric> {
    metric_from_spec(&standard_conformal_2d(), grid)
}
