//! Run configurations: JSON-declarable grids, metrics, solver settings and
//! input tensors for the batch commands.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::decomp::SolverConfig;
use crate::error::{Error, Result};
use crate::fields::SymTensor2;
use crate::grid::{GridSpec, ScalarField};
use crate::tensor::{FourierMode, Metric, MetricSpec, PerturbationEntry};

/// Grid block: per-axis point counts, optional per-axis periods
/// (default 2 pi each).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub resolution: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub periods: Option<Vec<f64>>,
}

impl GridConfig {
    pub fn build(&self) -> Result<GridSpec> {
        let periods = match &self.periods {
            Some(p) => p.clone(),
            None => vec![std::f64::consts::TAU; self.resolution.len()],
        };
        GridSpec::new(self.resolution.clone(), periods)
    }
}

/// Optional solver overrides; anything unset keeps the library default.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flat_preconditioner: Option<bool>,
}

impl SolverOverrides {
    pub fn build(&self) -> Result<SolverConfig> {
        let mut config = SolverConfig::default();
        if let Some(tol) = self.rel_tolerance {
            config.rel_tolerance = tol;
        }
        if let Some(cap) = self.max_iterations {
            config.max_iterations = Some(cap);
        }
        if let Some(flag) = self.flat_preconditioner {
            config.flat_preconditioner = flag;
        }
        config.validate()?;
        Ok(config)
    }
}

/// Declarative symmetric 2-tensor: cosine modes per component plus an
/// optional multiple of the metric. Mirrors the metric perturbation
/// format so configs stay uniform.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorSpec {
    #[serde(default)]
    pub entries: Vec<PerturbationEntry>,
    /// Adds `trace_coefficient * g`.
    #[serde(default)]
    pub trace_coefficient: f64,
}

impl TensorSpec {
    pub fn realize(&self, g: &Metric) -> Result<SymTensor2> {
        let grid = g.grid();
        let n = grid.dimension();
        for entry in &self.entries {
            if entry.a >= n || entry.b >= n {
                return Err(Error::InvalidArgument(format!(
                    "tensor entry indices ({}, {}) out of range for dimension {n}",
                    entry.a, entry.b
                )));
            }
            grid.check_wavevector(&entry.wavevector)?;
        }
        let periods = grid.periods().to_vec();
        let mut out = g.components().map_components(|c| c.scale(self.trace_coefficient));
        for entry in &self.entries {
            let mode = FourierMode {
                amplitude: entry.amplitude,
                wavevector: entry.wavevector.clone(),
                phase: entry.phase,
            };
            let bump = ScalarField::from_fn(grid, |x| mode.eval(x, &periods));
            out.get_mut(entry.a, entry.b).add_scaled(1.0, &bump);
        }
        Ok(out)
    }
}

/// Input block for the decompose command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeConfig {
    /// The trace-free tensor to split.
    pub tensor: TensorSpec,
}

/// Input block for the constraints command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintsConfig {
    /// The second fundamental form K.
    pub second_fundamental: TensorSpec,
}

/// Input block for the gen-tt command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenTtConfig {
    pub seed: u64,
    #[serde(default = "default_max_mode")]
    pub max_mode: usize,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

fn default_max_mode() -> usize {
    2
}

fn default_amplitude() -> f64 {
    1.0
}

/// One batch run: a grid, a metric, solver settings and the
/// command-specific blocks. Commands ignore blocks they do not use and
/// reject configs missing the block they need.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub metric: MetricSpec,
    #[serde(default)]
    pub solver: SolverOverrides,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decompose: Option<DecomposeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<ConstraintsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen_tt: Option<GenTtConfig>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("config does not match the schema: {e}")))
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidArgument(format!("cannot read config {}: {e}", path.display()))
        })?;
        RunConfig::from_json(&text)
    }
}
