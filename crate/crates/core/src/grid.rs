//! Uniform periodic grid on the n-torus with spectrally accurate
//! differentiation and quadrature.
//!
//! All fields live on a row-major grid of shape `resolution` covering the
//! box `[0, L_0) x ... x [0, L_{n-1})`. Differentiation is Fourier
//! pseudo-spectral and exact (to round-off) for band-limited inputs; the
//! rectangle rule is the matching spectrally accurate quadrature.

use crate::error::{Error, Result};
use crate::fft;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Shape of a uniform periodic grid: per-axis point counts and box lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    resolution: Vec<usize>,
    periods: Vec<f64>,
}

impl GridSpec {
    /// Grid with the given per-axis resolution and box lengths.
    ///
    /// Requires dimension >= 2, every point count even and >= 8, and every
    /// box length positive.
    pub fn new(resolution: Vec<usize>, periods: Vec<f64>) -> Result<Self> {
        if resolution.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid dimension must be at least 2, got {}",
                resolution.len()
            )));
        }
        if periods.len() != resolution.len() {
            return Err(Error::InvalidArgument(format!(
                "periods length {} does not match dimension {}",
                periods.len(),
                resolution.len()
            )));
        }
        for (axis, &n) in resolution.iter().enumerate() {
            if n < 8 || n % 2 != 0 {
                return Err(Error::InvalidArgument(format!(
                    "resolution along axis {axis} must be even and >= 8, got {n}"
                )));
            }
        }
        for (axis, &length) in periods.iter().enumerate() {
            if !(length > 0.0) || !length.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "period along axis {axis} must be positive and finite, got {length}"
                )));
            }
        }
        Ok(GridSpec { resolution, periods })
    }

    /// Square grid with `points` per axis and period 2*pi on every axis.
    pub fn square(dimension: usize, points: usize) -> Result<Self> {
        GridSpec::new(vec![points; dimension], vec![2.0 * PI; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.resolution.len()
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }

    /// Total number of grid points.
    pub fn total_points(&self) -> usize {
        self.resolution.iter().product()
    }

    /// Volume of one grid cell, `prod_a L_a / N_a`.
    pub fn cell_volume(&self) -> f64 {
        self.resolution
            .iter()
            .zip(&self.periods)
            .map(|(&n, &length)| length / n as f64)
            .product()
    }

    /// Largest per-axis mode index that keeps quadratic and cubic products
    /// of fields alias-free: `min_a N_a / 4`.
    pub fn max_band_limit(&self) -> usize {
        self.resolution.iter().map(|&n| n / 4).min().unwrap()
    }

    /// Checks that every component of `wavevector` respects the N/4 band
    /// limit of the matching axis.
    pub fn check_wavevector(&self, wavevector: &[i64]) -> Result<()> {
        if wavevector.len() != self.dimension() {
            return Err(Error::InvalidArgument(format!(
                "wavevector length {} does not match grid dimension {}",
                wavevector.len(),
                self.dimension()
            )));
        }
        for (axis, (&k, &n)) in wavevector.iter().zip(&self.resolution).enumerate() {
            if k.unsigned_abs() as usize > n / 4 {
                return Err(Error::BandLimit(format!(
                    "|k_{axis}| = {} exceeds N_{axis}/4 = {}",
                    k.unsigned_abs(),
                    n / 4
                )));
            }
        }
        Ok(())
    }

    /// Coordinates of the grid point with the given flat (row-major) index.
    pub fn point_coords(&self, mut index: usize) -> Vec<f64> {
        let n = self.dimension();
        let mut coords = vec![0.0; n];
        for axis in (0..n).rev() {
            let len = self.resolution[axis];
            let step = self.periods[axis] / len as f64;
            coords[axis] = (index % len) as f64 * step;
            index /= len;
        }
        coords
    }
}

/// Real scalar field sampled on a periodic grid, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &GridSpec) -> Self {
        ScalarField {
            grid: grid.clone(),
            values: vec![0.0; grid.total_points()],
        }
    }

    pub fn constant(grid: &GridSpec, value: f64) -> Self {
        ScalarField {
            grid: grid.clone(),
            values: vec![value; grid.total_points()],
        }
    }

    pub fn from_values(grid: &GridSpec, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.total_points(), "field length mismatch");
        debug_assert!(values.iter().all(|v| v.is_finite()));
        ScalarField {
            grid: grid.clone(),
            values,
        }
    }

    /// Samples `f` at every grid point; the closure receives coordinates in
    /// `[0, L_a)` per axis.
    pub fn from_fn<F: FnMut(&[f64]) -> f64>(grid: &GridSpec, mut f: F) -> Self {
        let n = grid.dimension();
        let dims = grid.resolution();
        let steps: Vec<f64> = (0..n).map(|a| grid.periods()[a] / dims[a] as f64).collect();
        let mut coords = vec![0.0; n];
        let mut index = vec![0usize; n];
        let mut values = Vec::with_capacity(grid.total_points());
        loop {
            values.push(f(&coords));
            // advance the multi-index, last axis fastest
            let mut axis = n;
            loop {
                if axis == 0 {
                    debug_assert_eq!(values.len(), grid.total_points());
                    return ScalarField {
                        grid: grid.clone(),
                        values,
                    };
                }
                axis -= 1;
                index[axis] += 1;
                if index[axis] < dims[axis] {
                    coords[axis] = index[axis] as f64 * steps[axis];
                    break;
                }
                index[axis] = 0;
                coords[axis] = 0.0;
            }
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn map<F: FnMut(f64) -> f64>(&self, mut f: F) -> Self {
        ScalarField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip<F: FnMut(f64, f64) -> f64>(&self, other: &ScalarField, mut f: F) -> Self {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        ScalarField {
            grid: self.grid.clone(),
            values,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }

    /// `self += factor * other`, in place.
    pub fn add_scaled(&mut self, factor: f64, other: &ScalarField) {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        for (a, &b) in self.values.iter_mut().zip(&other.values) {
            *a += factor * b;
        }
    }

    /// Pseudo-spectral derivative along `axis`; panics if the axis is out of
    /// range (see [`partial_derivative`] for the checked variant).
    pub fn derivative(&self, axis: usize) -> ScalarField {
        assert!(axis < self.grid.dimension(), "axis out of range");
        let values = fft::derivative_along_axis(
            &self.values,
            self.grid.resolution(),
            self.grid.periods(),
            axis,
        );
        ScalarField {
            grid: self.grid.clone(),
            values,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl std::ops::Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        self.zip(rhs, |a, b| a + b)
    }
}

impl std::ops::Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        self.zip(rhs, |a, b| a - b)
    }
}

impl std::ops::Mul for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: &ScalarField) -> ScalarField {
        self.zip(rhs, |a, b| a * b)
    }
}

impl std::ops::Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.map(|v| -v)
    }
}

/// Spectral partial derivative of `f` along `axis`.
pub fn partial_derivative(f: &ScalarField, axis: usize) -> Result<ScalarField> {
    if axis >= f.grid().dimension() {
        return Err(Error::InvalidArgument(format!(
            "axis {axis} out of range for a {}-dimensional grid",
            f.grid().dimension()
        )));
    }
    Ok(f.derivative(axis))
}

/// Rectangle-rule integral of `f * density` over the grid box. The density
/// must be strictly positive (it plays the role of a volume element).
pub fn integrate(f: &ScalarField, density: &ScalarField) -> Result<f64> {
    assert_eq!(f.grid(), density.grid(), "grid mismatch");
    if let Some(index) = density.values().iter().position(|&v| !(v > 0.0)) {
        return Err(Error::DegenerateMetric {
            index,
            coords: f.grid().point_coords(index),
            detail: format!("volume density {} is not positive", density.values()[index]),
        });
    }
    Ok(weighted_sum(f, density))
}

/// Same quadrature as [`integrate`] without the positivity check; for
/// internal use where the density was already validated.
pub(crate) fn weighted_sum(f: &ScalarField, density: &ScalarField) -> f64 {
    let sum: f64 = f
        .values()
        .iter()
        .zip(density.values())
        .map(|(&a, &b)| a * b)
        .sum();
    f.grid().cell_volume() * sum
}

const RANDOM_FIELD_MODES: usize = 8;

/// Deterministic zero-mean band-limited random field with the requested
/// sup-norm. Fourier support is confined to `|k_a| <= max_mode` on every
/// axis, so products of two such fields stay alias-free when
/// `max_mode <= N/4`.
pub fn random_bandlimited_field(
    grid: &GridSpec,
    seed: u64,
    max_mode: usize,
    amplitude: f64,
) -> Result<ScalarField> {
    if max_mode == 0 {
        return Err(Error::InvalidArgument(
            "max_mode must be at least 1".into(),
        ));
    }
    if max_mode > grid.max_band_limit() {
        return Err(Error::BandLimit(format!(
            "max_mode {} exceeds the grid band limit {}",
            max_mode,
            grid.max_band_limit()
        )));
    }
    if !(amplitude > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "amplitude must be positive, got {amplitude}"
        )));
    }

    let n = grid.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut modes = Vec::with_capacity(RANDOM_FIELD_MODES);
    while modes.len() < RANDOM_FIELD_MODES {
        let wavevector: Vec<i64> = (0..n)
            .map(|_| rng.gen_range(-(max_mode as i64)..=max_mode as i64))
            .collect();
        if wavevector.iter().all(|&k| k == 0) {
            continue;
        }
        let coeff: f64 = rng.gen_range(0.5..1.0);
        let phase: f64 = rng.gen_range(0.0..2.0 * PI);
        modes.push((wavevector, coeff, phase));
    }

    let raw = ScalarField::from_fn(grid, |coords| {
        modes
            .iter()
            .map(|(wavevector, coeff, phase)| {
                let arg: f64 = wavevector
                    .iter()
                    .zip(coords)
                    .zip(grid.periods())
                    .map(|((&k, &x), &length)| 2.0 * PI * k as f64 * x / length)
                    .sum::<f64>()
                    + phase;
                coeff * arg.cos()
            })
            .sum()
    });
    let sup = raw.sup_norm();
    if sup < 1e-12 {
        return Err(Error::InvalidArgument(
            "random mode combination degenerated to zero".into(),
        ));
    }
    Ok(raw.scale(amplitude / sup))
}
