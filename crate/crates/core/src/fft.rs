//! Internal FFT plumbing: cached plans and the spectral derivative kernel
//! applied line-by-line along one grid axis.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plan_cache() -> &'static Mutex<HashMap<usize, PlanPair>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, PlanPair>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn plans_for(len: usize) -> PlanPair {
    let mut cache = plan_cache().lock().unwrap();
    cache
        .entry(len)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(len), planner.plan_fft_inverse(len))
        })
        .clone()
}

/// Differentiate `values` along `axis` of a row-major grid with shape `dims`
/// and box lengths `periods`. Each 1-D line is transformed, mode k is
/// multiplied by i*2*pi*k/L, the Nyquist coefficient is zeroed, and the line
/// is transformed back.
pub(crate) fn derivative_along_axis(
    values: &[f64],
    dims: &[usize],
    periods: &[f64],
    axis: usize,
) -> Vec<f64> {
    let len = dims[axis];
    let length = periods[axis];
    let stride: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let (forward, inverse) = plans_for(len);

    let mut out = vec![0.0; values.len()];
    let mut line = vec![Complex::new(0.0, 0.0); len];
    let half = len / 2;
    let scale = 1.0 / len as f64;

    for o in 0..outer {
        let block = o * len * stride;
        for i in 0..stride {
            for (j, slot) in line.iter_mut().enumerate() {
                *slot = Complex::new(values[block + j * stride + i], 0.0);
            }
            forward.process(&mut line);
            for (j, slot) in line.iter_mut().enumerate() {
                if j == half {
                    // Nyquist mode: zero derivative keeps real fields real
                    // and the operator skew-adjoint.
                    *slot = Complex::new(0.0, 0.0);
                } else {
                    let k = if j < half { j as f64 } else { j as f64 - len as f64 };
                    let omega = 2.0 * PI * k / length;
                    *slot = Complex::new(-omega * slot.im, omega * slot.re);
                }
            }
            inverse.process(&mut line);
            for (j, c) in line.iter().enumerate() {
                out[block + j * stride + i] = c.re * scale;
            }
        }
    }
    out
}

/// Multiplies every Fourier coefficient of `values` by
/// `symbol(omega)`, where omega is the vector of physical wavenumbers
/// 2*pi*k_a/L_a of that mode. The symbol must be even in omega so the
/// result stays real.
pub(crate) fn apply_symbol<F: Fn(&[f64]) -> f64>(
    values: &[f64],
    dims: &[usize],
    periods: &[f64],
    symbol: F,
) -> Vec<f64> {
    let n = dims.len();
    let total: usize = dims.iter().product();
    let mut spectrum: Vec<Complex<f64>> =
        values.iter().map(|&v| Complex::new(v, 0.0)).collect();

    // separable n-D transform: run the 1-D FFT along each axis in turn
    let transform_axis = |spec: &mut Vec<Complex<f64>>, axis: usize, forward: bool| {
        let len = dims[axis];
        let stride: usize = dims[axis + 1..].iter().product();
        let outer: usize = dims[..axis].iter().product();
        let (fwd, inv) = plans_for(len);
        let plan = if forward { fwd } else { inv };
        let mut line = vec![Complex::new(0.0, 0.0); len];
        for o in 0..outer {
            let block = o * len * stride;
            for i in 0..stride {
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = spec[block + j * stride + i];
                }
                plan.process(&mut line);
                for (j, &c) in line.iter().enumerate() {
                    spec[block + j * stride + i] = c;
                }
            }
        }
    };

    for axis in 0..n {
        transform_axis(&mut spectrum, axis, true);
    }

    let mut omega = vec![0.0; n];
    for (flat, slot) in spectrum.iter_mut().enumerate() {
        let mut rest = flat;
        for axis in (0..n).rev() {
            let len = dims[axis];
            let j = rest % len;
            rest /= len;
            let k = if j <= len / 2 { j as f64 } else { j as f64 - len as f64 };
            omega[axis] = 2.0 * PI * k / periods[axis];
        }
        *slot *= symbol(&omega);
    }

    for axis in 0..n {
        transform_axis(&mut spectrum, axis, false);
    }
    let scale = 1.0 / total as f64;
    spectrum.iter().map(|c| c.re * scale).collect()
}
