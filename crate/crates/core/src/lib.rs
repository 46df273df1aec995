//! Pseudo-spectral Riemannian calculus on flat-torus grids, built around
//! the conformal Killing operator and its normal Laplacian: York-style
//! decomposition of symmetric 2-tensors, almost-soliton fitting, and the
//! Einstein constraint residuals for initial data sets.
//!
//! Everything is sampled on uniform periodic grids and differentiated in
//! Fourier space, so all identities hold to near round-off for band-limited
//! data. Inputs are expected to keep their Fourier support inside N/4 per
//! axis; products of two such fields then stay alias-free on the grid.

pub mod ahlfors;
pub mod config;
pub mod constraints;
pub mod decomp;
pub mod error;
mod fft;
pub mod fields;
pub mod grid;
mod linalg;
pub mod report;
pub mod samples;
pub mod soliton;
pub mod tensor;

pub use error::{Error, Result};
