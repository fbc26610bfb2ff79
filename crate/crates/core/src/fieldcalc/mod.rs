//! Periodic-box fields and pseudo-spectral vector calculus.
//!
//! All fields live on the cube `[0, L)³` sampled at `n` points per axis, stored
//! x-fastest (index `i + n*(j + n*k)`). Derivatives are taken in Fourier space
//! and are exact for band-limited input below the Nyquist mode.

mod field;
mod grid;
mod ops;
mod spectral;

pub use field::{Norms, ScalarField, VectorField};
pub use grid::{Axis, Grid, MAX_N, MIN_N};
pub use ops::{
    advect, cross, cross_dealiased, curl, dealias, divergence, dot, gradient, lamb_form_residual,
    laplacian, leray_project, product_dealiased, scalar_laplacian, solve_poisson,
};
pub use spectral::Spectrum;
