//! Closed-form heat-equation evolution on the periodic box.
//!
//! Each Fourier mode `k` of a field decays as `exp(-ν|k|²t)`, so the solenoidal
//! velocity `u_w` and its vorticity can be sampled at any time without temporal
//! discretization error.

use num_complex::Complex64;

use crate::fieldcalc::{curl, divergence, Grid, Spectrum, VectorField};
use crate::{Error, Result};

/// Divergence defect above which an input is not treated as solenoidal.
pub const SOLENOIDAL_REJECT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatPropagator {
    grid: Grid,
    nu: f64,
}

impl HeatPropagator {
    pub fn new(grid: Grid, nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return Err(Error::Config(format!("viscosity must be >= 0, got {nu}")));
        }
        Ok(Self { grid, nu })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Spectral decay factors `exp(-ν|k|²t)` in field layout.
    fn decay(&self, t: f64) -> Result<Vec<f64>> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        let k = self.grid.wavenumbers();
        Ok((0..self.grid.len())
            .map(|idx| {
                let [i, j, l] = self.grid.unravel(idx);
                let k2 = k[i] * k[i] + k[j] * k[j] + k[l] * k[l];
                (-self.nu * k2 * t).exp()
            })
            .collect())
    }

    pub fn propagate(&self, v: &VectorField, t: f64) -> Result<VectorField> {
        if v.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let spectra = SpectralState::new(v);
        self.evaluate(&spectra, t)
    }

    /// Evaluates a precomputed spectral state at time `t`.
    pub fn evaluate(&self, state: &SpectralState, t: f64) -> Result<VectorField> {
        let decay = self.decay(t)?;
        let [a, b, c] = &state.spectra;
        let apply = |s: &Spectrum| {
            let coeffs = s
                .coeffs()
                .iter()
                .zip(&decay)
                .map(|(c, d)| c * Complex64::new(*d, 0.0))
                .collect();
            Spectrum::from_coeffs(self.grid, coeffs).to_field()
        };
        VectorField::new(apply(a), apply(b), apply(c))
    }

    /// Vorticity `w(t) = curl(propagate(u_w0, t))` of a solenoidal initial field.
    pub fn vorticity_path(&self, u_w0: &VectorField, t: f64) -> Result<VectorField> {
        let defect = divergence(u_w0).max_abs();
        if defect > SOLENOIDAL_REJECT {
            return Err(Error::NotSolenoidal(defect));
        }
        Ok(curl(&self.propagate(u_w0, t)?))
    }
}

/// Forward transforms of a vector field, reused across many evaluation times.
#[derive(Debug, Clone)]
pub struct SpectralState {
    spectra: [Spectrum; 3],
}

impl SpectralState {
    pub fn new(v: &VectorField) -> Self {
        Self {
            spectra: v.components().clone().map(|c| Spectrum::forward(&c)),
        }
    }
}
