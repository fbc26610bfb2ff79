//! Pressure gradient from the Bernoulli balance
//! `∇p/ρ = −∇φ_body − ½∇|u|²`, and scalar pressure recovery.

use crate::expr::Expr;
use crate::fieldcalc::{
    curl, dealias, divergence, dot, gradient, solve_poisson, ScalarField, VectorField,
};
use crate::{Error, Result};

/// Curl defect above which a gradient input is flagged as non-conservative.
pub const CONSERVATIVE_TOL: f64 = 1e-6;

/// Conservative body force `F = −∇φ_body` and the fluid density.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyForce {
    phi_body: ScalarField,
    grad_phi_body: VectorField,
    rho: f64,
}

impl BodyForce {
    /// Potential given as samples; its gradient is taken spectrally.
    pub fn from_field(phi_body: ScalarField, rho: f64) -> Result<Self> {
        check_rho(rho)?;
        let grad_phi_body = gradient(&phi_body);
        Ok(Self {
            phi_body,
            grad_phi_body,
            rho,
        })
    }

    /// Potential given in closed form; its gradient is sampled exactly, so
    /// non-periodic potentials (e.g. `g*z`) are supported.
    pub fn from_expr(grid: crate::Grid, phi_body: &Expr, rho: f64) -> Result<Self> {
        check_rho(rho)?;
        Ok(Self {
            phi_body: phi_body.sample(grid)?,
            grad_phi_body: phi_body.sample_gradient(grid)?,
            rho,
        })
    }

    /// No body force.
    pub fn none(grid: crate::Grid, rho: f64) -> Result<Self> {
        check_rho(rho)?;
        Ok(Self {
            phi_body: ScalarField::zeros(grid),
            grad_phi_body: VectorField::zeros(grid),
            rho,
        })
    }

    pub fn phi_body(&self) -> &ScalarField {
        &self.phi_body
    }

    pub fn grad_phi_body(&self) -> &VectorField {
        &self.grad_phi_body
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "density must be positive, got {rho}"
        )))
    }
}

/// `∇p = −ρ (∇φ_body + ∇(|u|²/2))`, the quadratic term dealiased.
pub fn pressure_gradient(u: &VectorField, bf: &BodyForce) -> Result<VectorField> {
    if u.grid() != bf.phi_body.grid() {
        return Err(Error::GridMismatch);
    }
    let kinetic = dealias(&dot(u, u)).scale(0.5);
    Ok(bf.grad_phi_body.add(&gradient(&kinetic)).scale(-bf.rho))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredPressure {
    /// Zero-mean pressure `p` with `∇p ≈ gp`.
    pub pressure: ScalarField,
    /// `p / ρ`.
    pub kinematic: ScalarField,
    /// Max norm of `curl(gp)`.
    pub curl_defect: f64,
}

impl RecoveredPressure {
    pub fn is_conservative(&self) -> bool {
        self.curl_defect <= CONSERVATIVE_TOL
    }
}

/// Solves `∇²p = ∇·gp` spectrally. A non-conservative `gp` is reported via
/// [`RecoveredPressure::curl_defect`] but still returns the least-squares
/// potential.
pub fn recover_pressure(gp: &VectorField, rho: f64) -> Result<RecoveredPressure> {
    check_rho(rho)?;
    let pressure = solve_poisson(&divergence(gp));
    Ok(RecoveredPressure {
        kinematic: pressure.scale(1.0 / rho),
        pressure,
        curl_defect: curl(gp).max_abs(),
    })
}
