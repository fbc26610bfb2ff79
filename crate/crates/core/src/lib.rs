//! Helmholtz-split construction of 3D incompressible Navier-Stokes flows on a
//! periodic box.
//!
//! The velocity is written as `u = u_p + u_w`, with `u_w` solenoidal and
//! evolved exactly by the heat equation, and `u_p` obtained pointwise from the
//! linear rotation system driven by the vorticity `w = curl u_w` and the forcing
//! `f = u_w × w`. The pressure gradient follows from the Bernoulli balance. Every
//! constraint the construction relies on (continuity, zero curl of `u_p`,
//! harmonicity of the potential, full momentum balance) is measured, never
//! enforced.
//!
//! Module map:
//!
//! * [`fieldcalc`]: periodic grid, fields and pseudo-spectral vector calculus.
//! * [`heatflow`]: closed-form heat propagation of `u_w` and `w`.
//! * [`pointrot`]: the homogeneous rotation system, direct and via the complex
//!   Riccati chart.
//! * [`inhomog`]: the forced system by variation of parameters.
//! * [`pressure`]: pressure gradient assembly and scalar pressure recovery.
//! * [`pipeline`]: scenario configs, initial data and the end-to-end run.
//! * [`validator`]: defect norms and residuals.
//! * [`dump`], [`manifest`]: on-disk formats.

pub mod dump;
pub mod error;
pub mod expr;
pub mod fieldcalc;
pub mod heatflow;
pub mod inhomog;
pub mod manifest;
pub mod pipeline;
pub mod pointrot;
pub mod pressure;
pub mod validator;

pub use error::{Error, Result};
pub use fieldcalc::{Grid, Norms, ScalarField, VectorField};
