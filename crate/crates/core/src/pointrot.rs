//! Pointwise solution of the homogeneous rotation system
//!
//! ```text
//! U' = V w_z − W w_y,   V' = W w_x − U w_z,   W' = U w_y − V w_x
//! ```
//!
//! i.e. `u' = u × w`, which conserves `|u|² = γ²`. Two independent routes are
//! provided: classical RK4 on the 3-vector ([`evolve_direct`]) and RK4 on the
//! complex stereographic coordinate of the sphere, which obeys a Riccati
//! equation ([`evolve_riccati`]). The chart is switched to its antipodal
//! counterpart whenever `|z|` exceeds [`CHART_SWITCH_RADIUS`].

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::{Error, Result};

/// `|z|` above which the active chart is swapped.
pub const CHART_SWITCH_RADIUS: f64 = 2.0;

/// A time-dependent 3-vector at a fixed spatial point (vorticity or forcing).
pub trait Signal: Sync {
    fn at(&self, t: f64) -> Vector3<f64>;
}

impl<F> Signal for F
where
    F: Fn(f64) -> Vector3<f64> + Sync,
{
    fn at(&self, t: f64) -> Vector3<f64> {
        self(t)
    }
}

/// Time-independent signal.
#[derive(Debug, Clone, Copy)]
pub struct Constant(pub Vector3<f64>);

impl Signal for Constant {
    fn at(&self, _t: f64) -> Vector3<f64> {
        self.0
    }
}

/// A point `(U, V, W)` of the velocity sphere of radius `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotState {
    pub velocity: Vector3<f64>,
    pub gamma: f64,
}

impl RotState {
    /// State whose radius is the norm of `velocity`.
    pub fn new(velocity: Vector3<f64>) -> Self {
        Self {
            velocity,
            gamma: velocity.norm(),
        }
    }

    /// Relative deviation of `|u|²` from `γ²` (absolute when `γ = 0`).
    pub fn sphere_drift(&self) -> f64 {
        let g2 = self.gamma * self.gamma;
        let d = (self.velocity.norm_squared() - g2).abs();
        if g2 > 0.0 {
            d / g2
        } else {
            d
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// `ξ = (U + iV) / (γ − W)`, regular away from the north pole `W = γ`.
    A,
    /// `μ = −1/ξ = −(U − iV) / (γ + W)`, regular away from the south pole.
    B,
}

impl Chart {
    fn flip(self) -> Self {
        match self {
            Chart::A => Chart::B,
            Chart::B => Chart::A,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiState {
    pub z: Complex64,
    pub chart: Chart,
    pub gamma: f64,
}

impl RiccatiState {
    /// Swaps to the other chart via `μ = −1/ξ`.
    pub fn switch_chart(self) -> Self {
        Self {
            z: -1.0 / self.z,
            chart: self.chart.flip(),
            gamma: self.gamma,
        }
    }
}

/// Stereographic coordinate of `s`; chart A on the southern hemisphere
/// (`W <= 0`), chart B on the northern.
pub fn to_riccati(s: &RotState) -> Result<RiccatiState> {
    let g = s.gamma;
    if g.is_nan() || g <= 0.0 {
        return Err(Error::DegenerateRadius);
    }
    let [u, v, w] = [s.velocity.x, s.velocity.y, s.velocity.z];
    let (z, chart) = if w <= 0.0 {
        (Complex64::new(u, v) / (g - w), Chart::A)
    } else {
        (-Complex64::new(u, -v) / (g + w), Chart::B)
    };
    Ok(RiccatiState { z, chart, gamma: g })
}

/// Inverse stereographic map; real-valued and on the sphere by construction.
pub fn from_riccati(r: &RiccatiState) -> RotState {
    let g = r.gamma;
    let m2 = r.z.norm_sqr();
    let denom = 1.0 + m2;
    let velocity = match r.chart {
        Chart::A => Vector3::new(
            2.0 * g * r.z.re / denom,
            2.0 * g * r.z.im / denom,
            g * (m2 - 1.0) / denom,
        ),
        Chart::B => Vector3::new(
            -2.0 * g * r.z.re / denom,
            2.0 * g * r.z.im / denom,
            g * (1.0 - m2) / denom,
        ),
    };
    RotState { velocity, gamma: g }
}

/// Right-hand side of the Riccati equation on the given chart.
///
/// Chart A: `ξ' = ((w_y + i w_x)/2) ξ² − i w_z ξ + (w_y − i w_x)/2`.
/// Chart B: `μ' = ((w_y − i w_x)/2) μ² + i w_z μ + (w_y + i w_x)/2`.
pub fn riccati_rhs(z: Complex64, chart: Chart, w: &Vector3<f64>) -> Complex64 {
    let plus = Complex64::new(w.y, w.x) * 0.5;
    let minus = Complex64::new(w.y, -w.x) * 0.5;
    let iwz = Complex64::new(0.0, w.z);
    match chart {
        Chart::A => plus * z * z - iwz * z + minus,
        Chart::B => minus * z * z + iwz * z + plus,
    }
}

/// Number of fixed steps covering `[0, horizon]`; `dt` must divide `horizon`.
pub fn step_count(dt: f64, horizon: f64) -> Result<usize> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::TimeGrid(format!("step must be positive, got {dt}")));
    }
    if !horizon.is_finite() || horizon < 0.0 {
        return Err(Error::TimeGrid(format!(
            "horizon must be non-negative, got {horizon}"
        )));
    }
    let steps = (horizon / dt).round();
    if (steps * dt - horizon).abs() > 1e-9 * horizon.max(dt) {
        return Err(Error::TimeGrid(format!(
            "step {dt} does not divide horizon {horizon}"
        )));
    }
    Ok(steps as usize)
}

/// One classical RK4 step for `y' = f(t, y)`.
pub(crate) fn rk4_step<Y>(t: f64, y: Y, h: f64, f: impl Fn(f64, Y) -> Y) -> Y
where
    Y: Copy + std::ops::Add<Output = Y> + std::ops::Mul<f64, Output = Y>,
{
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, y + k1 * (0.5 * h));
    let k3 = f(t + 0.5 * h, y + k2 * (0.5 * h));
    let k4 = f(t + h, y + k3 * h);
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Homogeneous right-hand side `u × w`.
#[inline]
pub fn rotation_rhs(u: &Vector3<f64>, w: &Vector3<f64>) -> Vector3<f64> {
    u.cross(w)
}

/// RK4 on the Riccati chart; returns the final state on the sphere of radius γ.
///
/// The Riccati equation does not involve γ, so the chart coordinate is solved
/// for the unit sphere and rescaled on reconstruction.
pub fn evolve_riccati(s0: &RotState, w: &dyn Signal, dt: f64, horizon: f64) -> Result<RotState> {
    let steps = step_count(dt, horizon)?;
    if s0.gamma == 0.0 {
        return Ok(RotState {
            velocity: Vector3::zeros(),
            gamma: 0.0,
        });
    }
    let mut r = to_riccati(s0)?;
    for k in 0..steps {
        let t = k as f64 * dt;
        let chart = r.chart;
        let z = rk4_step(t, r.z, dt, |t, z| riccati_rhs(z, chart, &w.at(t)));
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::StepFailure {
                t,
                reason: "chart coordinate overflowed; reduce the step size".into(),
            });
        }
        r.z = z;
        if r.z.norm() > CHART_SWITCH_RADIUS {
            r = r.switch_chart();
        }
    }
    Ok(from_riccati(&r))
}

/// RK4 directly on `(U, V, W)`; the independent oracle for [`evolve_riccati`].
pub fn evolve_direct(s0: &RotState, w: &dyn Signal, dt: f64, horizon: f64) -> Result<RotState> {
    let steps = step_count(dt, horizon)?;
    let mut u = s0.velocity;
    for k in 0..steps {
        let t = k as f64 * dt;
        u = rk4_step(t, u, dt, |t, u| rotation_rhs(&u, &w.at(t)));
        if !u.iter().all(|c| c.is_finite()) {
            return Err(Error::StepFailure {
                t,
                reason: "state overflowed; reduce the step size".into(),
            });
        }
    }
    Ok(RotState {
        velocity: u,
        gamma: s0.gamma,
    })
}
