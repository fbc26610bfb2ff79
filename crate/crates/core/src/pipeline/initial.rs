use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GammaMode, ScenarioConfig, UpGenerator, UwGenerator};
use crate::expr::Expr;
use crate::fieldcalc::{leray_project, Grid, ScalarField, Spectrum, VectorField};
use crate::Result;

/// Initial velocity split and the per-point sphere radius.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub u_p0: VectorField,
    pub u_w0: VectorField,
    pub gamma: ScalarField,
    /// Velocity potential, when `u_p0` is a gradient.
    pub phi_vel: Option<ScalarField>,
    /// `∇² phi_vel` sampled exactly (the harmonicity defect).
    pub phi_vel_laplacian: Option<ScalarField>,
}

pub fn abc_field(grid: Grid, a: f64, b: f64, c: f64) -> VectorField {
    VectorField::from_fn(grid, |x, y, z| {
        [
            a * z.sin() + c * y.cos(),
            b * x.sin() + a * z.cos(),
            c * y.sin() + b * x.cos(),
        ]
    })
}

pub fn taylor_green(grid: Grid) -> VectorField {
    VectorField::from_fn(grid, |x, y, _| [x.cos() * y.sin(), -x.sin() * y.cos(), 0.0])
}

/// Random modes with integer `|m| <= kmax`, projected onto the solenoidal
/// subspace and scaled to unit RMS.
pub fn random_bandlimited(grid: Grid, kmax: u32, seed: u64) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kmax2 = i64::from(kmax).pow(2);
    let component = |rng: &mut ChaCha8Rng| {
        let coeffs = (0..grid.len())
            .map(|idx| {
                let m = grid.unravel(idx).map(|i| grid.mode(i));
                if m.iter().map(|v| v * v).sum::<i64>() <= kmax2 && idx != 0 {
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                } else {
                    Complex64::default()
                }
            })
            .collect();
        // the real part of the inverse transform symmetrises the spectrum
        Spectrum::from_coeffs(grid, coeffs).to_field()
    };
    let raw = VectorField::from_components([
        component(&mut rng),
        component(&mut rng),
        component(&mut rng),
    ]);
    let projected = leray_project(&raw);
    let rms = projected.rms();
    if rms > 0.0 {
        projected.scale(1.0 / rms)
    } else {
        projected
    }
}

pub fn generate_initial(cfg: &ScenarioConfig) -> Result<InitialData> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let u_w0 = match &cfg.initial_uw {
        UwGenerator::Zero => VectorField::zeros(grid),
        UwGenerator::Abc { a, b, c } => abc_field(grid, *a, *b, *c),
        UwGenerator::TaylorGreen => taylor_green(grid),
        UwGenerator::RandomBandlimited { kmax, seed } => random_bandlimited(grid, *kmax, *seed),
    };
    let (mut u_p0, phi_vel, phi_vel_laplacian) = match &cfg.initial_up {
        UpGenerator::Zero => (VectorField::zeros(grid), None, None),
        UpGenerator::GradientOf { phi_vel } => {
            let phi = Expr::parse(phi_vel)?;
            (
                phi.sample_gradient(grid)?,
                Some(phi.sample(grid)?),
                Some(phi.laplacian().sample(grid)?),
            )
        }
    };
    let magnitude = u_p0.magnitude();
    let gamma = match cfg.gamma_mode {
        GammaMode::FromInitial => magnitude,
        GammaMode::Unit => {
            let inv = magnitude.map(|m| if m > 0.0 { 1.0 / m } else { 0.0 });
            u_p0 = u_p0.map_components(|c| c.mul(&inv));
            magnitude.map(|m| if m > 0.0 { 1.0 } else { 0.0 })
        }
    };
    Ok(InitialData {
        u_p0,
        u_w0,
        gamma,
        phi_vel,
        phi_vel_laplacian,
    })
}
