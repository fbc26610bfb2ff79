use std::time::Instant;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{generate_initial, InitialData, PointSolver, ScenarioConfig};
use crate::fieldcalc::{curl, Grid, ScalarField, VectorField};
use crate::heatflow::{HeatPropagator, SpectralState, SOLENOIDAL_REJECT};
use crate::inhomog::{build_fundamental, evolve_forced_direct, solve_vop, uniform_times};
use crate::pressure::{pressure_gradient, BodyForce};
use crate::{Error, Result};

/// A run aborts once more than this fraction of grid points failed.
pub const FAILURE_FRACTION_LIMIT: f64 = 1e-3;

/// Upper bound on the stage-time sample table held in memory at once.
const STAGE_TABLE_BYTES: usize = 256 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub u_p: VectorField,
    pub u_w: VectorField,
    pub w: VectorField,
    /// `u_p + u_w`, assembled.
    pub u: VectorField,
    pub grad_p: VectorField,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointFailure {
    pub index: usize,
    pub message: String,
}

/// Wall-clock seconds per phase.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Timings {
    pub initial_s: f64,
    pub heat_s: f64,
    pub sweep_s: f64,
    pub assembly_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionBundle {
    pub config: ScenarioConfig,
    pub grid: Grid,
    pub gamma: ScalarField,
    pub phi_vel: Option<ScalarField>,
    pub phi_vel_laplacian: Option<ScalarField>,
    pub snapshots: Vec<Snapshot>,
    pub failures: Vec<PointFailure>,
    pub timings: Timings,
}

pub fn run(cfg: &ScenarioConfig) -> Result<SolutionBundle> {
    let start = Instant::now();
    let init = generate_initial(cfg)?;
    let initial_s = start.elapsed().as_secs_f64();
    let mut bundle = run_with_initial(cfg, init)?;
    bundle.timings.initial_s = initial_s;
    Ok(bundle)
}

/// Stage-time samples of `w` and `u_w`, laid out `[point][stage][w | u_w]`.
struct StageTable {
    stages: usize,
    half_step: f64,
    data: Vec<f64>,
}

impl StageTable {
    fn point(&self, idx: usize) -> &[f64] {
        let stride = self.stages * 6;
        &self.data[idx * stride..(idx + 1) * stride]
    }
}

/// Samples at one point, interpolating linearly between stage times.
struct PointSamples<'a> {
    samples: &'a [f64],
    half_step: f64,
    stages: usize,
}

impl PointSamples<'_> {
    fn get(&self, t: f64, offset: usize) -> Vector3<f64> {
        let pos = (t / self.half_step).clamp(0.0, (self.stages - 1) as f64);
        let nearest = pos.round();
        let read = |s: usize| {
            let b = s * 6 + offset;
            Vector3::new(self.samples[b], self.samples[b + 1], self.samples[b + 2])
        };
        if (pos - nearest).abs() < 1e-6 {
            return read(nearest as usize);
        }
        let lo = pos.floor() as usize;
        let hi = (lo + 1).min(self.stages - 1);
        let frac = pos - lo as f64;
        read(lo) * (1.0 - frac) + read(hi) * frac
    }

    fn vorticity(&self, t: f64) -> Vector3<f64> {
        self.get(t, 0)
    }

    fn forcing(&self, t: f64) -> Vector3<f64> {
        self.get(t, 3).cross(&self.get(t, 0))
    }
}

/// Largest divisor of `stride` whose stage table fits the memory budget.
fn window_steps(stride: usize, points: usize) -> usize {
    (1..=stride)
        .rev()
        .filter(|d| stride.is_multiple_of(*d))
        .find(|d| (2 * d + 1) * 6 * 8 * points <= STAGE_TABLE_BYTES)
        .unwrap_or(1)
}

pub fn run_with_initial(cfg: &ScenarioConfig, init: InitialData) -> Result<SolutionBundle> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    if init.u_w0.grid() != &grid || init.u_p0.grid() != &grid || init.gamma.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    let mut timings = Timings::default();
    let clock = Instant::now();

    let heat = HeatPropagator::new(grid, cfg.nu)?;
    let w0 = curl(&init.u_w0);
    let div_defect = crate::fieldcalc::divergence(&init.u_w0).max_abs();
    if div_defect > SOLENOIDAL_REJECT {
        return Err(Error::NotSolenoidal(div_defect));
    }
    let uw_state = SpectralState::new(&init.u_w0);
    let w_state = SpectralState::new(&w0);
    let bf = cfg.body_force()?;
    timings.heat_s += clock.elapsed().as_secs_f64();

    let steps = cfg.steps()?;
    let stride = cfg.snapshot_stride;
    let dt = cfg.dt;
    let half = 0.5 * dt;
    let points = grid.len();
    let window = window_steps(stride, points);
    let stages = 2 * window + 1;
    let local_times = uniform_times(dt, window as f64 * dt)?;

    let mut snapshots = vec![assemble(
        0,
        0.0,
        init.u_p0.clone(),
        init.u_w0.clone(),
        w0,
        &bf,
        &mut timings,
    )?];
    let mut state: Vec<Vector3<f64>> = (0..points)
        .map(|i| Vector3::from(init.u_p0.at(i)))
        .collect();
    let mut failed = vec![false; points];
    let mut failures = Vec::new();

    for win in 0..steps / window {
        let first_half_step = 2 * win * window;
        let clock = Instant::now();
        let mut table = StageTable {
            stages,
            half_step: half,
            data: vec![0.0; points * stages * 6],
        };
        let mut last = None;
        for s in 0..stages {
            let t = (first_half_step + s) as f64 * half;
            let uw = heat.evaluate(&uw_state, t)?;
            let w = heat.evaluate(&w_state, t)?;
            for (c, (wc, uc)) in w.components().iter().zip(uw.components()).enumerate() {
                for (p, (&wv, &uv)) in wc.values().iter().zip(uc.values()).enumerate() {
                    let b = (p * stages + s) * 6;
                    table.data[b + c] = wv;
                    table.data[b + 3 + c] = uv;
                }
            }
            if s == stages - 1 {
                last = Some((uw, w));
            }
        }
        timings.heat_s += clock.elapsed().as_secs_f64();

        let clock = Instant::now();
        let results: Vec<Result<Vector3<f64>>> = state
            .par_iter()
            .enumerate()
            .map(|(idx, c)| {
                let samples = PointSamples {
                    samples: table.point(idx),
                    half_step: table.half_step,
                    stages,
                };
                let w = |t: f64| samples.vorticity(t);
                let f = |t: f64| samples.forcing(t);
                match cfg.solver {
                    PointSolver::Vop => {
                        let fs = build_fundamental(&w, &local_times)?;
                        Ok(*solve_vop(&fs, &f, c)?.last())
                    }
                    PointSolver::Direct => {
                        Ok(*evolve_forced_direct(c, &w, &f, dt, window as f64 * dt)?.last())
                    }
                }
            })
            .collect();
        timings.sweep_s += clock.elapsed().as_secs_f64();

        for (idx, r) in results.into_iter().enumerate() {
            match r {
                Ok(v) => state[idx] = v,
                Err(e) => {
                    state[idx] = Vector3::zeros();
                    if !failed[idx] {
                        failed[idx] = true;
                        failures.push(PointFailure {
                            index: idx,
                            message: format!(
                                "window starting t = {}: {e}",
                                first_half_step as f64 * half
                            ),
                        });
                    }
                }
            }
        }
        if failures.len() as f64 > FAILURE_FRACTION_LIMIT * points as f64 {
            return Err(Error::TooManyFailures {
                failed: failures.len(),
                total: points,
            });
        }

        let step = (win + 1) * window;
        if step.is_multiple_of(stride) {
            let (uw, w) = last.expect("window has stages");
            let pts: Vec<[f64; 3]> = state.iter().map(|v| [v.x, v.y, v.z]).collect();
            let u_p = VectorField::from_points(grid, &pts)?;
            let t = (first_half_step + stages - 1) as f64 * half;
            snapshots.push(assemble(step, t, u_p, uw, w, &bf, &mut timings)?);
        }
    }

    Ok(SolutionBundle {
        config: cfg.clone(),
        grid,
        gamma: init.gamma,
        phi_vel: init.phi_vel,
        phi_vel_laplacian: init.phi_vel_laplacian,
        snapshots,
        failures,
        timings,
    })
}

fn assemble(
    step: usize,
    t: f64,
    u_p: VectorField,
    u_w: VectorField,
    w: VectorField,
    bf: &BodyForce,
    timings: &mut Timings,
) -> Result<Snapshot> {
    let clock = Instant::now();
    let u = u_p.add(&u_w);
    let grad_p = pressure_gradient(&u, bf)?;
    timings.assembly_s += clock.elapsed().as_secs_f64();
    Ok(Snapshot {
        step,
        t,
        u_p,
        u_w,
        w,
        u,
        grad_p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointrot::{evolve_direct, RotState};

    fn config(src: &str) -> ScenarioConfig {
        ScenarioConfig::from_json(src).unwrap()
    }

    #[test]
    fn all_zero_bundle() {
        let cfg = config(r#"{"n": 8, "nu": 0.1, "T": 0.02, "dt": 0.01, "initial_uw": "zero"}"#);
        let b = run(&cfg).unwrap();
        assert_eq!(b.snapshots.len(), 3);
        for s in &b.snapshots {
            for f in [&s.u_p, &s.u_w, &s.w, &s.u, &s.grad_p] {
                assert_eq!(f.max_abs(), 0.0);
            }
        }
        assert!(b.failures.is_empty());
    }

    #[test]
    fn abc_stays_beltrami() {
        let cfg = config(
            r#"{"n": 16, "nu": 0.1, "T": 0.1, "dt": 0.01, "snapshot_stride": 5,
                "initial_uw": {"abc": {"A": 1, "B": 1, "C": 1}}}"#,
        );
        let b = run(&cfg).unwrap();
        assert_eq!(
            b.snapshots.iter().map(|s| s.step).collect::<Vec<_>>(),
            vec![0, 5, 10]
        );
        let last = b.snapshots.last().unwrap();
        assert!((last.t - 0.1).abs() < 1e-15);
        let expected =
            crate::pipeline::abc_field(b.grid, 1.0, 1.0, 1.0).scale((-0.1f64 * 0.1).exp());
        assert!(last.u.sub(&expected).max_abs() <= 1e-12);
        assert!(last.u_p.max_abs() <= 1e-12);
    }

    #[test]
    fn assembly_is_exact_and_runs_are_reproducible() {
        let cfg = config(
            r#"{"n": 8, "nu": 0.05, "T": 0.04, "dt": 0.01, "snapshot_stride": 2,
                "initial_uw": {"random_bandlimited": {"kmax": 2, "seed": 17}},
                "initial_up": {"gradient_of": {"phi_vel": "sin(x) * cos(y)"}}}"#,
        );
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        for (sa, sb) in a.snapshots.iter().zip(&b.snapshots) {
            assert_eq!(sa, sb);
            assert_eq!(sa.u, sa.u_p.add(&sa.u_w));
        }
        assert_eq!(a.gamma, b.gamma);
    }

    #[test]
    fn vop_and_direct_solvers_agree() {
        let src = r#"{"n": 8, "nu": 0.1, "T": 0.1, "dt": 0.005, "snapshot_stride": 10,
                "initial_uw": "taylor_green",
                "initial_up": {"gradient_of": {"phi_vel": "0.3*x - 0.2*z"}}, "solver": "SOLVER"}"#;
        let vop = run(&config(&src.replace("SOLVER", "vop"))).unwrap();
        let direct = run(&config(&src.replace("SOLVER", "direct"))).unwrap();
        let (a, b) = (
            &vop.snapshots.last().unwrap().u_p,
            &direct.snapshots.last().unwrap().u_p,
        );
        assert!(a.sub(b).max_abs() <= 1e-8);
    }

    #[test]
    fn beltrami_points_conserve_speed() {
        // ABC has f = 0 exactly, so u_p follows the homogeneous rotation
        let cfg = config(
            r#"{"n": 8, "nu": 0.2, "T": 0.2, "dt": 0.005, "snapshot_stride": 40,
                "initial_uw": {"abc": {"A": 1, "B": 0.5, "C": 0.8}},
                "initial_up": {"gradient_of": {"phi_vel": "x + 2*y - 0.5*z"}}}"#,
        );
        let b = run(&cfg).unwrap();
        let last = b.snapshots.last().unwrap();
        let speed = last.u_p.magnitude();
        for idx in 0..b.grid.len() {
            assert!((speed.values()[idx] - b.gamma.values()[idx]).abs() <= 1e-8);
        }
        // spot-check one point against the pointwise homogeneous solver
        let idx = b.grid.index(3, 5, 1);
        let w0 = crate::pipeline::abc_field(b.grid, 1.0, 0.5, 0.8).at(idx);
        let w = move |t: f64| Vector3::from(w0) * (-0.2 * t).exp();
        let s =
            evolve_direct(&RotState::new(Vector3::new(1.0, 2.0, -0.5)), &w, 0.005, 0.2).unwrap();
        assert!((s.velocity - Vector3::from(last.u_p.at(idx))).abs().max() <= 1e-8);
    }

    #[test]
    fn rejects_compressible_initial_data() {
        let cfg = config(r#"{"n": 8, "nu": 0.1, "T": 0.01, "dt": 0.01, "initial_uw": "zero"}"#);
        let mut init = generate_initial(&cfg).unwrap();
        init.u_w0 = VectorField::from_fn(cfg.grid().unwrap(), |x, _, _| [x.sin(), 0.0, 0.0]);
        assert!(matches!(
            run_with_initial(&cfg, init),
            Err(Error::NotSolenoidal(_))
        ));
    }

    #[test]
    fn window_fits_budget() {
        assert_eq!(window_steps(50, 32 * 32 * 32), 50);
        let w = window_steps(50, 64 * 64 * 64);
        assert_eq!(50 % w, 0);
        assert!((2 * w + 1) * 48 * 64 * 64 * 64 <= STAGE_TABLE_BYTES);
    }
}
