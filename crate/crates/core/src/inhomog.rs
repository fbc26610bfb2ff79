//! The forced rotation system `u' = u × w + f` solved by variation of
//! parameters.
//!
//! With `ζ_{v,p}` the `p`-th component of the `v`-th homogeneous solution
//! (started from the basis vector `e_v`) and `Δ = det ζ`, the forced solution is
//!
//! ```text
//! χ_p(t) = Σ_v ζ_{v,p}(t) · ( ∫₀ᵗ Δ_v/Δ ds + C_v )
//! ```
//!
//! where `Δ_v` is `Δ` with row `v` replaced by `f`. The integral is taken with a
//! cumulative composite Simpson rule on the uniform sample grid, so `χ(0) = C`.

use nalgebra::{Matrix3, Vector3};

use crate::pointrot::{rk4_step, rotation_rhs, step_count, Signal};
use crate::{Error, Result};

/// Determinant drift at which the fundamental system is rejected.
pub const DETERMINANT_DRIFT_LIMIT: f64 = 1e-6;

/// Homogeneous solutions sampled on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalSystem {
    times: Vec<f64>,
    /// Row `v` holds the `v`-th solution: `zeta[j][(v, p)] = ζ_{v,p}(t_j)`.
    zeta: Vec<Matrix3<f64>>,
    delta: Vec<f64>,
}

impl FundamentalSystem {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `ζ(t_j)` with one homogeneous solution per row.
    pub fn zeta(&self, j: usize) -> &Matrix3<f64> {
        &self.zeta[j]
    }

    pub fn delta(&self, j: usize) -> f64 {
        self.delta[j]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest `|Δ(t) − 1|` over the samples.
    pub fn determinant_drift(&self) -> f64 {
        self.delta.iter().fold(0.0, |m, d| m.max((d - 1.0).abs()))
    }
}

/// Uniform grid `0, dt, ..., T`.
pub fn uniform_times(dt: f64, horizon: f64) -> Result<Vec<f64>> {
    let steps = step_count(dt, horizon)?;
    Ok((0..=steps).map(|k| k as f64 * dt).collect())
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.first() != Some(&0.0) {
        return Err(Error::TimeGrid("time samples must start at 0".into()));
    }
    if times
        .windows(2)
        .any(|w| w[1].is_nan() || w[1] <= w[0] || !w[1].is_finite())
    {
        return Err(Error::TimeGrid("time samples must increase".into()));
    }
    Ok(())
}

/// Evolves the three basis solutions through `times` with RK4.
pub fn build_fundamental(w: &dyn Signal, times: &[f64]) -> Result<FundamentalSystem> {
    check_times(times)?;
    let mut zeta = Vec::with_capacity(times.len());
    let mut delta = Vec::with_capacity(times.len());
    // columns evolve as u' = u × w; stored transposed so rows are solutions
    let mut cols = Matrix3::<f64>::identity();
    zeta.push(cols.transpose());
    delta.push(cols.determinant());
    for pair in times.windows(2) {
        let (t, h) = (pair[0], pair[1] - pair[0]);
        cols = rk4_step(t, cols, h, |t, m: Matrix3<f64>| {
            let wt = w.at(t);
            Matrix3::from_columns(&[
                rotation_rhs(&m.column(0).into(), &wt),
                rotation_rhs(&m.column(1).into(), &wt),
                rotation_rhs(&m.column(2).into(), &wt),
            ])
        });
        let d = cols.determinant();
        if !d.is_finite() || (d - 1.0).abs() > DETERMINANT_DRIFT_LIMIT {
            return Err(Error::DeterminantDrift {
                t: pair[1],
                drift: (d - 1.0).abs(),
            });
        }
        zeta.push(cols.transpose());
        delta.push(d);
    }
    Ok(FundamentalSystem {
        times: times.to_vec(),
        zeta,
        delta,
    })
}

/// `Δ_v` at sample `j`: the determinant of `ζ(t_j)` with row `v` (1-based)
/// replaced by `f`.
pub fn delta_v(fs: &FundamentalSystem, f: &Vector3<f64>, v: usize, j: usize) -> f64 {
    assert!((1..=3).contains(&v), "row index must be 1, 2 or 3");
    let mut m = fs.zeta[j];
    m.set_row(v - 1, &f.transpose());
    m.determinant()
}

/// Cumulative integral of uniformly spaced samples with step `h`, fourth order
/// at every node: composite Simpson for even nodes, Simpson 3/8 on the first
/// three intervals plus Simpson for odd nodes, and a four-point cubic rule for
/// the first interval.
pub fn cumulative_simpson<T>(samples: &[T], h: f64) -> Vec<T>
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = samples.len();
    let mut out = vec![T::default(); n];
    if n < 2 {
        return out;
    }
    let g = samples;
    if n == 2 {
        out[1] = (g[0] + g[1]) * (0.5 * h);
        return out;
    }
    // even nodes
    let mut j = 2;
    while j < n {
        out[j] = out[j - 2] + (g[j - 2] + g[j - 1] * 4.0 + g[j]) * (h / 3.0);
        j += 2;
    }
    // node 1: interpolant through the first four (or three) samples
    out[1] = if n > 3 {
        (g[0] * 9.0 + g[1] * 19.0 + g[2] * -5.0 + g[3]) * (h / 24.0)
    } else {
        (g[0] * 5.0 + g[1] * 8.0 + g[2] * -1.0) * (h / 12.0)
    };
    if n > 3 {
        out[3] = (g[0] + g[1] * 3.0 + g[2] * 3.0 + g[3]) * (3.0 * h / 8.0);
        let mut j = 5;
        while j < n {
            out[j] = out[j - 2] + (g[j - 2] + g[j - 1] * 4.0 + g[j]) * (h / 3.0);
            j += 2;
        }
    }
    out
}

/// Sampled trajectory of a 3-vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vector3<f64>>,
}

impl Trajectory {
    pub fn last(&self) -> &Vector3<f64> {
        self.states.last().expect("trajectory is never empty")
    }

    /// Largest componentwise difference to another trajectory on the same grid.
    pub fn max_difference(&self, other: &Trajectory) -> f64 {
        assert_eq!(self.states.len(), other.states.len());
        self.states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| (a - b).abs().max())
            .fold(0.0, f64::max)
    }
}

/// Variation-of-parameters solution with `χ(0) = c`.
pub fn solve_vop(fs: &FundamentalSystem, f: &dyn Signal, c: &Vector3<f64>) -> Result<Trajectory> {
    let times = &fs.times;
    let h = if times.len() > 1 {
        times[1] - times[0]
    } else {
        0.0
    };
    for (j, &t) in times.iter().enumerate() {
        if (t - j as f64 * h).abs() > 1e-9 * h.max(f64::MIN_POSITIVE) * (j as f64).max(1.0) {
            return Err(Error::TimeGrid(
                "variation of parameters needs uniform time samples".into(),
            ));
        }
    }
    let weights: Vec<Vector3<f64>> = (0..times.len())
        .map(|j| {
            let ft = f.at(times[j]);
            let d = fs.delta[j];
            Vector3::new(
                delta_v(fs, &ft, 1, j) / d,
                delta_v(fs, &ft, 2, j) / d,
                delta_v(fs, &ft, 3, j) / d,
            )
        })
        .collect();
    let integrals = cumulative_simpson(&weights, h);
    let states: Vec<Vector3<f64>> = integrals
        .iter()
        .zip(&fs.zeta)
        .map(|(i, z)| z.transpose() * (i + c))
        .collect();
    if let Some(j) = states.iter().position(|s| !s.iter().all(|v| v.is_finite())) {
        return Err(Error::StepFailure {
            t: times[j],
            reason: "non-finite forced solution".into(),
        });
    }
    Ok(Trajectory {
        times: times.clone(),
        states,
    })
}

/// RK4 on `u' = u × w + f`; the independent oracle for [`solve_vop`].
pub fn evolve_forced_direct(
    s0: &Vector3<f64>,
    w: &dyn Signal,
    f: &dyn Signal,
    dt: f64,
    horizon: f64,
) -> Result<Trajectory> {
    let times = uniform_times(dt, horizon)?;
    let mut states = Vec::with_capacity(times.len());
    let mut u = *s0;
    states.push(u);
    for &t in &times[..times.len() - 1] {
        u = rk4_step(t, u, dt, |t, u| rotation_rhs(&u, &w.at(t)) + f.at(t));
        if !u.iter().all(|c| c.is_finite()) {
            return Err(Error::StepFailure {
                t,
                reason: "state overflowed; reduce the step size".into(),
            });
        }
        states.push(u);
    }
    Ok(Trajectory { times, states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointrot::{evolve_direct, Constant, RotState};
    use proptest::prelude::*;

    /// Leibniz expansion over all permutations; independent of nalgebra.
    fn leibniz_det(m: &Matrix3<f64>) -> f64 {
        let perms = [
            ([0, 1, 2], 1.0),
            ([0, 2, 1], -1.0),
            ([1, 0, 2], -1.0),
            ([1, 2, 0], 1.0),
            ([2, 0, 1], 1.0),
            ([2, 1, 0], -1.0),
        ];
        perms
            .iter()
            .map(|(p, s)| s * m[(0, p[0])] * m[(1, p[1])] * m[(2, p[2])])
            .sum()
    }

    fn bounded_signal(a: [f64; 6]) -> impl Fn(f64) -> Vector3<f64> + Sync {
        move |t: f64| {
            Vector3::new(
                a[0] * (3.0 * t).sin() + a[3],
                a[1] * (2.0 * t + 1.0).cos(),
                a[2] * (5.0 * t).sin() * t + a[4] - a[5] * t,
            )
        }
    }

    #[test]
    fn zero_vorticity_gives_identity() {
        let times = uniform_times(0.1, 1.0).unwrap();
        let fs = build_fundamental(&Constant(Vector3::zeros()), &times).unwrap();
        for j in 0..fs.len() {
            assert_eq!(*fs.zeta(j), Matrix3::identity());
            assert_eq!(fs.delta(j), 1.0);
        }
    }

    #[test]
    fn constant_z_vorticity_gives_planar_rotation() {
        let c = 1.7;
        let times = uniform_times(1e-3, 1.0).unwrap();
        let fs = build_fundamental(&Constant(Vector3::new(0.0, 0.0, c)), &times).unwrap();
        let j = fs.len() - 1;
        let t = times[j];
        // U' = c V, V' = −c U: solution from e1 is (cos ct, −sin ct, 0)
        let expected = Matrix3::new(
            (c * t).cos(),
            -(c * t).sin(),
            0.0,
            (c * t).sin(),
            (c * t).cos(),
            0.0,
            0.0,
            0.0,
            1.0,
        );
        assert!((fs.zeta(j) - expected).abs().max() <= 1e-10);
        assert!((fs.delta(j) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn delta_v_examples() {
        let times = [0.0];
        let fs = build_fundamental(&Constant(Vector3::zeros()), &times).unwrap();
        let f = Vector3::new(2.0, -3.0, 5.0);
        assert_eq!(delta_v(&fs, &f, 1, 0), 2.0);
        assert_eq!(delta_v(&fs, &f, 2, 0), -3.0);
        assert_eq!(delta_v(&fs, &f, 3, 0), 5.0);
        for v in 1..=3 {
            assert_eq!(delta_v(&fs, &Vector3::zeros(), v, 0), 0.0);
        }
    }

    #[test]
    fn rejects_bad_time_grids() {
        let w = Constant(Vector3::zeros());
        assert!(build_fundamental(&w, &[0.1, 0.2]).is_err());
        assert!(build_fundamental(&w, &[0.0, 0.2, 0.1]).is_err());
        let fs = build_fundamental(&w, &[0.0, 0.1, 0.3, 0.4]).unwrap();
        assert!(matches!(
            solve_vop(&fs, &Constant(Vector3::zeros()), &Vector3::zeros()),
            Err(Error::TimeGrid(_))
        ));
    }

    #[test]
    fn determinant_drift_aborts() {
        let times = [0.0, 1.0, 2.0];
        let w = Constant(Vector3::new(3.0, 0.0, 0.0));
        assert!(matches!(
            build_fundamental(&w, &times),
            Err(Error::DeterminantDrift { .. })
        ));
    }

    #[test]
    fn unforced_solution_is_first_column() {
        let times = uniform_times(1e-2, 1.0).unwrap();
        let w = bounded_signal([1.0, -2.0, 0.5, 0.3, 1.1, 0.2]);
        let fs = build_fundamental(&w, &times).unwrap();
        let traj = solve_vop(&fs, &Constant(Vector3::zeros()), &Vector3::x()).unwrap();
        for (j, s) in traj.states.iter().enumerate() {
            assert_eq!(*s, fs.zeta(j).row(0).transpose());
        }
    }

    #[test]
    fn constant_forcing_without_rotation() {
        let times = uniform_times(1e-3, 1.0).unwrap();
        let fs = build_fundamental(&Constant(Vector3::zeros()), &times).unwrap();
        let traj = solve_vop(&fs, &Constant(Vector3::x()), &Vector3::zeros()).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            assert!((s - Vector3::new(*t, 0.0, 0.0)).abs().max() <= 1e-10);
        }
        let direct = evolve_forced_direct(
            &Vector3::zeros(),
            &Constant(Vector3::zeros()),
            &Constant(Vector3::x()),
            1e-3,
            1.0,
        )
        .unwrap();
        assert!(direct.max_difference(&traj) <= 1e-10);
    }

    #[test]
    fn cumulative_simpson_is_exact_for_cubics() {
        let h = 0.1;
        let g: Vec<f64> = (0..12)
            .map(|j| {
                let t = j as f64 * h;
                1.0 - 2.0 * t + 3.0 * t * t + t * t * t
            })
            .collect();
        let out = cumulative_simpson(&g, h);
        for (j, v) in out.iter().enumerate() {
            let t = j as f64 * h;
            let exact = t - t * t + t.powi(3) + t.powi(4) / 4.0;
            assert!((v - exact).abs() < 1e-13, "node {j}: {v} vs {exact}");
        }
        assert_eq!(cumulative_simpson::<f64>(&[], h), Vec::<f64>::new());
        assert_eq!(cumulative_simpson(&[1.0, 3.0], 0.5), vec![0.0, 1.0]);
    }

    #[test]
    fn forced_direct_mirrors_vop_unforced() {
        let w = bounded_signal([0.5, 1.0, -1.0, 0.0, 2.0, 0.1]);
        let direct =
            evolve_forced_direct(&Vector3::x(), &w, &Constant(Vector3::zeros()), 1e-3, 1.0)
                .unwrap();
        let fs = build_fundamental(&w, &direct.times).unwrap();
        let vop = solve_vop(&fs, &Constant(Vector3::zeros()), &Vector3::x()).unwrap();
        assert!(direct.max_difference(&vop) <= 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn delta_v_matches_leibniz(
            entries in proptest::array::uniform9(-3.0f64..3.0),
            f in proptest::array::uniform3(-3.0f64..3.0),
            v in 1usize..=3,
        ) {
            // a non-orthogonal ζ exercises the generic determinant
            let fs = FundamentalSystem {
                times: vec![0.0],
                zeta: vec![Matrix3::from_row_slice(&entries)],
                delta: vec![1.0],
            };
            let f = Vector3::from(f);
            let mut m = Matrix3::from_row_slice(&entries);
            for p in 0..3 {
                m[(v - 1, p)] = f[p];
            }
            prop_assert!((delta_v(&fs, &f, v, 0) - leibniz_det(&m)).abs() <= 1e-12);
        }

        #[test]
        fn orthogonal_and_unimodular(a in proptest::array::uniform6(-5.0f64..5.0)) {
            let times = uniform_times(1e-3, 1.0).unwrap();
            let fs = build_fundamental(&bounded_signal(a), &times).unwrap();
            for j in (0..fs.len()).step_by(50) {
                let z = fs.zeta(j);
                prop_assert!((z * z.transpose() - Matrix3::identity()).abs().max() <= 1e-8);
            }
            prop_assert!(fs.determinant_drift() <= 1e-8);
        }

        #[test]
        fn superposition(a in proptest::array::uniform6(-3.0f64..3.0), c in proptest::array::uniform3(-2.0f64..2.0)) {
            let times = uniform_times(1e-2, 1.0).unwrap();
            let fs = build_fundamental(&bounded_signal(a), &times).unwrap();
            let f1 = move |t: f64| Vector3::new(t.sin(), a[0], 1.0 - t);
            let f2 = move |t: f64| Vector3::new(a[1] * t, (3.0 * t).cos(), a[2]);
            let sum = move |t: f64| f1(t) + f2(t);
            let c = Vector3::from(c);
            let lhs = solve_vop(&fs, &sum, &c).unwrap();
            let r1 = solve_vop(&fs, &f1, &c).unwrap();
            let r2 = solve_vop(&fs, &f2, &Vector3::zeros()).unwrap();
            let rhs = Trajectory {
                times: r1.times.clone(),
                states: r1.states.iter().zip(&r2.states).map(|(x, y)| x + y).collect(),
            };
            prop_assert!(lhs.max_difference(&rhs) <= 1e-10);
        }

        #[test]
        fn homogeneous_limit_matches_rotation(a in proptest::array::uniform6(-3.0f64..3.0), c in proptest::array::uniform3(-2.0f64..2.0)) {
            let w = bounded_signal(a);
            let times = uniform_times(1e-3, 1.0).unwrap();
            let fs = build_fundamental(&w, &times).unwrap();
            let c = Vector3::from(c);
            let vop = solve_vop(&fs, &Constant(Vector3::zeros()), &c).unwrap();
            let rot = evolve_direct(&RotState::new(c), &w, 1e-3, 1.0).unwrap();
            prop_assert!((vop.last() - rot.velocity).abs().max() <= 1e-8);
        }

        #[test]
        fn two_route_agreement(a in proptest::array::uniform6(-3.0f64..3.0), b in proptest::array::uniform3(-2.0f64..2.0)) {
            let w = bounded_signal(a);
            let f = move |t: f64| Vector3::new(b[0] * (2.0 * t).cos(), b[1] * t, b[2] + t.sin());
            let c = Vector3::new(0.3, -0.1, 0.7);
            let direct = evolve_forced_direct(&c, &w, &f, 1e-3, 1.0).unwrap();
            let fs = build_fundamental(&w, &direct.times).unwrap();
            let vop = solve_vop(&fs, &f, &c).unwrap();
            prop_assert!(direct.max_difference(&vop) <= 1e-5);
        }
    }
}
