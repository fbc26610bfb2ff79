use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{Grid, ScalarField};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

// rustfft plans are immutable and Send + Sync; only the cache needs a lock.
static PLANS: LazyLock<Mutex<HashMap<usize, Arc<Plans>>>> = LazyLock::new(Default::default);

fn plans(n: usize) -> Arc<Plans> {
    let mut cache = PLANS.lock().unwrap_or_else(|e| e.into_inner());
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Inverse,
}

fn transform_3d(n: usize, data: &mut [Complex64], dir: Direction) {
    let plans = plans(n);
    let fft = match dir {
        Direction::Forward => &plans.forward,
        Direction::Inverse => &plans.inverse,
    };
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];

    // x lines are contiguous
    fft.process_with_scratch(data, &mut scratch);

    // y then z: gather lines into contiguous order, transform, scatter back
    let mut tmp = vec![Complex64::default(); data.len()];
    for axis in [1usize, 2] {
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    let src = i + n * (j + n * k);
                    let dst = match axis {
                        1 => j + n * (i + n * k),
                        _ => k + n * (i + n * j),
                    };
                    tmp[dst] = data[src];
                }
            }
        }
        fft.process_with_scratch(&mut tmp, &mut scratch);
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    let dst = i + n * (j + n * k);
                    let src = match axis {
                        1 => j + n * (i + n * k),
                        _ => k + n * (i + n * j),
                    };
                    data[dst] = tmp[src];
                }
            }
        }
    }
}

/// Discrete Fourier coefficients of a real field, same layout as the field.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn forward(field: &ScalarField) -> Self {
        let grid = *field.grid();
        let mut coeffs: Vec<Complex64> = field
            .values()
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        transform_3d(grid.n(), &mut coeffs, Direction::Forward);
        Self { grid, coeffs }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), grid.len());
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Inverse transform, keeping the real part.
    pub fn to_field(&self) -> ScalarField {
        let n = self.grid.n();
        let mut data = self.coeffs.clone();
        transform_3d(n, &mut data, Direction::Inverse);
        let norm = 1.0 / self.grid.len() as f64;
        ScalarField::from_raw(self.grid, data.iter().map(|c| c.re * norm).collect())
    }

    /// Returns a new spectrum with every coefficient multiplied by
    /// `f([ix, iy, iz])`, where the indices are array positions.
    pub fn map_modes(&self, f: impl Fn([usize; 3]) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, &c)| c * f(self.grid.unravel(idx)))
            .collect();
        Self {
            grid: self.grid,
            coeffs,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}
