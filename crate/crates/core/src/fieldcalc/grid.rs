use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MIN_N: usize = 8;
pub const MAX_N: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Uniform periodic lattice with `n` samples per axis on a cube of edge `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec")]
pub struct Grid {
    n: usize,
    #[serde(rename = "L")]
    length: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSpec {
    n: usize,
    #[serde(rename = "L")]
    length: f64,
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;

    fn try_from(spec: GridSpec) -> Result<Self> {
        Grid::new(spec.n, spec.length)
    }
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if !n.is_power_of_two() || !(MIN_N..=MAX_N).contains(&n) {
            return Err(Error::Grid(format!(
                "n must be a power of two in [{MIN_N}, {MAX_N}], got {n}"
            )));
        }
        if !length.is_finite() || length <= 0.0 {
            return Err(Error::Grid(format!(
                "box length must be positive, got {length}"
            )));
        }
        Ok(Self { n, length })
    }

    /// The default `[0, 2π)³` box.
    pub fn periodic(n: usize) -> Result<Self> {
        Self::new(n, TAU)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Sample spacing `L / n` (exact, `n` is a power of two).
    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Number of samples `n³`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n * (j + self.n * k)
    }

    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx % n, (idx / n) % n, idx / (n * n)]
    }

    #[inline]
    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    /// Physical coordinates of sample `idx`.
    #[inline]
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.unravel(idx);
        [self.coordinate(i), self.coordinate(j), self.coordinate(k)]
    }

    /// Signed Fourier mode number of array index `i` (Nyquist maps to `-n/2`).
    #[inline]
    pub fn mode(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Fundamental wavenumber `2π / L`.
    pub fn base_wavenumber(&self) -> f64 {
        TAU / self.length
    }

    /// Wavenumbers used by first derivatives: the Nyquist mode is zeroed so
    /// real fields stay real.
    pub fn derivative_wavenumbers(&self) -> Vec<f64> {
        let k0 = self.base_wavenumber();
        (0..self.n)
            .map(|i| {
                if i == self.n / 2 {
                    0.0
                } else {
                    self.mode(i) as f64 * k0
                }
            })
            .collect()
    }

    /// Full signed wavenumbers, Nyquist included (used by even-order operators).
    pub fn wavenumbers(&self) -> Vec<f64> {
        let k0 = self.base_wavenumber();
        (0..self.n).map(|i| self.mode(i) as f64 * k0).collect()
    }

    /// Largest mode kept by the 2/3 dealiasing rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n as i64 - 1) / 3
    }
}
