use serde::{Deserialize, Serialize};

use super::Grid;
use crate::{Error, Result};

/// Discrete L2 (root mean square over samples) and max norms of a field.
///
/// For vector fields the L2 norm is the RMS of the pointwise Euclidean
/// magnitude, and the max norm is the largest absolute component value.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Norms {
    pub l2: f64,
    pub max: f64,
}

/// Real samples of a scalar function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Field(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Field(format!("non-finite sample at index {pos}")));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Samples `f(x, y, z)` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|idx| {
                let [x, y, z] = grid.point(idx);
                f(x, y, z)
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.grid, other.grid, "fields on different grids");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::from_raw(self.grid, values)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn rms(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64).sqrt()
    }

    pub fn norms(&self) -> Norms {
        Norms {
            l2: self.rms(),
            max: self.max_abs(),
        }
    }
}

/// Three scalar components sharing one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: [ScalarField; 3],
}

impl VectorField {
    pub fn new(x: ScalarField, y: ScalarField, z: ScalarField) -> Result<Self> {
        if x.grid != y.grid || x.grid != z.grid {
            return Err(Error::GridMismatch);
        }
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::Field("non-finite component sample".into()));
        }
        Ok(Self {
            components: [x, y, z],
        })
    }

    pub(crate) fn from_components(components: [ScalarField; 3]) -> Self {
        debug_assert!(components.iter().all(|c| c.grid == components[0].grid));
        Self { components }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, [0.0; 3])
    }

    pub fn constant(grid: Grid, v: [f64; 3]) -> Self {
        Self::from_components(v.map(|c| ScalarField::constant(grid, c)))
    }

    /// Samples `f(x, y, z) -> [vx, vy, vz]` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64, f64) -> [f64; 3]) -> Self {
        let mut comps = [
            Vec::with_capacity(grid.len()),
            Vec::with_capacity(grid.len()),
            Vec::with_capacity(grid.len()),
        ];
        for idx in 0..grid.len() {
            let [x, y, z] = grid.point(idx);
            let v = f(x, y, z);
            for c in 0..3 {
                comps[c].push(v[c]);
            }
        }
        Self::from_components(comps.map(|v| ScalarField::from_raw(grid, v)))
    }

    /// Builds a field from per-point vectors in grid order.
    pub fn from_points(grid: Grid, points: &[[f64; 3]]) -> Result<Self> {
        if points.len() != grid.len() {
            return Err(Error::Field(format!(
                "expected {} points, got {}",
                grid.len(),
                points.len()
            )));
        }
        let comps = [0, 1, 2].map(|c| points.iter().map(|p| p[c]).collect::<Vec<_>>());
        let [x, y, z] = comps.map(|v| ScalarField::from_raw(grid, v));
        Self::new(x, y, z)
    }

    pub fn grid(&self) -> &Grid {
        &self.components[0].grid
    }

    pub fn x(&self) -> &ScalarField {
        &self.components[0]
    }

    pub fn y(&self) -> &ScalarField {
        &self.components[1]
    }

    pub fn z(&self) -> &ScalarField {
        &self.components[2]
    }

    pub fn components(&self) -> &[ScalarField; 3] {
        &self.components
    }

    pub fn into_components(self) -> [ScalarField; 3] {
        self.components
    }

    #[inline]
    pub fn at(&self, idx: usize) -> [f64; 3] {
        [
            self.components[0].values[idx],
            self.components[1].values[idx],
            self.components[2].values[idx],
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(ScalarField::is_finite)
    }

    pub fn map_components(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self::from_components([
            f(&self.components[0]),
            f(&self.components[1]),
            f(&self.components[2]),
        ])
    }

    pub fn zip_components(
        &self,
        other: &Self,
        f: impl Fn(&ScalarField, &ScalarField) -> ScalarField,
    ) -> Self {
        Self::from_components([
            f(&self.components[0], &other.components[0]),
            f(&self.components[1], &other.components[1]),
            f(&self.components[2], &other.components[2]),
        ])
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_components(other, ScalarField::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_components(other, ScalarField::sub)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_components(|c| c.scale(s))
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        let [x, y, z] = &self.components;
        let values = (0..self.grid().len())
            .map(|i| (x.values[i].powi(2) + y.values[i].powi(2) + z.values[i].powi(2)).sqrt())
            .collect();
        ScalarField::from_raw(*self.grid(), values)
    }

    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .map(ScalarField::max_abs)
            .fold(0.0, f64::max)
    }

    pub fn rms(&self) -> f64 {
        let total: f64 = self
            .components
            .iter()
            .map(|c| c.values.iter().map(|v| v * v).sum::<f64>())
            .sum();
        (total / self.grid().len() as f64).sqrt()
    }

    pub fn norms(&self) -> Norms {
        Norms {
            l2: self.rms(),
            max: self.max_abs(),
        }
    }
}
