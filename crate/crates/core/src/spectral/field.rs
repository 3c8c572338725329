use crate::error::{Error, Result};

use super::grid::TorusGrid;

/// Real-valued grid function on a [`TorusGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: TorusGrid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn from_values(grid: &TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "field has {} values, grid has {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(point) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { point });
        }
        Ok(ScalarField {
            grid: grid.clone(),
            values,
        })
    }

    /// Internal constructor for values known to have the right length.
    pub(crate) fn from_raw(grid: &TorusGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn zeros(grid: &TorusGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &TorusGrid, value: f64) -> Self {
        ScalarField {
            grid: grid.clone(),
            values: vec![value; grid.len()],
        }
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn<F: FnMut(&[f64]) -> f64>(grid: &TorusGrid, mut f: F) -> Self {
        let mut values = vec![0.0; grid.len()];
        grid.for_each_point(|index, x| values[index] = f(x));
        ScalarField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        ScalarField::from_raw(&self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &ScalarField, f: F) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        Ok(ScalarField::from_raw(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &ScalarField) -> Result<Self> {
        self.zip_with(other, |a, b| a + alpha * b)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        self.map(|v| alpha * v)
    }

    pub fn add_assign_scaled(&mut self, alpha: f64, other: &ScalarField) {
        debug_assert!(self.grid.same_as(&other.grid));
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index and value of the smallest entry.
    pub fn argmin(&self) -> (usize, f64) {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |best, (i, v)| if v < best.1 { (i, v) } else { best },
            )
    }

    pub fn sup_distance(&self, other: &ScalarField) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Periodic shift by whole grid cells: `out(x) = self(x - shift·h)`.
    pub fn translate(&self, shift: &[isize]) -> Result<Self> {
        let n = self.grid.dim();
        if shift.len() != n {
            return Err(Error::InvalidArgument(format!(
                "shift has {} components, grid dimension is {n}",
                shift.len()
            )));
        }
        let sizes = self.grid.sizes();
        let mut out = vec![0.0; self.values.len()];
        let mut target = vec![0usize; n];
        for (index, &value) in self.values.iter().enumerate() {
            let multi = self.grid.unravel(index);
            for axis in 0..n {
                let size = sizes[axis] as isize;
                target[axis] = (multi[axis] as isize + shift[axis]).rem_euclid(size) as usize;
            }
            out[self.grid.ravel(&target)] = value;
        }
        Ok(ScalarField::from_raw(&self.grid, out))
    }
}
