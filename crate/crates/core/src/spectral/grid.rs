use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Largest grid accepted by [`TorusGrid::new`]; guards allocation from parsed headers.
pub const MAX_POINTS: usize = 1 << 27;

pub(crate) struct AxisPlan {
    pub(crate) forward: Arc<dyn Fft<f64>>,
    pub(crate) inverse: Arc<dyn Fft<f64>>,
    /// Signed wavenumber per index, Nyquist stored as `-N/2`.
    pub(crate) wavenumbers: Vec<f64>,
    pub(crate) nyquist: usize,
}

struct GridInner {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
    plans: Vec<AxisPlan>,
}

/// Uniform periodic grid on the flat torus `[0, 2π)^n`.
///
/// Integrals use the normalized measure `Π dx_i / (2π)^n`, so the torus has
/// unit volume and the integral of a grid function is its arithmetic mean.
/// Values are stored row-major with the last axis varying fastest.
#[derive(Clone)]
pub struct TorusGrid {
    inner: Arc<GridInner>,
}

impl TorusGrid {
    /// Builds a grid with one point count per axis. Every size must be even and at least 4.
    pub fn new(sizes: &[usize]) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be at least 2, got {}",
                sizes.len()
            )));
        }
        for (axis, &size) in sizes.iter().enumerate() {
            if size < 4 || size % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "axis {} has {} points; sizes must be even and >= 4",
                    axis + 1,
                    size
                )));
            }
        }
        let len = sizes
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .filter(|&l| l <= MAX_POINTS)
            .ok_or_else(|| Error::InvalidGrid(format!("grid {sizes:?} is too large")))?;

        let mut strides = vec![1; sizes.len()];
        for axis in (0..sizes.len() - 1).rev() {
            strides[axis] = strides[axis + 1] * sizes[axis + 1];
        }

        let mut planner = FftPlanner::new();
        let plans = sizes
            .iter()
            .map(|&size| {
                let half = size / 2;
                let wavenumbers = (0..size)
                    .map(|m| {
                        if m < half {
                            m as f64
                        } else {
                            m as f64 - size as f64
                        }
                    })
                    .collect();
                AxisPlan {
                    forward: planner.plan_fft_forward(size),
                    inverse: planner.plan_fft_inverse(size),
                    wavenumbers,
                    nyquist: half,
                }
            })
            .collect();

        Ok(TorusGrid {
            inner: Arc::new(GridInner {
                sizes: sizes.to_vec(),
                strides,
                len,
                plans,
            }),
        })
    }

    /// Checked constructor taking the dimension explicitly.
    pub fn with_dim(n: usize, sizes: &[usize]) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be at least 2, got {n}"
            )));
        }
        if sizes.len() != n {
            return Err(Error::InvalidGrid(format!(
                "expected {n} axis sizes, got {}",
                sizes.len()
            )));
        }
        Self::new(sizes)
    }

    /// Same number of points on every axis.
    pub fn cube(n: usize, size: usize) -> Result<Self> {
        Self::with_dim(n, &vec![size; n])
    }

    pub fn dim(&self) -> usize {
        self.inner.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.inner.sizes
    }

    pub fn strides(&self) -> &[usize] {
        &self.inner.strides
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.inner.len
    }

    pub fn is_empty(&self) -> bool {
        self.inner.len == 0
    }

    /// Total volume under the normalized measure.
    pub fn volume(&self) -> f64 {
        1.0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * PI / self.inner.sizes[axis] as f64
    }

    /// Multi-index of a flat point index.
    pub fn unravel(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for axis in 0..self.dim() {
            let stride = self.inner.strides[axis];
            out[axis] = index / stride;
            index %= stride;
        }
        out
    }

    pub fn ravel(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .zip(&self.inner.strides)
            .map(|(m, s)| m * s)
            .sum()
    }

    /// Physical coordinates of a grid point.
    pub fn coords(&self, index: usize) -> Vec<f64> {
        self.unravel(index)
            .iter()
            .enumerate()
            .map(|(axis, &m)| m as f64 * self.spacing(axis))
            .collect()
    }

    /// Coordinates of all points, axis by axis, in storage order.
    pub fn for_each_point<F: FnMut(usize, &[f64])>(&self, mut visit: F) {
        let n = self.dim();
        let mut multi = vec![0usize; n];
        let mut x = vec![0.0; n];
        for index in 0..self.len() {
            for axis in 0..n {
                x[axis] = multi[axis] as f64 * self.spacing(axis);
            }
            visit(index, &x);
            for axis in (0..n).rev() {
                multi[axis] += 1;
                if multi[axis] < self.inner.sizes[axis] {
                    break;
                }
                multi[axis] = 0;
            }
        }
    }

    pub(crate) fn plan(&self, axis: usize) -> &AxisPlan {
        &self.inner.plans[axis]
    }

    pub fn same_as(&self, other: &TorusGrid) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.sizes == other.inner.sizes
    }

    pub(crate) fn ensure_same(&self, other: &TorusGrid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.sizes().to_vec(),
                right: other.sizes().to_vec(),
            })
        }
    }
}

impl PartialEq for TorusGrid {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("sizes", &self.inner.sizes)
            .finish()
    }
}
