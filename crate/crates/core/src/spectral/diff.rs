//! Fourier differentiation, zero-mean gauge and the inverse Laplacian.
//!
//! Axes are 0-based. Odd-order multipliers vanish on the Nyquist mode; the
//! second-order multiplier `-k²` keeps it, so `hessian_entry(u, i, i)` and the
//! Laplacian are exact inverses of [`inverse_laplacian`] on zero-mean fields.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};

use super::fft::Spectrum;
use super::field::ScalarField;
use super::grid::TorusGrid;

/// Tolerance for treating a field as zero-mean.
pub const ZERO_MEAN_TOL: f64 = 1e-12;

fn first_wavenumber(grid: &TorusGrid, axis: usize, index: usize) -> f64 {
    let plan = grid.plan(axis);
    if index == plan.nyquist {
        0.0
    } else {
        plan.wavenumbers[index]
    }
}

fn full_wavenumber(grid: &TorusGrid, axis: usize, index: usize) -> f64 {
    grid.plan(axis).wavenumbers[index]
}

fn check_axis(grid: &TorusGrid, axis: usize) -> Result<()> {
    if axis >= grid.dim() {
        Err(Error::IndexOutOfRange(format!(
            "axis {axis} on a {}-dimensional grid",
            grid.dim()
        )))
    } else {
        Ok(())
    }
}

impl Spectrum {
    /// `∂^order / ∂x_axis^order` for order 1 or 2.
    pub fn partial(&self, axis: usize, order: usize) -> Result<ScalarField> {
        let grid = self.grid().clone();
        check_axis(&grid, axis)?;
        match order {
            1 => Ok(self.apply(|k| Complex64::new(0.0, first_wavenumber(&grid, axis, k[axis])))),
            2 => Ok(self.apply(|k| {
                let w = full_wavenumber(&grid, axis, k[axis]);
                Complex64::new(-w * w, 0.0)
            })),
            _ => Err(Error::InvalidArgument(format!(
                "derivative order must be 1 or 2, got {order}"
            ))),
        }
    }

    pub fn hessian_entry(&self, i: usize, j: usize) -> Result<ScalarField> {
        let grid = self.grid().clone();
        check_axis(&grid, i)?;
        check_axis(&grid, j)?;
        if i == j {
            return self.partial(i, 2);
        }
        Ok(self.apply(|k| {
            let a = first_wavenumber(&grid, i, k[i]);
            let b = first_wavenumber(&grid, j, k[j]);
            Complex64::new(-a * b, 0.0)
        }))
    }

    pub fn laplacian(&self) -> ScalarField {
        let grid = self.grid().clone();
        self.apply(|k| {
            let sq: f64 = (0..grid.dim())
                .map(|axis| full_wavenumber(&grid, axis, k[axis]).powi(2))
                .sum();
            Complex64::new(-sq, 0.0)
        })
    }

    /// Sum of second derivatives over a subset of axes.
    pub fn partial_laplacian(&self, axes: &[usize]) -> Result<ScalarField> {
        let grid = self.grid().clone();
        for &axis in axes {
            check_axis(&grid, axis)?;
        }
        Ok(self.apply(|k| {
            let sq: f64 = axes
                .iter()
                .map(|&axis| full_wavenumber(&grid, axis, k[axis]).powi(2))
                .sum();
            Complex64::new(-sq, 0.0)
        }))
    }

    /// `c · ∇` for a constant vector `c`.
    pub fn directional(&self, direction: &[f64]) -> Result<ScalarField> {
        let grid = self.grid().clone();
        if direction.len() != grid.dim() {
            return Err(Error::InvalidArgument(format!(
                "direction has {} components on a {}-dimensional grid",
                direction.len(),
                grid.dim()
            )));
        }
        Ok(self.apply(|k| {
            let s: f64 = direction
                .iter()
                .enumerate()
                .map(|(axis, c)| c * first_wavenumber(&grid, axis, k[axis]))
                .sum();
            Complex64::new(0.0, s)
        }))
    }

    pub fn gradient(&self) -> Vec<ScalarField> {
        (0..self.grid().dim())
            .map(|axis| self.partial(axis, 1).expect("axis in range"))
            .collect()
    }
}

/// Spectral derivative of order 1 or 2 along a 0-based axis.
pub fn partial(field: &ScalarField, axis: usize, order: usize) -> Result<ScalarField> {
    Spectrum::of(field).partial(axis, order)
}

pub fn gradient(field: &ScalarField) -> Vec<ScalarField> {
    Spectrum::of(field).gradient()
}

/// `∂²u/∂x_i∂x_j`; symmetric in `(i, j)` by construction of the multiplier.
pub fn hessian_entry(field: &ScalarField, i: usize, j: usize) -> Result<ScalarField> {
    Spectrum::of(field).hessian_entry(i, j)
}

pub fn laplacian(field: &ScalarField) -> ScalarField {
    Spectrum::of(field).laplacian()
}

/// Integral under the unit-volume measure.
pub fn mean(field: &ScalarField) -> f64 {
    compensated_sum(field.values()) / field.len() as f64
}

/// Neumaier summation, in storage order.
pub(crate) fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for &v in values {
        let t = sum + v;
        if f64::abs(sum) >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

pub fn project_zero_mean(field: &ScalarField) -> ScalarField {
    let m = mean(field);
    field.map(|v| v - m)
}

/// The unique zero-mean `w` with `Δw = field`.
pub fn inverse_laplacian(field: &ScalarField) -> Result<ScalarField> {
    let m = mean(field);
    if m.abs() > ZERO_MEAN_TOL {
        return Err(Error::NonZeroMean {
            mean: m,
            tol: ZERO_MEAN_TOL,
        });
    }
    Ok(inverse_laplacian_unchecked(&Spectrum::of(field)))
}

/// Inverse Laplacian that drops the mean mode without checking it.
pub(crate) fn inverse_laplacian_unchecked(spectrum: &Spectrum) -> ScalarField {
    let grid = spectrum.grid().clone();
    spectrum.apply(|k| {
        let sq: f64 = (0..grid.dim())
            .map(|axis| full_wavenumber(&grid, axis, k[axis]).powi(2))
            .sum();
        if sq == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(-1.0 / sq, 0.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::random::BandLimited;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid3(n: usize) -> TorusGrid {
        TorusGrid::cube(3, n).unwrap()
    }

    #[test]
    fn derivative_of_sine() {
        let grid = grid3(16);
        let u = ScalarField::from_fn(&grid, |x| x[0].sin());
        let du = partial(&u, 0, 1).unwrap();
        let expected = ScalarField::from_fn(&grid, |x| x[0].cos());
        assert!(du.sup_distance(&expected).unwrap() <= 1e-12);
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let grid = grid3(8);
        let u = ScalarField::constant(&grid, 2.5);
        for axis in 0..3 {
            for order in 1..=2 {
                assert!(partial(&u, axis, order).unwrap().sup_norm() <= 1e-15);
            }
        }
        for g in gradient(&u) {
            assert!(g.sup_norm() <= 1e-15);
        }
    }

    #[test]
    fn mixed_partials_commute() {
        let grid = grid3(16);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = BandLimited::random(3, 4, &mut rng).sample(&grid).unwrap();
        let a = partial(&partial(&u, 1, 1).unwrap(), 0, 1).unwrap();
        let b = partial(&partial(&u, 0, 1).unwrap(), 1, 1).unwrap();
        assert!(a.sup_distance(&b).unwrap() <= 1e-12);
        let h01 = hessian_entry(&u, 0, 1).unwrap();
        let h10 = hessian_entry(&u, 1, 0).unwrap();
        assert_eq!(h01, h10);
        assert!(h01.sup_distance(&a).unwrap() <= 1e-12);
    }

    #[test]
    fn hessian_of_cosine_sum() {
        let grid = grid3(16);
        let u = ScalarField::from_fn(&grid, |x| (x[0] + x[1]).cos());
        let h = hessian_entry(&u, 0, 1).unwrap();
        let expected = u.scale(-1.0);
        assert!(h.sup_distance(&expected).unwrap() <= 1e-12);
    }

    #[test]
    fn bad_axis_and_order() {
        let grid = grid3(8);
        let u = ScalarField::zeros(&grid);
        assert!(partial(&u, 3, 1).is_err());
        assert!(partial(&u, 0, 3).is_err());
        assert!(hessian_entry(&u, 0, 5).is_err());
    }

    #[test]
    fn mean_and_projection() {
        let grid = grid3(8);
        assert_eq!(mean(&ScalarField::constant(&grid, 3.0)), 3.0);
        assert_eq!(mean(&ScalarField::constant(&grid, 1.0)), 1.0);
        let u = ScalarField::from_fn(&grid, |x| 1.0 + x[0].sin());
        let p = project_zero_mean(&u);
        let expected = ScalarField::from_fn(&grid, |x| x[0].sin());
        assert!(p.sup_distance(&expected).unwrap() <= 1e-14);
    }

    #[test]
    fn inverse_laplacian_of_sine() {
        let grid = grid3(8);
        let v = ScalarField::from_fn(&grid, |x| x[0].sin());
        let w = inverse_laplacian(&v).unwrap();
        assert!(w.sup_distance(&v.scale(-1.0)).unwrap() <= 1e-14);
        let zero = inverse_laplacian(&ScalarField::zeros(&grid)).unwrap();
        assert_eq!(zero.sup_norm(), 0.0);
    }

    #[test]
    fn inverse_laplacian_rejects_mean() {
        let grid = grid3(8);
        let v = ScalarField::constant(&grid, 1e-6);
        assert!(matches!(
            inverse_laplacian(&v),
            Err(Error::NonZeroMean { .. })
        ));
    }

    #[test]
    fn directional_matches_gradient() {
        let grid = TorusGrid::new(&[8, 12, 10]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = BandLimited::random(3, 2, &mut rng).sample(&grid).unwrap();
        let c = [0.3, -1.0, 2.0];
        let d = Spectrum::of(&u).directional(&c).unwrap();
        let g = gradient(&u);
        let mut expected = ScalarField::zeros(&grid);
        for (axis, component) in g.iter().enumerate() {
            expected.add_assign_scaled(c[axis], component);
        }
        assert!(d.sup_distance(&expected).unwrap() <= 1e-12);
    }
}
