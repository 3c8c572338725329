//! Multi-dimensional complex FFT on a [`TorusGrid`], one axis at a time.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::field::ScalarField;
use super::grid::TorusGrid;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Inverse,
}

fn transform_axis(grid: &TorusGrid, data: &mut [Complex64], axis: usize, direction: Direction) {
    let size = grid.sizes()[axis];
    let inner = grid.strides()[axis];
    let plan = grid.plan(axis);
    let fft = match direction {
        Direction::Forward => &plan.forward,
        Direction::Inverse => &plan.inverse,
    };

    if inner == 1 {
        // Contiguous lines: batch them across threads.
        let lines_per_task = (4096 / size).max(1);
        data.par_chunks_mut(size * lines_per_task)
            .for_each(|chunk| {
                let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
                fft.process_with_scratch(chunk, &mut scratch);
            });
        return;
    }

    // Strided lines: transpose each (size x inner) block so the axis becomes
    // contiguous, transform, and transpose back.
    let block = size * inner;
    let process_block = |chunk: &mut [Complex64]| {
        let mut buffer = vec![Complex64::default(); block];
        for m in 0..size {
            for j in 0..inner {
                buffer[j * size + m] = chunk[m * inner + j];
            }
        }
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(&mut buffer, &mut scratch);
        for m in 0..size {
            for j in 0..inner {
                chunk[m * inner + j] = buffer[j * size + m];
            }
        }
    };

    if data.len() > block {
        data.par_chunks_mut(block).for_each(process_block);
    } else {
        // Single block (first axis): split the inner columns across tasks instead.
        let columns = inner;
        let tasks = rayon::current_num_threads().clamp(1, columns);
        let per_task = columns.div_ceil(tasks);
        let ranges: Vec<(usize, usize)> = (0..columns)
            .step_by(per_task)
            .map(|start| (start, (start + per_task).min(columns)))
            .collect();
        let results: Vec<Vec<Complex64>> = ranges
            .par_iter()
            .map(|&(lo, hi)| {
                let width = hi - lo;
                let mut buffer = vec![Complex64::default(); width * size];
                for m in 0..size {
                    for j in lo..hi {
                        buffer[(j - lo) * size + m] = data[m * inner + j];
                    }
                }
                let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
                fft.process_with_scratch(&mut buffer, &mut scratch);
                buffer
            })
            .collect();
        for (&(lo, hi), buffer) in ranges.iter().zip(&results) {
            for m in 0..size {
                for j in lo..hi {
                    data[m * inner + j] = buffer[(j - lo) * size + m];
                }
            }
        }
    }
}

fn transform(grid: &TorusGrid, data: &mut [Complex64], direction: Direction) {
    for axis in 0..grid.dim() {
        transform_axis(grid, data, axis, direction);
    }
    if direction == Direction::Inverse {
        let scale = 1.0 / grid.len() as f64;
        data.par_iter_mut().for_each(|c| *c *= scale);
    }
}

/// Discrete Fourier coefficients of a real field, unnormalized forward convention.
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: TorusGrid,
    coefficients: Vec<Complex64>,
}

impl Spectrum {
    pub fn of(field: &ScalarField) -> Self {
        let mut coefficients: Vec<Complex64> = field
            .values()
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        transform(field.grid(), &mut coefficients, Direction::Forward);
        Spectrum {
            grid: field.grid().clone(),
            coefficients,
        }
    }

    /// Spectrum from coefficients in storage order (forward, unnormalized).
    pub fn from_coefficients(grid: &TorusGrid, coefficients: Vec<Complex64>) -> Self {
        assert_eq!(coefficients.len(), grid.len());
        Spectrum {
            grid: grid.clone(),
            coefficients,
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Real part of the inverse transform of `multiplier(k) * coefficient(k)`.
    ///
    /// The multiplier receives the per-axis wavenumber indices of each mode.
    pub fn apply<M>(&self, multiplier: M) -> ScalarField
    where
        M: Fn(&[usize]) -> Complex64,
    {
        let mut data = self.coefficients.clone();
        let n = self.grid.dim();
        let sizes = self.grid.sizes();
        let mut multi = vec![0usize; n];
        for c in data.iter_mut() {
            *c *= multiplier(&multi);
            for axis in (0..n).rev() {
                multi[axis] += 1;
                if multi[axis] < sizes[axis] {
                    break;
                }
                multi[axis] = 0;
            }
        }
        transform(&self.grid, &mut data, Direction::Inverse);
        ScalarField::from_raw(&self.grid, data.into_iter().map(|c| c.re).collect())
    }

    /// Inverse transform without a multiplier.
    pub fn to_field(&self) -> ScalarField {
        let mut data = self.coefficients.clone();
        transform(&self.grid, &mut data, Direction::Inverse);
        ScalarField::from_raw(&self.grid, data.into_iter().map(|c| c.re).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_inverse_roundtrip() {
        let grid = TorusGrid::new(&[6, 4, 8]).unwrap();
        let field = ScalarField::from_fn(&grid, |x| (x[0] + 2.0 * x[1]).sin() + x[2].cos().exp());
        let back = Spectrum::of(&field).to_field();
        assert!(back.sup_distance(&field).unwrap() < 1e-14);
    }

    #[test]
    fn single_mode_lands_on_its_wavenumber() {
        let grid = TorusGrid::new(&[8, 8]).unwrap();
        let field = ScalarField::from_fn(&grid, |x| (3.0 * x[1]).cos());
        let spectrum = Spectrum::of(&field);
        let energy: Vec<usize> = spectrum
            .coefficients()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 1e-9)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(energy, vec![grid.ravel(&[0, 3]), grid.ravel(&[0, 5])]);
    }
}
