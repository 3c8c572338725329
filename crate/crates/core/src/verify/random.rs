//! Seeded random band-limited fields, points and block symbols.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linearization::SymbolMatrix;
use crate::spectral::{ScalarField, Spectrum, TorusGrid};

#[derive(Clone, Debug, PartialEq)]
struct Mode {
    wavenumber: Vec<i64>,
    cos: f64,
    sin: f64,
}

/// A real trigonometric polynomial `Σ a_k cos(k·x) + b_k sin(k·x)` over
/// `0 < |k|_∞ ≤ K`, with coefficients drawn as `N(0,1) · |k|⁻⁴`.
///
/// Each `±k` pair appears once, so the field has zero mean exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct BandLimited {
    dim: usize,
    bandwidth: usize,
    modes: Vec<Mode>,
}

impl BandLimited {
    pub fn random<R: Rng + ?Sized>(dim: usize, bandwidth: usize, rng: &mut R) -> Self {
        let k = bandwidth as i64;
        let mut modes = Vec::new();
        let mut wavenumber = vec![-k; dim];
        if bandwidth > 0 {
            loop {
                // Keep the half-space whose first non-zero entry is positive.
                if wavenumber.iter().find(|&&w| w != 0).is_some_and(|&w| w > 0) {
                    let norm2: f64 = wavenumber.iter().map(|&w| (w * w) as f64).sum();
                    let decay = norm2.powi(-2);
                    let cos: f64 = rng.sample(StandardNormal);
                    let sin: f64 = rng.sample(StandardNormal);
                    modes.push(Mode {
                        wavenumber: wavenumber.clone(),
                        cos: cos * decay,
                        sin: sin * decay,
                    });
                }
                let mut axis = dim;
                while axis > 0 {
                    axis -= 1;
                    wavenumber[axis] += 1;
                    if wavenumber[axis] <= k {
                        break;
                    }
                    wavenumber[axis] = -k;
                }
                if wavenumber.iter().all(|&w| w == -k) {
                    break;
                }
            }
        }
        BandLimited {
            dim,
            bandwidth,
            modes,
        }
    }

    /// Bandwidth `min N_i / 4`, the usual choice for a grid.
    pub fn for_grid<R: Rng + ?Sized>(grid: &TorusGrid, rng: &mut R) -> Self {
        let k = grid.sizes().iter().copied().min().unwrap_or(4) / 4;
        Self::random(grid.dim(), k, rng)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// `Σ sqrt(a_k² + b_k²)`, an upper bound for the sup norm.
    pub fn amplitude(&self) -> f64 {
        self.modes.iter().map(|m| m.cos.hypot(m.sin)).sum()
    }

    /// Rescaled so that [`amplitude`](Self::amplitude) equals `amplitude`.
    pub fn scaled(mut self, amplitude: f64) -> Self {
        let current = self.amplitude();
        if current > 0.0 {
            let factor = amplitude / current;
            for m in &mut self.modes {
                m.cos *= factor;
                m.sin *= factor;
            }
        }
        self
    }

    /// Point evaluation by direct summation.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.modes
            .iter()
            .map(|m| {
                let phase: f64 = m
                    .wavenumber
                    .iter()
                    .zip(x)
                    .map(|(&k, &x)| k as f64 * x)
                    .sum();
                m.cos * phase.cos() + m.sin * phase.sin()
            })
            .sum()
    }

    /// Samples the polynomial on `grid` through one inverse FFT.
    ///
    /// Every wavenumber must sit strictly below the Nyquist index of its axis.
    pub fn sample(&self, grid: &TorusGrid) -> Result<ScalarField> {
        if grid.dim() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "field of dimension {} sampled on a {}-dimensional grid",
                self.dim,
                grid.dim()
            )));
        }
        if let Some(&size) = grid.sizes().iter().find(|&&s| 2 * self.bandwidth >= s) {
            return Err(Error::InvalidArgument(format!(
                "bandwidth {} is not resolved by {size} points",
                self.bandwidth
            )));
        }
        let total = grid.len() as f64;
        let mut coefficients = vec![Complex64::new(0.0, 0.0); grid.len()];
        let sizes = grid.sizes();
        let mut plus = vec![0usize; self.dim];
        let mut minus = vec![0usize; self.dim];
        for m in &self.modes {
            for axis in 0..self.dim {
                let n = sizes[axis] as i64;
                plus[axis] = m.wavenumber[axis].rem_euclid(n) as usize;
                minus[axis] = (-m.wavenumber[axis]).rem_euclid(n) as usize;
            }
            let c = Complex64::new(0.5 * m.cos, -0.5 * m.sin) * total;
            coefficients[grid.ravel(&plus)] += c;
            coefficients[grid.ravel(&minus)] += c.conj();
        }
        Ok(Spectrum::from_coefficients(grid, coefficients).to_field())
    }
}

/// `2π · U[0, 1)^n`, a uniformly random point of the torus.
pub fn random_point<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| 2.0 * PI * rng.random::<f64>()).collect()
}

/// Smallest `AB − Σ C²` accepted by [`random_symbol`].
pub const ON_BRANCH_MARGIN: f64 = 0.1;

/// Block symbol with `A, B ~ U[0.5, 3]`, `C_st ~ U[−1, 1]`, redrawn until
/// `AB − Σ C² > ON_BRANCH_MARGIN`.
pub fn random_symbol<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<SymbolMatrix> {
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k < n, got n = {n}, k = {k}"
        )));
    }
    let m = n - k;
    loop {
        let a = rng.random_range(0.5..3.0);
        let b = rng.random_range(0.5..3.0);
        let coupling: Vec<f64> = (0..m * k).map(|_| rng.random_range(-1.0..1.0)).collect();
        let sum_sq: f64 = coupling.iter().map(|c| c * c).sum();
        if a * b - sum_sq > ON_BRANCH_MARGIN {
            return SymbolMatrix::new(n, k, a, b, coupling);
        }
    }
}
