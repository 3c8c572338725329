//! Periodic grids, scalar fields and Fourier pseudospectral differentiation.

mod diff;
mod fft;
mod field;
mod grid;
pub mod io;

pub(crate) use diff::inverse_laplacian_unchecked;
pub use diff::{
    gradient, hessian_entry, inverse_laplacian, laplacian, mean, partial, project_zero_mean,
    ZERO_MEAN_TOL,
};
pub use fft::Spectrum;
pub use field::ScalarField;
pub use grid::{TorusGrid, MAX_POINTS};
