//! Pseudospectral continuation solver and certification checks for
//! Monge–Ampère-type equations on flat tori.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod config;
pub mod equation;
pub mod error;
pub mod expr;
pub mod linearization;
pub mod solver;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
