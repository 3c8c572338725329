//! Principal symbol, closed-form eigenvalues, ellipticity certificates,
//! the linearized operator and block-minor determinants.

mod certificate;
mod linearized;
mod minors;
mod summed_form;
mod symbol;

pub use certificate::{
    certify_ellipticity, lambda_minus, CertificateSample, EllipticityCertificate,
    DIRECTIONS_PER_POINT, SAMPLED_POINTS,
};
pub use linearized::{apply_linearized, Linearization};
pub use minors::{minor_determinant_direct, minor_formula_conjecture};
pub use summed_form::summed_form_inequality;
pub use symbol::{charpoly_eigs, symbol_matrix, CharpolyEigs, SymbolMatrix};
