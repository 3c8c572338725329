//! Independent oracles: manufactured data, differential identities,
//! central differences and random trials.

mod det;
mod fd;
mod identities;
mod lemma;
mod manufacture;
pub mod random;

pub use det::{det_check, det_trial, DetTrial, DET_REL_TOL};
pub use fd::{
    fd_linearization_compare, fd_linearization_oracle, FdComparison, FD_DIVISION_GUARD,
    FD_STEP_RANGE,
};
pub use identities::{derivative_conditions, identity_check, IdentityResiduals};
pub use lemma::{am_gm_gap, lemma21_slack, lemma21_sweep, Lemma21Sweep, Lemma21Trial};
pub use manufacture::{manufacture, normalization_check};
