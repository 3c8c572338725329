//! Continuation in the datum with damped Newton–Krylov inner solves.

mod continuation;
mod krylov;
mod newton;
mod options;
mod path;
mod trace;
mod uniqueness;

pub use continuation::{continuity_solve, SolveReport, SolveStatus, TraceEntry};
pub use krylov::{gmres, KrylovOutcome};
pub use newton::{newton_solve, NewtonOutcome, NewtonStatus, StallReason};
pub use options::SolveOptions;
pub use path::ContinuityPath;
pub use trace::{summary_line, trace_csv, write_trace};
pub use uniqueness::{uniqueness_probe, UniquenessReport, WARM_START_NOISE};
