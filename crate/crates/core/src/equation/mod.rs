//! Equation data, the residual operator, hypothesis checks and branch monitors.

mod hypotheses;
mod monitor;
mod residual;
mod spec;

pub use hypotheses::{check_hypotheses, HypothesisReport, DEFAULT_HYPOTHESIS_TOL};
pub use monitor::{monitor, MonitorReport, LEMMA21_SLACK_TOL};
pub use residual::{compute_ab, normalize_f, residual, Evaluation, MAX_DATUM};
pub use spec::{EquationSpec, Preset, SampledDrift, VectorFieldSpec};
