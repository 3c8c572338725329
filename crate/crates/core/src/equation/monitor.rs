use crate::error::Result;
use crate::spectral::{ScalarField, Spectrum};

use super::residual::Evaluation;
use super::spec::EquationSpec;

/// Discretization slack allowed on `A + B − 2e^{f/2} ≥ 0`.
pub const LEMMA21_SLACK_TOL: f64 = 1e-9;

/// Grid minima of the quantities that must stay positive along the solution branch.
#[derive(Clone, Debug, PartialEq)]
pub struct MonitorReport {
    pub min_a: f64,
    pub min_b: f64,
    /// `min (A + B − 2e^{f/2})`.
    pub min_lemma21_slack: f64,
    /// Smallest eigenvalue of the symbol over the grid.
    pub min_lambda_minus: f64,
    /// `‖Δu‖_∞ / (1 + ‖u‖_∞ + ‖∇u‖_∞)`; informational only.
    pub laplacian_ratio: f64,
    pub flags: Vec<String>,
}

impl MonitorReport {
    /// No flag raised.
    pub fn passes(&self) -> bool {
        self.flags.is_empty()
    }

    /// `min A > 0` and `min B > 0`.
    pub fn on_branch(&self) -> bool {
        self.min_a > 0.0 && self.min_b > 0.0
    }
}

pub fn monitor(u: &ScalarField, f: &ScalarField, spec: &EquationSpec) -> Result<MonitorReport> {
    spec.ensure_grid(u)?;
    spec.ensure_grid(f)?;
    let spectrum = Spectrum::of(u);
    let eval = Evaluation::from_spectrum(&spectrum, spec);
    Ok(monitor_evaluation(u, &spectrum, &eval, f, spec))
}

pub(crate) fn monitor_evaluation(
    u: &ScalarField,
    spectrum: &Spectrum,
    eval: &Evaluation,
    f: &ScalarField,
    spec: &EquationSpec,
) -> MonitorReport {
    let min_a = eval.a.min();
    let min_b = eval.b.min();
    let min_lemma21_slack = eval
        .a
        .values()
        .iter()
        .zip(eval.b.values())
        .zip(f.values())
        .map(|((a, b), f)| a + b - 2.0 * (0.5 * f).exp())
        .fold(f64::INFINITY, f64::min);
    let min_lambda_minus = (0..u.len())
        .map(|p| eval.symbol_at(spec, p).min_eigenvalue())
        .fold(f64::INFINITY, f64::min);

    let lap = spectrum.laplacian().sup_norm();
    let grad = spectrum.gradient();
    let grad_sup = (0..u.len())
        .map(|p| {
            grad.iter()
                .map(|g| g.values()[p].powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    let laplacian_ratio = lap / (1.0 + u.sup_norm() + grad_sup);

    let mut flags = Vec::new();
    if !(min_a > 0.0) {
        flags.push(format!("min A = {min_a:e} is not positive"));
    }
    if !(min_b > 0.0) {
        flags.push(format!("min B = {min_b:e} is not positive"));
    }
    if !(min_lemma21_slack >= -LEMMA21_SLACK_TOL) {
        flags.push(format!("A + B − 2e^(f/2) reaches {min_lemma21_slack:e}"));
    }
    if !(min_lambda_minus > 0.0) {
        flags.push(format!(
            "symbol eigenvalue {min_lambda_minus:e} is not positive"
        ));
    }
    MonitorReport {
        min_a,
        min_b,
        min_lemma21_slack,
        min_lambda_minus,
        laplacian_ratio,
        flags,
    }
}
