use crate::equation::{EquationSpec, Evaluation};
use crate::error::{Error, Result};
use crate::spectral::ScalarField;

/// Grid minimum of `A Σ_J η_j + (n−k) B Σ_I η_i − 2 Σ_{I×J} |u_ij| sqrt(η_i η_j)`.
///
/// `eta` holds one non-negative diagonal weight per axis. Diagnostic only:
/// for `k ≥ 2` the sum carries the factor `n − k` and is not known to control
/// the estimate it would be needed for.
pub fn summed_form_inequality(u: &ScalarField, spec: &EquationSpec, eta: &[f64]) -> Result<f64> {
    let n = spec.dim();
    if eta.len() != n {
        return Err(Error::InvalidArgument(format!(
            "expected {n} weights, got {}",
            eta.len()
        )));
    }
    if let Some(bad) = eta.iter().find(|&&w| !(w >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "weights must be >= 0, got {bad}"
        )));
    }
    let eval = Evaluation::at(u, spec)?;
    let m = (n - spec.k()) as f64;
    let sum_j: f64 = spec.j_set().iter().map(|&j| eta[j]).sum();
    let sum_i: f64 = spec.i_set().iter().map(|&i| eta[i]).sum();
    let mut weights = Vec::with_capacity(eval.cross.len());
    for &j in spec.j_set() {
        for &i in spec.i_set() {
            weights.push((eta[i] * eta[j]).sqrt());
        }
    }
    let mut worst = f64::INFINITY;
    for p in 0..spec.grid().len() {
        let mut value = eval.a.values()[p] * sum_j + m * eval.b.values()[p] * sum_i;
        for (c, w) in eval.cross.iter().zip(&weights) {
            value -= 2.0 * c.values()[p].abs() * w;
        }
        worst = worst.min(value);
    }
    Ok(worst)
}
