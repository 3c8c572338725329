//! Pointwise lower bound `A + B ≥ 2e^{f/2}` along manufactured pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equation::{EquationSpec, Evaluation};
use crate::error::Result;
use crate::spectral::ScalarField;

use super::manufacture::manufacture;
use super::random::BandLimited;

/// `min (A + B − 2e^{f/2})` over the grid.
pub fn lemma21_slack(u: &ScalarField, f: &ScalarField, spec: &EquationSpec) -> Result<f64> {
    spec.grid().ensure_same(f.grid())?;
    let eval = Evaluation::at(u, spec)?;
    Ok(eval
        .a
        .values()
        .iter()
        .zip(eval.b.values())
        .zip(f.values())
        .map(|((a, b), f)| a + b - 2.0 * (0.5 * f).exp())
        .fold(f64::INFINITY, f64::min))
}

/// `min ((A + B)² − 4AB)` over the grid.
pub fn am_gm_gap(u: &ScalarField, spec: &EquationSpec) -> Result<f64> {
    let eval = Evaluation::at(u, spec)?;
    Ok(eval
        .a
        .values()
        .iter()
        .zip(eval.b.values())
        .map(|(a, b)| (a + b) * (a + b) - 4.0 * a * b)
        .fold(f64::INFINITY, f64::min))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma21Trial {
    pub amplitude: f64,
    pub slack: f64,
    pub am_gm_gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma21Sweep {
    pub worst_slack: f64,
    pub worst_am_gm_gap: f64,
    /// Draws that had no real datum and were redrawn.
    pub rejected: usize,
    pub trials: Vec<Lemma21Trial>,
}

/// Amplitudes are drawn from `[0.02, 0.3]`; off-shell draws are redrawn.
pub fn lemma21_sweep(spec: &EquationSpec, trials: usize, seed: u64) -> Result<Lemma21Sweep> {
    let grid = spec.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    let mut rejected = 0;
    while out.len() < trials {
        let amplitude = rng.random_range(0.02..0.3);
        let u = BandLimited::for_grid(grid, &mut rng)
            .scaled(amplitude)
            .sample(grid)?;
        let f = match manufacture(&u, spec) {
            Ok(f) => f,
            Err(crate::error::Error::NonPositive { .. }) => {
                rejected += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        out.push(Lemma21Trial {
            amplitude,
            slack: lemma21_slack(&u, &f, spec)?,
            am_gm_gap: am_gm_gap(&u, spec)?,
        });
    }
    Ok(Lemma21Sweep {
        worst_slack: out.iter().map(|t| t.slack).fold(f64::INFINITY, f64::min),
        worst_am_gm_gap: out
            .iter()
            .map(|t| t.am_gm_gap)
            .fold(f64::INFINITY, f64::min),
        rejected,
        trials: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;

    #[test]
    fn equality_at_zero() {
        let grid = TorusGrid::cube(3, 8).unwrap();
        let spec = EquationSpec::standard(&grid).unwrap();
        let zero = ScalarField::zeros(&grid);
        assert_eq!(lemma21_slack(&zero, &zero, &spec).unwrap(), 0.0);
    }

    #[test]
    fn sweep_stays_nonnegative() {
        let grid = TorusGrid::cube(3, 16).unwrap();
        let spec = EquationSpec::kodaira_thurston(&grid).unwrap();
        let sweep = lemma21_sweep(&spec, 10, 3).unwrap();
        assert_eq!(sweep.trials.len(), 10);
        assert!(sweep.worst_slack >= -1e-9);
        assert!(sweep.worst_am_gm_gap >= -1e-12);
    }

    #[test]
    fn shifted_datum_violates_the_bound() {
        let grid = TorusGrid::cube(3, 16).unwrap();
        let spec = EquationSpec::standard(&grid).unwrap();
        let u = ScalarField::from_fn(&grid, |x| 0.05 * (x[0] - x[2]).cos());
        let f = manufacture(&u, &spec).unwrap().map(|v| v + 0.1);
        assert!(lemma21_slack(&u, &f, &spec).unwrap() < 0.0);
    }
}
