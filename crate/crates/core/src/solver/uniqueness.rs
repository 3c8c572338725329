use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::equation::EquationSpec;
use crate::error::Result;
use crate::spectral::{project_zero_mean, ScalarField};
use crate::verify::random::BandLimited;

use super::continuation::{solve_path, SolveStatus};
use super::options::SolveOptions;

/// Sup-norm amplitude of the warm-start noise.
pub const WARM_START_NOISE: f64 = 0.01;

#[derive(Clone, Debug)]
pub struct UniquenessReport {
    /// Largest pairwise `sup |u_i − u_j|` among the runs; `NaN` if fewer than two converged.
    pub max_distance: f64,
    pub statuses: Vec<SolveStatus>,
    pub solutions: Vec<ScalarField>,
}

impl UniquenessReport {
    /// All runs converged.
    pub fn conclusive(&self) -> bool {
        self.statuses.iter().all(|s| *s == SolveStatus::Converged)
    }
}

/// Runs `n_starts` continuation solves whose warm starts each receive fresh
/// band-limited noise, and compares the endpoints.
pub fn uniqueness_probe(
    f: &ScalarField,
    spec: &EquationSpec,
    opts: &SolveOptions,
    n_starts: usize,
    seed: u64,
) -> Result<UniquenessReport> {
    let grid = spec.grid().clone();
    let bandwidth = (grid.sizes().iter().copied().min().unwrap_or(4) / 4).min(4);
    let runs: Vec<Result<(SolveStatus, ScalarField)>> = (0..n_starts)
        .into_par_iter()
        .map(|start| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(start as u64);
            let mut perturb = |u: &ScalarField| -> ScalarField {
                let noise = BandLimited::random(grid.dim(), bandwidth, &mut rng)
                    .scaled(WARM_START_NOISE)
                    .sample(&grid)
                    .expect("bandwidth fits the grid");
                project_zero_mean(&u.axpy(1.0, &noise).expect("same grid"))
            };
            let report = solve_path(f, spec, opts, Some(&mut perturb))?;
            Ok((report.status, report.u))
        })
        .collect();
    let mut statuses = Vec::with_capacity(n_starts);
    let mut solutions = Vec::with_capacity(n_starts);
    for run in runs {
        let (status, u) = run?;
        statuses.push(status);
        solutions.push(u);
    }
    let converged: Vec<&ScalarField> = solutions
        .iter()
        .zip(&statuses)
        .filter(|(_, s)| **s == SolveStatus::Converged)
        .map(|(u, _)| u)
        .collect();
    let mut max_distance = if converged.len() < 2 { f64::NAN } else { 0.0 };
    for i in 0..converged.len() {
        for j in i + 1..converged.len() {
            max_distance = max_distance.max(converged[i].sup_distance(converged[j])?);
        }
    }
    Ok(UniquenessReport {
        max_distance,
        statuses,
        solutions,
    })
}
