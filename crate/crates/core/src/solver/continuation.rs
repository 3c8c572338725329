use std::time::Instant;

use crate::equation::{
    check_hypotheses, monitor, normalize_f, residual, EquationSpec, HypothesisReport,
    MonitorReport, DEFAULT_HYPOTHESIS_TOL,
};
use crate::error::{Error, Result};
use crate::spectral::{mean, ScalarField};

use super::newton::{newton_from, on_branch, NewtonStatus};
use super::options::SolveOptions;
use super::path::ContinuityPath;

/// Hard cap on attempted continuation steps.
const MAX_STEPS: usize = 100_000;

/// One attempted continuation step.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry {
    pub t: f64,
    pub dt: f64,
    pub accepted: bool,
    pub newton_iterations: usize,
    pub krylov_iterations: usize,
    /// `sup |residual|` at the end of the Newton solve.
    pub residual: f64,
    /// Monitor values at accepted steps, `NaN` otherwise.
    pub min_a: f64,
    pub min_b: f64,
    pub lemma21_slack: f64,
    pub min_lambda_minus: f64,
    /// Constant `b` with `Φ(u) = e^{f_t + b}`.
    pub shift: f64,
    pub wall_seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SolveStatus {
    Converged,
    /// Step size fell below `min_dt` at the last accepted `t`.
    Stalled {
        t: f64,
    },
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub u: ScalarField,
    /// The datum actually solved for: the optionally normalized input plus `shift`.
    pub f: ScalarField,
    /// Constant added to the input datum at the returned `u`. Zero up to
    /// roundoff when every `f_t` on the path is attainable.
    pub shift: f64,
    pub status: SolveStatus,
    pub trace: Vec<TraceEntry>,
    pub schedule: Vec<f64>,
    /// `sup |residual(u, f)|` at the returned `u`.
    pub residual_norm: f64,
    pub monitor: MonitorReport,
    pub hypotheses: HypothesisReport,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn newton_iterations(&self) -> usize {
        self.trace.iter().map(|e| e.newton_iterations).sum()
    }

    pub fn krylov_iterations(&self) -> usize {
        self.trace.iter().map(|e| e.krylov_iterations).sum()
    }
}

/// Continuation from `(t, u) = (0, 0)` to the datum `f`.
pub fn continuity_solve(
    f: &ScalarField,
    spec: &EquationSpec,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    solve_path(f, spec, opts, None)
}

/// Perturbation applied to the warm start of each step.
pub(crate) type WarmStartNoise<'a> = &'a mut dyn FnMut(&ScalarField) -> ScalarField;

pub(crate) fn solve_path(
    f: &ScalarField,
    spec: &EquationSpec,
    opts: &SolveOptions,
    mut noise: Option<WarmStartNoise<'_>>,
) -> Result<SolveReport> {
    opts.validate()?;
    spec.grid().ensure_same(f.grid())?;
    let hypotheses = check_hypotheses(spec, DEFAULT_HYPOTHESIS_TOL);
    if !hypotheses.all_pass() && !opts.allow_unverified {
        return Err(Error::HypothesesNotSatisfied(
            hypotheses.messages.join("; "),
        ));
    }
    let f_end = if opts.normalize {
        normalize_f(f)?
    } else {
        f.clone()
    };
    let mut path = ContinuityPath::new(f_end.clone());
    let grid = spec.grid();
    let mut u = ScalarField::zeros(grid);
    let mut shift = 0.0;
    let mut trace = Vec::new();
    let clock = Instant::now();

    let record = |u: &ScalarField, f_t: &ScalarField, entry: &mut TraceEntry| -> Result<()> {
        let m = monitor(u, f_t, spec)?;
        entry.min_a = m.min_a;
        entry.min_b = m.min_b;
        entry.lemma21_slack = m.min_lemma21_slack;
        entry.min_lambda_minus = m.min_lambda_minus;
        Ok(())
    };

    let initial = residual(&u, &f_end, spec)?.sup_norm();
    let mut status = SolveStatus::Stalled { t: 0.0 };
    if initial <= opts.newton_tol {
        let mut entry = TraceEntry {
            t: 1.0,
            dt: 1.0,
            accepted: true,
            newton_iterations: 0,
            krylov_iterations: 0,
            residual: initial,
            min_a: f64::NAN,
            min_b: f64::NAN,
            lemma21_slack: f64::NAN,
            min_lambda_minus: f64::NAN,
            shift: 0.0,
            wall_seconds: clock.elapsed().as_secs_f64(),
        };
        record(&u, &f_end, &mut entry)?;
        trace.push(entry);
        path.accept(1.0);
        status = SolveStatus::Converged;
    } else {
        let mut t = 0.0;
        let mut dt = opts.initial_dt;
        for _ in 0..MAX_STEPS {
            let t_next = if t + dt >= 1.0 - 1e-12 { 1.0 } else { t + dt };
            let f_t = path.f_at(t_next);
            let start = match noise.as_mut() {
                Some(perturb) => {
                    let candidate = perturb(&u);
                    if on_branch(&candidate, spec) {
                        candidate
                    } else {
                        u.clone()
                    }
                }
                None => u.clone(),
            };
            let outcome = newton_from(&f_t, spec, start, shift, opts);
            let mut entry = TraceEntry {
                t: t_next,
                dt: t_next - t,
                accepted: outcome.converged(),
                newton_iterations: outcome.iterations,
                krylov_iterations: outcome.krylov_iterations,
                residual: outcome.residual_norm(),
                min_a: f64::NAN,
                min_b: f64::NAN,
                lemma21_slack: f64::NAN,
                min_lambda_minus: f64::NAN,
                shift: outcome.shift,
                wall_seconds: 0.0,
            };
            if outcome.status == NewtonStatus::Converged {
                u = outcome.u;
                shift = outcome.shift;
                t = t_next;
                path.accept(t);
                record(&u, &f_t.map(|v| v + shift), &mut entry)?;
                if outcome.iterations <= opts.easy_iterations {
                    dt *= opts.growth;
                }
            } else {
                dt *= opts.shrink;
            }
            entry.wall_seconds = clock.elapsed().as_secs_f64();
            trace.push(entry);
            if t >= 1.0 {
                status = SolveStatus::Converged;
                break;
            }
            if dt < opts.min_dt {
                status = SolveStatus::Stalled { t };
                break;
            }
        }
        if t < 1.0 {
            status = SolveStatus::Stalled { t };
        }
    }

    let f_solved = f_end.map(|v| v + shift);
    let residual_norm = residual(&u, &f_solved, spec)?.sup_norm();
    let final_monitor = monitor(&u, &f_solved, spec)?;
    debug_assert!(mean(&u).abs() <= 1e-12);
    Ok(SolveReport {
        u,
        f: f_solved,
        shift,
        status,
        trace,
        schedule: path.schedule().to_vec(),
        residual_norm,
        monitor: final_monitor,
        hypotheses,
    })
}
