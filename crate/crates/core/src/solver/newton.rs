//! Damped Newton iteration in the zero-mean gauge.
//!
//! The unknowns are a zero-mean `u` and a constant `b` with `Φ(u) = e^{f+b}`.
//! `L` annihilates constants, and with drifts whose coupling `X·Y` is nonzero
//! its range on zero-mean functions misses one direction, so a fixed `f` is
//! generally not attainable. Each step therefore solves
//!
//! `L δ − β e^{f+b} = −r`, `mean(δ) = 0`
//!
//! for `(δ, β)`. The system is nonsingular because `e^{f+b} > 0` pairs
//! positively with the positive kernel of the adjoint of `L`. For attainable
//! data `b` stays at zero up to roundoff.

use crate::equation::{EquationSpec, Evaluation};
use crate::error::{Error, Result};
use crate::linearization::Linearization;
use crate::spectral::{inverse_laplacian_unchecked, mean, ScalarField, Spectrum, ZERO_MEAN_TOL};

use super::krylov::gmres;
use super::options::SolveOptions;

/// Why a Newton solve stopped short of the tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StallReason {
    /// Every damping level violated the branch guard or failed to decrease the residual.
    LineSearch,
    /// The linear solve missed its relative tolerance.
    Krylov,
    IterationCap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NewtonStatus {
    Converged,
    Stalled(StallReason),
}

#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub u: ScalarField,
    /// The constant `b`; `u` solves `Φ(u) = e^{f+b}`.
    pub shift: f64,
    pub iterations: usize,
    pub krylov_iterations: usize,
    /// `sup |residual|` after each iteration, starting with the initial guess.
    pub history: Vec<f64>,
    pub status: NewtonStatus,
}

impl NewtonOutcome {
    pub fn converged(&self) -> bool {
        self.status == NewtonStatus::Converged
    }

    pub fn residual_norm(&self) -> f64 {
        *self
            .history
            .last()
            .expect("history starts with the initial residual")
    }
}

struct State {
    u: ScalarField,
    shift: f64,
    target: ScalarField,
    eval: Evaluation,
    residual: ScalarField,
    norm: f64,
}

impl State {
    fn at(u: ScalarField, shift: f64, exp_f: &ScalarField, spec: &EquationSpec) -> Self {
        let eval = Evaluation::from_spectrum(&Spectrum::of(&u), spec);
        let scale = shift.exp();
        let target = exp_f.map(|e| e * scale);
        let residual = ScalarField::from_raw(
            u.grid(),
            eval.operator()
                .values()
                .iter()
                .zip(target.values())
                .map(|(p, e)| p - e)
                .collect(),
        );
        let norm = residual.sup_norm();
        State {
            u,
            shift,
            target,
            eval,
            residual,
            norm,
        }
    }

    fn on_branch(&self) -> bool {
        self.eval.a.min() > 0.0 && self.eval.b.min() > 0.0
    }
}

/// Newton's method for `Φ(u) = e^{f+b}` from a zero-mean, on-branch `u0` and `b = 0`.
pub fn newton_solve(
    f: &ScalarField,
    spec: &EquationSpec,
    u0: &ScalarField,
    opts: &SolveOptions,
) -> Result<NewtonOutcome> {
    opts.validate()?;
    spec.grid().ensure_same(f.grid())?;
    spec.grid().ensure_same(u0.grid())?;
    let m = mean(u0);
    if m.abs() > ZERO_MEAN_TOL {
        return Err(Error::NonZeroMean {
            mean: m,
            tol: ZERO_MEAN_TOL,
        });
    }
    let exp_f = f.map(f64::exp);
    let state = State::at(u0.clone(), 0.0, &exp_f, spec);
    if !state.on_branch() {
        return Err(Error::Precondition(format!(
            "initial guess is off the elliptic branch: min A = {:e}, min B = {:e}",
            state.eval.a.min(),
            state.eval.b.min()
        )));
    }
    Ok(iterate(state, &exp_f, spec, opts))
}

fn iterate(
    mut state: State,
    exp_f: &ScalarField,
    spec: &EquationSpec,
    opts: &SolveOptions,
) -> NewtonOutcome {
    let grid = spec.grid().clone();
    let mut history = vec![state.norm];
    let mut krylov_iterations = 0;
    let mut iterations = 0;
    let len = grid.len();
    let finish = |state: State, iterations, krylov_iterations, history, status| NewtonOutcome {
        u: state.u,
        shift: state.shift,
        iterations,
        krylov_iterations,
        history,
        status,
    };

    loop {
        if state.norm <= opts.newton_tol {
            return finish(
                state,
                iterations,
                krylov_iterations,
                history,
                NewtonStatus::Converged,
            );
        }
        if iterations == opts.max_newton {
            return finish(
                state,
                iterations,
                krylov_iterations,
                history,
                NewtonStatus::Stalled(StallReason::IterationCap),
            );
        }
        iterations += 1;

        let lin = Linearization::from_evaluation(state.eval, spec);
        let target = state.target.values();
        let target_mean = mean(&state.target);
        // z = (w, β): the first block is `L w − β e^{f+b}`, the last entry `mean(w)`.
        let apply = |z: &[f64]| -> Vec<f64> {
            let field = ScalarField::from_raw(&grid, z[..len].to_vec());
            let beta = z[len];
            let mut out = lin.apply_spectrum(&Spectrum::of(&field)).into_values();
            out.iter_mut().zip(target).for_each(|(v, g)| *v -= beta * g);
            out.push(mean(&field));
            out
        };
        // Exact inverse of the same system with `L` replaced by the Laplacian.
        let precondition = |r: &[f64]| -> Vec<f64> {
            let field = ScalarField::from_raw(&grid, r[..len].to_vec());
            let beta = -mean(&field) / target_mean;
            let balanced = field
                .zip_with(&state.target, |v, g| v + beta * g)
                .expect("same grid");
            let mut out = inverse_laplacian_unchecked(&Spectrum::of(&balanced)).into_values();
            out.iter_mut().for_each(|v| *v += r[len]);
            out.push(beta);
            out
        };
        let mut rhs: Vec<f64> = state.residual.values().iter().map(|v| -v).collect();
        rhs.push(0.0);
        let solve = gmres(
            apply,
            precondition,
            &rhs,
            opts.krylov_rtol,
            opts.krylov_restart,
            opts.krylov_max_iter,
        );
        krylov_iterations += solve.iterations;
        state.eval = lin.into_evaluation();
        if !solve.converged {
            return finish(
                state,
                iterations,
                krylov_iterations,
                history,
                NewtonStatus::Stalled(StallReason::Krylov),
            );
        }
        let mut solution = solve.solution;
        let beta = solution.pop().expect("bordered solution");
        let w = ScalarField::from_raw(&grid, solution);
        let w_mean = mean(&w);
        let delta = w.map(|v| v - w_mean);

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let mut trial = state.u.axpy(alpha, &delta).expect("same grid");
            let drift = mean(&trial);
            trial.values_mut().iter_mut().for_each(|v| *v -= drift);
            let candidate = State::at(trial, state.shift + alpha * beta, exp_f, spec);
            if candidate.on_branch() && candidate.norm < (1.0 - 1e-4 * alpha) * state.norm {
                accepted = Some(candidate);
                break;
            }
            alpha *= opts.damping;
        }
        match accepted {
            Some(next) => {
                state = next;
                history.push(state.norm);
            }
            None => {
                return finish(
                    state,
                    iterations,
                    krylov_iterations,
                    history,
                    NewtonStatus::Stalled(StallReason::LineSearch),
                )
            }
        }
    }
}

/// Newton iteration for a caller that already holds an on-branch start `(u0, b0)`.
pub(crate) fn newton_from(
    f: &ScalarField,
    spec: &EquationSpec,
    u0: ScalarField,
    b0: f64,
    opts: &SolveOptions,
) -> NewtonOutcome {
    let exp_f = f.map(f64::exp);
    iterate(State::at(u0, b0, &exp_f, spec), &exp_f, spec, opts)
}

/// Branch guard `min A > 0`, `min B > 0` at `u`.
pub(crate) fn on_branch(u: &ScalarField, spec: &EquationSpec) -> bool {
    let eval = Evaluation::from_spectrum(&Spectrum::of(u), spec);
    eval.a.min() > 0.0 && eval.b.min() > 0.0
}
