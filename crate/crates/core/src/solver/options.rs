use crate::error::{Error, Result};

/// Tolerances and step controls of the continuation solver.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    /// Target `sup |residual|` for every Newton solve.
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Relative tolerance of the preconditioned linear solves.
    pub krylov_rtol: f64,
    pub krylov_restart: usize,
    pub krylov_max_iter: usize,
    pub initial_dt: f64,
    pub min_dt: f64,
    /// Backtracking factor of the line search.
    pub damping: f64,
    pub max_halvings: usize,
    /// Step-size factor after a failed step.
    pub shrink: f64,
    /// Step-size factor after an easy step.
    pub growth: f64,
    /// A step is easy when Newton needs at most this many iterations.
    pub easy_iterations: usize,
    /// Shift the datum so that `∫ e^f dV = 1` before solving.
    pub normalize: bool,
    /// Solve even when the drift hypotheses fail.
    pub allow_unverified: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            newton_tol: 1e-10,
            max_newton: 30,
            krylov_rtol: 1e-8,
            krylov_restart: 50,
            krylov_max_iter: 500,
            initial_dt: 0.1,
            min_dt: 1e-4,
            damping: 0.5,
            max_halvings: 20,
            shrink: 0.5,
            growth: 1.5,
            easy_iterations: 4,
            normalize: true,
            allow_unverified: false,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("newton_tol", self.newton_tol),
            ("krylov_rtol", self.krylov_rtol),
            ("initial_dt", self.initial_dt),
            ("min_dt", self.min_dt),
        ];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if !(self.min_dt < self.initial_dt && self.initial_dt <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "need min_dt < initial_dt <= 1, got {} and {}",
                self.min_dt, self.initial_dt
            )));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) || !(self.shrink > 0.0 && self.shrink < 1.0)
        {
            return Err(Error::InvalidArgument(
                "damping and shrink factors must lie in (0, 1)".into(),
            ));
        }
        if !(self.growth >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "growth must be >= 1, got {}",
                self.growth
            )));
        }
        if self.max_newton == 0 || self.krylov_restart == 0 || self.krylov_max_iter == 0 {
            return Err(Error::InvalidArgument(
                "iteration caps must be positive".into(),
            ));
        }
        Ok(())
    }
}
