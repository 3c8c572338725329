use nalgebra::{DMatrix, SymmetricEigen};

use super::spec::EquationSpec;

pub const DEFAULT_HYPOTHESIS_TOL: f64 = 1e-10;

/// Outcome of the three structural hypotheses on the drift fields.
///
/// With the index split `I`/`J` they read:
/// 1. `Y` is constant and `X` does not depend on `x_i`, `i ∈ I`;
/// 2. the symmetric part of `∂X/∂x` is negative semidefinite;
/// 3. `Σ_{i∈J} Y^i ∂X^j/∂x_i = 0` for every `j ∈ J`.
#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisReport {
    pub h1_pass: bool,
    pub h2_pass: bool,
    pub h3_pass: bool,
    /// Largest sampled `|Y(x) − Y(0)|` or `|∂X/∂x_i|`, `i ∈ I`.
    pub h1_worst_variation: f64,
    /// Largest eigenvalue of `½(∂X/∂x + (∂X/∂x)ᵀ)` over the samples.
    pub h2_worst_eigenvalue: f64,
    pub h3_worst_residual: f64,
    pub tolerance: f64,
    pub messages: Vec<String>,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.h1_pass && self.h2_pass && self.h3_pass
    }
}

/// Grid points followed by cell midpoints.
fn sample_points(spec: &EquationSpec) -> Vec<Vec<f64>> {
    let grid = spec.grid();
    let mut points = Vec::with_capacity(2 * grid.len());
    grid.for_each_point(|_, x| points.push(x.to_vec()));
    let half: Vec<f64> = (0..grid.dim()).map(|a| 0.5 * grid.spacing(a)).collect();
    grid.for_each_point(|_, x| points.push(x.iter().zip(&half).map(|(x, h)| x + h).collect()));
    points
}

pub fn check_hypotheses(spec: &EquationSpec, tol: f64) -> HypothesisReport {
    let n = spec.dim();
    let x = spec.x();
    let y = spec.y();
    let points = if x.is_constant() && y.is_constant() {
        vec![vec![0.0; n]]
    } else {
        sample_points(spec)
    };

    let y0 = y.eval(&vec![0.0; n]);
    let mut y_variation: f64 = 0.0;
    let mut x_in_i: f64 = 0.0;
    let mut worst_eig = f64::NEG_INFINITY;
    let mut h3: f64 = 0.0;

    for p in &points {
        if !y.is_constant() {
            for (a, c) in y.components().iter().enumerate() {
                y_variation = y_variation.max((c.eval(p) - y0[a]).abs());
            }
        }
        let jac = x.eval_jacobian(p);
        for row in &jac {
            for &i in spec.i_set() {
                x_in_i = x_in_i.max(row[i].abs());
            }
        }
        let sym = DMatrix::from_fn(n, n, |r, c| 0.5 * (jac[r][c] + jac[c][r]));
        let top = if sym.iter().all(|v| *v == 0.0) {
            0.0
        } else {
            SymmetricEigen::new(sym)
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max)
        };
        worst_eig = worst_eig.max(top);
        let yp = if y.is_constant() {
            y0.clone()
        } else {
            y.eval(p)
        };
        for &j in spec.j_set() {
            let s: f64 = spec.j_set().iter().map(|&i| yp[i] * jac[j][i]).sum();
            h3 = h3.max(s.abs());
        }
    }

    let h1_worst = y_variation.max(x_in_i);
    let mut messages = Vec::new();
    if y_variation > tol {
        messages.push(format!("H1: Y varies by {y_variation:e} over the samples"));
    }
    if x_in_i > tol {
        messages.push(format!(
            "H1: X depends on the I-coordinates (|∂X/∂x_i| up to {x_in_i:e})"
        ));
    }
    if worst_eig > tol {
        messages.push(format!(
            "H2: symmetric part of ∂X/∂x has eigenvalue {worst_eig:e} > 0"
        ));
    }
    if h3 > tol {
        messages.push(format!("H3: Σ Y^i ∂X^j/∂x_i reaches {h3:e}"));
    }
    HypothesisReport {
        h1_pass: h1_worst <= tol,
        h2_pass: worst_eig <= tol,
        h3_pass: h3 <= tol,
        h1_worst_variation: h1_worst,
        h2_worst_eigenvalue: worst_eig,
        h3_worst_residual: h3,
        tolerance: tol,
        messages,
    }
}
