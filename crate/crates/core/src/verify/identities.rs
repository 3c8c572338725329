//! Transport identities for `g = A + B` under the drift hypotheses.
//!
//! With `F = X·∇`, `G = Y·∇` and `F_k(∇v) = ∂_k X^i v_i`:
//!
//! ```text
//! ΔF(∇u) + (F+G)(∇F(∇u)) − Σ_{j∈J} (2 F_j(∇u_j) + F_jj(∇u)) = F(∇g)
//! ΔG(∇u) + (F+G)(∇G(∇u))                                   = G(∇g)
//! ```
//!
//! The left sides are built from derivatives of `u` and of the products
//! `X·∇u`, `Y·∇u`; the right sides differentiate `g` itself.

use crate::equation::{check_hypotheses, EquationSpec, Evaluation, DEFAULT_HYPOTHESIS_TOL};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::spectral::{ScalarField, Spectrum};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityResiduals {
    /// Sup-norm gap of the `X` transport identity.
    pub x_transport: f64,
    /// Sup-norm gap of the `Y` transport identity.
    pub y_transport: f64,
    /// Largest sampled `|∂_k Y|`, `|∂_i X|` or `|∂_k ∂_i X|` with `i ∈ I`.
    pub derivative_conditions: f64,
}

fn sample(expr: &Expr, grid: &crate::spectral::TorusGrid) -> Option<ScalarField> {
    if expr.is_zero() {
        None
    } else {
        Some(ScalarField::from_fn(grid, |x| expr.eval(x)))
    }
}

/// `Σ_a W^a ∂_a w` with `W` given by expressions.
fn contract(components: &[&Expr], gradient: &[ScalarField]) -> ScalarField {
    let grid = gradient[0].grid();
    let mut out = ScalarField::zeros(grid);
    for (c, g) in components.iter().zip(gradient) {
        if let Expr::Const(v) = c {
            out.add_assign_scaled(*v, g);
        } else if let Some(w) = sample(c, grid) {
            for ((o, w), g) in out.values_mut().iter_mut().zip(w.values()).zip(g.values()) {
                *o += w * g;
            }
        }
    }
    out
}

pub fn identity_check(u: &ScalarField, spec: &EquationSpec) -> Result<IdentityResiduals> {
    spec.grid().ensure_same(u.grid())?;
    let report = check_hypotheses(spec, DEFAULT_HYPOTHESIS_TOL);
    if !report.all_pass() {
        return Err(Error::HypothesesNotSatisfied(report.messages.join("; ")));
    }
    let grid = spec.grid();
    let n = spec.dim();
    let x: Vec<&Expr> = spec.x().components().iter().collect();
    let y: Vec<&Expr> = spec.y().components().iter().collect();
    let x_plus_y: Vec<Expr> = x
        .iter()
        .zip(&y)
        .map(|(a, b)| match (a, b) {
            (Expr::Const(p), Expr::Const(q)) => Expr::Const(p + q),
            _ => Expr::Add(Box::new((*a).clone()), Box::new((*b).clone())),
        })
        .collect();
    let x_plus_y: Vec<&Expr> = x_plus_y.iter().collect();

    let spectrum = Spectrum::of(u);
    let grad_u = spectrum.gradient();

    // Left sides.
    let transport = |w: &ScalarField| -> ScalarField {
        let s = Spectrum::of(w);
        let mut out = s.laplacian();
        out.add_assign_scaled(1.0, &contract(&x_plus_y, &s.gradient()));
        out
    };
    let fu = contract(&x, &grad_u);
    let gu = contract(&y, &grad_u);
    let mut lhs_x = transport(&fu);
    let lhs_y = transport(&gu);
    if !spec.x().is_constant() {
        for &j in spec.j_set() {
            for i in 0..n {
                if let Some(d) = sample(spec.x().jacobian_expr(i, j), grid) {
                    let uij = spectrum.hessian_entry(i, j)?;
                    for ((o, d), h) in lhs_x
                        .values_mut()
                        .iter_mut()
                        .zip(d.values())
                        .zip(uij.values())
                    {
                        *o -= 2.0 * d * h;
                    }
                }
                if let Some(d2) = sample(spec.x().second_expr(i, j, j), grid) {
                    for ((o, d), g) in lhs_x
                        .values_mut()
                        .iter_mut()
                        .zip(d2.values())
                        .zip(grad_u[i].values())
                    {
                        *o -= d * g;
                    }
                }
            }
        }
    }

    // Right sides.
    let eval = Evaluation::at(u, spec)?;
    let g = eval.a.axpy(1.0, &eval.b)?;
    let grad_g = Spectrum::of(&g).gradient();
    let rhs_x = contract(&x, &grad_g);
    let rhs_y = contract(&y, &grad_g);

    Ok(IdentityResiduals {
        x_transport: lhs_x.sup_distance(&rhs_x)?,
        y_transport: lhs_y.sup_distance(&rhs_y)?,
        derivative_conditions: derivative_conditions(spec),
    })
}

/// `∂_k Y = 0`, `∂_i X = 0` and `∂_k ∂_i X = 0` for `i ∈ I`, sampled on the grid.
pub fn derivative_conditions(spec: &EquationSpec) -> f64 {
    let grid = spec.grid();
    let n = spec.dim();
    let mut exprs: Vec<&Expr> = Vec::new();
    for c in 0..n {
        for k in 0..n {
            exprs.push(spec.y().jacobian_expr(c, k));
        }
        for &i in spec.i_set() {
            exprs.push(spec.x().jacobian_expr(c, i));
            for k in 0..n {
                exprs.push(spec.x().second_expr(c, k, i));
            }
        }
    }
    exprs
        .into_iter()
        .filter_map(|e| sample(e, grid))
        .map(|f| f.sup_norm())
        .fold(0.0, f64::max)
}
