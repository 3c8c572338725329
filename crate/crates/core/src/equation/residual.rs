use crate::error::{Error, Result};
use crate::spectral::{mean, ScalarField, Spectrum};

use super::spec::EquationSpec;

/// Largest `sup|f|` accepted by [`normalize_f`].
pub const MAX_DATUM: f64 = 50.0;

/// Second-order quantities of `u` entering the equation.
///
/// `cross[s * k + t] = u_{J[s], I[t]}`, i.e. row-major over the `(n−k) × k`
/// coupling block.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub a: ScalarField,
    pub b: ScalarField,
    pub cross: Vec<ScalarField>,
}

impl Evaluation {
    pub fn at(u: &ScalarField, spec: &EquationSpec) -> Result<Self> {
        spec.ensure_grid(u)?;
        Ok(Self::from_spectrum(&Spectrum::of(u), spec))
    }

    pub(crate) fn from_spectrum(spectrum: &Spectrum, spec: &EquationSpec) -> Self {
        let trace_i = spectrum
            .partial_laplacian(spec.i_set())
            .expect("axes checked");
        let trace_j = spectrum
            .partial_laplacian(spec.j_set())
            .expect("axes checked");
        let g = spec.g_drift().apply(spectrum);
        let f = spec.f_drift().apply(spectrum);
        let a = ScalarField::from_raw(
            spectrum.grid(),
            trace_i
                .values()
                .iter()
                .zip(g.values())
                .map(|(t, g)| 1.0 + t + g)
                .collect(),
        );
        let b = ScalarField::from_raw(
            spectrum.grid(),
            trace_j
                .values()
                .iter()
                .zip(f.values())
                .map(|(t, f)| 1.0 + t + f)
                .collect(),
        );
        let mut cross = Vec::with_capacity(spec.k() * spec.j_set().len());
        for &j in spec.j_set() {
            for &i in spec.i_set() {
                cross.push(spectrum.hessian_entry(j, i).expect("axes checked"));
            }
        }
        Evaluation { a, b, cross }
    }

    /// `AB − Σ_{I×J} u_ij²`, the left side of the equation.
    pub fn operator(&self) -> ScalarField {
        let mut out: Vec<f64> = self
            .a
            .values()
            .iter()
            .zip(self.b.values())
            .map(|(a, b)| a * b)
            .collect();
        for c in &self.cross {
            for (o, v) in out.iter_mut().zip(c.values()) {
                *o -= v * v;
            }
        }
        ScalarField::from_raw(self.a.grid(), out)
    }

    /// `AB − Σ u_ij² − e^f`.
    pub fn residual(&self, f: &ScalarField) -> Result<ScalarField> {
        self.operator().zip_with(f, |phi, f| phi - f.exp())
    }
}

/// `(A, B)` at `u`.
pub fn compute_ab(u: &ScalarField, spec: &EquationSpec) -> Result<(ScalarField, ScalarField)> {
    let eval = Evaluation::at(u, spec)?;
    Ok((eval.a, eval.b))
}

/// Pointwise `AB − Σ_{i∈I, j∈J} u_ij² − e^f`.
pub fn residual(u: &ScalarField, f: &ScalarField, spec: &EquationSpec) -> Result<ScalarField> {
    spec.ensure_grid(f)?;
    Evaluation::at(u, spec)?.residual(f)
}

/// Shifts `f` by a constant so that `∫ e^f dV = 1`.
pub fn normalize_f(f: &ScalarField) -> Result<ScalarField> {
    let sup = f.sup_norm();
    if sup > MAX_DATUM {
        return Err(Error::OverflowGuard {
            sup,
            limit: MAX_DATUM,
        });
    }
    let shift = mean(&f.map(f64::exp)).ln();
    Ok(f.map(|v| v - shift))
}
