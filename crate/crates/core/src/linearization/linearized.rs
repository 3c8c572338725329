use crate::equation::{EquationSpec, Evaluation};
use crate::error::Result;
use crate::spectral::{ScalarField, Spectrum};

/// `d_uΦ` frozen at a base point `u`.
///
/// `d_uΦ(v) = B Σ_I v_ii + A Σ_J v_jj − 2 Σ_{I×J} u_ij v_ij + A F(∇v) + B G(∇v)`.
/// It contains no zeroth-order term, so constants are in its kernel.
#[derive(Clone, Debug)]
pub struct Linearization<'a> {
    spec: &'a EquationSpec,
    eval: Evaluation,
}

impl<'a> Linearization<'a> {
    pub fn at(u: &ScalarField, spec: &'a EquationSpec) -> Result<Self> {
        Ok(Linearization {
            spec,
            eval: Evaluation::at(u, spec)?,
        })
    }

    pub fn from_evaluation(eval: Evaluation, spec: &'a EquationSpec) -> Self {
        Linearization { spec, eval }
    }

    pub fn evaluation(&self) -> &Evaluation {
        &self.eval
    }

    pub fn into_evaluation(self) -> Evaluation {
        self.eval
    }

    pub fn apply(&self, v: &ScalarField) -> Result<ScalarField> {
        self.spec.ensure_grid(v)?;
        Ok(self.apply_spectrum(&Spectrum::of(v)))
    }

    pub(crate) fn apply_spectrum(&self, spectrum: &Spectrum) -> ScalarField {
        let spec = self.spec;
        let trace_i = spectrum
            .partial_laplacian(spec.i_set())
            .expect("axes checked");
        let trace_j = spectrum
            .partial_laplacian(spec.j_set())
            .expect("axes checked");
        let f = spec.f_drift().apply(spectrum);
        let g = spec.g_drift().apply(spectrum);
        let a = self.eval.a.values();
        let b = self.eval.b.values();
        let mut out: Vec<f64> = (0..a.len())
            .map(|p| {
                a[p] * (trace_j.values()[p] + f.values()[p])
                    + b[p] * (trace_i.values()[p] + g.values()[p])
            })
            .collect();
        let mut c = 0;
        for &j in spec.j_set() {
            for &i in spec.i_set() {
                let vij = spectrum.hessian_entry(j, i).expect("axes checked");
                let uij = self.eval.cross[c].values();
                for ((o, w), v) in out.iter_mut().zip(uij).zip(vij.values()) {
                    *o -= 2.0 * w * v;
                }
                c += 1;
            }
        }
        ScalarField::from_raw(spectrum.grid(), out)
    }
}

/// `d_uΦ(v)` for a single direction.
pub fn apply_linearized(
    u: &ScalarField,
    v: &ScalarField,
    spec: &EquationSpec,
) -> Result<ScalarField> {
    Linearization::at(u, spec)?.apply(v)
}
