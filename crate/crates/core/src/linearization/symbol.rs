use nalgebra::{DMatrix, SymmetricEigen};

use crate::equation::{EquationSpec, Evaluation};
use crate::error::{Error, Result};
use crate::spectral::ScalarField;

/// Spectrum of the arrow matrix
///
/// ```text
/// ⎡ a        −c_1    ⎤
/// ⎢   ⋱       ⋮      ⎥
/// ⎢      a   −c_{n−1}⎥
/// ⎣−c_1 … −c_{n−1}  b⎦
/// ```
///
/// whose characteristic polynomial is `(a−λ)^{n−2} (λ² − (a+b)λ + ab − Σc_i²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharpolyEigs {
    pub lambda_a: f64,
    /// Multiplicity of `lambda_a`, i.e. `n − 2`.
    pub multiplicity: usize,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
}

impl CharpolyEigs {
    /// All `n` eigenvalues in ascending order.
    pub fn all(&self) -> Vec<f64> {
        let mut out = vec![self.lambda_a; self.multiplicity];
        out.push(self.lambda_minus);
        out.push(self.lambda_plus);
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn product(&self) -> f64 {
        self.lambda_a.powi(self.multiplicity as i32) * self.lambda_minus * self.lambda_plus
    }
}

/// Closed-form eigenvalues of the arrow matrix; `c` has length `n − 1 ≥ 2`.
pub fn charpoly_eigs(a: f64, b: f64, c: &[f64]) -> Result<CharpolyEigs> {
    if c.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "arrow matrix needs n >= 3, got n = {}",
            c.len() + 1
        )));
    }
    let sum_sq: f64 = c.iter().map(|v| v * v).sum();
    let (lambda_minus, lambda_plus) = quadratic_roots(a, b, sum_sq);
    Ok(CharpolyEigs {
        lambda_a: a,
        multiplicity: c.len() - 1,
        lambda_minus,
        lambda_plus,
    })
}

/// Roots of `λ² − (a+b)λ + ab − s`, `s ≥ 0`, written around `a` so that
/// `λ_- ≤ a ≤ λ_+` survives rounding: `r ≥ |a − b|` holds in floating point.
pub(crate) fn quadratic_roots(a: f64, b: f64, sum_sq: f64) -> (f64, f64) {
    let d = a - b;
    let r = (d * d + 4.0 * sum_sq).sqrt();
    (a - 0.5 * (d + r), a + 0.5 * (r - d))
}

/// Principal symbol of the linearized operator at one grid point.
///
/// As an `n × n` matrix it is `[[A·I_{n−k}, −C], [−Cᵀ, B·I_k]]` with the
/// `J` block first. `coupling` stores `C` row-major, `C_st = u_{J[s], I[t]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolMatrix {
    pub n: usize,
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub coupling: Vec<f64>,
}

impl SymbolMatrix {
    pub fn new(n: usize, k: usize, a: f64, b: f64, coupling: Vec<f64>) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= k < n, got n = {n}, k = {k}"
            )));
        }
        if coupling.len() != (n - k) * k {
            return Err(Error::InvalidArgument(format!(
                "coupling block must have {} entries, got {}",
                (n - k) * k,
                coupling.len()
            )));
        }
        Ok(SymbolMatrix {
            n,
            k,
            a,
            b,
            coupling,
        })
    }

    /// Size of the `A` block, `n − k`.
    pub fn m(&self) -> usize {
        self.n - self.k
    }

    pub fn c(&self, s: usize, t: usize) -> f64 {
        self.coupling[s * self.k + t]
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let m = self.m();
        let mut p = DMatrix::zeros(self.n, self.n);
        for s in 0..m {
            p[(s, s)] = self.a;
        }
        for t in 0..self.k {
            p[(m + t, m + t)] = self.b;
        }
        for s in 0..m {
            for t in 0..self.k {
                p[(s, m + t)] = -self.c(s, t);
                p[(m + t, s)] = -self.c(s, t);
            }
        }
        p
    }

    pub fn quadratic_form(&self, zeta: &[f64]) -> f64 {
        let m = self.m();
        let mut q = 0.0;
        for s in 0..m {
            q += self.a * zeta[s] * zeta[s];
        }
        for t in 0..self.k {
            q += self.b * zeta[m + t] * zeta[m + t];
        }
        for s in 0..m {
            for t in 0..self.k {
                q -= 2.0 * self.c(s, t) * zeta[s] * zeta[m + t];
            }
        }
        q
    }

    /// `AB − Σ C_st²`.
    pub fn on_shell_value(&self) -> f64 {
        self.a * self.b - self.coupling.iter().map(|c| c * c).sum::<f64>()
    }

    /// Smallest eigenvalue: closed form for `k = 1`, direct symmetric eigensolve otherwise.
    pub fn min_eigenvalue(&self) -> f64 {
        if self.k == 1 {
            let s: f64 = self.coupling.iter().map(|c| c * c).sum();
            let (lo, _) = quadratic_roots(self.a, self.b, s);
            if self.m() >= 2 {
                lo.min(self.a)
            } else {
                lo
            }
        } else {
            SymmetricEigen::new(self.to_dense())
                .eigenvalues
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min)
        }
    }
}

impl Evaluation {
    /// The symbol matrix at a flat grid index.
    pub fn symbol_at(&self, spec: &EquationSpec, point: usize) -> SymbolMatrix {
        SymbolMatrix {
            n: spec.dim(),
            k: spec.k(),
            a: self.a.values()[point],
            b: self.b.values()[point],
            coupling: self.cross.iter().map(|c| c.values()[point]).collect(),
        }
    }
}

pub fn symbol_matrix(u: &ScalarField, spec: &EquationSpec, point: usize) -> Result<SymbolMatrix> {
    if point >= spec.grid().len() {
        return Err(Error::IndexOutOfRange(format!(
            "grid point {point} of {}",
            spec.grid().len()
        )));
    }
    Ok(Evaluation::at(u, spec)?.symbol_at(spec, point))
}
