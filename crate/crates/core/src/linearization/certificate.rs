use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::equation::{EquationSpec, Evaluation};
use crate::error::{Error, Result};
use crate::spectral::ScalarField;

/// Random unit directions tested per sampled point (coordinate axes come on top).
pub const DIRECTIONS_PER_POINT: usize = 64;
/// Grid points that receive the quadratic-form spot check.
pub const SAMPLED_POINTS: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateSample {
    pub point: usize,
    pub a: f64,
    pub b: f64,
    pub lambda_minus: f64,
    /// Minimum over tested unit `ζ` of `ζᵀPζ − λ_-`.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EllipticityCertificate {
    pub min_lambda_minus: f64,
    pub worst_point: usize,
    pub quadratic_form_margin: f64,
    pub samples: Vec<CertificateSample>,
}

impl EllipticityCertificate {
    pub fn is_valid(&self) -> bool {
        self.min_lambda_minus > 0.0
    }
}

/// `λ_- = ½(A + B − sqrt((A+B)² − 4e^f))`, evaluated without cancellation.
pub fn lambda_minus(a: f64, b: f64, exp_f: f64) -> f64 {
    let s = a + b;
    let disc = (s * s - 4.0 * exp_f).max(0.0);
    if s > 0.0 {
        2.0 * exp_f / (s + disc.sqrt())
    } else {
        0.5 * (s - disc.sqrt())
    }
}

/// Pointwise ellipticity certificate at a (near-)solution `u` of the equation with datum `f`.
///
/// For `k = 1` the smallest eigenvalue comes from `(A, B, e^f)` in closed form;
/// for `k ≥ 2` it is a direct eigensolve of the symbol at every point. In both
/// cases the bound `ζᵀPζ ≥ λ_-|ζ|²` is spot-checked with seeded random directions.
pub fn certify_ellipticity(
    u: &ScalarField,
    f: &ScalarField,
    spec: &EquationSpec,
    seed: u64,
) -> Result<EllipticityCertificate> {
    spec.ensure_grid(f)?;
    let eval = Evaluation::at(u, spec)?;
    let on_shell = eval.operator();
    let (bad, value) = on_shell.argmin();
    if value <= 0.0 {
        return Err(Error::CertificateRefused(format!(
            "AB − Σu_ij² = {value:e} <= 0 at grid point {bad}"
        )));
    }

    let len = spec.grid().len();
    let lambdas: Vec<f64> = if spec.k() == 1 {
        (0..len)
            .map(|p| lambda_minus(eval.a.values()[p], eval.b.values()[p], f.values()[p].exp()))
            .collect()
    } else {
        (0..len)
            .map(|p| eval.symbol_at(spec, p).min_eigenvalue())
            .collect()
    };
    let (worst_point, min_lambda_minus) =
        lambdas
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |best, (i, v)| if v < best.1 { (i, v) } else { best },
            );

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![worst_point];
    let extra = SAMPLED_POINTS.min(len).saturating_sub(1);
    points.extend((0..extra).map(|_| rng.random_range(0..len)));

    let n = spec.dim();
    let mut samples = Vec::with_capacity(points.len());
    let mut zeta = vec![0.0; n];
    for &point in &points {
        let symbol = eval.symbol_at(spec, point);
        let lam = lambdas[point];
        let mut margin = f64::INFINITY;
        for axis in 0..n {
            zeta.iter_mut().for_each(|z| *z = 0.0);
            zeta[axis] = 1.0;
            margin = margin.min(symbol.quadratic_form(&zeta) - lam);
        }
        for _ in 0..DIRECTIONS_PER_POINT {
            let mut norm2 = 0.0;
            for z in zeta.iter_mut() {
                *z = rng.sample(StandardNormal);
                norm2 += *z * *z;
            }
            let norm = norm2.sqrt();
            zeta.iter_mut().for_each(|z| *z /= norm);
            margin = margin.min(symbol.quadratic_form(&zeta) - lam);
        }
        samples.push(CertificateSample {
            point,
            a: symbol.a,
            b: symbol.b,
            lambda_minus: lam,
            margin,
        });
    }
    let quadratic_form_margin = samples
        .iter()
        .map(|s| s.margin)
        .fold(f64::INFINITY, f64::min);

    Ok(EllipticityCertificate {
        min_lambda_minus,
        worst_point,
        quadratic_form_margin,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;
    use crate::verify::manufacture;

    #[test]
    fn trivial_solution_has_unit_margin() {
        let grid = TorusGrid::cube(3, 8).unwrap();
        let spec = EquationSpec::standard(&grid).unwrap();
        let zero = ScalarField::zeros(&grid);
        let cert = certify_ellipticity(&zero, &zero, &spec, 42).unwrap();
        assert!((cert.min_lambda_minus - 1.0).abs() < 1e-15);
        assert!(cert.quadratic_form_margin.abs() < 1e-12);
        assert!(cert.is_valid());
    }

    #[test]
    fn manufactured_pair_satisfies_bound() {
        let grid = TorusGrid::cube(3, 16).unwrap();
        for spec in [
            EquationSpec::standard(&grid).unwrap(),
            EquationSpec::kodaira_thurston(&grid).unwrap(),
        ] {
            let u = ScalarField::from_fn(&grid, |x| {
                0.1 * x[0].cos() + 0.08 * (x[1] + x[2]).sin() + 0.05 * (x[0] - x[2]).cos()
            });
            let f = manufacture(&u, &spec).unwrap();
            let cert = certify_ellipticity(&u, &f, &spec, 7).unwrap();
            assert!(cert.is_valid());
            assert!(cert.quadratic_form_margin >= -1e-10);
            assert_eq!(cert.samples.len(), SAMPLED_POINTS);
        }
    }

    #[test]
    fn block_case_uses_eigensolve() {
        let grid = TorusGrid::cube(4, 8).unwrap();
        let spec = EquationSpec::new(
            &grid,
            &[2, 3],
            crate::equation::VectorFieldSpec::zero(4),
            crate::equation::VectorFieldSpec::zero(4),
        )
        .unwrap();
        let u = ScalarField::from_fn(&grid, |x| {
            0.05 * (x[0] + x[2]).cos() + 0.04 * (x[1] - x[3]).sin()
        });
        let f = manufacture(&u, &spec).unwrap();
        let cert = certify_ellipticity(&u, &f, &spec, 1).unwrap();
        assert!(cert.is_valid());
        assert!(cert.quadratic_form_margin >= -1e-12);
    }

    #[test]
    fn refuses_off_shell() {
        let grid = TorusGrid::cube(3, 8).unwrap();
        let spec = EquationSpec::standard(&grid).unwrap();
        let u = ScalarField::from_fn(&grid, |x| 2.0 * x[2].cos());
        let f = ScalarField::zeros(&grid);
        assert!(matches!(
            certify_ellipticity(&u, &f, &spec, 0),
            Err(Error::CertificateRefused(_))
        ));
    }

    #[test]
    fn stable_lambda_minus_matches_textbook_form() {
        for (a, b, e) in [(1.0f64, 1.0f64, 1.0f64), (2.0, 0.7, 0.9), (1e3, 1e-3, 0.5)] {
            let textbook = 0.5f64 * (a + b - ((a + b) * (a + b) - 4.0 * e).sqrt());
            assert!((lambda_minus(a, b, e) - textbook).abs() <= 1e-12 * (a + b));
        }
    }
}
