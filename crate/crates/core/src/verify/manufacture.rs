use crate::equation::{EquationSpec, Evaluation};
use crate::error::{Error, Result};
use crate::spectral::{mean, ScalarField, ZERO_MEAN_TOL};

/// The datum `f = log(AB − Σ u_ij²)` for which `u_star` is an exact solution.
pub fn manufacture(u_star: &ScalarField, spec: &EquationSpec) -> Result<ScalarField> {
    let m = mean(u_star);
    if m.abs() > ZERO_MEAN_TOL {
        return Err(Error::NonZeroMean {
            mean: m,
            tol: ZERO_MEAN_TOL,
        });
    }
    let operator = Evaluation::at(u_star, spec)?.operator();
    let (point, value) = operator.argmin();
    if !(value > 0.0) {
        return Err(Error::NonPositive {
            what: "AB − Σu_ij²",
            point,
            value,
        });
    }
    Ok(operator.map(f64::ln))
}

/// `|∫ e^f dV − 1|` for the manufactured datum of `u_star`.
pub fn normalization_check(u_star: &ScalarField, spec: &EquationSpec) -> Result<f64> {
    let f = manufacture(u_star, spec)?;
    Ok((mean(&f.map(f64::exp)) - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::residual;
    use crate::spectral::TorusGrid;
    use crate::verify::random::BandLimited;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_gives_zero() {
        let grid = TorusGrid::cube(3, 8).unwrap();
        let spec = EquationSpec::standard(&grid).unwrap();
        let f = manufacture(&ScalarField::zeros(&grid), &spec).unwrap();
        assert_eq!(f.sup_norm(), 0.0);
        assert_eq!(
            normalization_check(&ScalarField::zeros(&grid), &spec).unwrap(),
            0.0
        );
    }

    #[test]
    fn single_cosine_in_a_j_direction() {
        let grid = TorusGrid::cube(3, 16).unwrap();
        let spec = EquationSpec::standard(&grid).unwrap();
        let u = ScalarField::from_fn(&grid, |x| 0.1 * x[0].cos());
        let f = manufacture(&u, &spec).unwrap();
        let expected = ScalarField::from_fn(&grid, |x| (1.0 - 0.1 * x[0].cos()).ln());
        assert!(f.sup_distance(&expected).unwrap() < 1e-14);
    }

    #[test]
    fn residual_vanishes_at_the_manufactured_pair() {
        let grid = TorusGrid::cube(3, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for spec in [
            EquationSpec::standard(&grid).unwrap(),
            EquationSpec::kodaira_thurston(&grid).unwrap(),
        ] {
            let u = BandLimited::random(3, 4, &mut rng)
                .scaled(0.1)
                .sample(&grid)
                .unwrap();
            let f = manufacture(&u, &spec).unwrap();
            assert!(residual(&u, &f, &spec).unwrap().sup_norm() <= 1e-11);
        }
    }

    #[test]
    fn large_amplitude_is_rejected_with_the_point() {
        let grid = TorusGrid::cube(3, 16).unwrap();
        let spec = EquationSpec::standard(&grid).unwrap();
        let u = ScalarField::from_fn(&grid, |x| 0.9 * (2.0 * x[2]).cos());
        match manufacture(&u, &spec) {
            Err(Error::NonPositive { point, value, .. }) => {
                assert!(value <= 0.0);
                // A = 1 − 3.6 cos(2 x3) is most negative where cos(2 x3) = 1.
                assert_eq!(grid.unravel(point)[2] % 8, 0);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn nonzero_mean_is_rejected() {
        let grid = TorusGrid::cube(3, 8).unwrap();
        let spec = EquationSpec::standard(&grid).unwrap();
        let u = ScalarField::constant(&grid, 0.01);
        assert!(matches!(
            manufacture(&u, &spec),
            Err(Error::NonZeroMean { .. })
        ));
    }
}
