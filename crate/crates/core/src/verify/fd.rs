use crate::equation::{EquationSpec, Evaluation};
use crate::error::{Error, Result};
use crate::linearization::apply_linearized;
use crate::spectral::ScalarField;

/// Admissible step sizes for the central difference.
pub const FD_STEP_RANGE: (f64, f64) = (1e-6, 1e-3);
/// Below this sup norm the linearization is treated as vanishing.
pub const FD_DIVISION_GUARD: f64 = 1e-12;

/// Central difference of the full operator against the linearized one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdComparison {
    /// `‖(Φ(u+hv) − Φ(u−hv))/2h − d_uΦ(v)‖_∞`.
    pub absolute: f64,
    /// `‖d_uΦ(v)‖_∞`.
    pub reference: f64,
}

impl FdComparison {
    pub fn relative(&self) -> Option<f64> {
        (self.reference > FD_DIVISION_GUARD).then(|| self.absolute / self.reference)
    }
}

pub fn fd_linearization_compare(
    u: &ScalarField,
    v: &ScalarField,
    spec: &EquationSpec,
    h: f64,
) -> Result<FdComparison> {
    if !(FD_STEP_RANGE.0..=FD_STEP_RANGE.1).contains(&h) {
        return Err(Error::InvalidArgument(format!(
            "step h = {h:e} outside [{:e}, {:e}]",
            FD_STEP_RANGE.0, FD_STEP_RANGE.1
        )));
    }
    let plus = Evaluation::at(&u.axpy(h, v)?, spec)?.operator();
    let minus = Evaluation::at(&u.axpy(-h, v)?, spec)?.operator();
    let exact = apply_linearized(u, v, spec)?;
    let absolute = plus
        .values()
        .iter()
        .zip(minus.values())
        .zip(exact.values())
        .map(|((p, m), e)| ((p - m) / (2.0 * h) - e).abs())
        .fold(0.0, f64::max);
    Ok(FdComparison {
        absolute,
        reference: exact.sup_norm(),
    })
}

/// Relative central-difference error; refuses when `d_uΦ(v)` vanishes.
pub fn fd_linearization_oracle(
    u: &ScalarField,
    v: &ScalarField,
    spec: &EquationSpec,
    h: f64,
) -> Result<f64> {
    let cmp = fd_linearization_compare(u, v, spec, h)?;
    cmp.relative().ok_or_else(|| {
        Error::Precondition(format!(
            "d_uΦ(v) vanishes (sup {:e}); absolute difference {:e}",
            cmp.reference, cmp.absolute
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::TorusGrid;
    use crate::verify::random::BandLimited;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_at_zero_for_a_sine() {
        let grid = TorusGrid::cube(3, 16).unwrap();
        let spec = EquationSpec::standard(&grid).unwrap();
        let v = ScalarField::from_fn(&grid, |x| x[0].sin());
        let err = fd_linearization_oracle(&ScalarField::zeros(&grid), &v, &spec, 1e-4).unwrap();
        assert!(err <= 1e-8, "{err:e}");
    }

    #[test]
    fn random_pair_with_drift() {
        let grid = TorusGrid::cube(3, 16).unwrap();
        let spec = EquationSpec::kodaira_thurston(&grid).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = BandLimited::random(3, 4, &mut rng)
            .scaled(0.1)
            .sample(&grid)
            .unwrap();
        let v = BandLimited::random(3, 4, &mut rng).sample(&grid).unwrap();
        assert!(fd_linearization_oracle(&u, &v, &spec, 1e-4).unwrap() <= 1e-7);
    }

    #[test]
    fn constant_direction_hits_the_guard() {
        let grid = TorusGrid::cube(3, 8).unwrap();
        let spec = EquationSpec::standard(&grid).unwrap();
        let u = ScalarField::from_fn(&grid, |x| 0.1 * x[1].cos());
        let v = ScalarField::constant(&grid, 1.0);
        let cmp = fd_linearization_compare(&u, &v, &spec, 1e-4).unwrap();
        assert!(cmp.absolute < 1e-10 && cmp.reference < 1e-12);
        assert!(cmp.relative().is_none());
        assert!(matches!(
            fd_linearization_oracle(&u, &v, &spec, 1e-4),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn step_range_is_enforced() {
        let grid = TorusGrid::cube(3, 8).unwrap();
        let spec = EquationSpec::standard(&grid).unwrap();
        let z = ScalarField::zeros(&grid);
        assert!(fd_linearization_compare(&z, &z, &spec, 1e-2).is_err());
        assert!(fd_linearization_compare(&z, &z, &spec, 1e-7).is_err());
    }
}
