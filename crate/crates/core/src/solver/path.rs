use crate::spectral::ScalarField;

/// The datum path `f_t = log(1 − t + t e^f)` from `0` to `f`.
#[derive(Clone, Debug)]
pub struct ContinuityPath {
    f_end: ScalarField,
    exp_end: ScalarField,
    schedule: Vec<f64>,
}

impl ContinuityPath {
    pub fn new(f_end: ScalarField) -> Self {
        let exp_end = f_end.map(f64::exp);
        ContinuityPath {
            f_end,
            exp_end,
            schedule: Vec::new(),
        }
    }

    pub fn f_end(&self) -> &ScalarField {
        &self.f_end
    }

    /// `f_0 ≡ 0` and `f_1 = f` are returned exactly.
    pub fn f_at(&self, t: f64) -> ScalarField {
        if t <= 0.0 {
            ScalarField::zeros(self.f_end.grid())
        } else if t >= 1.0 {
            self.f_end.clone()
        } else {
            self.exp_end.map(|e| (1.0 - t + t * e).ln())
        }
    }

    /// Accepted parameter values, increasing.
    pub fn schedule(&self) -> &[f64] {
        &self.schedule
    }

    pub(crate) fn accept(&mut self, t: f64) {
        debug_assert!(self.schedule.last().is_none_or(|&last| last < t));
        self.schedule.push(t);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::normalize_f;
    use crate::spectral::{mean, TorusGrid};

    #[test]
    fn endpoints_and_unit_mass() {
        let grid = TorusGrid::cube(3, 16).unwrap();
        let f = normalize_f(&ScalarField::from_fn(&grid, |x| {
            0.3 * x[0].cos() - 0.2 * (x[1] + x[2]).sin()
        }))
        .unwrap();
        let path = ContinuityPath::new(f.clone());
        assert_eq!(path.f_at(0.0).sup_norm(), 0.0);
        assert_eq!(path.f_at(1.0), f);
        for t in [0.1, 0.25, 0.5, 0.9, 0.999] {
            assert!((mean(&path.f_at(t).map(f64::exp)) - 1.0).abs() <= 1e-12);
        }
    }
}
