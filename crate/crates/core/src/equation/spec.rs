use std::fmt;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::spectral::{ScalarField, Spectrum, TorusGrid};

/// Largest periodicity defect tolerated in a drift component.
const PERIODICITY_TOL: f64 = 1e-9;
/// Agreement required between symbolic and spectral Jacobians of sampled drift.
const JACOBIAN_CROSS_TOL: f64 = 1e-8;

/// A drift vector field `X` with symbolic first and second derivatives.
///
/// `F(∇v) = X^i v_i`; `F_k(∇v) = ∂_k X^i v_i`; `F_ks(∇v) = ∂_k∂_s X^i v_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldSpec {
    components: Vec<Expr>,
    jacobian: Vec<Vec<Expr>>,
    second: Vec<Vec<Vec<Expr>>>,
}

impl VectorFieldSpec {
    pub fn new(components: Vec<Expr>) -> Result<Self> {
        let n = components.len();
        if n < 2 {
            return Err(Error::InvalidSpec(format!(
                "vector field needs at least 2 components, got {n}"
            )));
        }
        for (i, c) in components.iter().enumerate() {
            if let Some(v) = c.max_var() {
                if v >= n {
                    return Err(Error::InvalidSpec(format!(
                        "component {} uses x{} in dimension {n}",
                        i + 1,
                        v + 1
                    )));
                }
            }
        }
        let probes = probe_points(n);
        for (i, c) in components.iter().enumerate() {
            let defect = c.periodicity_defect(&probes);
            if defect > PERIODICITY_TOL {
                return Err(Error::InvalidSpec(format!(
                    "component {} = {c} is not 2π-periodic (defect {defect:e})",
                    i + 1
                )));
            }
        }
        let jacobian: Vec<Vec<Expr>> = components
            .iter()
            .map(|c| (0..n).map(|j| c.derivative(j)).collect())
            .collect();
        let second = jacobian
            .iter()
            .map(|row| {
                row.iter()
                    .map(|d| (0..n).map(|s| d.derivative(s)).collect())
                    .collect()
            })
            .collect();
        Ok(VectorFieldSpec {
            components,
            jacobian,
            second,
        })
    }

    pub fn zero(n: usize) -> Self {
        Self::constant(&vec![0.0; n])
    }

    pub fn constant(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&v| Expr::Const(v)).collect())
            .expect("constant fields are valid")
    }

    /// Parses one expression per component.
    pub fn parse(components: &[&str]) -> Result<Self> {
        let n = components.len();
        let exprs = components
            .iter()
            .map(|c| Expr::parse(c, n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(exprs)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    /// `∂X^i/∂x_j` as an expression.
    pub fn jacobian_expr(&self, i: usize, j: usize) -> &Expr {
        &self.jacobian[i][j]
    }

    /// `∂²X^i/∂x_k∂x_s` as an expression.
    pub fn second_expr(&self, i: usize, k: usize, s: usize) -> &Expr {
        &self.second[i][k][s]
    }

    pub fn is_constant(&self) -> bool {
        self.components.iter().all(Expr::is_constant)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Expr::is_zero)
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|c| c.eval(x)).collect()
    }

    pub fn eval_jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.jacobian
            .iter()
            .map(|row| row.iter().map(|d| d.eval(x)).collect())
            .collect()
    }

    pub fn sample(&self, grid: &TorusGrid) -> SampledDrift {
        if self.is_zero() {
            SampledDrift::Zero
        } else if self.is_constant() {
            SampledDrift::Constant(self.eval(&vec![0.0; self.dim()]))
        } else {
            SampledDrift::Variable(
                self.components
                    .iter()
                    .map(|c| ScalarField::from_fn(grid, |x| c.eval(x)))
                    .collect(),
            )
        }
    }

    /// Largest gap between the symbolic Jacobian and spectral differentiation of
    /// the sampled components.
    pub fn jacobian_cross_check(&self, grid: &TorusGrid) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, c) in self.components.iter().enumerate() {
            if c.is_constant() {
                continue;
            }
            let sampled = ScalarField::from_fn(grid, |x| c.eval(x));
            let spectrum = Spectrum::of(&sampled);
            for j in 0..self.dim() {
                let spectral = spectrum.partial(j, 1).expect("axis in range");
                let symbolic = ScalarField::from_fn(grid, |x| self.jacobian[i][j].eval(x));
                worst = worst.max(spectral.sup_distance(&symbolic).expect("same grid"));
            }
        }
        worst
    }
}

fn probe_points(n: usize) -> Vec<Vec<f64>> {
    (0..4)
        .map(|p| {
            (0..n)
                .map(|a| 0.37 + 1.13 * (p as f64) + 0.71 * (a as f64))
                .collect()
        })
        .collect()
}

/// Drift components sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub enum SampledDrift {
    Zero,
    Constant(Vec<f64>),
    Variable(Vec<ScalarField>),
}

impl SampledDrift {
    /// `X · ∇v`, given the spectrum of `v`.
    pub fn apply(&self, spectrum: &Spectrum) -> ScalarField {
        match self {
            SampledDrift::Zero => ScalarField::zeros(spectrum.grid()),
            SampledDrift::Constant(c) => spectrum.directional(c).expect("dimension checked"),
            SampledDrift::Variable(components) => {
                let mut out = ScalarField::zeros(spectrum.grid());
                for (axis, xa) in components.iter().enumerate() {
                    let da = spectrum.partial(axis, 1).expect("axis in range");
                    for ((o, x), d) in out
                        .values_mut()
                        .iter_mut()
                        .zip(xa.values())
                        .zip(da.values())
                    {
                        *o += x * d;
                    }
                }
                out
            }
        }
    }

    /// `X · g` for an already differentiated gradient.
    pub fn apply_to_gradient(&self, gradient: &[ScalarField]) -> ScalarField {
        let grid = gradient[0].grid();
        let mut out = ScalarField::zeros(grid);
        match self {
            SampledDrift::Zero => {}
            SampledDrift::Constant(c) => {
                for (ca, ga) in c.iter().zip(gradient) {
                    out.add_assign_scaled(*ca, ga);
                }
            }
            SampledDrift::Variable(components) => {
                for (xa, ga) in components.iter().zip(gradient) {
                    for ((o, x), g) in out
                        .values_mut()
                        .iter_mut()
                        .zip(xa.values())
                        .zip(ga.values())
                    {
                        *o += x * g;
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, SampledDrift::Zero)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// `n = 3`, `I = {1}`, `X = (0, 0, 1)`, `Y = 0`.
    KodairaThurston,
    /// `n = 5`, `I = {5}`, `X = Y = 0`.
    Hkt,
    Custom,
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::KodairaThurston => "kodaira_thurston",
            Preset::Hkt => "hkt",
            Preset::Custom => "custom",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kodaira_thurston" | "kt" => Ok(Preset::KodairaThurston),
            "hkt" => Ok(Preset::Hkt),
            "custom" => Ok(Preset::Custom),
            other => Err(Error::InvalidSpec(format!("unknown preset `{other}`"))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The equation `(1 + Σ_I u_ii + G(∇u)) (1 + Σ_J u_jj + F(∇u)) − Σ_{I×J} u_ij² = e^f`.
///
/// Index sets are 0-based and sorted. `F` comes from `X`, `G` from `Y`.
#[derive(Clone, Debug)]
pub struct EquationSpec {
    grid: TorusGrid,
    i_set: Vec<usize>,
    j_set: Vec<usize>,
    x: VectorFieldSpec,
    y: VectorFieldSpec,
    preset: Preset,
    x_drift: SampledDrift,
    y_drift: SampledDrift,
}

impl EquationSpec {
    pub fn new(
        grid: &TorusGrid,
        i_set: &[usize],
        x: VectorFieldSpec,
        y: VectorFieldSpec,
    ) -> Result<Self> {
        Self::build(grid, i_set, x, y, Preset::Custom)
    }

    /// `I = {n}`, `X = Y = 0`: the pure Monge–Ampère-type case.
    pub fn standard(grid: &TorusGrid) -> Result<Self> {
        let n = grid.dim();
        Self::new(
            grid,
            &[n - 1],
            VectorFieldSpec::zero(n),
            VectorFieldSpec::zero(n),
        )
    }

    pub fn kodaira_thurston(grid: &TorusGrid) -> Result<Self> {
        if grid.dim() != 3 {
            return Err(Error::InvalidSpec(format!(
                "kodaira_thurston preset needs n = 3, grid has n = {}",
                grid.dim()
            )));
        }
        Self::build(
            grid,
            &[0],
            VectorFieldSpec::constant(&[0.0, 0.0, 1.0]),
            VectorFieldSpec::zero(3),
            Preset::KodairaThurston,
        )
    }

    pub fn hkt(grid: &TorusGrid) -> Result<Self> {
        if grid.dim() != 5 {
            return Err(Error::InvalidSpec(format!(
                "hkt preset needs n = 5, grid has n = {}",
                grid.dim()
            )));
        }
        Self::build(
            grid,
            &[4],
            VectorFieldSpec::zero(5),
            VectorFieldSpec::zero(5),
            Preset::Hkt,
        )
    }

    pub fn from_preset(grid: &TorusGrid, preset: Preset) -> Result<Self> {
        match preset {
            Preset::KodairaThurston => Self::kodaira_thurston(grid),
            Preset::Hkt => Self::hkt(grid),
            Preset::Custom => Self::standard(grid),
        }
    }

    fn build(
        grid: &TorusGrid,
        i_set: &[usize],
        x: VectorFieldSpec,
        y: VectorFieldSpec,
        preset: Preset,
    ) -> Result<Self> {
        let n = grid.dim();
        if x.dim() != n || y.dim() != n {
            return Err(Error::InvalidSpec(format!(
                "drift fields have dimensions {} and {}, grid has {n}",
                x.dim(),
                y.dim()
            )));
        }
        let mut i_sorted = i_set.to_vec();
        i_sorted.sort_unstable();
        i_sorted.dedup();
        if i_sorted.len() != i_set.len() {
            return Err(Error::InvalidSpec(
                "index set I has repeated entries".into(),
            ));
        }
        if let Some(&bad) = i_sorted.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidSpec(format!(
                "index {} in I exceeds dimension {n}",
                bad + 1
            )));
        }
        let k = i_sorted.len();
        if k == 0 {
            return Err(Error::InvalidSpec("index set I must be non-empty".into()));
        }
        if k > n - k {
            return Err(Error::InvalidSpec(format!(
                "|I| = {k} exceeds n - |I| = {}; swap the roles of I and J",
                n - k
            )));
        }
        let j_set: Vec<usize> = (0..n).filter(|j| !i_sorted.contains(j)).collect();

        for (name, field) in [("X", &x), ("Y", &y)] {
            let gap = field.jacobian_cross_check(grid);
            if gap > JACOBIAN_CROSS_TOL {
                return Err(Error::InvalidSpec(format!(
                    "{name} is under-resolved on grid {:?}: spectral and symbolic Jacobians differ by {gap:e}",
                    grid.sizes()
                )));
            }
        }

        let x_drift = x.sample(grid);
        let y_drift = y.sample(grid);
        Ok(EquationSpec {
            grid: grid.clone(),
            i_set: i_sorted,
            j_set,
            x,
            y,
            preset,
            x_drift,
            y_drift,
        })
    }

    /// Same equation on another grid.
    pub fn on_grid(&self, grid: &TorusGrid) -> Result<Self> {
        Self::build(
            grid,
            &self.i_set,
            self.x.clone(),
            self.y.clone(),
            self.preset,
        )
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// `k = |I|`.
    pub fn k(&self) -> usize {
        self.i_set.len()
    }

    pub fn i_set(&self) -> &[usize] {
        &self.i_set
    }

    pub fn j_set(&self) -> &[usize] {
        &self.j_set
    }

    pub fn x(&self) -> &VectorFieldSpec {
        &self.x
    }

    pub fn y(&self) -> &VectorFieldSpec {
        &self.y
    }

    pub fn preset(&self) -> Preset {
        self.preset
    }

    /// Sampled `X` (drives `F`).
    pub fn f_drift(&self) -> &SampledDrift {
        &self.x_drift
    }

    /// Sampled `Y` (drives `G`).
    pub fn g_drift(&self) -> &SampledDrift {
        &self.y_drift
    }

    pub fn has_constant_drift(&self) -> bool {
        self.x.is_constant() && self.y.is_constant()
    }

    pub(crate) fn ensure_grid(&self, field: &ScalarField) -> Result<()> {
        self.grid.ensure_same(field.grid())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_have_expected_shape() {
        let kt = EquationSpec::kodaira_thurston(&TorusGrid::cube(3, 8).unwrap()).unwrap();
        assert_eq!(kt.i_set(), &[0]);
        assert_eq!(kt.j_set(), &[1, 2]);
        assert_eq!(kt.f_drift(), &SampledDrift::Constant(vec![0.0, 0.0, 1.0]));
        assert!(kt.g_drift().is_zero());

        let hkt = EquationSpec::hkt(&TorusGrid::cube(5, 4).unwrap()).unwrap();
        assert_eq!(hkt.i_set(), &[4]);
        assert_eq!(hkt.k(), 1);
        assert!(EquationSpec::hkt(&TorusGrid::cube(3, 4).unwrap()).is_err());
    }

    #[test]
    fn rejects_bad_index_sets() {
        let grid = TorusGrid::cube(4, 8).unwrap();
        let z = || VectorFieldSpec::zero(4);
        assert!(EquationSpec::new(&grid, &[], z(), z()).is_err());
        assert!(EquationSpec::new(&grid, &[0, 1, 2], z(), z()).is_err());
        assert!(EquationSpec::new(&grid, &[4], z(), z()).is_err());
        assert!(EquationSpec::new(&grid, &[1, 1], z(), z()).is_err());
        let two = EquationSpec::new(&grid, &[3, 1], z(), z()).unwrap();
        assert_eq!(two.i_set(), &[1, 3]);
        assert_eq!(two.j_set(), &[0, 2]);
    }

    #[test]
    fn rejects_aperiodic_and_unresolved_drift() {
        assert!(VectorFieldSpec::parse(&["sin(0.5*x1)", "0", "0"]).is_err());
        let grid = TorusGrid::cube(3, 8).unwrap();
        let fast = VectorFieldSpec::parse(&["sin(9*x2)", "0", "0"]).unwrap();
        assert!(EquationSpec::new(&grid, &[2], fast, VectorFieldSpec::zero(3)).is_err());
    }

    #[test]
    fn symbolic_jacobian_agrees_with_spectral() {
        let grid = TorusGrid::cube(3, 16).unwrap();
        let x = VectorFieldSpec::parse(&["sin(x2)*cos(x3)", "0.5*cos(x1 + x3)", "1"]).unwrap();
        assert!(x.jacobian_cross_check(&grid) < 1e-12);
        assert!(!x.is_constant());
        assert!(VectorFieldSpec::parse(&["1", "2*3", "0"])
            .unwrap()
            .is_constant());
    }
}
