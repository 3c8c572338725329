use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use torus_elliptic::equation::{normalize_f, residual, EquationSpec, VectorFieldSpec};
use torus_elliptic::expr::Expr;
use torus_elliptic::spectral::io::{decode, detect_encoding, encode, Encoding};
use torus_elliptic::spectral::{gradient, mean, ScalarField, TorusGrid};
use torus_elliptic::verify::manufacture;
use torus_elliptic::verify::random::BandLimited;

fn small_field(grid: &TorusGrid, seed: u64, amplitude: f64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    BandLimited::random(grid.dim(), 3, &mut rng)
        .scaled(amplitude)
        .sample(grid)
        .unwrap()
}

fn expr_text() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0usize..3).prop_map(|i| format!("x{}", i + 1)),
        (-5i32..=5).prop_map(|c| format!("{}", f64::from(c) / 2.0)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) - ({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) * ({b})")),
            inner.clone().prop_map(|a| format!("-({a})")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.prop_map(|a| format!("cos({a})")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_files_round_trip_exactly(
        values in prop::collection::vec(-1e300f64..1e300, 16),
        binary in any::<bool>(),
    ) {
        let grid = TorusGrid::with_dim(2, &[4, 4]).unwrap();
        let field = ScalarField::from_values(&grid, values).unwrap();
        let encoding = if binary { Encoding::Binary } else { Encoding::Csv };
        let bytes = encode(&field, encoding);
        prop_assert_eq!(detect_encoding(&bytes).unwrap(), encoding);
        let back = decode(&bytes, encoding).unwrap();
        prop_assert_eq!(back.values(), field.values());
    }

    #[test]
    fn printed_expressions_reparse_to_the_same_function(text in expr_text(), x in prop::array::uniform3(-4.0f64..4.0)) {
        let e = Expr::parse(&text, 3).unwrap();
        let printed = e.to_string();
        let again = Expr::parse(&printed, 3).unwrap();
        prop_assert_eq!(again.to_string(), printed);
        prop_assert_eq!(e.eval(&x).to_bits(), again.eval(&x).to_bits());
    }

    #[test]
    fn symbolic_derivative_matches_central_difference(text in expr_text(), x in prop::array::uniform3(-2.0f64..2.0), var in 0usize..3) {
        let e = Expr::parse(&text, 3).unwrap();
        let h = 1e-5;
        let mut plus = x;
        let mut minus = x;
        plus[var] += h;
        minus[var] -= h;
        let fd = (e.eval(&plus) - e.eval(&minus)) / (2.0 * h);
        let exact = e.derivative(var).eval(&x);
        prop_assert!((fd - exact).abs() <= 1e-5 * (1.0 + exact.abs()), "{} vs {}", fd, exact);
    }

    #[test]
    fn normalization_ignores_constants(seed in any::<u64>(), c in -3.0f64..3.0) {
        let grid = TorusGrid::cube(3, 8).unwrap();
        let f = small_field(&grid, seed, 1.0);
        let g = normalize_f(&f).unwrap();
        prop_assert!((mean(&g.map(f64::exp)) - 1.0).abs() < 1e-13);
        let shifted = normalize_f(&f.map(|v| v + c)).unwrap();
        prop_assert!(shifted.sup_distance(&g).unwrap() < 1e-12);
    }

    #[test]
    fn residual_commutes_with_grid_translations(
        seed in any::<u64>(),
        shift in prop::array::uniform3(-20isize..20),
        x in prop::array::uniform3(-0.5f64..0.5),
        y in prop::array::uniform3(-0.5f64..0.5),
    ) {
        let grid = TorusGrid::cube(3, 8).unwrap();
        let spec = EquationSpec::new(
            &grid,
            &[2],
            VectorFieldSpec::constant(&[x[0], x[1], 0.0]),
            VectorFieldSpec::constant(&[0.0, 0.0, y[2]]),
        ).unwrap();
        let u = small_field(&grid, seed, 0.1);
        let f = small_field(&grid, seed ^ 0x5eed, 0.3);
        let moved = residual(&u.translate(&shift).unwrap(), &f.translate(&shift).unwrap(), &spec).unwrap();
        let expected = residual(&u, &f, &spec).unwrap().translate(&shift).unwrap();
        prop_assert!(moved.sup_distance(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn manufactured_mass_is_one_plus_the_drift_coupling(
        seed in any::<u64>(),
        x in prop::array::uniform2(-0.5f64..0.5),
        y in -0.5f64..0.5,
    ) {
        // For constant drifts every divergence term integrates to zero, which
        // leaves ∫e^f = 1 + ∫(X·∇u)(Y·∇u).
        let grid = TorusGrid::cube(3, 8).unwrap();
        let spec = EquationSpec::new(
            &grid,
            &[2],
            VectorFieldSpec::constant(&[x[0], x[1], 0.0]),
            VectorFieldSpec::constant(&[0.0, 0.0, y]),
        ).unwrap();
        let u = small_field(&grid, seed, 0.05);
        let f = manufacture(&u, &spec).unwrap();
        prop_assert!(residual(&u, &f, &spec).unwrap().sup_norm() < 1e-13);
        let g = gradient(&u);
        let coupling = (0..grid.len())
            .map(|p| (x[0] * g[0].values()[p] + x[1] * g[1].values()[p]) * y * g[2].values()[p])
            .sum::<f64>()
            / grid.len() as f64;
        prop_assert!((mean(&f.map(f64::exp)) - 1.0 - coupling).abs() < 1e-13);
    }
}
