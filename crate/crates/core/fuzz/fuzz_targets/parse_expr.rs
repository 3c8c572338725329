//! Drift and datum expressions. The first byte picks the dimension.
//!
//! ```not_rust
//! cargo +nightly fuzz run parse_expr
//! ```

#![no_main]

use libfuzzer_sys::fuzz_target;
use torus_elliptic::expr::Expr;

fuzz_target!(|data: &[u8]| {
    let Some((&first, rest)) = data.split_first() else {
        return;
    };
    let dim = usize::from(first % 8) + 1;
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    let Ok(expr) = Expr::parse(text, dim) else {
        return;
    };
    assert!(expr.max_var().map_or(true, |v| v < dim));
    // Printing and reparsing must give back the same tree.
    let printed = expr.to_string();
    assert_eq!(Expr::parse(&printed, dim).unwrap(), expr, "{printed}");
    let point: Vec<f64> = (0..dim).map(|i| 0.37 + i as f64).collect();
    let _ = expr.eval(&point);
    for axis in 0..dim {
        let _ = expr.derivative(axis);
    }
});
