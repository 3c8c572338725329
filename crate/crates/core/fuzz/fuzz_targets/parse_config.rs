//! Equation config files.
//!
//! ```not_rust
//! cargo +nightly fuzz run parse_config
//! ```

#![no_main]

use libfuzzer_sys::fuzz_target;
use torus_elliptic::config::SpecConfig;
use torus_elliptic::spectral::TorusGrid;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(config) = SpecConfig::parse(text) else {
        return;
    };
    assert_eq!(config.sizes.len(), config.n);
    assert!(config.i_set.iter().all(|&i| i < config.n));
    // Building samples the drifts on the grid; keep that cheap.
    if config.n <= 4 && config.sizes.iter().all(|&s| s <= 8) {
        if let Ok(grid) = TorusGrid::with_dim(config.n, &config.sizes) {
            let _ = config.build_on(&grid);
        }
    }
});
