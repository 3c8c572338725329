//! Random trials of the block-minor expansion against direct determinants.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linearization::{minor_determinant_direct, minor_formula_conjecture, SymbolMatrix};

use super::random::random_symbol;

/// Relative agreement required where the expansion is asserted.
pub const DET_REL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct DetTrial {
    pub n: usize,
    pub k: usize,
    pub i: usize,
    pub direct: f64,
    pub conjecture: f64,
    pub rel_error: f64,
    /// The symbol, kept so that failures can be dumped.
    pub symbol: SymbolMatrix,
}

impl DetTrial {
    /// Levels 1 and 2 hold in general and the full determinant is claimed for
    /// `(n, k) = (6, 3)`. Everything else is evidence only.
    pub fn is_gated(&self) -> bool {
        self.i <= 2 || (self.n == 6 && self.k == 3 && self.i == 3)
    }

    pub fn agrees(&self) -> bool {
        self.rel_error <= DET_REL_TOL
    }
}

pub fn det_trial(p: &SymbolMatrix, i: usize) -> Result<DetTrial> {
    if i == 0 || i > p.k {
        return Err(Error::InvalidArgument(format!(
            "level i = {i} must lie in 1..={}",
            p.k
        )));
    }
    let direct = minor_determinant_direct(p, p.k - i)?;
    let conjecture = minor_formula_conjecture(p, i)?;
    let scale = direct.abs().max(f64::MIN_POSITIVE);
    Ok(DetTrial {
        n: p.n,
        k: p.k,
        i,
        direct,
        conjecture,
        rel_error: (direct - conjecture).abs() / scale,
        symbol: p.clone(),
    })
}

/// `trials` random on-branch symbols of shape `(n, k)`, each tested at the given levels.
pub fn det_check(
    n: usize,
    k: usize,
    levels: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<DetTrial>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials * levels.len());
    for _ in 0..trials {
        let p = random_symbol(n, k, &mut rng)?;
        for &i in levels {
            out.push(det_trial(&p, i)?);
        }
    }
    Ok(out)
}
