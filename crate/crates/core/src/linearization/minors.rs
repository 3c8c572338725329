//! Leading principal minors of the block symbol and their conjectured expansion.
//!
//! `P_r` denotes the leading principal submatrix of size `n − r` (the symbol with
//! its last `r` rows and columns removed). With `m = n − k`, level `i` of the
//! expansion describes `det P_{k−i}`, a matrix of size `m + i`:
//!
//! ```text
//! A^{m−1} B^{i−1} (AB − Σ_{s<m, t<i} C_st²)
//!     + Σ_{r=2..i} A^{m−r} B^{i−r} Σ_{q_1<…<q_r} det(C[q_1..q_r; 0..r])²
//! ```
//!
//! Levels 1 and 2 are identities. Higher levels are only a conjecture and are
//! compared against the direct determinant, never assumed.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

use super::symbol::SymbolMatrix;

/// Determinant of the leading principal submatrix of size `n − r`, by LU elimination.
pub fn minor_determinant_direct(p: &SymbolMatrix, r: usize) -> Result<f64> {
    if r >= p.n {
        return Err(Error::InvalidArgument(format!(
            "minor index r = {r} must be below n = {}",
            p.n
        )));
    }
    let size = p.n - r;
    let dense = p.to_dense();
    Ok(dense
        .view((0, 0), (size, size))
        .into_owned()
        .lu()
        .determinant())
}

/// Conjectured closed form of `det P_{k−i}` for `1 ≤ i ≤ k`.
pub fn minor_formula_conjecture(p: &SymbolMatrix, i: usize) -> Result<f64> {
    if i == 0 || i > p.k {
        return Err(Error::InvalidArgument(format!(
            "level i = {i} must lie in 1..={}",
            p.k
        )));
    }
    let m = p.m();
    let (a, b) = (p.a, p.b);
    let mut sum_sq = 0.0;
    for s in 0..m {
        for t in 0..i {
            sum_sq += p.c(s, t).powi(2);
        }
    }
    let mut total = a.powi(m as i32 - 1) * b.powi(i as i32 - 1) * (a * b - sum_sq);
    for r in 2..=i.min(m) {
        let mut minors = 0.0;
        for rows in combinations(m, r) {
            let block = DMatrix::from_fn(r, r, |x, y| -p.c(rows[x], y));
            minors += block.determinant().powi(2);
        }
        total += a.powi((m - r) as i32) * b.powi((i - r) as i32) * minors;
    }
    Ok(total)
}

/// All increasing `r`-subsets of `0..m`.
pub(crate) fn combinations(m: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        let mut pos = r;
        while pos > 0 && idx[pos - 1] == m - r + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            return out;
        }
        idx[pos - 1] += 1;
        for q in pos..r {
            idx[q] = idx[q - 1] + 1;
        }
    }
}
