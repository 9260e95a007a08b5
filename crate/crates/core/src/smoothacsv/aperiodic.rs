//! Aperiodicity of the support of `S` in `H = u·(1 − S)`: the exponent
//! vectors must generate the whole integer lattice.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::gfparse::RationalGF;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrictMinimality {
    ProvedAperiodic,
    Unverified,
}

impl StrictMinimality {
    pub fn as_str(self) -> &'static str {
        match self {
            StrictMinimality::ProvedAperiodic => "PROVED_APERIODIC",
            StrictMinimality::Unverified => "UNVERIFIED",
        }
    }
}

/// Index of the lattice spanned by `vectors` in `Z^dim`, or `None` when
/// the span has lower rank.
pub fn lattice_index(vectors: &[Vec<i64>], dim: usize) -> Option<BigInt> {
    let mut rows: Vec<Vec<BigInt>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut index = BigInt::one();
    let mut r = 0;
    for col in 0..dim {
        // Euclid on the column until a single nonzero entry remains at row r
        loop {
            let nz: Vec<usize> = (r..rows.len()).filter(|&i| !rows[i][col].is_zero()).collect();
            if nz.is_empty() {
                return None;
            }
            let piv = *nz
                .iter()
                .min_by_key(|&&i| rows[i][col].abs())
                .unwrap();
            rows.swap(r, piv);
            if nz.len() == 1 && nz[0] == piv {
                break;
            }
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let f = rows[i][col].div_floor(&rows[r][col]);
                let pivot_row = rows[r].clone();
                for (x, p) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
                if !rows[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        index *= rows[r][col].abs();
        r += 1;
    }
    Some(index)
}

/// Strict minimality via aperiodicity. Needs the series form of `H`; the
/// support is read from a finite prefix of `S`, which can only
/// under-approximate the lattice, so a full-lattice answer is sound.
pub fn aperiodicity_strictness(gf: &RationalGF) -> StrictMinimality {
    let Some(sf) = gf.series_form() else {
        return StrictMinimality::Unverified;
    };
    let deg_h = gf.h().degree_in(crate::gfparse::T) as usize;
    let order = deg_h + 2 * sf.u.degree().unwrap_or(0) + 8;
    let support: Vec<Vec<i64>> = sf
        .support(order)
        .into_iter()
        .map(|v| v.into_iter().map(i64::from).collect())
        .collect();
    match lattice_index(&support, gf.d() + 1) {
        Some(i) if i.is_one() => StrictMinimality::ProvedAperiodic,
        _ => StrictMinimality::Unverified,
    }
}
