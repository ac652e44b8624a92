//! Independent helpers for unit tests: hand-written Gaussian elimination and
//! the Pauli matrices.

use crate::linalg::{c, CMat, C64};

pub fn pauli() -> [CMat; 4] {
    let o = c(0.0);
    let l = c(1.0);
    let i = C64::new(0.0, 1.0);
    [
        CMat::from_row_slice(2, 2, &[l, o, o, l]),
        CMat::from_row_slice(2, 2, &[o, l, l, o]),
        CMat::from_row_slice(2, 2, &[o, -i, i, o]),
        CMat::from_row_slice(2, 2, &[l, o, o, -l]),
    ]
}

/// Rank of a list of real row vectors by partial-pivot row reduction.
pub fn rref_rank(rows: &[Vec<f64>]) -> usize {
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let scale = m
        .iter()
        .flatten()
        .fold(0.0_f64, |a, x| a.max(x.abs()))
        .max(1.0);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..m.len()).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())) else {
            break;
        };
        if m[p][col].abs() <= 1e-9 * scale {
            continue;
        }
        m.swap(rank, p);
        let pivot = m[rank][col];
        for r in 0..m.len() {
            if r != rank {
                let f = m[r][col] / pivot;
                for k in col..cols {
                    m[r][k] -= f * m[rank][k];
                }
            }
        }
        rank += 1;
    }
    rank
}
