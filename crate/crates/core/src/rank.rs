//! Rank over ℝ of a set of complex matrices.
//!
//! Each n×n matrix is flattened to a real vector of length 2n² (real parts,
//! then imaginary parts). Exact inputs go through fraction-free (Bareiss)
//! elimination on big integers; floating inputs use the SVD with singular
//! values below `RANK_RTOL × σ_max` counted as zero.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::matrix::CMatrix;
use crate::scalar::Scalar;

pub const RANK_RTOL: f64 = 1e-9;

fn flatten<T: Scalar>(m: &CMatrix<T>) -> impl Iterator<Item = T> + '_ {
    m.entries()
        .iter()
        .map(|z| z.re)
        .chain(m.entries().iter().map(|z| z.im))
}

pub fn real_rank<T: Scalar>(mats: &[CMatrix<T>]) -> usize {
    if mats.is_empty() {
        return 0;
    }
    let n = mats[0].n();
    assert!(mats.iter().all(|m| m.n() == n), "all matrices must share a size");
    if T::EXACT {
        let rows = mats
            .iter()
            .map(|m| {
                flatten(m)
                    .map(|t| BigInt::from(t.to_i128().expect("exact scalar fits in i128")))
                    .collect()
            })
            .collect();
        bareiss_rank(rows)
    } else {
        let rows: Vec<Vec<f64>> = mats
            .iter()
            .map(|m| flatten(m).map(|t| t.to_f64_lossy()).collect())
            .collect();
        svd_rank(&rows)
    }
}

/// Float path regardless of scalar type; used to cross-check the exact path.
pub fn real_rank_svd<T: Scalar>(mats: &[CMatrix<T>]) -> usize {
    if mats.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<f64>> = mats
        .iter()
        .map(|m| flatten(m).map(|t| t.to_f64_lossy()).collect())
        .collect();
    svd_rank(&rows)
}

fn svd_rank(rows: &[Vec<f64>]) -> usize {
    let (r, c) = (rows.len(), rows[0].len());
    let m = nalgebra::DMatrix::from_fn(r, c, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_RTOL * max).count()
}

fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    let cols = a[0].len();
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for k in col + 1..cols {
                let v = (&a[rank][col] * &a[r][k] - &a[r][col] * &a[rank][k]) / &prev;
                a[r][k] = v;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}
