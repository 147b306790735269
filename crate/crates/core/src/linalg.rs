//! Exact rank of integer and rational matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Rank by fraction-free (Bareiss) elimination; every intermediate entry
/// stays an integer because each update is divided exactly by the previous
/// pivot.
pub fn rank_bareiss(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot_row) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot_row);
        let pivot = m[rank][col].clone();
        let (top, bottom) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in bottom.iter_mut() {
            let factor = row[col].clone();
            for (x, p) in row[col..cols].iter_mut().zip(&pivot_row[col..cols]) {
                *x = (&pivot * &*x - &factor * p) / &prev;
            }
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// Rank of a rational matrix: each row is scaled by the lcm of its
/// denominators, which does not change the rank.
pub fn rank_rational(m: &[Vec<BigRational>]) -> usize {
    let ints = m
        .iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
        })
        .collect();
    rank_bareiss(ints)
}
