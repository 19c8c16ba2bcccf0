//! Gauss–Jordan elimination over any [`Field`], exact for rationals.

use crate::{Error, Field, Result};

/// Solves `A X = B` for square `A`, overwriting nothing; `b` holds the
/// right-hand sides as columns.
pub fn solve<T: Field>(a: &[Vec<T>], b: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let n = a.len();
    if a.iter().any(|row| row.len() != n) || b.len() != n {
        return Err(Error::InvalidArgument("solve: shape mismatch".into()));
    }
    let m = b.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().chain(rb.iter()).cloned().collect())
        .collect();
    for col in 0..n {
        // partial pivoting by magnitude; for rationals any nonzero pivot is exact
        let pivot = (col..n)
            .max_by(|&i, &j| aug[i][col].abs().partial_cmp(&aug[j][col].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .ok_or(Error::Singular)?;
        if aug[pivot][col].is_zero() {
            return Err(Error::Singular);
        }
        aug.swap(col, pivot);
        let inv = T::one() / aug[col][col].clone();
        for x in aug[col].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for row in 0..n {
            if row == col || aug[row][col].is_zero() {
                continue;
            }
            let factor = aug[row][col].clone();
            for k in col..n + m {
                let delta = factor.clone() * aug[col][k].clone();
                aug[row][k] = aug[row][k].clone() - delta;
            }
        }
    }
    Ok(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn invert<T: Field>(a: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let n = a.len();
    let eye: Vec<Vec<T>> = (0..n).map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect();
    solve(a, &eye)
}
