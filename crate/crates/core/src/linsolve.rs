//! Square linear systems over `Z/p^k` by Gauss–Jordan elimination with unit pivots.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::modring::Modulus;

/// Solves `a · x = b` for a square `a` (row-major). Fails with
/// [`Error::NotInvertible`] when some column has no unit pivot, which for a
/// square system over a local ring means `a` is singular mod `p`.
pub fn solve(mut a: Vec<Vec<BigUint>>, mut b: Vec<BigUint>, m: &Modulus) -> Result<Vec<BigUint>> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| m.is_unit(&a[r][col]))
            .ok_or(Error::NotInvertible)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = m.inv(&a[col][col])?;
        for x in a[col][col..].iter_mut() {
            *x = m.mul(x, &inv);
        }
        b[col] = m.mul(&b[col], &inv);
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            let pivot_row = a[col].clone();
            for (x, y) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                let t = m.mul(&factor, y);
                *x = m.sub(x, &t);
            }
            let t = m.mul(&factor, &b[col]);
            b[r] = m.sub(&b[r], &t);
        }
    }
    Ok(b)
}
