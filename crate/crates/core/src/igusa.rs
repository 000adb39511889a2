//! Discriminants, Poincaré series prefixes and p-adic integral root counts.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modring::Modulus;
use crate::rootcount::{self, CountOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiscValuation {
    Finite(u64),
    /// The discriminant is zero.
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesPrefix {
    pub p: BigUint,
    pub f: Vec<BigInt>,
    /// `N_0, …, N_K`.
    pub coefficients: Vec<BigUint>,
    pub disc_valuation: DiscValuation,
}

fn trimmed(f: &[BigInt]) -> &[BigInt] {
    let n = f.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1);
    &f[..n]
}

/// Determinant by fraction-free elimination.
fn bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// `Res(a, b)` via the Sylvester matrix.
pub fn resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let (a, b) = (trimmed(a), trimmed(b));
    if a.is_empty() || b.is_empty() {
        return BigInt::zero();
    }
    let (m, n) = (a.len() - 1, b.len() - 1);
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    let mut rows = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for (j, c) in a.iter().rev().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in b.iter().rev().enumerate() {
            rows[n + i][i + j] = c.clone();
        }
    }
    bareiss(rows)
}

/// `(-1)^{n(n-1)/2} Res(f, f') / lc(f)`.
pub fn discriminant(f: &[BigInt]) -> Result<BigInt> {
    let f = trimmed(f);
    if f.len() < 2 {
        return Err(Error::Invalid("discriminant needs degree at least 1".into()));
    }
    let n = f.len() - 1;
    if n == 1 {
        return Ok(BigInt::one());
    }
    let df: Vec<BigInt> = f.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    let res = resultant(f, &df);
    let d = res / &f[n];
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -d } else { d })
}

pub fn discriminant_valuation(f: &[BigInt], p: &BigUint) -> Result<DiscValuation> {
    let d = discriminant(f)?;
    if d.is_zero() {
        return Ok(DiscValuation::Infinite);
    }
    let p = BigInt::from(p.clone());
    let mut d = d.abs();
    let mut v = 0;
    while (&d % &p).is_zero() {
        d /= &p;
        v += 1;
    }
    Ok(DiscValuation::Finite(v))
}

/// `N_0 = 1` and `N_i` = roots mod `p^i` for `i ≤ K`, computed in parallel
/// on the current rayon pool.
pub fn poincare_prefix(f: &[BigInt], p: &BigUint, big_k: u32) -> Result<SeriesPrefix> {
    poincare_prefix_with(f, p, big_k, &CountOptions::default())
}

pub fn poincare_prefix_with(f: &[BigInt], p: &BigUint, big_k: u32, opts: &CountOptions) -> Result<SeriesPrefix> {
    let tail = (1..=big_k)
        .into_par_iter()
        .map(|i| {
            let m = Modulus::new(p.clone(), i)?;
            Ok(rootcount::count_roots(f, &m, opts)?.root_count)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut coefficients = vec![BigUint::one()];
    coefficients.extend(tail);
    let disc_valuation = if trimmed(f).len() >= 2 {
        discriminant_valuation(f, p)?
    } else {
        DiscValuation::Infinite
    };
    Ok(SeriesPrefix {
        p: p.clone(),
        f: f.to_vec(),
        coefficients,
        disc_valuation,
    })
}

/// Sum of MSI degrees at precision `ell`.
pub fn cluster_count(f: &[BigInt], p: &BigUint, ell: u32) -> Result<BigUint> {
    let m = Modulus::new(p.clone(), ell)?;
    let report = rootcount::count_roots(f, &m, &CountOptions::default())?;
    Ok(BigUint::from(report.degree_sum()))
}

/// Number of roots of `f` in `Z_p`, with the precision `ell = v_p(disc f) + 1`
/// at which it was read off.
pub fn count_padic_roots(f: &[BigInt], p: &BigUint) -> Result<(BigUint, u32)> {
    let v = match discriminant_valuation(f, p)? {
        DiscValuation::Infinite => return Err(Error::NotSquarefree),
        DiscValuation::Finite(v) => v,
    };
    let ell = u32::try_from(v + 1).map_err(|_| Error::Invalid("discriminant valuation too large".into()))?;
    Ok((cluster_count(f, p, ell)?, ell))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;

    fn ints(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn big(v: &[u32]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn discriminants() {
        assert_eq!(discriminant(&ints(&[-1, 0, 1])).unwrap(), BigInt::from(4));
        assert_eq!(discriminant(&ints(&[3, 0, 1])).unwrap(), BigInt::from(-12));
        // x^3 + x + 1: -4 - 27
        assert_eq!(discriminant(&ints(&[1, 1, 0, 1])).unwrap(), BigInt::from(-31));
        // 2x^2 + 3x + 1: 9 - 8
        assert_eq!(discriminant(&ints(&[1, 3, 2])).unwrap(), BigInt::from(1));
        assert_eq!(discriminant(&ints(&[5, 7])).unwrap(), BigInt::from(1));
    }

    #[test]
    fn valuations() {
        let two = BigUint::from(2u32);
        let three = BigUint::from(3u32);
        assert_eq!(discriminant_valuation(&ints(&[-1, 0, 1]), &two).unwrap(), DiscValuation::Finite(2));
        assert_eq!(discriminant_valuation(&ints(&[3, 0, 1]), &three).unwrap(), DiscValuation::Finite(1));
        assert_eq!(discriminant_valuation(&ints(&[0, 0, 1]), &three).unwrap(), DiscValuation::Infinite);
    }

    #[test]
    fn prefixes() {
        let two = BigUint::from(2u32);
        let s = poincare_prefix(&ints(&[0, 1]), &two, 3).unwrap();
        assert_eq!(s.coefficients, big(&[1, 1, 1, 1]));
        let s = poincare_prefix(&ints(&[0, 0, 1]), &two, 5).unwrap();
        assert_eq!(s.coefficients, big(&[1, 1, 2, 2, 4, 4]));
        let s = poincare_prefix(&ints(&[3, 0, 1]), &BigUint::from(3u32), 2).unwrap();
        assert_eq!(s.coefficients, big(&[1, 1, 0]));
    }

    #[test]
    fn padic_examples() {
        let three = BigUint::from(3u32);
        assert_eq!(count_padic_roots(&ints(&[-1, 0, 1]), &three).unwrap().0, BigUint::from(2u32));
        assert_eq!(count_padic_roots(&ints(&[-7, 0, 1]), &three).unwrap().0, BigUint::from(2u32));
        assert_eq!(count_padic_roots(&ints(&[1, 0, 1]), &three).unwrap().0, BigUint::zero());
        assert_eq!(count_padic_roots(&ints(&[0, 0, 1]), &three), Err(Error::NotSquarefree));
        // x^2 - 1 over Z_2: v = 2, and ±1 are the only roots
        assert_eq!(
            count_padic_roots(&ints(&[-1, 0, 1]), &BigUint::from(2u32)).unwrap(),
            (BigUint::from(2u32), 3)
        );
        // x^2 - 17 splits over Z_2
        assert_eq!(count_padic_roots(&ints(&[-17, 0, 1]), &BigUint::from(2u32)).unwrap().0, BigUint::from(2u32));
        // x^2 - 5 does not
        assert_eq!(count_padic_roots(&ints(&[-5, 0, 1]), &BigUint::from(2u32)).unwrap().0, BigUint::zero());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn discriminant_matches_root_product(r in prop::collection::vec(-6i64..6, 1..=4)) {
            // disc of ∏ (x - r_i) is ∏_{i<j} (r_i - r_j)^2
            let mut f = ints(&[1]);
            for &ri in &r {
                let mut g = vec![BigInt::zero(); f.len() + 1];
                for (j, c) in f.iter().enumerate() {
                    g[j + 1] += c;
                    g[j] -= c * BigInt::from(ri);
                }
                f = g;
            }
            let mut expect = BigInt::one();
            for i in 0..r.len() {
                for j in i + 1..r.len() {
                    let d = BigInt::from(r[i] - r[j]);
                    expect *= &d * &d;
                }
            }
            prop_assert_eq!(discriminant(&f).unwrap(), expect);
        }

        #[test]
        fn prefix_matches_brute_force(
            p in prop::sample::select(vec![2u32, 3, 5]),
            coeffs in prop::collection::vec(-12i64..12, 1..=4),
        ) {
            let mut c = coeffs.clone();
            c.push(1);
            let p = BigUint::from(p);
            let s = poincare_prefix(&ints(&c), &p, 4).unwrap();
            for i in 1..=4u32 {
                let m = Modulus::new(p.clone(), i).unwrap();
                let bf = oracle::brute_force_roots(&ints(&c), &m).unwrap();
                prop_assert_eq!(&s.coefficients[i as usize], &BigUint::from(bf.len()));
                prop_assert!(s.coefficients[i as usize] <= &s.coefficients[i as usize - 1] * &p);
            }
        }
    }
}
