//! Dense univariate polynomials over `Z/p^k`, stored as ascending coefficient
//! vectors with no trailing zeros.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::modring::Modulus;

pub type Poly = Vec<BigUint>;

pub fn trim(a: &mut Poly) {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
}

pub fn degree(a: &[BigUint]) -> Option<usize> {
    if a.is_empty() {
        None
    } else {
        Some(a.len() - 1)
    }
}

pub fn lc(a: &[BigUint]) -> Option<&BigUint> {
    a.last()
}

/// Reduce integer coefficients into `m`.
pub fn from_ints(coeffs: &[BigInt], m: &Modulus) -> Poly {
    let mut out: Poly = coeffs.iter().map(|c| m.reduce_int(c)).collect();
    trim(&mut out);
    out
}

/// Re-reduce canonical coefficients under a (smaller) modulus.
pub fn reduce(a: &[BigUint], m: &Modulus) -> Poly {
    let mut out: Poly = a.iter().map(|c| m.reduce(c)).collect();
    trim(&mut out);
    out
}

pub fn one() -> Poly {
    vec![BigUint::one()]
}

/// `x^n`.
pub fn monomial(n: usize) -> Poly {
    let mut v = vec![BigUint::zero(); n + 1];
    v[n] = BigUint::one();
    v
}

pub fn add(a: &[BigUint], b: &[BigUint], m: &Modulus) -> Poly {
    let n = a.len().max(b.len());
    let zero = BigUint::zero();
    let mut out: Poly = (0..n)
        .map(|i| m.add(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
        .collect();
    trim(&mut out);
    out
}

pub fn sub(a: &[BigUint], b: &[BigUint], m: &Modulus) -> Poly {
    let n = a.len().max(b.len());
    let zero = BigUint::zero();
    let mut out: Poly = (0..n)
        .map(|i| m.sub(a.get(i).unwrap_or(&zero), b.get(i).unwrap_or(&zero)))
        .collect();
    trim(&mut out);
    out
}

pub fn scale(a: &[BigUint], c: &BigUint, m: &Modulus) -> Poly {
    let mut out: Poly = a.iter().map(|x| m.mul(x, c)).collect();
    trim(&mut out);
    out
}

pub fn mul(a: &[BigUint], b: &[BigUint], m: &Modulus) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut acc = vec![BigUint::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            acc[i + j] += x * y;
        }
    }
    let mut out: Poly = acc.iter().map(|c| m.reduce(c)).collect();
    trim(&mut out);
    out
}

/// Division by a polynomial whose leading coefficient is a unit.
pub fn divrem(a: &[BigUint], b: &[BigUint], m: &Modulus) -> Result<(Poly, Poly)> {
    let db = degree(b).ok_or(Error::ZeroPolynomial)?;
    let inv = m.inv(&b[db])?;
    let mut r: Poly = a.to_vec();
    trim(&mut r);
    if r.len() <= db {
        return Ok((Vec::new(), r));
    }
    let mut q = vec![BigUint::zero(); r.len() - db];
    for i in (db..r.len()).rev() {
        if r[i].is_zero() {
            continue;
        }
        let c = m.mul(&r[i], &inv);
        for (j, bj) in b.iter().enumerate() {
            let t = m.mul(&c, bj);
            r[i - db + j] = m.sub(&r[i - db + j], &t);
        }
        q[i - db] = c;
    }
    trim(&mut r);
    trim(&mut q);
    Ok((q, r))
}

pub fn rem(a: &[BigUint], b: &[BigUint], m: &Modulus) -> Result<Poly> {
    Ok(divrem(a, b, m)?.1)
}

pub fn monic(a: &[BigUint], m: &Modulus) -> Result<Poly> {
    match lc(a) {
        None => Ok(Vec::new()),
        Some(c) => {
            let inv = m.inv(c)?;
            Ok(scale(a, &inv, m))
        }
    }
}

/// Monic gcd over a field (`m.k() == 1`).
pub fn gcd(a: &[BigUint], b: &[BigUint], m: &Modulus) -> Poly {
    debug_assert!(m.is_field());
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(&a, &b, m).expect("field division");
        a = b;
        b = r;
    }
    monic(&a, m).expect("field element")
}

/// `(g, s, t)` with `s a + t b = g` monic, over a field.
pub fn ext_gcd(a: &[BigUint], b: &[BigUint], m: &Modulus) -> (Poly, Poly, Poly) {
    debug_assert!(m.is_field());
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    trim(&mut r0);
    trim(&mut r1);
    let (mut s0, mut s1) = (one(), Vec::new());
    let (mut t0, mut t1) = (Vec::new(), one());
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, m).expect("field division");
        let s2 = sub(&s0, &mul(&q, &s1, m), m);
        let t2 = sub(&t0, &mul(&q, &t1, m), m);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    match lc(&r0) {
        None => (r0, s0, t0),
        Some(c) => {
            let inv = m.inv(c).expect("field element");
            (scale(&r0, &inv, m), scale(&s0, &inv, m), scale(&t0, &inv, m))
        }
    }
}

/// `base^e mod modpoly`.
pub fn powmod(base: &[BigUint], e: &BigUint, modpoly: &[BigUint], m: &Modulus) -> Result<Poly> {
    let mut result = rem(&one(), modpoly, m)?;
    let base = rem(base, modpoly, m)?;
    for i in (0..e.bits()).rev() {
        result = rem(&mul(&result, &result, m), modpoly, m)?;
        if e.bit(i) {
            result = rem(&mul(&result, &base, m), modpoly, m)?;
        }
    }
    Ok(result)
}

pub fn derivative(a: &[BigUint], m: &Modulus) -> Poly {
    let mut out: Poly = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| m.mul(c, &m.reduce(&BigUint::from(i))))
        .collect();
    trim(&mut out);
    out
}

/// For `a = b(x^p)` over `F_p`, returns `b` (Frobenius is the identity on `F_p`).
pub fn pth_root(a: &[BigUint], m: &Modulus) -> Poly {
    let p = m.p().to_usize().expect("p-th root extraction needs a word-size p");
    let mut out: Poly = a.iter().step_by(p).cloned().collect();
    trim(&mut out);
    out
}

pub fn eval(a: &[BigUint], x: &BigUint, m: &Modulus) -> BigUint {
    let mut acc = BigUint::zero();
    for c in a.iter().rev() {
        acc = m.add(&m.mul(&acc, x), c);
    }
    acc
}

/// Rabin's test over `F_p`.
pub fn is_irreducible(f: &[BigUint], m: &Modulus) -> bool {
    let Some(n) = degree(f) else { return false };
    if n == 0 {
        return false;
    }
    let f = monic(f, m).expect("field element");
    let x = rem(&monomial(1), &f, m).expect("monic modulus");
    let mut xp = x.clone();
    for i in 1..=n {
        xp = powmod(&xp, m.p(), &f, m).expect("monic modulus");
        let diff = sub(&xp, &x, m);
        if i < n {
            if degree(&gcd(&diff, &f, m)) != Some(0) {
                return false;
            }
        } else {
            return diff.is_empty();
        }
    }
    unreachable!()
}

/// Distinct-degree factorization of a squarefree monic `f` over `F_p`:
/// pairs `(b, product of all degree-b irreducible factors)`.
pub fn ddf(f: &[BigUint], m: &Modulus) -> Vec<(usize, Poly)> {
    let mut out = Vec::new();
    let mut rest = monic(f, m).expect("field element");
    let x = monomial(1);
    let mut xp = x.clone();
    let mut b = 0;
    while degree(&rest).unwrap_or(0) > 0 {
        b += 1;
        if 2 * b > degree(&rest).unwrap() {
            out.push((degree(&rest).unwrap(), rest));
            break;
        }
        xp = powmod(&xp, m.p(), &rest, m).expect("monic modulus");
        let g = gcd(&sub(&xp, &x, m), &rest, m);
        if degree(&g).unwrap_or(0) > 0 {
            rest = divrem(&rest, &g, m).expect("monic divisor").0;
            xp = rem(&xp, &rest, m).expect("monic modulus");
            out.push((b, g));
        }
    }
    out
}

/// Squarefree decomposition over `F_p`: pairs `(e, P_e)` with `f = lc · ∏ P_e^e`,
/// each `P_e` squarefree, monic, pairwise coprime, sorted by `e`.
pub fn squarefree(f: &[BigUint], m: &Modulus) -> Vec<(usize, Poly)> {
    let f = monic(f, m).expect("field element");
    let mut parts = squarefree_rec(&f, m);
    parts.sort_by_key(|(e, _)| *e);
    let mut merged: Vec<(usize, Poly)> = Vec::new();
    for (e, p) in parts {
        match merged.last_mut() {
            Some((le, lp)) if *le == e => *lp = mul(lp, &p, m),
            _ => merged.push((e, p)),
        }
    }
    merged
}

fn squarefree_rec(f: &[BigUint], m: &Modulus) -> Vec<(usize, Poly)> {
    let mut out = Vec::new();
    if degree(f).unwrap_or(0) == 0 {
        return out;
    }
    let p = m.p().to_usize().expect("word-size p");
    let df = derivative(f, m);
    if df.is_empty() {
        for (e, g) in squarefree_rec(&pth_root(f, m), m) {
            out.push((e * p, g));
        }
        return out;
    }
    let mut c = gcd(f, &df, m);
    let mut w = divrem(f, &c, m).unwrap().0;
    let mut i = 1;
    while degree(&w).unwrap_or(0) > 0 {
        let y = gcd(&w, &c, m);
        let z = divrem(&w, &y, m).unwrap().0;
        if degree(&z).unwrap_or(0) > 0 {
            out.push((i, z));
        }
        i += 1;
        w = y;
        c = divrem(&c, &w, m).unwrap().0;
    }
    if degree(&c).unwrap_or(0) > 0 {
        for (e, g) in squarefree_rec(&pth_root(&c, m), m) {
            out.push((e * p, g));
        }
    }
    out
}
