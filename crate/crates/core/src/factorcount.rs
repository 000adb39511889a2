//! Counting basic-irreducible factors modulo `p^k`.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modring::Modulus;
use crate::rootcount::{self, CountOptions};
use crate::unipoly::{self, Poly};

/// A factor of `f` that is `(φ_1 ⋯ φ_t)^e` modulo `p`, all `φ_j` irreducible
/// of degree `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub g: Poly,
    pub b: usize,
    pub e: usize,
    pub t: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentCount {
    pub b: usize,
    pub e: usize,
    pub t: usize,
    pub galois_root_count: BigUint,
    pub count: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorReport {
    pub total: BigUint,
    pub components: Vec<ComponentCount>,
}

impl FactorReport {
    /// Counts summed over components of the same degree `b`.
    pub fn by_degree(&self) -> BTreeMap<usize, BigUint> {
        let mut out = BTreeMap::new();
        for c in &self.components {
            *out.entry(c.b).or_insert_with(BigUint::zero) += &c.count;
        }
        out
    }
}

/// Lifts `f ≡ g·h (mod p)` to `f ≡ g*·h* (mod p^k)` by precision doubling.
/// `f` must be monic over `Z/p^k`; `g` and `h` are monic over `F_p`.
pub fn hensel_lift_coprime(f: &[BigUint], g: &[BigUint], h: &[BigUint], m: &Modulus) -> Result<(Poly, Poly)> {
    let fp = m.residue_field();
    let g = unipoly::reduce(g, &fp);
    let h = unipoly::reduce(h, &fp);
    for x in [&g, &h] {
        if unipoly::lc(x).is_none_or(|c| !c.is_one()) {
            return Err(Error::InvalidFactorization("factors must be monic".into()));
        }
    }
    if unipoly::mul(&g, &h, &fp) != unipoly::reduce(f, &fp) {
        return Err(Error::InvalidFactorization("g·h differs from f modulo p".into()));
    }
    let (d, s, t) = unipoly::ext_gcd(&g, &h, &fp);
    if unipoly::degree(&d) != Some(0) {
        return Err(Error::NotCoprimeModP);
    }
    let (mut g, mut h, mut s, mut t) = (g, h, s, t);
    let mut prec = 1;
    while prec < m.k() {
        prec = (2 * prec).min(m.k());
        let mm = m.with_precision(prec)?;
        let fm = unipoly::reduce(f, &mm);
        let e = unipoly::sub(&fm, &unipoly::mul(&g, &h, &mm), &mm);
        let (q, r) = unipoly::divrem(&unipoly::mul(&s, &e, &mm), &h, &mm)?;
        let g2 = unipoly::add(
            &unipoly::add(&g, &unipoly::mul(&t, &e, &mm), &mm),
            &unipoly::mul(&q, &g, &mm),
            &mm,
        );
        let h2 = unipoly::add(&h, &r, &mm);
        let b = unipoly::sub(
            &unipoly::add(&unipoly::mul(&s, &g2, &mm), &unipoly::mul(&t, &h2, &mm), &mm),
            &unipoly::one(),
            &mm,
        );
        let (c, d) = unipoly::divrem(&unipoly::mul(&s, &b, &mm), &h2, &mm)?;
        s = unipoly::sub(&s, &d, &mm);
        t = unipoly::sub(
            &unipoly::sub(&t, &unipoly::mul(&t, &b, &mm), &mm),
            &unipoly::mul(&c, &g2, &mm),
            &mm,
        );
        g = g2;
        h = h2;
    }
    Ok((g, h))
}

/// Lifts pairwise coprime monic factors of `f mod p` along a balanced tree.
fn multifactor_lift(f: &[BigUint], factors: &[Poly], m: &Modulus) -> Result<Vec<Poly>> {
    if factors.len() == 1 {
        return Ok(vec![f.to_vec()]);
    }
    let fp = m.residue_field();
    let mid = factors.len() / 2;
    let prod = |fs: &[Poly]| fs.iter().fold(unipoly::one(), |acc, x| unipoly::mul(&acc, x, &fp));
    let (a, b) = hensel_lift_coprime(f, &prod(&factors[..mid]), &prod(&factors[mid..]), m)?;
    let mut out = multifactor_lift(&a, &factors[..mid], m)?;
    out.extend(multifactor_lift(&b, &factors[mid..], m)?);
    Ok(out)
}

fn monic_input(f: &[BigInt], m: &Modulus) -> Result<Poly> {
    let f = unipoly::from_ints(f, m);
    let lc = unipoly::lc(&f).ok_or(Error::ZeroPolynomial)?;
    if !m.is_unit(lc) {
        return Err(Error::NotMonicModP);
    }
    unipoly::monic(&f, m)
}

/// Splits `f` into components of fixed degree and multiplicity, lifted to
/// `Z/p^k`, in ascending `(b, e)` order.
pub fn decompose(f: &[BigInt], m: &Modulus) -> Result<Vec<Component>> {
    let f = monic_input(f, m)?;
    if unipoly::degree(&f) == Some(0) {
        return Ok(Vec::new());
    }
    let fp = m.residue_field();
    let fbar = unipoly::reduce(&f, &fp);
    let mut classes: Vec<(usize, usize, Poly)> = Vec::new();
    for (e, part) in unipoly::squarefree(&fbar, &fp) {
        for (b, q) in unipoly::ddf(&part, &fp) {
            classes.push((b, e, q));
        }
    }
    classes.sort_by_key(|(b, e, _)| (*b, *e));
    let powered: Vec<Poly> = classes
        .iter()
        .map(|(_, e, q)| (0..*e).fold(unipoly::one(), |acc, _| unipoly::mul(&acc, q, &fp)))
        .collect();
    let lifted = multifactor_lift(&f, &powered, m)?;
    Ok(classes
        .into_iter()
        .zip(lifted)
        .map(|((b, e, q), g)| Component {
            t: unipoly::degree(&q).unwrap() / b,
            g,
            b,
            e,
        })
        .collect())
}

fn to_ints(g: &[BigUint]) -> Vec<BigInt> {
    g.iter().map(|c| BigInt::from(c.clone())).collect()
}

pub fn count_component(c: &Component, m: &Modulus) -> Result<ComponentCount> {
    let opts = CountOptions {
        frobenius_q: Some(num_traits::pow(m.p().clone(), c.b)),
        ..CountOptions::default()
    };
    let report = rootcount::count_roots(&to_ints(&c.g), m, &opts)?;
    let galois_root_count = report.root_count;
    let (count, rem) = galois_root_count.div_rem(&BigUint::from(c.b));
    if !rem.is_zero() {
        return Err(Error::DivisibilityViolation {
            count: galois_root_count,
            b: c.b,
        });
    }
    Ok(ComponentCount {
        b: c.b,
        e: c.e,
        t: c.t,
        galois_root_count,
        count,
    })
}

/// Counts monic factors of `f mod p^k` that are irreducible mod `p`.
/// Components are counted in parallel on the current rayon pool.
pub fn count_basic_irreducible(f: &[BigInt], m: &Modulus) -> Result<FactorReport> {
    let components = decompose(f, m)?;
    let counts = components
        .par_iter()
        .map(|c| count_component(c, m))
        .collect::<Result<Vec<_>>>()?;
    let total = counts.iter().map(|c| &c.count).sum();
    Ok(FactorReport {
        total,
        components: counts,
    })
}
