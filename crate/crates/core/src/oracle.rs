//! Brute-force ground truth: residue enumeration over `Z/p^k`, Galois rings
//! `G(p^k, b)`, and exhaustive search for basic-irreducible divisors.
//!
//! Everything here is exponential on purpose and guarded by enumeration caps.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linsolve;
use crate::modring::Modulus;
use crate::multipoly::EvalRing;
use crate::unipoly::{self, Poly};

pub const DEFAULT_CAP: u64 = 1_000_000;

/// An element of a Galois ring: coefficients of `1, y, …, y^{b-1}`.
pub type GElem = Vec<BigUint>;

/// `G(p^k, b) = (Z/p^k)[y] / φ(y)` with `φ` monic and irreducible mod `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisRing {
    modulus: Modulus,
    phi: Poly,
}

impl GaloisRing {
    pub fn new(modulus: Modulus, phi: Poly) -> Result<Self> {
        let phi = unipoly::reduce(&phi, &modulus);
        let b = unipoly::degree(&phi).unwrap_or(0);
        if b == 0 || !phi[b].is_one() {
            return Err(Error::Invalid("defining polynomial must be monic of degree ≥ 1".into()));
        }
        let fp = modulus.residue_field();
        if !unipoly::is_irreducible(&unipoly::reduce(&phi, &fp), &fp) {
            return Err(Error::Invalid("defining polynomial is reducible mod p".into()));
        }
        Ok(Self { modulus, phi })
    }

    /// The ring defined by the first irreducible found by [`find_irreducible`].
    pub fn standard(modulus: Modulus, b: usize) -> Result<Self> {
        let phi = find_irreducible(modulus.p(), b);
        Self::new(modulus, phi)
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn b(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn phi(&self) -> &[BigUint] {
        &self.phi
    }

    /// `|G| = p^{kb}`.
    pub fn size(&self) -> BigUint {
        num_traits::pow(self.modulus.pk().clone(), self.b())
    }

    pub fn zero(&self) -> GElem {
        vec![BigUint::zero(); self.b()]
    }

    pub fn one(&self) -> GElem {
        self.from_int(&BigUint::one())
    }

    pub fn from_int(&self, c: &BigUint) -> GElem {
        let mut v = self.zero();
        v[0] = self.modulus.reduce(c);
        v
    }

    /// The generator `y` (for `b = 1` this is the root of the linear `φ`).
    pub fn y(&self) -> GElem {
        let mut v = vec![BigUint::zero(), BigUint::one()];
        v.resize(self.b().max(2), BigUint::zero());
        self.normalize(v)
    }

    fn normalize(&self, v: Vec<BigUint>) -> GElem {
        let r = unipoly::rem(&v, &self.phi, &self.modulus).expect("monic modulus");
        let mut out = r;
        out.resize(self.b(), BigUint::zero());
        out
    }

    pub fn add(&self, a: &GElem, b: &GElem) -> GElem {
        a.iter().zip(b).map(|(x, y)| self.modulus.add(x, y)).collect()
    }

    pub fn sub(&self, a: &GElem, b: &GElem) -> GElem {
        a.iter().zip(b).map(|(x, y)| self.modulus.sub(x, y)).collect()
    }

    pub fn mul(&self, a: &GElem, b: &GElem) -> GElem {
        self.normalize(unipoly::mul(a, b, &self.modulus))
    }

    pub fn pow(&self, a: &GElem, e: &BigUint) -> GElem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    pub fn is_zero(&self, a: &GElem) -> bool {
        a.iter().all(|c| c.is_zero())
    }

    pub fn is_unit(&self, a: &GElem) -> bool {
        a.iter().any(|c| self.modulus.is_unit(c))
    }

    /// Inverse by solving the `b × b` multiplication system.
    pub fn inv(&self, a: &GElem) -> Result<GElem> {
        let b = self.b();
        let mut matrix = vec![vec![BigUint::zero(); b]; b];
        let mut basis = self.one();
        let y = self.y();
        for col in 0..b {
            let prod = self.mul(a, &basis);
            for (row, x) in matrix.iter_mut().zip(prod) {
                row[col] = x;
            }
            basis = self.mul(&basis, &y);
        }
        let mut rhs = vec![BigUint::zero(); b];
        rhs[0] = BigUint::one();
        linsolve::solve(matrix, rhs, &self.modulus).map_err(|_| Error::NotAUnit)
    }

    /// The element with index `idx` in `[0, |G|)`, base `p^k` digits.
    pub fn element(&self, idx: &BigUint) -> GElem {
        let mut rest = idx.clone();
        (0..self.b())
            .map(|_| {
                let (q, r) = rest.div_rem(self.modulus.pk());
                rest = q;
                r
            })
            .collect()
    }

    /// Evaluates a polynomial with `Z/p^k` coefficients at `r`.
    pub fn eval(&self, f: &[BigUint], r: &GElem) -> GElem {
        let mut acc = self.zero();
        for c in f.iter().rev() {
            acc = self.add(&self.mul(&acc, r), &self.from_int(c));
        }
        acc
    }

    /// Evaluates a polynomial with coefficients in `G` at `r`.
    pub fn eval_g(&self, f: &[GElem], r: &GElem) -> GElem {
        let mut acc = self.zero();
        for c in f.iter().rev() {
            acc = self.add(&self.mul(&acc, r), c);
        }
        acc
    }
}

impl EvalRing for GaloisRing {
    type Elem = GElem;
    fn embed(&self, c: &BigUint) -> GElem {
        self.from_int(c)
    }
    fn add(&self, a: &GElem, b: &GElem) -> GElem {
        GaloisRing::add(self, a, b)
    }
    fn mul(&self, a: &GElem, b: &GElem) -> GElem {
        GaloisRing::mul(self, a, b)
    }
    fn is_zero(&self, a: &GElem) -> bool {
        GaloisRing::is_zero(self, a)
    }
}

fn check_cap(needed: &BigUint, cap: u64) -> Result<()> {
    if needed > &BigUint::from(cap) {
        Err(Error::CapExceeded {
            needed: needed.clone(),
            cap,
        })
    } else {
        Ok(())
    }
}

/// All residues `r` in `[0, p^k)` with `f(r) ≡ 0`, ascending.
pub fn brute_force_roots(f: &[BigInt], m: &Modulus) -> Result<Vec<BigUint>> {
    brute_force_roots_capped(f, m, DEFAULT_CAP)
}

pub fn brute_force_roots_capped(f: &[BigInt], m: &Modulus, cap: u64) -> Result<Vec<BigUint>> {
    check_cap(m.pk(), cap)?;
    let fr = unipoly::from_ints(f, m);
    let n = m.pk().to_u64().expect("under cap");
    Ok((0..n)
        .map(BigUint::from)
        .filter(|r| unipoly::eval(&fr, r, m).is_zero())
        .collect())
}

/// The first monic irreducible of degree `b` over `F_p`, scanning candidates
/// `c_0 + c_1 x + … + x^b` by the integer `Σ c_i p^i`.
pub fn find_irreducible(p: &BigUint, b: usize) -> Poly {
    assert!(b >= 1);
    let fp = Modulus::new(p.clone(), 1).expect("p must be prime");
    let mut n = BigUint::zero();
    loop {
        let mut cand: Poly = Vec::with_capacity(b + 1);
        let mut rest = n.clone();
        for _ in 0..b {
            let (q, r) = rest.div_rem(p);
            cand.push(r);
            rest = q;
        }
        cand.push(BigUint::one());
        if unipoly::is_irreducible(&cand, &fp) {
            return cand;
        }
        n += 1u32;
    }
}

/// Roots of `f` in `G`.
pub fn galois_roots(f: &[BigInt], g: &GaloisRing) -> Result<Vec<GElem>> {
    let size = g.size();
    check_cap(&size, DEFAULT_CAP)?;
    let fr = unipoly::from_ints(f, g.modulus());
    let n = size.to_u64().expect("under cap");
    Ok((0..n)
        .map(|i| g.element(&BigUint::from(i)))
        .filter(|r| g.is_zero(&g.eval(&fr, r)))
        .collect())
}

pub fn brute_force_galois_roots(f: &[BigInt], g: &GaloisRing) -> Result<BigUint> {
    Ok(BigUint::from(galois_roots(f, g)?.len()))
}

/// Monic degree-`b` divisors of `f` over `Z/p^k` that are irreducible mod `p`.
pub fn brute_force_basic_irreducible(f: &[BigInt], m: &Modulus, b: usize) -> Result<BigUint> {
    let fp = m.residue_field();
    let fr = unipoly::from_ints(f, m);
    let lifts_per = num_traits::pow(m.p_pow(m.k() - 1), b);
    let residues = num_traits::pow(m.p().clone(), b);
    check_cap(&(&residues * &lifts_per), DEFAULT_CAP)?;
    let mut count = BigUint::zero();
    let nres = residues.to_u64().expect("under cap");
    let nlift = lifts_per.to_u64().expect("under cap");
    let pk1 = m.p_pow(m.k() - 1);
    for i in 0..nres {
        let mut phi: Poly = Vec::with_capacity(b + 1);
        let mut rest = BigUint::from(i);
        for _ in 0..b {
            let (q, r) = rest.div_rem(m.p());
            phi.push(r);
            rest = q;
        }
        phi.push(BigUint::one());
        if !unipoly::is_irreducible(&phi, &fp) {
            continue;
        }
        for j in 0..nlift {
            let mut g = phi.clone();
            let mut rest = BigUint::from(j);
            for c in g.iter_mut().take(b) {
                let (q, r) = rest.div_rem(&pk1);
                *c = m.add(c, &m.mul(m.p(), &r));
                rest = q;
            }
            if unipoly::rem(&fr, &g, m)?.is_empty() {
                count += 1u32;
            }
        }
    }
    Ok(count)
}

/// The roots `y_0 = y, y_1, …, y_{b-1}` of `φ` in `G`, `y_i ≡ y^{p^i}` mod `p`,
/// obtained by Newton lifting.
pub fn frobenius_images_of_y(g: &GaloisRing) -> Result<Vec<GElem>> {
    let m = g.modulus();
    let dphi = unipoly::derivative(g.phi(), m);
    let y = g.y();
    let mut out = Vec::with_capacity(g.b());
    let mut z = y.clone();
    for i in 0..g.b() {
        if i > 0 {
            z = g.pow(&z, m.p());
        }
        let mut w = z.clone();
        for _ in 0..=m.k() {
            let num = g.eval(g.phi(), &w);
            if g.is_zero(&num) {
                break;
            }
            let den = g.inv(&g.eval(&dphi, &w))?;
            w = g.sub(&w, &g.mul(&num, &den));
        }
        out.push(w);
    }
    Ok(out)
}

/// The Frobenius conjugates `σ^i(r)` for `i < b`.
pub fn frobenius_conjugates(r: &GElem, g: &GaloisRing) -> Result<Vec<GElem>> {
    let ys = frobenius_images_of_y(g)?;
    Ok(ys
        .iter()
        .map(|yi| {
            let coeffs: Vec<GElem> = r.iter().map(|c| g.from_int(c)).collect();
            g.eval_g(&coeffs, yi)
        })
        .collect())
}

/// `∏_i (x - σ^i(r))`, which has coefficients in `Z/p^k`.
pub fn associated_factor(r: &GElem, g: &GaloisRing) -> Result<Poly> {
    let conj = frobenius_conjugates(r, g)?;
    let mut prod: Vec<GElem> = vec![g.one()];
    for c in &conj {
        let neg = g.sub(&g.zero(), c);
        let mut next = vec![g.zero(); prod.len() + 1];
        for (i, a) in prod.iter().enumerate() {
            next[i + 1] = g.add(&next[i + 1], a);
            next[i] = g.add(&next[i], &g.mul(a, &neg));
        }
        prod = next;
    }
    prod.iter()
        .map(|c| {
            if c.iter().skip(1).all(|x| x.is_zero()) {
                Ok(c[0].clone())
            } else {
                Err(Error::Invalid("conjugate product is not defined over Z/p^k".into()))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn md(p: u32, k: u32) -> Modulus {
        Modulus::new(BigUint::from(p), k).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    fn u(v: &[u32]) -> Poly {
        v.iter().map(|&c| BigUint::from(c)).collect()
    }

    #[test]
    fn roots_examples() {
        let r = brute_force_roots(&ints(&[0, 3, 1]), &md(3, 2)).unwrap();
        assert_eq!(r, u(&[0, 3, 6]));
        assert!(brute_force_roots(&ints(&[3, 0, 1]), &md(3, 2)).unwrap().is_empty());
        assert_eq!(brute_force_roots(&ints(&[0, 1]), &md(2, 2)).unwrap(), u(&[0]));
        assert!(matches!(
            brute_force_roots(&ints(&[0, 1]), &md(2, 30)),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn irreducible_search() {
        let two = BigUint::from(2u32);
        let three = BigUint::from(3u32);
        assert_eq!(find_irreducible(&two, 1), u(&[0, 1]));
        assert_eq!(find_irreducible(&two, 2), u(&[1, 1, 1]));
        assert_eq!(find_irreducible(&three, 2), u(&[1, 0, 1]));
    }

    #[test]
    fn galois_root_examples() {
        let g42 = GaloisRing::standard(md(2, 2), 2).unwrap();
        assert_eq!(g42.size(), BigUint::from(16u32));
        assert_eq!(brute_force_galois_roots(&ints(&[1, 1, 1]), &g42).unwrap(), BigUint::from(2u32));
        assert_eq!(brute_force_galois_roots(&ints(&[-1, 1]), &g42).unwrap(), BigUint::one());
        let g91 = GaloisRing::standard(md(3, 2), 1).unwrap();
        assert!(brute_force_galois_roots(&ints(&[3, 0, 1]), &g91).unwrap().is_zero());
    }

    #[test]
    fn basic_irreducible_examples() {
        let m9 = md(3, 2);
        assert_eq!(brute_force_basic_irreducible(&ints(&[0, 3, 1]), &m9, 1).unwrap(), BigUint::from(3u32));
        assert_eq!(brute_force_basic_irreducible(&ints(&[1, 1, 1]), &md(2, 2), 2).unwrap(), BigUint::one());
        assert!(brute_force_basic_irreducible(&ints(&[3, 0, 1]), &m9, 1).unwrap().is_zero());
    }

    #[test]
    fn conjugate_orbits_give_divisors() {
        for (p, k) in [(2u32, 2u32), (3, 2)] {
            let m = md(p, k);
            let g = GaloisRing::standard(m.clone(), 2).unwrap();
            // f = (x^2 + x + 1)(x^2 + 1) has irreducible quadratic factors mod 2 or 3.
            let f = ints(&[1, 1, 2, 1, 1]);
            let fr = unipoly::from_ints(&f, &m);
            let mut checked = 0;
            for r in galois_roots(&f, &g).unwrap() {
                if r[1..].iter().all(|c| (c % m.p()).is_zero()) {
                    continue;
                }
                checked += 1;
                let h = associated_factor(&r, &g).unwrap();
                assert_eq!(h.len(), 3);
                assert!(unipoly::rem(&fr, &h, &m).unwrap().is_empty());
            }
            assert!(checked > 0);
        }
    }

    #[test]
    fn cross_oracle_consistency() {
        let m = md(3, 2);
        let g = GaloisRing::standard(m.clone(), 1).unwrap();
        for f in [ints(&[0, 3, 1]), ints(&[2, 0, 1]), ints(&[0, 0, 1]), ints(&[-1, 0, 0, 1])] {
            let direct = brute_force_roots(&f, &m).unwrap().len();
            assert_eq!(brute_force_galois_roots(&f, &g).unwrap(), BigUint::from(direct));
        }
    }

    #[test]
    fn galois_inverse() {
        let g = GaloisRing::standard(md(3, 2), 2).unwrap();
        for i in 0..81u32 {
            let a = g.element(&BigUint::from(i));
            if g.is_unit(&a) {
                assert_eq!(g.mul(&a, &g.inv(&a).unwrap()), g.one());
            } else {
                assert!(g.inv(&a).is_err());
            }
        }
    }
}
