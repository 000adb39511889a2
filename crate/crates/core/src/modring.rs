//! Arithmetic in `Z/p^k` (and `F_p` when `k = 1`).
//!
//! Residues are stored as canonical [`BigUint`] values in `[0, p^k)`; the
//! [`Modulus`] supplies every ring operation so that polynomial code can
//! work on bare integers and reduce once per operation.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest `p` checked by plain trial division.
const TRIAL_DIVISION_LIMIT: u64 = 1_000_000_000_000;

/// The pair `(p, k)` with `p^k` cached.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Modulus {
    p: BigUint,
    k: u32,
    pk: BigUint,
}

impl Modulus {
    pub fn new(p: impl Into<BigUint>, k: u32) -> Result<Self> {
        let p = p.into();
        if k == 0 {
            return Err(Error::InvalidExponent);
        }
        if !is_prime(&p) {
            return Err(Error::NotPrime(p));
        }
        let pk = num_traits::pow(p.clone(), k as usize);
        Ok(Self { p, k, pk })
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn pk(&self) -> &BigUint {
        &self.pk
    }

    /// Same prime, precision `k`.
    pub fn with_precision(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidExponent);
        }
        let pk = num_traits::pow(self.p.clone(), k as usize);
        Ok(Self {
            p: self.p.clone(),
            k,
            pk,
        })
    }

    /// `F_p = R / pR`.
    pub fn residue_field(&self) -> Self {
        Self {
            p: self.p.clone(),
            k: 1,
            pk: self.p.clone(),
        }
    }

    pub fn is_field(&self) -> bool {
        self.k == 1
    }

    /// `p^e` as an integer (not reduced).
    pub fn p_pow(&self, e: u32) -> BigUint {
        num_traits::pow(self.p.clone(), e as usize)
    }

    pub fn elem(&self, value: impl Into<BigUint>) -> RElem<'_> {
        RElem {
            value: self.reduce(&value.into()),
            modulus: self,
        }
    }

    pub fn reduce(&self, a: &BigUint) -> BigUint {
        if a < &self.pk {
            a.clone()
        } else {
            a % &self.pk
        }
    }

    pub fn reduce_int(&self, a: &BigInt) -> BigUint {
        let pk = BigInt::from_biguint(Sign::Plus, self.pk.clone());
        a.mod_floor(&pk).to_biguint().expect("mod_floor is non-negative")
    }

    pub fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.pk {
            s - &self.pk
        } else {
            s
        }
    }

    pub fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            &self.pk - (b - a)
        }
    }

    pub fn neg(&self, a: &BigUint) -> BigUint {
        if a.is_zero() {
            BigUint::zero()
        } else {
            &self.pk - a
        }
    }

    pub fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a.is_zero() || b.is_zero() {
            return BigUint::zero();
        }
        (a * b) % &self.pk
    }

    pub fn pow(&self, a: &BigUint, e: &BigUint) -> BigUint {
        a.modpow(e, &self.pk)
    }

    pub fn is_unit(&self, a: &BigUint) -> bool {
        !(a % &self.p).is_zero()
    }

    /// `a = p^v u` with `p ∤ u`; zero maps to `(k, 1)`.
    pub fn valuation(&self, a: &BigUint) -> (u32, BigUint) {
        let a = self.reduce(a);
        if a.is_zero() {
            return (self.k, BigUint::one());
        }
        let mut v = 0;
        let mut u = a;
        loop {
            let (q, r) = u.div_rem(&self.p);
            if !r.is_zero() {
                break;
            }
            u = q;
            v += 1;
        }
        (v, u)
    }

    /// Only the valuation, clamped at `k`.
    pub fn val(&self, a: &BigUint) -> u32 {
        self.valuation(a).0
    }

    pub fn inv(&self, a: &BigUint) -> Result<BigUint> {
        let a = self.reduce(a);
        if !self.is_unit(&a) {
            return Err(Error::NotAUnit);
        }
        let ai = BigInt::from_biguint(Sign::Plus, a);
        let m = BigInt::from_biguint(Sign::Plus, self.pk.clone());
        let eg = ai.extended_gcd(&m);
        debug_assert!(eg.gcd.is_one());
        Ok(self.reduce_int(&eg.x))
    }

    /// Canonical residue of a small signed integer.
    pub fn from_i64(&self, a: i64) -> BigUint {
        self.reduce_int(&BigInt::from(a))
    }

    /// Signed representative in `(-p^k/2, p^k/2]`.
    pub fn centered(&self, a: &BigUint) -> BigInt {
        let half = &self.pk >> 1;
        let a = BigInt::from_biguint(Sign::Plus, a.clone());
        if a > BigInt::from_biguint(Sign::Plus, half) {
            a - BigInt::from_biguint(Sign::Plus, self.pk.clone())
        } else {
            a
        }
    }

    pub fn p_u64(&self) -> Option<u64> {
        self.p.to_u64()
    }
}

/// A canonical residue bound to its modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RElem<'m> {
    value: BigUint,
    modulus: &'m Modulus,
}

impl<'m> RElem<'m> {
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn modulus(&self) -> &'m Modulus {
        self.modulus
    }

    pub fn padic_valuation(&self) -> (u32, RElem<'m>) {
        let (v, u) = self.modulus.valuation(&self.value);
        (v, self.modulus.elem(u))
    }

    pub fn inv(&self) -> Result<RElem<'m>> {
        Ok(RElem {
            value: self.modulus.inv(&self.value)?,
            modulus: self.modulus,
        })
    }

    pub fn mul(&self, other: &RElem<'m>) -> RElem<'m> {
        RElem {
            value: self.modulus.mul(&self.value, &other.value),
            modulus: self.modulus,
        }
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }
}

/// Primality by trial division for desk-scale `p`, Miller–Rabin with fixed
/// prime bases above [`TRIAL_DIVISION_LIMIT`].
pub fn is_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    if let Some(small) = n.to_u64() {
        if small < TRIAL_DIVISION_LIMIT {
            return trial_division(small);
        }
    }
    const BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
    for b in BASES {
        if (n % b).is_zero() {
            return n == &BigUint::from(b);
        }
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for b in BASES {
        let mut x = BigUint::from(b).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn trial_division(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}
