//! Dense-recursive multivariate polynomials over `Z/p^k` and arithmetic
//! modulo triangular ideals.
//!
//! A polynomial of depth `n` lives in `R[x_0, …, x_{n-1}]` and is stored as a
//! polynomial in its top variable `x_{n-1}` whose coefficients have depth
//! `n - 1`. When working modulo an ideal of length `l`, the free variable `x`
//! is simply `x_l`, so renaming `x` to `x_l` when an ideal grows costs nothing.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linsolve;
use crate::modring::Modulus;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MultiPoly {
    Const(BigUint),
    /// A polynomial in `x_var`; every coefficient has depth `var`.
    Univ { var: usize, coeffs: Vec<MultiPoly> },
}

/// A nontrivial factorization `h_index = ∏ factors` modulo the generators
/// below `index`, every factor monic in `x_index`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitEvidence {
    pub index: usize,
    pub factors: Vec<MultiPoly>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZeroDivTest {
    NotZeroDivisor,
    Split(SplitEvidence),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GcdOutcome {
    Gcd(MultiPoly),
    Split(SplitEvidence),
}

/// A coefficient ring in which polynomials can be evaluated.
pub trait EvalRing {
    type Elem: Clone;
    fn embed(&self, c: &BigUint) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
}

impl EvalRing for Modulus {
    type Elem = BigUint;
    fn embed(&self, c: &BigUint) -> BigUint {
        self.reduce(c)
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        Modulus::add(self, a, b)
    }
    fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        Modulus::mul(self, a, b)
    }
    fn is_zero(&self, a: &BigUint) -> bool {
        a.is_zero()
    }
}

impl MultiPoly {
    pub fn zero(depth: usize) -> Self {
        if depth == 0 {
            MultiPoly::Const(BigUint::zero())
        } else {
            MultiPoly::Univ {
                var: depth - 1,
                coeffs: Vec::new(),
            }
        }
    }

    pub fn one(depth: usize) -> Self {
        MultiPoly::Const(BigUint::one()).wrap(depth)
    }

    pub fn constant(c: BigUint, depth: usize) -> Self {
        MultiPoly::Const(c).wrap(depth)
    }

    /// `x_i` as a polynomial of the given depth.
    pub fn var(i: usize, depth: usize) -> Self {
        assert!(i < depth, "variable x_{i} does not fit depth {depth}");
        MultiPoly::Univ {
            var: i,
            coeffs: vec![MultiPoly::zero(i), MultiPoly::one(i)],
        }
        .wrap(depth)
    }

    /// A polynomial in the top variable of `depth` with constant coefficients.
    pub fn from_univariate(coeffs: &[BigUint], depth: usize) -> Self {
        assert!(depth >= 1);
        let mut out = MultiPoly::Univ {
            var: depth - 1,
            coeffs: coeffs
                .iter()
                .map(|c| MultiPoly::constant(c.clone(), depth - 1))
                .collect(),
        };
        out.trim();
        out
    }

    /// Builds a polynomial in `x_{depth-1}` from coefficients of depth `depth - 1`.
    pub fn from_coeffs(coeffs: Vec<MultiPoly>, depth: usize) -> Self {
        assert!(depth >= 1);
        debug_assert!(coeffs.iter().all(|c| c.depth() == depth - 1));
        let mut out = MultiPoly::Univ {
            var: depth - 1,
            coeffs,
        };
        out.trim();
        out
    }

    /// Embeds into a larger depth without changing the value.
    pub fn wrap(self, depth: usize) -> Self {
        let mut cur = self;
        while cur.depth() < depth {
            let d = cur.depth();
            cur = if cur.is_zero() {
                MultiPoly::zero(d + 1)
            } else {
                MultiPoly::Univ {
                    var: d,
                    coeffs: vec![cur],
                }
            };
        }
        cur
    }

    pub fn depth(&self) -> usize {
        match self {
            MultiPoly::Const(_) => 0,
            MultiPoly::Univ { var, .. } => var + 1,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            MultiPoly::Const(c) => c.is_zero(),
            MultiPoly::Univ { coeffs, .. } => coeffs.is_empty(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            MultiPoly::Const(c) => c.is_one(),
            MultiPoly::Univ { coeffs, .. } => coeffs.len() == 1 && coeffs[0].is_one(),
        }
    }

    pub fn as_const(&self) -> Option<&BigUint> {
        match self {
            MultiPoly::Const(c) => Some(c),
            MultiPoly::Univ { coeffs, .. } => match coeffs.len() {
                0 => None,
                1 => coeffs[0].as_const(),
                _ => None,
            },
        }
    }

    pub fn coeffs(&self) -> &[MultiPoly] {
        match self {
            MultiPoly::Const(_) => &[],
            MultiPoly::Univ { coeffs, .. } => coeffs,
        }
    }

    /// Degree in the top variable; `None` for zero.
    pub fn deg_top(&self) -> Option<usize> {
        match self {
            MultiPoly::Const(c) => (!c.is_zero()).then_some(0),
            MultiPoly::Univ { coeffs, .. } => coeffs.len().checked_sub(1),
        }
    }

    /// Degree in `x_i`, or `None` for zero.
    pub fn deg_in(&self, i: usize) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        match self {
            MultiPoly::Const(_) => Some(0),
            MultiPoly::Univ { var, coeffs } => {
                if *var == i {
                    Some(coeffs.len() - 1)
                } else if *var < i {
                    Some(0)
                } else {
                    coeffs.iter().filter_map(|c| c.deg_in(i)).max()
                }
            }
        }
    }

    /// Coefficient of `x_top^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> MultiPoly {
        match self {
            MultiPoly::Const(c) => {
                if i == 0 {
                    MultiPoly::Const(c.clone())
                } else {
                    MultiPoly::Const(BigUint::zero())
                }
            }
            MultiPoly::Univ { var, coeffs } => coeffs
                .get(i)
                .cloned()
                .unwrap_or_else(|| MultiPoly::zero(*var)),
        }
    }

    /// Leading coefficient in the top variable.
    pub fn lc_top(&self) -> MultiPoly {
        match self {
            MultiPoly::Const(c) => MultiPoly::Const(c.clone()),
            MultiPoly::Univ { var, coeffs } => coeffs
                .last()
                .cloned()
                .unwrap_or_else(|| MultiPoly::zero(*var)),
        }
    }

    fn trim(&mut self) {
        if let MultiPoly::Univ { coeffs, .. } = self {
            while coeffs.last().is_some_and(|c| c.is_zero()) {
                coeffs.pop();
            }
        }
    }

    /// Visits every scalar coefficient.
    pub fn for_each_scalar(&self, f: &mut impl FnMut(&BigUint)) {
        match self {
            MultiPoly::Const(c) => f(c),
            MultiPoly::Univ { coeffs, .. } => coeffs.iter().for_each(|c| c.for_each_scalar(f)),
        }
    }

    /// Applies `f` to every scalar coefficient and re-canonicalizes.
    pub fn map_scalars(&self, f: &impl Fn(&BigUint) -> BigUint) -> MultiPoly {
        match self {
            MultiPoly::Const(c) => MultiPoly::Const(f(c)),
            MultiPoly::Univ { var, coeffs } => {
                let mut out = MultiPoly::Univ {
                    var: *var,
                    coeffs: coeffs.iter().map(|c| c.map_scalars(f)).collect(),
                };
                out.trim();
                out
            }
        }
    }

    /// Reduces scalars into `m` (e.g. from `Z/p^k` down to `F_p`).
    pub fn reduce_scalars(&self, m: &Modulus) -> MultiPoly {
        self.map_scalars(&|c| m.reduce(c))
    }

    pub fn add(&self, other: &MultiPoly, m: &Modulus) -> MultiPoly {
        self.zip_with(other, &|a, b| m.add(a, b))
    }

    pub fn sub(&self, other: &MultiPoly, m: &Modulus) -> MultiPoly {
        self.zip_with(other, &|a, b| m.sub(a, b))
    }

    fn zip_with(
        &self,
        other: &MultiPoly,
        op: &impl Fn(&BigUint, &BigUint) -> BigUint,
    ) -> MultiPoly {
        debug_assert_eq!(self.depth(), other.depth());
        match (self, other) {
            (MultiPoly::Const(a), MultiPoly::Const(b)) => MultiPoly::Const(op(a, b)),
            (MultiPoly::Univ { var, coeffs: a }, MultiPoly::Univ { coeffs: b, .. }) => {
                let n = a.len().max(b.len());
                let zero = MultiPoly::zero(*var);
                let mut out = MultiPoly::Univ {
                    var: *var,
                    coeffs: (0..n)
                        .map(|i| {
                            a.get(i)
                                .unwrap_or(&zero)
                                .zip_with(b.get(i).unwrap_or(&zero), op)
                        })
                        .collect(),
                };
                out.trim();
                out
            }
            _ => panic!("depth mismatch"),
        }
    }

    pub fn neg(&self, m: &Modulus) -> MultiPoly {
        self.map_scalars(&|c| m.neg(c))
    }

    pub fn scale(&self, c: &BigUint, m: &Modulus) -> MultiPoly {
        self.map_scalars(&|x| m.mul(x, c))
    }

    /// Plain product, no ideal reduction.
    pub fn mul(&self, other: &MultiPoly, m: &Modulus) -> MultiPoly {
        mul_mod(self, other, &[], m)
    }

    /// Multiplies by `x_top^s`.
    pub fn shift_top(&self, s: usize) -> MultiPoly {
        match self {
            MultiPoly::Const(_) => panic!("no top variable"),
            MultiPoly::Univ { var, coeffs } => {
                if coeffs.is_empty() {
                    return self.clone();
                }
                let mut c = vec![MultiPoly::zero(*var); s];
                c.extend(coeffs.iter().cloned());
                MultiPoly::Univ {
                    var: *var,
                    coeffs: c,
                }
            }
        }
    }

    /// Evaluates at `point` (index `i` holds the value of `x_i`).
    pub fn eval<R: EvalRing>(&self, point: &[R::Elem], ring: &R) -> R::Elem {
        match self {
            MultiPoly::Const(c) => ring.embed(c),
            MultiPoly::Univ { var, coeffs } => {
                let x = &point[*var];
                let mut acc = ring.embed(&BigUint::zero());
                for c in coeffs.iter().rev() {
                    acc = ring.add(&ring.mul(&acc, x), &c.eval(point, ring));
                }
                acc
            }
        }
    }

    /// Substitutes `point` for `x_0..x_{len-1}`, leaving the top variable free:
    /// returns a univariate polynomial (ascending coefficients).
    pub fn project<R: EvalRing>(&self, point: &[R::Elem], ring: &R) -> Vec<R::Elem> {
        let mut out: Vec<R::Elem> = self.coeffs().iter().map(|c| c.eval(point, ring)).collect();
        while out.last().is_some_and(|c| ring.is_zero(c)) {
            out.pop();
        }
        out
    }
}

fn check_depth(a: &MultiPoly, gens: &[MultiPoly]) -> Result<()> {
    let n = a.depth();
    if n > gens.len() + 1 {
        return Err(Error::VariableMismatch {
            var: n - 1,
            ideal_len: gens.len(),
        });
    }
    Ok(())
}

/// Reduction modulo a triangular ideal `gens` (each `gens[i]` monic in `x_i`).
///
/// A polynomial whose depth equals `gens.len() + 1` carries the free variable
/// `x` on top and is reduced coefficient-wise.
pub fn reduce(a: &MultiPoly, gens: &[MultiPoly], m: &Modulus) -> Result<MultiPoly> {
    check_depth(a, gens)?;
    Ok(reduce_unchecked(a, gens, m))
}

fn reduce_unchecked(a: &MultiPoly, gens: &[MultiPoly], m: &Modulus) -> MultiPoly {
    match a {
        MultiPoly::Const(c) => MultiPoly::Const(m.reduce(c)),
        MultiPoly::Univ { var, coeffs } => {
            let n = var + 1;
            let prefix = &gens[..(n - 1).min(gens.len())];
            let mut c: Vec<MultiPoly> = coeffs.iter().map(|c| reduce_unchecked(c, prefix, m)).collect();
            if n <= gens.len() {
                div_top(&mut c, &gens[n - 1], prefix, m);
            }
            let mut out = MultiPoly::Univ { var: *var, coeffs: c };
            out.trim();
            out
        }
    }
}

/// Replaces `c` (coefficients in the top variable, already reduced modulo
/// `prefix`) by its remainder modulo the monic `b`.
fn div_top(c: &mut Vec<MultiPoly>, b: &MultiPoly, prefix: &[MultiPoly], m: &Modulus) {
    let bc = b.coeffs();
    let db = bc.len() - 1;
    debug_assert!(bc[db].is_one(), "generator must be monic in its top variable");
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    while c.len() > db {
        let top = c.pop().unwrap();
        let i = c.len();
        if !top.is_zero() {
            for (j, bj) in bc.iter().enumerate().take(db) {
                if bj.is_zero() {
                    continue;
                }
                let t = mul_mod(&top, bj, prefix, m);
                c[i - db + j] = c[i - db + j].sub(&t, m);
            }
        }
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
    }
}

/// Product of two polynomials reduced modulo `gens`; both inputs must be
/// reduced (or the ideal empty).
pub fn mul_mod(a: &MultiPoly, b: &MultiPoly, gens: &[MultiPoly], m: &Modulus) -> MultiPoly {
    debug_assert_eq!(a.depth(), b.depth());
    match (a, b) {
        (MultiPoly::Const(x), MultiPoly::Const(y)) => MultiPoly::Const(m.mul(x, y)),
        (MultiPoly::Univ { var, coeffs: ac }, MultiPoly::Univ { coeffs: bc, .. }) => {
            if ac.is_empty() || bc.is_empty() {
                return MultiPoly::zero(var + 1);
            }
            let n = var + 1;
            let prefix = &gens[..(n - 1).min(gens.len())];
            let mut c = vec![MultiPoly::zero(*var); ac.len() + bc.len() - 1];
            for (i, x) in ac.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in bc.iter().enumerate() {
                    if y.is_zero() {
                        continue;
                    }
                    let t = mul_mod(x, y, prefix, m);
                    c[i + j] = c[i + j].add(&t, m);
                }
            }
            if n <= gens.len() {
                div_top(&mut c, &gens[n - 1], prefix, m);
            }
            let mut out = MultiPoly::Univ { var: *var, coeffs: c };
            out.trim();
            out
        }
        _ => panic!("depth mismatch"),
    }
}

/// Quotient and remainder of `a` by `b` (monic in the free variable) over
/// `R[x̄]/gens`.
pub fn divrem_monic(
    a: &MultiPoly,
    b: &MultiPoly,
    gens: &[MultiPoly],
    m: &Modulus,
) -> (MultiPoly, MultiPoly) {
    let depth = gens.len() + 1;
    let bc = b.coeffs();
    let db = bc.len() - 1;
    debug_assert!(bc[db].is_one());
    let mut r: Vec<MultiPoly> = a.coeffs().to_vec();
    if r.len() <= db {
        return (MultiPoly::zero(depth), a.clone());
    }
    let mut q = vec![MultiPoly::zero(depth - 1); r.len() - db];
    for i in (db..r.len()).rev() {
        let top = std::mem::replace(&mut r[i], MultiPoly::zero(depth - 1));
        if top.is_zero() {
            continue;
        }
        for (j, bj) in bc.iter().enumerate().take(db) {
            let t = mul_mod(&top, bj, gens, m);
            r[i - db + j] = r[i - db + j].sub(&t, m);
        }
        q[i - db] = top;
    }
    (
        MultiPoly::from_coeffs(q, depth),
        MultiPoly::from_coeffs(r, depth),
    )
}

/// Degrees of the generators in their own top variables.
pub fn ideal_dims(gens: &[MultiPoly]) -> Vec<usize> {
    gens.iter()
        .map(|g| g.deg_top().expect("generator is nonzero"))
        .collect()
}

/// Coordinates of a reduced polynomial on the monomial basis of `R[x̄]/gens`
/// (mixed radix, `x_0` fastest).
pub fn flatten(a: &MultiPoly, dims: &[usize], out: &mut Vec<BigUint>) {
    match dims.split_last() {
        None => out.push(a.as_const().cloned().unwrap_or_default()),
        Some((&d, rest)) => {
            let depth = dims.len();
            for i in 0..d {
                let c = if a.depth() == depth {
                    a.coeff(i)
                } else {
                    MultiPoly::zero(depth - 1)
                };
                flatten(&c, rest, out);
            }
        }
    }
}

pub fn unflatten(v: &[BigUint], dims: &[usize]) -> MultiPoly {
    match dims.split_last() {
        None => MultiPoly::Const(v[0].clone()),
        Some((&d, rest)) => {
            let stride: usize = rest.iter().product();
            let coeffs = (0..d)
                .map(|i| unflatten(&v[i * stride..(i + 1) * stride], rest))
                .collect();
            MultiPoly::from_coeffs(coeffs, dims.len())
        }
    }
}

/// Monomial basis of `R[x̄]/gens` in [`flatten`] order.
pub fn basis(dims: &[usize]) -> Vec<MultiPoly> {
    let total: usize = dims.iter().product();
    (0..total)
        .map(|idx| {
            let mut v = vec![BigUint::zero(); total];
            v[idx] = BigUint::one();
            unflatten(&v, dims)
        })
        .collect()
}

/// Inverse of `a` modulo `gens` by solving the `deg(gens)`-dimensional
/// linear system `u · a = 1`.
pub fn invert_mod(a: &MultiPoly, gens: &[MultiPoly], m: &Modulus) -> Result<MultiPoly> {
    let n = gens.len();
    if a.depth() != n {
        return Err(Error::VariableMismatch {
            var: a.depth().saturating_sub(1),
            ideal_len: n,
        });
    }
    if n == 0 {
        let c = a.as_const().cloned().unwrap_or_default();
        return m.inv(&c).map(MultiPoly::Const).map_err(|_| Error::NotInvertible);
    }
    let dims = ideal_dims(gens);
    let size: usize = dims.iter().product();
    let a = reduce_unchecked(a, gens, m);
    let mut matrix = vec![vec![BigUint::zero(); size]; size];
    for (col, mono) in basis(&dims).iter().enumerate() {
        let mut v = Vec::with_capacity(size);
        flatten(&mul_mod(&a, mono, gens, m), &dims, &mut v);
        for (row, x) in v.into_iter().enumerate() {
            matrix[row][col] = x;
        }
    }
    let mut rhs = vec![BigUint::zero(); size];
    rhs[0] = BigUint::one();
    let u = linsolve::solve(matrix, rhs, m)?;
    Ok(unflatten(&u, &dims))
}

/// Makes `a` monic in the free variable given an inverse of its leading coefficient.
fn scale_by(a: &MultiPoly, u: &MultiPoly, gens: &[MultiPoly], m: &Modulus) -> MultiPoly {
    let depth = gens.len() + 1;
    MultiPoly::from_coeffs(
        a.coeffs().iter().map(|c| mul_mod(c, u, gens, m)).collect(),
        depth,
    )
}

fn sort_factors(factors: &mut [MultiPoly]) {
    factors.sort_by(|a, b| match a.deg_top().cmp(&b.deg_top()) {
        Ordering::Equal => a.cmp(b),
        o => o,
    });
}

/// Zerodivisor test of `a` (depth `gens.len()`) over a field modulus.
/// Zero and units report [`ZeroDivTest::NotZeroDivisor`].
pub fn test_zero_div(a: &MultiPoly, gens: &[MultiPoly], m: &Modulus) -> Result<ZeroDivTest> {
    match zero_div_search(a, gens, m)? {
        ZeroDivTest::Split(_) if invert_mod(a, gens, m).is_ok() => Ok(ZeroDivTest::NotZeroDivisor),
        r => Ok(r),
    }
}

/// The inverse of `a` modulo `gens`, or a generator factorization exposing
/// `a` as a zerodivisor. `a` must be nonzero and reduced.
pub fn unit_or_split(a: &MultiPoly, gens: &[MultiPoly], m: &Modulus) -> Result<std::result::Result<MultiPoly, SplitEvidence>> {
    if let Ok(u) = invert_mod(a, gens, m) {
        return Ok(Ok(u));
    }
    match zero_div_search(a, gens, m)? {
        ZeroDivTest::Split(ev) => Ok(Err(ev)),
        ZeroDivTest::NotZeroDivisor => Err(Error::NotInvertible),
    }
}

fn zero_div_search(a: &MultiPoly, gens: &[MultiPoly], m: &Modulus) -> Result<ZeroDivTest> {
    let n = gens.len();
    if a.depth() != n {
        return Err(Error::VariableMismatch {
            var: a.depth().saturating_sub(1),
            ideal_len: n,
        });
    }
    if n == 0 || a.is_zero() {
        return Ok(ZeroDivTest::NotZeroDivisor);
    }
    let prefix = &gens[..n - 1];
    if let ZeroDivTest::Split(ev) = test_zero_div(&a.lc_top(), prefix, m)? {
        return Ok(ZeroDivTest::Split(ev));
    }
    let h = &gens[n - 1];
    match gcd_mod(a, h, prefix, m)? {
        GcdOutcome::Split(ev) => Ok(ZeroDivTest::Split(ev)),
        GcdOutcome::Gcd(g) => {
            if g.deg_top().unwrap_or(0) == 0 {
                Ok(ZeroDivTest::NotZeroDivisor)
            } else {
                let (q, r) = divrem_monic(h, &g, prefix, m);
                debug_assert!(r.is_zero(), "gcd must divide the generator");
                let mut factors = vec![g, q];
                sort_factors(&mut factors);
                Ok(ZeroDivTest::Split(SplitEvidence {
                    index: n - 1,
                    factors,
                }))
            }
        }
    }
}

/// Monic gcd in the free variable of `a` and `b` (depth `gens.len() + 1`)
/// modulo `gens`, over a field modulus.
pub fn gcd_mod(a: &MultiPoly, b: &MultiPoly, gens: &[MultiPoly], m: &Modulus) -> Result<GcdOutcome> {
    let n = gens.len();
    for x in [a, b] {
        if x.depth() != n + 1 {
            return Err(Error::VariableMismatch {
                var: x.depth().saturating_sub(1),
                ideal_len: n,
            });
        }
    }
    let mut a = reduce_unchecked(a, gens, m);
    let mut b = reduce_unchecked(b, gens, m);
    loop {
        if b.is_zero() {
            if a.is_zero() {
                return Ok(GcdOutcome::Gcd(a));
            }
            let u = match unit_or_split(&a.lc_top(), gens, m)? {
                Ok(u) => u,
                Err(ev) => return Ok(GcdOutcome::Split(ev)),
            };
            return Ok(GcdOutcome::Gcd(scale_by(&a, &u, gens, m)));
        }
        let u = match unit_or_split(&b.lc_top(), gens, m)? {
            Ok(u) => u,
            Err(ev) => return Ok(GcdOutcome::Split(ev)),
        };
        let bm = scale_by(&b, &u, gens, m);
        let (_, c) = divrem_monic(&a, &bm, gens, m);
        a = bm;
        b = c;
    }
}

/// `f = p^alpha · g` with `p ∤ g`; zero gives `(k, 0)`.
pub fn content_valuation(f: &MultiPoly, m: &Modulus) -> (u32, MultiPoly) {
    let mut alpha = m.k();
    f.for_each_scalar(&mut |c| {
        if !c.is_zero() {
            alpha = alpha.min(m.val(c));
        }
    });
    if alpha >= m.k() {
        return (m.k(), MultiPoly::zero(f.depth()));
    }
    let pa = m.p_pow(alpha);
    (alpha, f.map_scalars(&|c| c / &pa))
}

/// `f_I(x̄, x_L + p·x)` reduced modulo `lifted` (length `L + 1`), for `f_I` of
/// depth `L + 1` whose top variable is the free `x`.
pub fn taylor_shift_reduce(f: &MultiPoly, lifted: &[MultiPoly], m: &Modulus) -> Result<MultiPoly> {
    let l = lifted.len();
    if l == 0 || f.depth() != l {
        return Err(Error::VariableMismatch {
            var: f.depth().saturating_sub(1),
            ideal_len: l.saturating_sub(1),
        });
    }
    let gen = &lifted[l - 1];
    let prefix = &lifted[..l - 1];
    let p = m.p().clone();
    let k = m.k() as usize;
    let mut acc: Vec<MultiPoly> = Vec::new();
    for c in f.coeffs().iter().rev() {
        let mut next = vec![MultiPoly::zero(l); (acc.len() + 1).min(k)];
        for (j, r) in acc.iter().enumerate() {
            if r.is_zero() {
                continue;
            }
            // x_L · r_j, reduced by the new generator.
            let mut shifted: Vec<MultiPoly> = r.shift_top(1).coeffs().to_vec();
            div_top(&mut shifted, gen, prefix, m);
            let t = MultiPoly::from_coeffs(shifted, l);
            next[j] = next[j].add(&t, m);
            if j + 1 < next.len() {
                next[j + 1] = next[j + 1].add(&r.scale(&p, m), m);
            }
        }
        let c0 = reduce_unchecked(&c.clone().wrap(l), lifted, m);
        next[0] = next[0].add(&c0, m);
        while next.last().is_some_and(|x| x.is_zero()) {
            next.pop();
        }
        acc = next;
    }
    Ok(MultiPoly::from_coeffs(acc, l + 1))
}

/// `x^q - x` reduced modulo `gens + ⟨g̃⟩`, with `g̃` monic in the free variable.
pub fn frobenius_reduce(
    q: &BigUint,
    gens: &[MultiPoly],
    gtilde: &MultiPoly,
    m: &Modulus,
) -> Result<MultiPoly> {
    let n = gens.len();
    check_depth(gtilde, gens)?;
    if gtilde.depth() != n + 1 || !gtilde.lc_top().is_one() {
        return Err(Error::Invalid("frobenius modulus must be monic in x".into()));
    }
    let depth = n + 1;
    if gtilde.deg_top() == Some(0) {
        return Ok(MultiPoly::zero(depth));
    }
    let mut full: Vec<MultiPoly> = gens.to_vec();
    full.push(gtilde.clone());
    let x = reduce_unchecked(&MultiPoly::var(n, depth), &full, m);
    let mut acc = MultiPoly::one(depth);
    for i in (0..q.bits()).rev() {
        acc = mul_mod(&acc, &acc, &full, m);
        if q.bit(i) {
            acc = mul_mod(&acc, &x, &full, m);
        }
    }
    Ok(acc.sub(&x, m))
}

/// Bézout cofactors `(s, t)` with `s g + t h = 1` over `F_p[x̄]/gens`, with
/// `deg s < deg h` and `deg t < deg g`, found by linear algebra so that
/// zerodivisors in the coefficient ring cause no trouble.
fn bezout(
    g: &MultiPoly,
    h: &MultiPoly,
    gens: &[MultiPoly],
    mp: &Modulus,
) -> Result<(MultiPoly, MultiPoly)> {
    let depth = gens.len() + 1;
    let ng = g.deg_top().unwrap_or(0);
    let nh = h.deg_top().unwrap_or(0);
    let total = ng + nh;
    let dims = ideal_dims(gens);
    let dsize: usize = dims.iter().product();
    let size = total * dsize;
    if size == 0 {
        return Ok((MultiPoly::zero(depth), MultiPoly::zero(depth)));
    }
    let monos = basis(&dims);
    let flatten_x = |a: &MultiPoly| -> Vec<BigUint> {
        let mut v = Vec::with_capacity(size);
        for i in 0..total {
            flatten(&a.coeff(i), &dims, &mut v);
        }
        v
    };
    let mut cols: Vec<Vec<BigUint>> = Vec::with_capacity(size);
    for (factor, count) in [(g, nh), (h, ng)] {
        for j in 0..count {
            for mono in &monos {
                let term = MultiPoly::from_coeffs(vec![mono.clone()], depth).shift_top(j);
                cols.push(flatten_x(&mul_mod(&term, factor, gens, mp)));
            }
        }
    }
    let mut matrix = vec![vec![BigUint::zero(); size]; size];
    for (c, col) in cols.iter().enumerate() {
        for (r, x) in col.iter().enumerate() {
            matrix[r][c] = x.clone();
        }
    }
    let mut rhs = vec![BigUint::zero(); size];
    rhs[0] = BigUint::one();
    let sol = linsolve::solve(matrix, rhs, mp).map_err(|_| Error::NotCoprimeModP)?;
    let build = |offset: usize, count: usize| {
        let coeffs = (0..count)
            .map(|j| unflatten(&sol[offset + j * dsize..offset + (j + 1) * dsize], &dims))
            .collect();
        MultiPoly::from_coeffs(coeffs, depth)
    };
    Ok((build(0, nh), build(nh * dsize, ng)))
}

/// Hensel-lifts a factorization of `target mod p` over `R[x̄]/lifted`.
///
/// `target` and every factor are monic in the free variable; `factors` live
/// over `F_p` modulo `lifted mod p` and multiply to `target mod p`. Returns
/// monic lifts over `Z/p^k` whose product is `target` modulo `lifted`.
pub fn lift_factorization(
    target: &MultiPoly,
    factors: &[MultiPoly],
    lifted: &[MultiPoly],
    m: &Modulus,
) -> Result<Vec<MultiPoly>> {
    let mp = m.residue_field();
    let field: Vec<MultiPoly> = lifted.iter().map(|g| g.reduce_scalars(&mp)).collect();
    let mut out = Vec::with_capacity(factors.len());
    let mut target = reduce_unchecked(target, lifted, m);
    for (i, g) in factors.iter().enumerate() {
        if i + 1 == factors.len() {
            out.push(target.clone());
            break;
        }
        let mut rest = MultiPoly::one(lifted.len() + 1);
        for f in &factors[i + 1..] {
            rest = mul_mod(&rest, f, &field, &mp);
        }
        let (gl, hl) = lift_pair(&target, g, &rest, lifted, &field, m, &mp)?;
        out.push(gl);
        target = hl;
    }
    Ok(out)
}

fn lift_pair(
    target: &MultiPoly,
    g: &MultiPoly,
    h: &MultiPoly,
    lifted: &[MultiPoly],
    field: &[MultiPoly],
    m: &Modulus,
    mp: &Modulus,
) -> Result<(MultiPoly, MultiPoly)> {
    let check = mul_mod(g, h, field, mp);
    if check != target.reduce_scalars(mp) {
        return Err(Error::InvalidFactorization(
            "factors do not multiply to the generator modulo p".into(),
        ));
    }
    let (s, t) = bezout(g, h, field, mp)?;
    let mut gl = g.clone();
    let mut hl = h.clone();
    for step in 1..m.k() {
        let e = target.sub(&mul_mod(&gl, &hl, lifted, m), m);
        if e.is_zero() {
            break;
        }
        let pe = m.p_pow(step);
        let e1 = e.map_scalars(&|c| {
            debug_assert!((c % &pe).is_zero());
            mp.reduce(&(c / &pe))
        });
        let dh = divrem_monic(&mul_mod(&s, &e1, field, mp), h, field, mp).1;
        let dg = divrem_monic(&mul_mod(&t, &e1, field, mp), g, field, mp).1;
        gl = gl.add(&dg.scale(&pe, m), m);
        hl = hl.add(&dh.scale(&pe, m), m);
    }
    debug_assert_eq!(mul_mod(&gl, &hl, lifted, m), *target);
    Ok((gl, hl))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn md(p: u32, k: u32) -> Modulus {
        Modulus::new(BigUint::from(p), k).unwrap()
    }

    fn c(v: u32, depth: usize) -> MultiPoly {
        MultiPoly::constant(BigUint::from(v), depth)
    }

    fn x(i: usize, depth: usize) -> MultiPoly {
        MultiPoly::var(i, depth)
    }

    /// `x_0^2 - x_0` as a generator.
    fn idem(m: &Modulus) -> MultiPoly {
        x(0, 1).mul(&x(0, 1), m).sub(&x(0, 1), m)
    }

    #[test]
    fn reduce_examples() {
        let m9 = md(3, 2);
        let x0 = x(0, 1);
        let cube = x0.mul(&x0, &m9).mul(&x0, &m9);
        let gen = x0.mul(&x0, &m9).sub(&c(2, 1), &m9);
        let r = reduce(&cube, std::slice::from_ref(&gen), &m9).unwrap();
        assert_eq!(r, x0.scale(&BigUint::from(2u32), &m9));
        assert_eq!(reduce(&r, std::slice::from_ref(&gen), &m9).unwrap(), r);

        let m2 = md(2, 1);
        let g0 = idem(&m2);
        let x1 = x(1, 2);
        let g1 = x1.mul(&x1, &m2).sub(&x1, &m2);
        let a = x(0, 2).mul(&x1, &m2).add(&x1.mul(&x1, &m2), &m2);
        let expect = x(0, 2).mul(&x1, &m2).add(&x1, &m2);
        assert_eq!(reduce(&a, &[g0, g1], &m2).unwrap(), expect);
    }

    #[test]
    fn reduce_rejects_extra_variables() {
        let m = md(5, 1);
        let a = x(2, 3);
        assert_eq!(
            reduce(&a, &[x(0, 1)], &m),
            Err(Error::VariableMismatch { var: 2, ideal_len: 1 })
        );
    }

    #[test]
    fn invert_examples() {
        let m5 = md(5, 1);
        let gen = x(0, 1).mul(&x(0, 1), &m5).sub(&c(2, 1), &m5);
        let inv = invert_mod(&x(0, 1), std::slice::from_ref(&gen), &m5).unwrap();
        assert_eq!(inv, x(0, 1).scale(&BigUint::from(3u32), &m5));
        assert_eq!(invert_mod(&c(1, 1), &[gen], &m5).unwrap(), c(1, 1));
        let m3 = md(3, 1);
        assert_eq!(
            invert_mod(&x(0, 1), &[idem(&m3)], &m3),
            Err(Error::NotInvertible)
        );
    }

    #[test]
    fn zero_div_examples() {
        let m3 = md(3, 1);
        let gens = [idem(&m3)];
        let res = test_zero_div(&x(0, 1), &gens, &m3).unwrap();
        assert_eq!(
            res,
            ZeroDivTest::Split(SplitEvidence {
                index: 0,
                factors: vec![x(0, 1), x(0, 1).sub(&c(1, 1), &m3)],
            })
        );
        let a = x(0, 1).add(&c(1, 1), &m3);
        assert_eq!(test_zero_div(&a, &gens, &m3).unwrap(), ZeroDivTest::NotZeroDivisor);
        assert_eq!(test_zero_div(&c(1, 1), &gens, &m3).unwrap(), ZeroDivTest::NotZeroDivisor);
    }

    #[test]
    fn gcd_examples() {
        let m5 = md(5, 1);
        let xx = x(0, 1);
        let a = xx.mul(&xx, &m5).sub(&c(1, 1), &m5);
        let b = xx.sub(&c(1, 1), &m5);
        assert_eq!(gcd_mod(&a, &b, &[], &m5).unwrap(), GcdOutcome::Gcd(b.clone()));
        let b3 = b.scale(&BigUint::from(3u32), &m5);
        assert_eq!(
            gcd_mod(&MultiPoly::zero(1), &b3, &[], &m5).unwrap(),
            GcdOutcome::Gcd(b)
        );

        let m2 = md(2, 1);
        let h0 = x(0, 1).mul(&x(0, 1), &m2).add(&x(0, 1), &m2);
        let a = x(1, 2);
        let b = x(0, 2).mul(&x(1, 2), &m2).add(&c(1, 2), &m2);
        let out = gcd_mod(&a, &b, &[h0], &m2).unwrap();
        assert_eq!(
            out,
            GcdOutcome::Split(SplitEvidence {
                index: 0,
                factors: vec![x(0, 1), x(0, 1).add(&c(1, 1), &m2)],
            })
        );
    }

    #[test]
    fn content_examples() {
        let m27 = md(3, 3);
        let f = MultiPoly::from_univariate(&[9u32.into(), 3u32.into()], 1);
        let (a, g) = content_valuation(&f, &m27);
        assert_eq!(a, 1);
        assert_eq!(g, MultiPoly::from_univariate(&[3u32.into(), 1u32.into()], 1));
        assert_eq!(content_valuation(&MultiPoly::zero(1), &m27), (3, MultiPoly::zero(1)));
        let m8 = md(2, 3);
        let f = MultiPoly::from_univariate(&[0u32.into(), 2u32.into(), 1u32.into()], 1);
        assert_eq!(content_valuation(&f, &m8), (0, f.clone()));
    }

    #[test]
    fn taylor_shift_examples() {
        // Over an ideal whose generator has high degree the shift is exact.
        let m9 = md(3, 2);
        let gen = MultiPoly::var(0, 1).shift_top(4);
        let f = MultiPoly::from_univariate(&[0u32.into(), 0u32.into(), 1u32.into()], 1);
        let got = taylor_shift_reduce(&f, std::slice::from_ref(&gen), &m9).unwrap();
        let x0 = x(0, 2);
        let xx = x(1, 2);
        let expect = x0
            .mul(&x0, &m9)
            .add(&x0.mul(&xx, &m9).scale(&BigUint::from(6u32), &m9), &m9);
        assert_eq!(got, expect);

        let konst = c(5, 1);
        assert_eq!(
            taylor_shift_reduce(&konst, std::slice::from_ref(&gen), &m9).unwrap(),
            c(5, 2)
        );

        let m8 = md(2, 3);
        let f = MultiPoly::var(0, 1);
        let got = taylor_shift_reduce(&f, &[gen], &m8).unwrap();
        assert_eq!(got, x(0, 2).add(&x(1, 2).scale(&BigUint::from(2u32), &m8), &m8));
    }

    #[test]
    fn frobenius_examples() {
        let m3 = md(3, 1);
        let g = MultiPoly::var(0, 1).shift_top(1);
        let r = frobenius_reduce(&BigUint::from(3u32), &[], &g, &m3).unwrap();
        assert_eq!(r, x(0, 1).scale(&BigUint::from(2u32), &m3));

        let m2 = md(2, 1);
        let g = x(0, 1).sub(&c(1, 1), &m2);
        assert!(frobenius_reduce(&BigUint::from(2u32), &[], &g, &m2).unwrap().is_zero());

        let g = MultiPoly::from_univariate(&[1u32.into(), 1u32.into(), 1u32.into()], 1);
        assert!(frobenius_reduce(&BigUint::from(4u32), &[], &g, &m2).unwrap().is_zero());
    }

    #[test]
    fn hensel_lift_over_ideal() {
        // Over Z/27 with prefix ⟨x_0^2 - 2⟩ lift x_1^2 - 1 ≡ (x_1 - 1)(x_1 + 1).
        let m = md(3, 3);
        let g0 = x(0, 1).mul(&x(0, 1), &m).sub(&c(2, 1), &m);
        let x1 = x(1, 2);
        let target = x1.mul(&x1, &m).sub(&c(10, 2), &m);
        let mp = m.residue_field();
        let f1 = x1.sub(&c(1, 2), &mp);
        let f2 = x1.add(&c(1, 2), &mp);
        let lifted = lift_factorization(&target, &[f1, f2], std::slice::from_ref(&g0), &m).unwrap();
        let prod = mul_mod(&lifted[0], &lifted[1], &[g0], &m);
        assert_eq!(prod, target);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn poly_strategy(depth: usize, deg: usize, p: u32) -> BoxedStrategy<MultiPoly> {
            if depth == 0 {
                (0..p).prop_map(|c| MultiPoly::Const(BigUint::from(c))).boxed()
            } else {
                prop::collection::vec(poly_strategy(depth - 1, deg, p), 0..=deg)
                    .prop_map(move |cs| MultiPoly::from_coeffs(cs, depth))
                    .boxed()
            }
        }

        proptest! {
            #[test]
            fn reduce_respects_degrees(
                a in poly_strategy(2, 5, 9),
                c0 in 0u32..9, c1 in 0u32..9, c2 in 0u32..9,
            ) {
                let m = md(3, 2);
                let g0 = MultiPoly::from_univariate(&[c0.into(), c1.into(), 0u32.into(), 1u32.into()], 1);
                let g1 = x(1, 2).shift_top(1).add(&x(0, 2).scale(&BigUint::from(c2), &m), &m);
                let gens = [g0, g1];
                let r = reduce(&a, &gens, &m).unwrap();
                prop_assert!(r.deg_in(0).is_none_or(|d| d < 3));
                prop_assert!(r.deg_in(1).is_none_or(|d| d < 2));
                prop_assert_eq!(reduce(&r, &gens, &m).unwrap(), r.clone());
                // a − r lies in the ideal, so reducing it gives zero.
                prop_assert!(reduce(&a.sub(&r, &m), &gens, &m).unwrap().is_zero());
            }

            #[test]
            fn content_reconstructs(a in poly_strategy(2, 3, 27)) {
                let m = md(3, 3);
                let (alpha, g) = content_valuation(&a, &m);
                let back = g.scale(&m.p_pow(alpha), &m);
                prop_assert_eq!(back, a);
            }
        }
    }
}
