#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use ppcount::modring::Modulus;
use ppcount::multipoly::{self, MultiPoly};
use ppcount::splitideal::TriangularIdeal;
use ppcount::unipoly;

pub fn md(p: u32, k: u32) -> Modulus {
    Modulus::new(BigUint::from(p), k).unwrap()
}

pub fn ints(c: &[i64]) -> Vec<BigInt> {
    c.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

/// Random monic polynomial of degree `deg` over `Z/p^k`, either with uniform
/// coefficients or built from clustered roots plus a `p`-adic perturbation.
pub fn random_monic<R: Rng>(rng: &mut R, p: u32, k: u32, deg: usize) -> Vec<BigInt> {
    let pk = (p as i64).pow(k);
    if rng.gen_bool(0.4) {
        let mut c: Vec<BigInt> = (0..deg).map(|_| BigInt::from(rng.gen_range(0..pk))).collect();
        c.push(BigInt::one());
        return c;
    }
    let mut f = ints(&[1]);
    let mut roots: Vec<i64> = Vec::new();
    for _ in 0..deg {
        let r = if !roots.is_empty() && rng.gen_bool(0.5) {
            let base = *roots.choose(rng).unwrap();
            let j = rng.gen_range(1..=k);
            base + (p as i64).pow(j - 1) * rng.gen_range(0..p as i64) * if j > 1 { 1 } else { 0 }
        } else {
            rng.gen_range(0..pk)
        };
        roots.push(r);
        let mut g = vec![BigInt::zero(); f.len() + 1];
        for (i, c) in f.iter().enumerate() {
            g[i + 1] += c;
            g[i] -= c * BigInt::from(r);
        }
        f = g;
    }
    if rng.gen_bool(0.5) {
        let j = rng.gen_range(1..=k);
        let scale = BigInt::from((p as i64).pow(j));
        for c in f.iter_mut().take(deg) {
            *c += &scale * BigInt::from(rng.gen_range(0..p as i64));
        }
    }
    for c in f.iter_mut() {
        *c = ((&*c % pk) + pk) % pk;
    }
    f
}

/// A random polynomial of the given depth with `deg_bound[i]` coefficients in `x_i`.
pub fn random_poly<R: Rng>(rng: &mut R, dims: &[usize], m: &Modulus) -> MultiPoly {
    let p = m.p_u64().unwrap();
    if dims.is_empty() {
        return MultiPoly::constant(BigUint::from(rng.gen_range(0..p)), 0);
    }
    let n = dims.len();
    let coeffs = (0..dims[n - 1]).map(|_| random_poly(rng, &dims[..n - 1], m)).collect();
    MultiPoly::from_coeffs(coeffs, n)
}

fn linear_product(roots: &[u64], var: usize, depth: usize, m: &Modulus) -> MultiPoly {
    let x = MultiPoly::var(var, depth);
    roots.iter().fold(MultiPoly::one(depth), |acc, &r| {
        let t = x.sub(&MultiPoly::constant(BigUint::from(r), depth), m);
        acc.mul(&t, m)
    })
}

/// A random split ideal over `F_p` with its zeroset, of the given fibre
/// degrees, built by interpolating one product of linear factors per fibre.
pub fn random_split_ideal<R: Rng>(rng: &mut R, m: &Modulus, degrees: &[usize]) -> (TriangularIdeal, Vec<Vec<BigUint>>) {
    let p = m.p_u64().unwrap();
    let all: Vec<u64> = (0..p).collect();
    let mut gens: Vec<MultiPoly> = Vec::new();
    let mut zeros: Vec<Vec<u64>> = vec![Vec::new()];
    for (i, &d) in degrees.iter().enumerate() {
        let depth = i + 1;
        let mut h = MultiPoly::zero(depth);
        let mut next = Vec::new();
        for z in &zeros {
            let fibre: Vec<u64> = all.choose_multiple(rng, d).cloned().collect();
            let basis = lagrange(z, &zeros, m);
            let prod = linear_product(&fibre, i, depth, m);
            h = h.add(&basis.wrap(depth).mul(&prod, m), m);
            for &c in &fibre {
                let mut nz = z.clone();
                nz.push(c);
                next.push(nz);
            }
        }
        let h = multipoly::reduce(&h, &gens, m).unwrap();
        gens.push(h);
        zeros = next;
    }
    let ideal = TriangularIdeal::new(gens, m).unwrap();
    let mut zs: Vec<Vec<BigUint>> = zeros
        .into_iter()
        .map(|z| z.into_iter().map(BigUint::from).collect())
        .collect();
    zs.sort();
    (ideal, zs)
}

/// The polynomial in `x_0..x_{l-1}` that is 1 at `target` and 0 at the other points.
fn lagrange(target: &[u64], points: &[Vec<u64>], m: &Modulus) -> MultiPoly {
    let depth = target.len();
    let mut acc = MultiPoly::one(depth);
    for j in 0..depth {
        // points agreeing with target on coordinates < j, differing at j
        let mut others: Vec<u64> = points
            .iter()
            .filter(|q| q[..j] == target[..j] && q[j] != target[j])
            .map(|q| q[j])
            .collect();
        others.sort();
        others.dedup();
        let x = MultiPoly::var(j, depth);
        for o in others {
            let num = x.sub(&MultiPoly::constant(BigUint::from(o), depth), m);
            let den = m.sub(&BigUint::from(target[j]), &BigUint::from(o));
            acc = acc.mul(&num.scale(&m.inv(&den).unwrap(), m), m);
        }
    }
    acc
}

pub fn to_big(f: &[BigUint]) -> Vec<BigInt> {
    f.iter().map(|c| BigInt::from(c.clone())).collect()
}

pub fn univariate_gcd(a: &[BigUint], b: &[BigUint], m: &Modulus) -> Vec<BigUint> {
    if a.is_empty() && b.is_empty() {
        return Vec::new();
    }
    unipoly::gcd(a, b, m)
}

/// Outcome counts of the subroutine property checks on one instance family.
#[derive(Debug, Default, Clone)]
pub struct SubroutineTally {
    pub instances: usize,
    pub gcd_cases: usize,
    pub gcd_splits: usize,
    /// Gcd cases whose projection was compared at every zero.
    pub gcd_checked: usize,
    pub inversions: usize,
    pub violations: Vec<String>,
}

/// Runs reduce, invert_mod, test_zero_div and gcd_mod against enumeration on
/// one random split ideal.
pub fn check_subroutines<R: Rng>(rng: &mut R, tally: &mut SubroutineTally) {
    use multipoly::{GcdOutcome, ZeroDivTest};
    let p = *[2u32, 3, 5].choose(rng).unwrap();
    let m = md(p, 1);
    let len = rng.gen_range(1..=3);
    let mut degrees = Vec::new();
    let mut total = 1;
    for _ in 0..len {
        let d = rng.gen_range(1..=(p as usize).min(32 / total).max(1));
        total *= d;
        degrees.push(d);
    }
    let (ideal, zeros) = random_split_ideal(rng, &m, &degrees);
    let gens = ideal.generators();
    tally.instances += 1;
    if zeros.len() != ideal.degree() {
        tally.violations.push(format!("zeroset size {} != degree {}", zeros.len(), ideal.degree()));
    }
    let enumerated = ppcount::splitideal::enumerate_zeroset(&ideal, &m, 1 << 20).unwrap();
    if enumerated != zeros {
        tally.violations.push("enumerated zeroset differs from construction".into());
    }

    // Reduce: evaluation soundness and degree contract.
    let wide: Vec<usize> = degrees.iter().map(|d| d + 3).collect();
    let a = random_poly(rng, &wide, &m);
    let r = multipoly::reduce(&a, gens, &m).unwrap();
    for z in &zeros {
        if a.eval(z, &m) != r.eval(z, &m) {
            tally.violations.push(format!("reduce changes value at {z:?}"));
        }
    }
    for (i, d) in degrees.iter().enumerate() {
        if r.deg_in(i).is_some_and(|e| e >= *d) {
            tally.violations.push(format!("reduce leaves degree in x_{i} at least {d}"));
        }
    }
    if multipoly::reduce(&r, gens, &m).unwrap() != r {
        tally.violations.push("reduce is not idempotent".into());
    }

    // invert_mod and test_zero_div against the values at the zeros.
    let a = random_poly(rng, &degrees, &m);
    let vanishing = zeros.iter().filter(|z| a.eval(z, &m).is_zero()).count();
    let zd = multipoly::test_zero_div(&a, gens, &m).unwrap();
    let expect_zd = vanishing > 0 && vanishing < zeros.len();
    match &zd {
        ZeroDivTest::Split(ev) => {
            if !expect_zd {
                tally.violations.push("test_zero_div split a non-zerodivisor".into());
            }
            check_evidence(ev, gens, &m, tally);
        }
        ZeroDivTest::NotZeroDivisor => {
            if expect_zd {
                tally.violations.push("test_zero_div missed a zerodivisor".into());
            }
        }
    }
    match multipoly::invert_mod(&a, gens, &m) {
        Ok(u) => {
            tally.inversions += 1;
            if vanishing > 0 || !multipoly::mul_mod(&a, &u, gens, &m).is_one() {
                tally.violations.push("invert_mod round trip failed".into());
            }
            if multipoly::invert_mod(&u, gens, &m).ok().as_ref() != Some(&a) {
                tally.violations.push("inverse of the inverse differs".into());
            }
        }
        Err(_) => {
            if vanishing == 0 {
                tally.violations.push("invert_mod rejected a unit".into());
            }
        }
    }

    // gcd_mod projection property.
    let mut dims = degrees.clone();
    dims.push(rng.gen_range(1..=4));
    let a = random_poly(rng, &dims, &m);
    dims.pop();
    dims.push(rng.gen_range(1..=4));
    let mut b = random_poly(rng, &dims, &m);
    if rng.gen_bool(0.5) {
        let top = dims.len() - 1;
        let lead = MultiPoly::one(top).wrap(top + 1).shift_top(dims[top]);
        b = b.add(&lead, &m);
    }
    if rng.gen_bool(0.5) {
        // share a factor to make nontrivial gcds common
        let mut fdims = degrees.clone();
        fdims.push(2);
        let c = random_poly(rng, &fdims, &m);
        let a2 = multipoly::mul_mod(&a, &c, gens, &m);
        b = multipoly::mul_mod(&b, &c, gens, &m);
        return finish_gcd(&a2, &b, gens, &zeros, &m, tally);
    }
    finish_gcd(&a, &b, gens, &zeros, &m, tally);

    fn finish_gcd(
        a: &MultiPoly,
        b: &MultiPoly,
        gens: &[MultiPoly],
        zeros: &[Vec<BigUint>],
        m: &Modulus,
        tally: &mut SubroutineTally,
    ) {
        tally.gcd_cases += 1;
        match multipoly::gcd_mod(a, b, gens, m).unwrap() {
            GcdOutcome::Split(ev) => {
                tally.gcd_splits += 1;
                check_evidence(&ev, gens, m, tally);
            }
            GcdOutcome::Gcd(g) => {
                tally.gcd_checked += 1;
                for z in zeros {
                    let want = univariate_gcd(&a.project(z, m), &b.project(z, m), m);
                    let got = g.project(z, m);
                    if want != got {
                        tally
                            .violations
                            .push(format!("gcd projection at {z:?}: {got:?} vs {want:?}"));
                    }
                }
            }
        }
    }
}

fn check_evidence(ev: &multipoly::SplitEvidence, gens: &[MultiPoly], m: &Modulus, tally: &mut SubroutineTally) {
    let i = ev.index;
    if ev.factors.len() < 2 {
        tally.violations.push("split evidence with fewer than two factors".into());
        return;
    }
    let mut prod = MultiPoly::one(i + 1);
    for f in &ev.factors {
        if !f.lc_top().is_one() || f.deg_top().unwrap_or(0) == 0 {
            tally.violations.push("split factor is not monic of positive degree".into());
        }
        prod = multipoly::mul_mod(&prod, f, &gens[..i], m);
    }
    if prod != gens[i] {
        tally.violations.push(format!("split factors do not multiply to generator {i}"));
    }
}
