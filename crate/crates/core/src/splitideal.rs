//! Triangular and split ideals, splitting along a generator factorization,
//! and the residues represented by a maximal split ideal.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::modring::Modulus;
use crate::multipoly::{self, EvalRing, MultiPoly};
use crate::oracle::{GElem, GaloisRing};
use crate::unipoly::{self, Poly};

/// Generators `h_0(x_0), …, h_l(x_0..x_l)`, each monic in its top variable
/// and reduced modulo the earlier ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TriangularIdeal {
    generators: Vec<MultiPoly>,
}

impl TriangularIdeal {
    pub fn empty() -> Self {
        Self {
            generators: Vec::new(),
        }
    }

    pub fn new(generators: Vec<MultiPoly>, m: &Modulus) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if g.depth() != i + 1 {
                return Err(Error::VariableMismatch {
                    var: g.depth().saturating_sub(1),
                    ideal_len: i,
                });
            }
            if g.deg_top().unwrap_or(0) == 0 || !g.lc_top().is_one() {
                return Err(Error::Invalid(format!("generator {i} is not monic of positive degree")));
            }
            if multipoly::reduce(g, &generators[..i], m)? != *g {
                return Err(Error::Invalid(format!("generator {i} is not reduced")));
            }
        }
        Ok(Self { generators })
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn from_trusted(generators: Vec<MultiPoly>) -> Self {
        Self { generators }
    }

    pub fn generators(&self) -> &[MultiPoly] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// `∏ deg_{x_i} h_i`.
    pub fn degree(&self) -> usize {
        multipoly::ideal_dims(&self.generators).iter().product()
    }

    pub fn prefix(&self, len: usize) -> TriangularIdeal {
        Self {
            generators: self.generators[..len].to_vec(),
        }
    }
}

/// The data a split ideal is relative to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitContext {
    /// The normalized input, over `Z/p^k`.
    pub f: Poly,
    pub modulus: Modulus,
    /// Field size of the Frobenius polynomial `x^q - x`.
    pub q: BigUint,
}

/// A split ideal over `F_p` together with its lift over `Z/p^k`.
///
/// The lift is fixed once created: the digits recorded by later generators
/// refer to its particular zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitIdeal {
    pub base: TriangularIdeal,
    pub lift: Vec<MultiPoly>,
    pub context: Arc<SplitContext>,
}

impl SplitIdeal {
    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.base.degree()
    }
}

/// A split ideal with the tagged polynomial `f_U(x̄, x) ≡ f(Σ x_i p^i + p^L x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackEntry {
    pub ideal: SplitIdeal,
    pub f_u: MultiPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximalSplitIdeal {
    pub ideal: SplitIdeal,
    pub length: usize,
    pub degree: usize,
}

impl MaximalSplitIdeal {
    pub fn new(ideal: SplitIdeal) -> Self {
        let length = ideal.len();
        let degree = ideal.degree();
        Self {
            ideal,
            length,
            degree,
        }
    }
}

/// Replaces `entry` by one entry per factor of generator `gen_index`.
///
/// The factors live over `F_p` modulo the generators below `gen_index`. They
/// are Hensel-lifted against the lifted generator so that the zeros of every
/// child lift are exactly the zeros of the parent lift lying over the child.
pub fn split_entry(entry: &StackEntry, gen_index: usize, factors: &[MultiPoly]) -> Result<Vec<StackEntry>> {
    let lifted = lift_split_factors(&entry.ideal, gen_index, factors)?;
    lifted
        .iter()
        .map(|f| child_entry(entry, gen_index, f))
        .collect()
}

/// Lifted factors for [`split_entry`], reusable across entries that share
/// the lifted prefix through `gen_index`.
pub fn lift_split_factors(ideal: &SplitIdeal, gen_index: usize, factors: &[MultiPoly]) -> Result<Vec<MultiPoly>> {
    if factors.len() < 2 {
        return Err(Error::InvalidFactorization("need at least two factors".into()));
    }
    if gen_index >= ideal.len() {
        return Err(Error::InvalidFactorization(format!(
            "generator index {gen_index} out of range"
        )));
    }
    let m = &ideal.context.modulus;
    let fp = m.residue_field();
    let prefix = &ideal.base.generators()[..gen_index];
    let mut prod = MultiPoly::one(gen_index + 1);
    for f in factors {
        if f.depth() != gen_index + 1 || f.deg_top().unwrap_or(0) == 0 || !f.lc_top().is_one() {
            return Err(Error::InvalidFactorization(
                "factors must be monic of positive degree in the split variable".into(),
            ));
        }
        prod = multipoly::mul_mod(&prod, f, prefix, &fp);
    }
    if prod != ideal.base.generators()[gen_index] {
        return Err(Error::InvalidFactorization(
            "factors do not multiply to the generator".into(),
        ));
    }
    multipoly::lift_factorization(
        &ideal.lift[gen_index],
        factors,
        &ideal.lift[..gen_index],
        m,
    )
}

pub(crate) fn child_entry(entry: &StackEntry, gen_index: usize, factor: &MultiPoly) -> Result<StackEntry> {
    let ideal = &entry.ideal;
    let m = &ideal.context.modulus;
    let fp = m.residue_field();
    let mut lift: Vec<MultiPoly> = ideal.lift[..gen_index].to_vec();
    lift.push(factor.clone());
    for g in &ideal.lift[gen_index + 1..] {
        let r = multipoly::reduce(g, &lift, m)?;
        lift.push(r);
    }
    let base = lift.iter().map(|g| g.reduce_scalars(&fp)).collect();
    let f_u = multipoly::reduce(&entry.f_u, &lift, m)?;
    Ok(StackEntry {
        ideal: SplitIdeal {
            base: TriangularIdeal::from_trusted(base),
            lift,
            context: ideal.context.clone(),
        },
        f_u,
    })
}

/// `D · q^{k - L}`.
pub fn represented_root_count(msi: &MaximalSplitIdeal, m: &Modulus, q: &BigUint) -> BigUint {
    let e = m.k() as usize - msi.length.min(m.k() as usize);
    BigUint::from(msi.degree) * num_traits::pow(q.clone(), e)
}

/// Zeros over `F_p` by depth-first evaluation.
pub fn enumerate_zeroset(ideal: &TriangularIdeal, fp: &Modulus, cap: u64) -> Result<Vec<Vec<BigUint>>> {
    let p = fp.p_u64().ok_or_else(|| Error::CapExceeded {
        needed: fp.p().clone(),
        cap,
    })?;
    let elems: Vec<BigUint> = (0..p).map(BigUint::from).collect();
    enumerate_with(ideal, &elems, fp, cap)
}

/// Zeros over `F_q`, `q = p^b`, realized as the Galois ring `G(p, b)`.
pub fn enumerate_zeroset_fq(ideal: &TriangularIdeal, field: &GaloisRing, cap: u64) -> Result<Vec<Vec<GElem>>> {
    let size = field.size();
    let n = size.to_u64().filter(|&n| n <= cap).ok_or(Error::CapExceeded {
        needed: size.clone(),
        cap,
    })?;
    let elems: Vec<GElem> = (0..n).map(|i| field.element(&BigUint::from(i))).collect();
    enumerate_with(ideal, &elems, field, cap)
}

fn enumerate_with<R: EvalRing>(
    ideal: &TriangularIdeal,
    elems: &[R::Elem],
    ring: &R,
    cap: u64,
) -> Result<Vec<Vec<R::Elem>>> {
    let needed = num_traits::pow(BigUint::from(elems.len()), ideal.len());
    if needed > BigUint::from(cap) {
        return Err(Error::CapExceeded { needed, cap });
    }
    let mut out = Vec::new();
    let mut point = Vec::with_capacity(ideal.len());
    dfs(ideal.generators(), elems, ring, &mut point, &mut out);
    Ok(out)
}

fn dfs<R: EvalRing>(
    gens: &[MultiPoly],
    elems: &[R::Elem],
    ring: &R,
    point: &mut Vec<R::Elem>,
    out: &mut Vec<Vec<R::Elem>>,
) {
    let i = point.len();
    if i == gens.len() {
        out.push(point.clone());
        return;
    }
    for e in elems {
        point.push(e.clone());
        if ring.is_zero(&gens[i].eval(point, ring)) {
            dfs(gens, elems, ring, point, out);
        }
        point.pop();
    }
}

/// Lifts a zero of `ideal.base` over `F_p` to the zero of the lifted ideal
/// over `Z/p^k` lying above it, coordinate by coordinate with Newton steps.
pub fn lift_zero(ideal: &SplitIdeal, zero: &[BigUint]) -> Result<Vec<BigUint>> {
    let m = &ideal.context.modulus;
    let mut point: Vec<BigUint> = Vec::with_capacity(zero.len());
    for (i, g) in ideal.lift.iter().enumerate() {
        let uni = g.project(&point, m);
        let du = unipoly::derivative(&uni, m);
        let mut z = zero[i].clone();
        for _ in 0..m.k() {
            let v = unipoly::eval(&uni, &z, m);
            if v.is_zero() {
                break;
            }
            let d = m.inv(&unipoly::eval(&du, &z, m)).map_err(|_| {
                Error::Invalid("lifted generator has a repeated root".into())
            })?;
            z = m.sub(&z, &m.mul(&v, &d));
        }
        point.push(z);
    }
    Ok(point)
}

/// Every residue mod `p^k` represented by an MSI (for `q = p`):
/// `Σ â_i p^i + p^L t` over the lifted zeros `â` and `t < p^{k-L}`.
pub fn represented_residues(msi: &MaximalSplitIdeal, cap: u64) -> Result<Vec<BigUint>> {
    let m = &msi.ideal.context.modulus;
    let fp = m.residue_field();
    let zeros = enumerate_zeroset(&msi.ideal.base, &fp, cap)?;
    let l = msi.length as u32;
    let span = m.p_pow(m.k().saturating_sub(l));
    let total = BigUint::from(zeros.len()) * &span;
    if total > BigUint::from(cap) {
        return Err(Error::CapExceeded { needed: total, cap });
    }
    let step = m.p_pow(l.min(m.k()));
    let mut out = Vec::new();
    for z in zeros {
        let lifted = lift_zero(&msi.ideal, &z)?;
        let mut r0 = BigUint::zero();
        let mut pw = BigUint::one();
        for a in &lifted {
            r0 = m.add(&r0, &m.mul(a, &pw));
            pw *= m.p();
        }
        let n = span.to_u64().expect("under cap");
        for t in 0..n {
            out.push(m.add(&r0, &m.mul(&step, &BigUint::from(t))));
        }
    }
    out.sort();
    Ok(out)
}
