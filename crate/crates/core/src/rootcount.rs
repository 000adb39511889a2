//! The stack-driven root counting loop over maximal split ideals.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::modring::Modulus;
use crate::multipoly::{self, GcdOutcome, MultiPoly, SplitEvidence};
use crate::splitideal::{
    self, MaximalSplitIdeal, SplitContext, SplitIdeal, StackEntry, TriangularIdeal,
};
use crate::unipoly::{self, Poly};

/// Enumeration cap used by [`CountOptions::verify_ideals`].
pub const VERIFY_CAP: u64 = 4096;

#[derive(Clone, Debug)]
pub struct CountOptions {
    /// Field size `q = p^b` of the Frobenius polynomial; `None` means `p`.
    pub frobenius_q: Option<BigUint>,
    /// Scale `f` by the inverse of its leading coefficient.
    pub normalize: bool,
    /// Check split-ideal invariants by enumeration at every pop (small `p`).
    pub verify_ideals: bool,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self {
            frobenius_q: None,
            normalize: true,
            verify_ideals: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CountStats {
    pub pops: usize,
    pub splits: usize,
    pub dead_ends: usize,
    pub max_ideal_degree: usize,
    /// Largest ideal length seen at a pop.
    pub max_length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountReport {
    pub modulus: Modulus,
    pub q: BigUint,
    /// Degree of `f` after reduction mod `p^k` (0 for constants).
    pub degree: usize,
    pub msis: Vec<MaximalSplitIdeal>,
    pub root_count: BigUint,
    pub stats: CountStats,
    /// Failed bound checks, empty on a healthy run.
    pub violations: Vec<String>,
}

impl CountReport {
    pub fn degree_sum(&self) -> usize {
        self.msis.iter().map(|m| m.degree).sum()
    }
}

/// Reports for `f ≡ 0` and nonzero constant `f`; `None` otherwise.
pub fn count_all_residue_roots_shortcut(f: &[BigInt], m: &Modulus) -> Option<CountReport> {
    count_shortcut(&unipoly::from_ints(f, m), m, m.p())
}

fn count_shortcut(f: &[BigUint], m: &Modulus, q: &BigUint) -> Option<CountReport> {
    let root_count = match unipoly::degree(f) {
        None => num_traits::pow(q.clone(), m.k() as usize),
        Some(0) => BigUint::zero(),
        Some(_) => return None,
    };
    Some(CountReport {
        modulus: m.clone(),
        q: q.clone(),
        degree: 0,
        msis: Vec::new(),
        root_count,
        stats: CountStats::default(),
        violations: Vec::new(),
    })
}

fn frobenius_exponent(q: &BigUint, p: &BigUint) -> Option<u32> {
    let mut b = 0;
    let mut r = q.clone();
    while r > BigUint::one() {
        if !(&r % p).is_zero() {
            return None;
        }
        r /= p;
        b += 1;
    }
    (b > 0).then_some(b)
}

/// Counts the roots of `f` in `Z/p^k` (or, with `frobenius_q = p^b`, the
/// roots in the Galois ring `G(p^k, b)`).
pub fn count_roots(f: &[BigInt], m: &Modulus, opts: &CountOptions) -> Result<CountReport> {
    let q = match &opts.frobenius_q {
        None => m.p().clone(),
        Some(q) => {
            frobenius_exponent(q, m.p())
                .ok_or_else(|| Error::Invalid(format!("{q} is not a power of {}", m.p())))?;
            q.clone()
        }
    };
    let mut fr = unipoly::from_ints(f, m);
    if let Some(rep) = count_shortcut(&fr, m, &q) {
        return Ok(rep);
    }
    let lc = unipoly::lc(&fr).expect("nonzero").clone();
    if !m.is_unit(&lc) {
        return Err(Error::NotMonicModP);
    }
    if opts.normalize {
        fr = unipoly::scale(&fr, &m.inv(&lc)?, m);
    }
    Engine::new(fr, m.clone(), q, opts.verify_ideals).run()
}

struct Engine {
    ctx: Arc<SplitContext>,
    fp: Modulus,
    d: usize,
    verify: bool,
    stack: Vec<StackEntry>,
    msis: Vec<MaximalSplitIdeal>,
    stats: CountStats,
    violations: Vec<String>,
}

impl Engine {
    fn new(f: Poly, modulus: Modulus, q: BigUint, verify: bool) -> Self {
        let d = unipoly::degree(&f).unwrap_or(0);
        let fp = modulus.residue_field();
        Self {
            ctx: Arc::new(SplitContext { f, modulus, q }),
            fp,
            d,
            verify,
            stack: Vec::new(),
            msis: Vec::new(),
            stats: CountStats::default(),
            violations: Vec::new(),
        }
    }

    fn m(&self) -> &Modulus {
        &self.ctx.modulus
    }

    fn run(mut self) -> Result<CountReport> {
        self.initialize()?;
        if self.m().k() > 1 {
            while let Some(entry) = self.stack.pop() {
                self.step(entry)?;
            }
        } else if let Some(entry) = self.stack.pop() {
            self.msis.push(MaximalSplitIdeal::new(entry.ideal));
        }
        self.finish()
    }

    /// `h_0 = gcd(f mod p, x^q - x)` and the first stack entry.
    fn initialize(&mut self) -> Result<()> {
        let fp = &self.fp;
        let fbar = unipoly::reduce(&self.ctx.f, fp);
        let x = unipoly::monomial(1);
        let xq = unipoly::powmod(&x, &self.ctx.q, &fbar, fp)?;
        let frob = unipoly::sub(&xq, &unipoly::rem(&x, &fbar, fp)?, fp);
        let h0 = unipoly::gcd(&fbar, &frob, fp);
        if unipoly::degree(&h0).unwrap_or(0) == 0 {
            return Ok(());
        }
        let gen = MultiPoly::from_univariate(&h0, 1);
        let lift = vec![gen.clone()];
        let f_top = MultiPoly::from_univariate(&self.ctx.f, 1);
        let f_u = multipoly::taylor_shift_reduce(&f_top, &lift, self.m())?;
        self.stack.push(StackEntry {
            ideal: SplitIdeal {
                base: TriangularIdeal::from_trusted(vec![gen]),
                lift,
                context: self.ctx.clone(),
            },
            f_u,
        });
        Ok(())
    }

    fn step(&mut self, entry: StackEntry) -> Result<()> {
        let k = self.m().k();
        let len = entry.ideal.len();
        let deg = entry.ideal.degree();
        self.stats.pops += 1;
        self.stats.max_ideal_degree = self.stats.max_ideal_degree.max(deg);
        self.stats.max_length = self.stats.max_length.max(len);
        if len > k as usize {
            self.violate(format!("popped ideal of length {len} exceeds k = {k}"));
        }
        if deg > self.d {
            self.violate(format!("ideal degree {deg} exceeds deg f = {}", self.d));
        }
        if self.verify {
            self.verify_entry(&entry)?;
        }

        let (alpha, g) = multipoly::content_valuation(&entry.f_u, self.m());
        if (alpha as usize) < len {
            self.violate(format!("valuation {alpha} below ideal length {len}"));
        }
        if alpha >= k {
            self.msis.push(MaximalSplitIdeal::new(entry.ideal));
            return Ok(());
        }

        let fp = self.fp.clone();
        let base = entry.ideal.base.generators();
        let gt = multipoly::reduce(&g.reduce_scalars(&fp), base, &fp)?;
        let g1 = gt.lc_top();
        let u = match multipoly::unit_or_split(&g1, base, &fp)? {
            Ok(u) => u,
            Err(ev) => return self.split(entry, ev),
        };
        if self.verify {
            self.verify_projected_degree(&entry.ideal, &gt)?;
        }
        let gn = multipoly::mul_mod(&gt, &u.wrap(len + 1), base, &fp);
        let frob = multipoly::frobenius_reduce(&self.ctx.q, base, &gn, &fp)?;
        match multipoly::gcd_mod(&gn, &frob, base, &fp)? {
            GcdOutcome::Split(ev) => self.split(entry, ev),
            GcdOutcome::Gcd(h) if h.deg_top().unwrap_or(0) == 0 => {
                self.stats.dead_ends += 1;
                Ok(())
            }
            GcdOutcome::Gcd(h) => {
                let mut gens = base.to_vec();
                gens.push(h.clone());
                let mut lift = entry.ideal.lift;
                lift.push(h);
                let f_u = multipoly::taylor_shift_reduce(&entry.f_u, &lift, self.m())?;
                self.stack.push(StackEntry {
                    ideal: SplitIdeal {
                        base: TriangularIdeal::from_trusted(gens),
                        lift,
                        context: self.ctx.clone(),
                    },
                    f_u,
                });
                Ok(())
            }
        }
    }

    /// Pushes `entry` back and rewrites every stack entry that shares the
    /// factored generator.
    fn split(&mut self, entry: StackEntry, ev: SplitEvidence) -> Result<()> {
        self.stats.splits += 1;
        let i = ev.index;
        let lifted = splitideal::lift_split_factors(&entry.ideal, i, &ev.factors)?;
        let key: Vec<MultiPoly> = entry.ideal.lift[..=i].to_vec();
        self.stack.push(entry);
        let old = std::mem::take(&mut self.stack);
        for e in old {
            if e.ideal.len() > i && e.ideal.lift[..=i] == key[..] {
                for factor in &lifted {
                    self.stack.push(splitideal::child_entry(&e, i, factor)?);
                }
            } else {
                self.stack.push(e);
            }
        }
        Ok(())
    }

    fn zeros(&self, ideal: &SplitIdeal) -> Result<Option<Vec<Vec<BigUint>>>> {
        if self.ctx.q != *self.fp.p() {
            return Ok(None);
        }
        match splitideal::enumerate_zeroset(&ideal.base, &self.fp, VERIFY_CAP) {
            Ok(z) => Ok(Some(z)),
            Err(Error::CapExceeded { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Residues mod `p^L` of the lifted zeros of `ideal`.
    fn prefixes(&self, ideal: &SplitIdeal) -> Result<Option<Vec<BigUint>>> {
        let Some(zeros) = self.zeros(ideal)? else {
            return Ok(None);
        };
        let m = self.m();
        let mut out = Vec::with_capacity(zeros.len());
        for z in zeros {
            let lifted = splitideal::lift_zero(ideal, &z)?;
            let mut r = BigUint::zero();
            let mut pw = BigUint::one();
            for a in &lifted {
                r = m.add(&r, &m.mul(a, &pw));
                pw *= m.p();
            }
            out.push(r % m.p_pow(ideal.len() as u32));
        }
        Ok(Some(out))
    }

    fn verify_projected_degree(&mut self, ideal: &SplitIdeal, gt: &MultiPoly) -> Result<()> {
        let Some(zeros) = self.zeros(ideal)? else {
            return Ok(());
        };
        let generic = gt.deg_top();
        for z in zeros {
            let proj = gt.project(&z, &self.fp);
            if unipoly::degree(&proj) != generic {
                self.violate(format!("projected degree at {z:?} differs from {generic:?}"));
            }
        }
        Ok(())
    }

    /// No residue class of `entry` may extend or be extended by a class of a
    /// live stack entry.
    fn verify_prefix_free(&mut self, entry: &StackEntry) -> Result<()> {
        let Some(mine) = self.prefixes(&entry.ideal)? else {
            return Ok(());
        };
        let mut clashes = 0;
        for other in &self.stack {
            let Some(theirs) = self.prefixes(&other.ideal)? else {
                continue;
            };
            let modulus = self.m().p_pow(entry.ideal.len().min(other.ideal.len()) as u32);
            for a in &mine {
                clashes += theirs.iter().filter(|b| (*b % &modulus) == (a % &modulus)).count();
            }
        }
        if clashes > 0 {
            self.violate(format!("{clashes} residue clashes between live stack entries"));
        }
        Ok(())
    }

    fn verify_entry(&mut self, entry: &StackEntry) -> Result<()> {
        self.verify_prefix_free(entry)?;
        let ideal = &entry.ideal;
        let Some(zeros) = self.zeros(ideal)? else {
            return Ok(());
        };
        if zeros.len() != ideal.degree() {
            self.violate(format!(
                "ideal has {} zeros but degree {}",
                zeros.len(),
                ideal.degree()
            ));
            return Ok(());
        }
        let m = self.m().clone();
        let pl = m.p_pow(ideal.len() as u32);
        for z in zeros {
            let lifted = splitideal::lift_zero(ideal, &z)?;
            let mut r = BigUint::zero();
            let mut pw = BigUint::one();
            for a in &lifted {
                r = m.add(&r, &m.mul(a, &pw));
                pw *= m.p();
            }
            let v = unipoly::eval(&self.ctx.f, &r, &m);
            if !(&v % &pl).is_zero() {
                self.violate(format!("zero {z:?} does not lift to a root mod p^{}", ideal.len()));
            }
        }
        Ok(())
    }

    fn violate(&mut self, msg: String) {
        self.violations.push(msg);
    }

    fn finish(mut self) -> Result<CountReport> {
        let m = self.m().clone();
        let q = self.ctx.q.clone();
        let mut root_count = BigUint::zero();
        for msi in &self.msis {
            root_count += splitideal::represented_root_count(msi, &m, &q);
        }
        let dsum: usize = self.msis.iter().map(|x| x.degree).sum();
        if dsum > self.d {
            self.violate(format!("MSI degrees sum to {dsum} > deg f = {}", self.d));
        }
        if self.msis.len() > self.d {
            self.violate(format!("{} MSIs exceed deg f = {}", self.msis.len(), self.d));
        }
        let bound = self.d * m.k() as usize;
        if self.stats.pops > bound {
            self.violate(format!("{} pops exceed d·k = {bound}", self.stats.pops));
        }
        Ok(CountReport {
            modulus: m,
            q,
            degree: self.d,
            msis: self.msis,
            root_count,
            stats: self.stats,
            violations: self.violations,
        })
    }
}
