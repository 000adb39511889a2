//! Command-line front end.

use std::fmt::Write as _;

use clap::{Parser, ValueEnum};
use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::factorcount::{self, FactorReport};
use crate::igusa::{self, DiscValuation, SeriesPrefix};
use crate::modring::Modulus;
use crate::multipoly::MultiPoly;
use crate::oracle::{self, DEFAULT_CAP};
use crate::rootcount::{self, CountOptions, CountReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_MONIC: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

/// Largest exponent accepted by the expression parser.
pub const MAX_EXPONENT: u32 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Roots,
    Factors,
    Igusa,
}

#[derive(Clone, Debug, Parser)]
#[command(
    name = "ppcount",
    version,
    about = "Count roots and basic-irreducible factors of f(x) modulo p^k"
)]
pub struct JobSpec {
    /// Polynomial expression in x, e.g. "x^2+3*x"
    #[arg(long, allow_hyphen_values = true, conflicts_with = "coeffs", required_unless_present = "coeffs")]
    pub poly: Option<String>,
    /// Coefficients in ascending degree, e.g. "0,3,1"
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    /// Prime modulus (arbitrary size)
    #[arg(long)]
    pub p: String,
    /// Exponent of the modulus p^k
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long, value_enum, default_value_t = Mode::Roots)]
    pub mode: Mode,
    /// Series length for igusa mode (defaults to k)
    #[arg(long = "K")]
    pub big_k: Option<u32>,
    /// Emit a single JSON object instead of text
    #[arg(long)]
    pub json: bool,
    /// Cross-check against brute-force enumeration when under the cap
    #[arg(long)]
    pub verify: bool,
    /// Worker threads for per-component and per-precision work (0 = all cores)
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Keep f unscaled instead of dividing by its leading coefficient
    #[arg(long)]
    pub no_normalize: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn failure(code: i32, msg: String) -> Self {
        Self {
            code,
            stdout: String::new(),
            stderr: msg,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotMonicModP => EXIT_NOT_MONIC,
        Error::Parse(_)
        | Error::Invalid(_)
        | Error::NotPrime(_)
        | Error::InvalidExponent
        | Error::ZeroPolynomial => EXIT_USAGE,
        _ => EXIT_ERROR,
    }
}

/// Parses `a0,a1,...` (ascending degree).
pub fn parse_coeffs(s: &str) -> Result<Vec<BigInt>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad coefficient {t:?}")))
        })
        .collect()
}

/// Parses an integer polynomial in `x` with `+ - * ^`, parentheses and
/// implicit multiplication.
pub fn parse_poly(s: &str) -> Result<Vec<BigInt>> {
    let tokens = tokenize(s)?;
    let mut parser = ExprParser { tokens, pos: 0 };
    let f = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Parse(format!("unexpected {:?}", parser.tokens[parser.pos])));
    }
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Num(BigInt),
    X,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        i += 1;
        let tok = match c {
            c if c.is_whitespace() => continue,
            'x' | 'X' => Token::X,
            '+' => Token::Plus,
            '-' => Token::Minus,
            '*' => Token::Star,
            '^' => Token::Caret,
            '(' => Token::LParen,
            ')' => Token::RParen,
            c if c.is_ascii_digit() => {
                let start = i - 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                Token::Num(digits.parse().expect("digits"))
            }
            c => return Err(Error::Parse(format!("unexpected character {c:?}"))),
        };
        out.push(tok);
    }
    if out.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    Ok(out)
}

struct ExprParser {
    tokens: Vec<Token>,
    pos: usize,
}

impl ExprParser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Vec<BigInt>> {
        let mut acc = self.term()?;
        while let Some(t) = self.peek() {
            let neg = match t {
                Token::Plus => false,
                Token::Minus => true,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            acc = if neg { poly_sub(&acc, &rhs) } else { poly_add(&acc, &rhs) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Vec<BigInt>> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                }
                Some(Token::Num(_) | Token::X | Token::LParen) => {}
                _ => break,
            }
            let rhs = self.unary()?;
            acc = poly_mul(&acc, &rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Vec<BigInt>> {
        match self.peek() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(poly_sub(&[], &self.unary()?))
            }
            Some(Token::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Vec<BigInt>> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let e = match self.next() {
            Some(Token::Num(n)) => n
                .to_u32()
                .filter(|&e| e <= MAX_EXPONENT)
                .ok_or_else(|| Error::Parse(format!("exponent {n} exceeds {MAX_EXPONENT}")))?,
            t => return Err(Error::Parse(format!("expected exponent, found {t:?}"))),
        };
        let mut acc = vec![BigInt::from(1)];
        for _ in 0..e {
            acc = poly_mul(&acc, &base);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Vec<BigInt>> {
        match self.next() {
            Some(Token::Num(n)) => Ok(vec![n]),
            Some(Token::X) => Ok(vec![BigInt::zero(), BigInt::from(1)]),
            Some(Token::LParen) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(e),
                    t => Err(Error::Parse(format!("expected ')', found {t:?}"))),
                }
            }
            t => Err(Error::Parse(format!("expected a term, found {t:?}"))),
        }
    }
}

fn poly_trim(mut a: Vec<BigInt>) -> Vec<BigInt> {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn poly_add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    poly_trim((0..n).map(|i| a.get(i).unwrap_or(&z) + b.get(i).unwrap_or(&z)).collect())
}

fn poly_sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let z = BigInt::zero();
    poly_trim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly_trim(out)
}

pub fn multipoly_json(a: &MultiPoly) -> Value {
    match a {
        MultiPoly::Const(c) => Value::String(c.to_string()),
        MultiPoly::Univ { coeffs, .. } => Value::Array(coeffs.iter().map(multipoly_json).collect()),
    }
}

fn strings(v: &[BigUint]) -> Value {
    Value::Array(v.iter().map(|c| Value::String(c.to_string())).collect())
}

pub fn roots_json(r: &CountReport) -> Value {
    let msis: Vec<Value> = r
        .msis
        .iter()
        .map(|m| {
            let gens: Vec<Value> = m
                .ideal
                .base
                .generators()
                .iter()
                .enumerate()
                .map(|(i, g)| json!({"var": i, "coeffs": multipoly_json(g)}))
                .collect();
            json!({"length": m.length, "degree": m.degree, "generators": gens})
        })
        .collect();
    json!({
        "mode": "roots",
        "p": r.modulus.p().to_string(),
        "k": r.modulus.k(),
        "degree": r.degree,
        "root_count": r.root_count.to_string(),
        "msis": msis,
        "stats": {
            "pops": r.stats.pops,
            "splits": r.stats.splits,
            "dead_ends": r.stats.dead_ends,
            "max_ideal_degree": r.stats.max_ideal_degree,
        },
        "violations": r.violations,
    })
}

pub fn factors_json(r: &FactorReport, m: &Modulus, degree: usize) -> Value {
    let comps: Vec<Value> = r
        .components
        .iter()
        .map(|c| {
            json!({
                "b": c.b, "e": c.e, "t": c.t,
                "galois_root_count": c.galois_root_count.to_string(),
                "count": c.count.to_string(),
            })
        })
        .collect();
    let by_degree: Vec<Value> = r
        .by_degree()
        .iter()
        .map(|(b, c)| json!({"b": b, "count": c.to_string()}))
        .collect();
    json!({
        "mode": "factors",
        "p": m.p().to_string(),
        "k": m.k(),
        "degree": degree,
        "basic_irreducible_count": r.total.to_string(),
        "components": comps,
        "by_degree": by_degree,
    })
}

pub fn igusa_json(s: &SeriesPrefix, padic: Option<&(BigUint, u32)>) -> Value {
    let v = match s.disc_valuation {
        DiscValuation::Finite(v) => json!(v),
        DiscValuation::Infinite => Value::Null,
    };
    json!({
        "mode": "igusa",
        "p": s.p.to_string(),
        "K": s.coefficients.len() - 1,
        "series": strings(&s.coefficients),
        "disc_valuation": v,
        "padic_roots": padic.map(|(c, _)| c.to_string()),
        "padic_precision": padic.map(|(_, l)| *l),
    })
}

fn roots_text(r: &CountReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "roots of f mod {}^{}: {}", r.modulus.p(), r.modulus.k(), r.root_count);
    let _ = writeln!(s, "maximal split ideals: {}", r.msis.len());
    for (i, m) in r.msis.iter().enumerate() {
        let _ = writeln!(
            s,
            "  [{i}] length {} degree {} -> {} roots",
            m.length,
            m.degree,
            crate::splitideal::represented_root_count(m, &r.modulus, &r.q)
        );
    }
    let _ = writeln!(
        s,
        "pops {} splits {} dead ends {} max ideal degree {}",
        r.stats.pops, r.stats.splits, r.stats.dead_ends, r.stats.max_ideal_degree
    );
    for v in &r.violations {
        let _ = writeln!(s, "warning: {v}");
    }
    s
}

fn factors_text(r: &FactorReport, m: &Modulus) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "basic-irreducible factors of f mod {}^{}: {}", m.p(), m.k(), r.total);
    for c in &r.components {
        let _ = writeln!(
            s,
            "  component b={} e={} t={}: {} Galois-ring roots, {} factors",
            c.b, c.e, c.t, c.galois_root_count, c.count
        );
    }
    for (b, c) in r.by_degree() {
        let _ = writeln!(s, "  degree {b}: {c}");
    }
    s
}

fn igusa_text(sp: &SeriesPrefix, padic: Option<&(BigUint, u32)>) -> String {
    let mut s = String::new();
    let n: Vec<String> = sp.coefficients.iter().map(|c| c.to_string()).collect();
    let _ = writeln!(s, "N_0..N_{} = [{}]", n.len() - 1, n.join(", "));
    match sp.disc_valuation {
        DiscValuation::Finite(v) => {
            let _ = writeln!(s, "v_{}(disc f) = {v}", sp.p);
        }
        DiscValuation::Infinite => {
            let _ = writeln!(s, "disc f = 0");
        }
    }
    if let Some((c, l)) = padic {
        let _ = writeln!(s, "Z_{} roots: {c} (read at precision {l})", sp.p);
    }
    s
}

fn under_cap(p: &BigUint, e: u64) -> bool {
    num_traits::pow(p.clone(), e as usize) <= BigUint::from(DEFAULT_CAP)
}

fn read_poly(spec: &JobSpec) -> Result<Vec<BigInt>> {
    match (&spec.poly, &spec.coeffs) {
        (Some(s), None) => parse_poly(s),
        (None, Some(c)) => parse_coeffs(c),
        _ => Err(Error::Parse("give exactly one of --poly and --coeffs".into())),
    }
}

fn degree_mod(f: &[BigInt], m: &Modulus) -> usize {
    crate::unipoly::degree(&crate::unipoly::from_ints(f, m)).unwrap_or(0)
}

/// Runs a job. The report goes to `stdout`; diagnostics and verify diffs go to `stderr`.
pub fn run(spec: &JobSpec) -> Outcome {
    match run_inner(spec) {
        Ok(o) => o,
        Err(e) => Outcome::failure(exit_code(&e), format!("error: {e}\n")),
    }
}

fn run_inner(spec: &JobSpec) -> Result<Outcome> {
    let f = read_poly(spec)?;
    let p: BigUint = spec
        .p
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad prime {:?}", spec.p)))?;
    let m = Modulus::new(p.clone(), spec.k)?;
    let opts = CountOptions {
        normalize: !spec.no_normalize,
        ..CountOptions::default()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.threads)
        .build()
        .map_err(|e| Error::Invalid(e.to_string()))?;
    let mut diffs = Vec::new();
    let mut notes = Vec::new();
    let (value, text) = match spec.mode {
        Mode::Roots => {
            let r = rootcount::count_roots(&f, &m, &opts)?;
            if spec.verify {
                if under_cap(&p, spec.k as u64) {
                    let bf = oracle::brute_force_roots(&f, &m)?;
                    if BigUint::from(bf.len()) != r.root_count {
                        diffs.push(format!("roots: engine {} oracle {}", r.root_count, bf.len()));
                    }
                } else {
                    notes.push("verify skipped: p^k above the enumeration cap".to_string());
                }
            }
            (roots_json(&r), roots_text(&r))
        }
        Mode::Factors => {
            let r = pool.install(|| factorcount::count_basic_irreducible(&f, &m))?;
            let degree = degree_mod(&f, &m);
            if spec.verify {
                let by = r.by_degree();
                for b in 1..=degree {
                    if !under_cap(&p, spec.k as u64 * (b as u64 + 1)) {
                        notes.push(format!("verify skipped for degree {b}: above the enumeration cap"));
                        continue;
                    }
                    let bf = oracle::brute_force_basic_irreducible(&f, &m, b)?;
                    let got = by.get(&b).cloned().unwrap_or_default();
                    if bf != got {
                        diffs.push(format!("degree {b} factors: engine {got} oracle {bf}"));
                    }
                }
            }
            (factors_json(&r, &m, degree), factors_text(&r, &m))
        }
        Mode::Igusa => {
            let big_k = spec.big_k.unwrap_or(spec.k);
            let s = pool.install(|| igusa::poincare_prefix_with(&f, &p, big_k, &opts))?;
            let padic = match s.disc_valuation {
                DiscValuation::Finite(_) => Some(igusa::count_padic_roots(&f, &p)?),
                DiscValuation::Infinite => None,
            };
            if spec.verify {
                for i in 1..=big_k {
                    if !under_cap(&p, i as u64) {
                        notes.push(format!("verify skipped for N_{i} and above: above the enumeration cap"));
                        break;
                    }
                    let mi = Modulus::new(p.clone(), i)?;
                    let bf = oracle::brute_force_roots(&f, &mi)?;
                    if BigUint::from(bf.len()) != s.coefficients[i as usize] {
                        diffs.push(format!("N_{i}: engine {} oracle {}", s.coefficients[i as usize], bf.len()));
                    }
                }
            }
            (igusa_json(&s, padic.as_ref()), igusa_text(&s, padic.as_ref()))
        }
    };
    let stdout = if spec.json {
        format!("{}\n", serde_json::to_string(&value).expect("json"))
    } else {
        text
    };
    let mut stderr = String::new();
    for n in &notes {
        let _ = writeln!(stderr, "{n}");
    }
    for d in &diffs {
        let _ = writeln!(stderr, "verify mismatch: {d}");
    }
    let code = if diffs.is_empty() { EXIT_OK } else { EXIT_VERIFY };
    Ok(Outcome { code, stdout, stderr })
}

/// Parses `args` (including the program name) and runs the job.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match JobSpec::try_parse_from(args) {
        Ok(spec) => run(&spec),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome::failure(code, text)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn parses_expressions() {
        assert_eq!(parse_poly("x^2+3*x").unwrap(), ints(&[0, 3, 1]));
        assert_eq!(parse_poly(" x ^ 2 + 3 ").unwrap(), ints(&[3, 0, 1]));
        assert_eq!(parse_poly("-x^2").unwrap(), ints(&[0, 0, -1]));
        assert_eq!(parse_poly("2x(x-1)").unwrap(), ints(&[0, -2, 2]));
        assert_eq!(parse_poly("(x+1)^3").unwrap(), ints(&[1, 3, 3, 1]));
        assert_eq!(parse_poly("x - x").unwrap(), ints(&[]));
        assert_eq!(parse_poly("1").unwrap(), ints(&[1]));
        assert_eq!(parse_poly("x^2 - -1").unwrap(), ints(&[1, 0, 1]));
    }

    #[test]
    fn rejects_bad_expressions() {
        for s in ["", "x^", "x+", "(x+1", "x^y", "y", "x^1000001", "2^"] {
            assert!(matches!(parse_poly(s), Err(Error::Parse(_))), "{s}");
        }
    }

    #[test]
    fn parses_coefficients() {
        assert_eq!(parse_coeffs("0, 3,1").unwrap(), ints(&[0, 3, 1]));
        assert_eq!(parse_coeffs("-1,0,1").unwrap(), ints(&[-1, 0, 1]));
        assert!(parse_coeffs("1,,2").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::NotMonicModP), EXIT_NOT_MONIC);
        assert_eq!(exit_code(&Error::Parse("x".into())), EXIT_USAGE);
        assert_eq!(exit_code(&Error::NotPrime(BigUint::from(4u32))), EXIT_USAGE);
        assert_eq!(exit_code(&Error::NotCoprimeModP), EXIT_ERROR);
    }

    #[test]
    fn generator_json() {
        let g = MultiPoly::from_univariate(&[BigUint::from(2u32), BigUint::from(1u32)], 1);
        assert_eq!(multipoly_json(&g), json!(["2", "1"]));
    }
}
