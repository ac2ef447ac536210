//! Haar integration over Z_p of products of powers of absolute values of
//! polynomials, by recursive subdivision into residue classes a + p^k Z_p.
//!
//! A class is a leaf when each factor's constant term strictly dominates the
//! rest, or when a single factor has a dominant linear term (a simple root,
//! integrated in closed form). A class whose content-normalized polynomials
//! repeat those of an ancestor contributes a multiple of the ancestor's
//! integral, and the resulting linear relation is solved exactly.

mod fisher_rao;
mod serre;

pub use fisher_rao::{fisher_rao_bound, fisher_rao_components, FisherRao};
pub use serre::{
    elliptic_point_count, elliptic_serre_invariant, serre_ball_class, serre_invariant_form, SerreInvariant,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::PadicNumber;
use crate::series::TruncSeries;

pub type Poly = Vec<PadicNumber>;

/// Π |P_i(x)|^(e_i) over Z_p.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormIntegrand {
    p: u32,
    factors: Vec<(Poly, i32)>,
}

impl NormIntegrand {
    pub fn product(p: u32, factors: Vec<(Poly, i32)>) -> Self {
        NormIntegrand { p, factors }
    }

    /// |P|^r.
    pub fn power(p: u32, poly: Poly, r: u32) -> Self {
        Self::product(p, vec![(poly, r as i32)])
    }

    /// |num/den|^r.
    pub fn ratio(p: u32, num: Poly, den: Poly, r: u32) -> Self {
        Self::product(p, vec![(num, r as i32), (den, -(r as i32))])
    }

    pub fn from_series(s: &TruncSeries, r: u32) -> Self {
        Self::power(s.p(), s.coeffs().to_vec(), r)
    }

    pub fn constant(c: PadicNumber) -> Self {
        Self::power(c.p(), vec![c], 1)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn factors(&self) -> &[(Poly, i32)] {
        &self.factors
    }
}

/// Value of an integral together with a bound on the unresolved part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralOutcome {
    pub value: BigRational,
    /// `Some(0)` when exact; `None` when the unresolved part is unbounded.
    pub error_bound: Option<BigRational>,
}

impl IntegralOutcome {
    pub fn is_exact(&self) -> bool {
        matches!(&self.error_bound, Some(b) if b.is_zero())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Mode {
    Integral,
    Supremum,
}

#[derive(Clone, Debug)]
struct Form {
    c: BigRational,
    refs: Vec<(usize, BigRational)>,
    err: Option<BigRational>,
}

impl Form {
    fn value(c: BigRational) -> Self {
        Form { c, refs: Vec::new(), err: Some(BigRational::zero()) }
    }

    fn scaled(mut self, s: &BigRational) -> Self {
        self.c *= s;
        for r in &mut self.refs {
            r.1 *= s;
        }
        self.err = self.err.map(|e| e * s);
        self
    }

    fn combine(forms: Vec<Form>, mode: Mode) -> Form {
        let mut out = Form { c: BigRational::zero(), refs: Vec::new(), err: Some(BigRational::zero()) };
        for f in forms {
            match mode {
                Mode::Integral => out.c += f.c,
                Mode::Supremum => {
                    if f.c > out.c {
                        out.c = f.c
                    }
                }
            }
            for (j, b) in f.refs {
                match out.refs.iter_mut().find(|(k, _)| *k == j) {
                    Some(slot) => match mode {
                        Mode::Integral => slot.1 += b,
                        Mode::Supremum => {
                            if b > slot.1 {
                                slot.1 = b
                            }
                        }
                    },
                    None => out.refs.push((j, b)),
                }
            }
            out.err = match (out.err, f.err) {
                (Some(a), Some(b)) => Some(match mode {
                    Mode::Integral => a + b,
                    Mode::Supremum => {
                        if a > b {
                            a
                        } else {
                            b
                        }
                    }
                }),
                _ => None,
            };
        }
        out
    }

    /// Eliminates the self-reference to stack slot `j`.
    fn resolve(mut self, j: usize, mode: Mode) -> Form {
        let Some(pos) = self.refs.iter().position(|(k, _)| *k == j) else {
            return self;
        };
        let (_, b) = self.refs.remove(pos);
        match mode {
            Mode::Supremum => self,
            Mode::Integral => {
                let one = BigRational::one();
                if b >= one {
                    self.err = None;
                    self
                } else {
                    let s = one.clone() / (one - b);
                    self.scaled(&s)
                }
            }
        }
    }
}

/// p^(-k) as a rational.
pub(crate) fn p_inv_pow(p: u32, k: i64) -> BigRational {
    let pk = BigInt::from(p).pow(k.unsigned_abs() as u32);
    if k >= 0 {
        BigRational::new(BigInt::one(), pk)
    } else {
        BigRational::from_integer(pk)
    }
}

/// Q(c + s) for an integer shift c.
fn taylor_shift(q: &Poly, c: &PadicNumber) -> Poly {
    let mut a = q.clone();
    let n = a.len();
    if c.is_exact_zero() {
        return a;
    }
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            let t = a[j + 1].mul(c);
            a[j] = a[j].add(&t);
        }
    }
    a
}

/// Q(c + p·t).
fn child_poly(q: &Poly, c: &PadicNumber) -> Poly {
    taylor_shift(q, c).into_iter().enumerate().map(|(j, b)| b.mul_pow_p(j as i64)).collect()
}

fn content(q: &Poly) -> i64 {
    q.iter().map(|b| b.valuation_bound()).min().unwrap_or(i64::MAX)
}

fn all_zero(q: &Poly) -> bool {
    q.iter().all(|b| b.is_zero())
}

fn is_constant(q: &Poly) -> bool {
    match q.first() {
        Some(b0) => match b0.valuation() {
            Some(v) => q.iter().skip(1).all(|b| b.valuation_bound() > v),
            None => false,
        },
        None => false,
    }
}

/// Dominant linear term with the root inside the class.
fn has_simple_root(q: &Poly) -> bool {
    let Some(v1) = q.get(1).and_then(|b| b.valuation()) else {
        return false;
    };
    q[0].valuation_bound() >= v1 && q.iter().skip(2).all(|b| b.valuation_bound() > v1)
}

struct Ancestor {
    normalized: Vec<Poly>,
    exponent_content: i64,
}

struct Engine {
    p: u32,
    exps: Vec<i32>,
    max_depth: usize,
    mode: Mode,
}

fn same_polys(a: &[Poly], b: &[Poly]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.len() == y.len() && x.iter().zip(y).all(|(s, t)| s.is_exact_zero() == t.is_exact_zero() && s.agrees(t))
        })
}

impl Engine {
    fn node(&self, polys: Vec<Poly>, depth: usize, stack: &mut Vec<Ancestor>) -> Result<Form> {
        let mut value = BigRational::one();
        let mut nonconstant = Vec::new();
        for (i, q) in polys.iter().enumerate() {
            let e = self.exps[i];
            if e == 0 {
                continue;
            }
            if q.iter().all(|b| b.is_exact_zero()) {
                if e < 0 {
                    return Err(Error::VanishingDensity);
                }
                return Ok(Form::value(BigRational::zero()));
            }
            if is_constant(q) {
                value *= p_inv_pow(self.p, e as i64 * q[0].valuation().unwrap());
            } else {
                nonconstant.push(i);
            }
        }
        if nonconstant.is_empty() {
            return Ok(Form::value(value));
        }
        if nonconstant.len() == 1 {
            let i = nonconstant[0];
            let q = &polys[i];
            let e = self.exps[i];
            if has_simple_root(q) {
                if e < 0 {
                    return Err(Error::VanishingDensity);
                }
                let v1 = q[1].valuation().unwrap();
                value *= p_inv_pow(self.p, e as i64 * v1);
                if self.mode == Mode::Integral {
                    let one = BigRational::one();
                    value *= (&one - p_inv_pow(self.p, 1)) / (&one - p_inv_pow(self.p, e as i64 + 1));
                }
                return Ok(Form::value(value));
            }
        }

        let contents: Vec<i64> = polys.iter().map(content).collect();
        let exponent_content: i64 = polys
            .iter()
            .zip(&contents)
            .zip(&self.exps)
            .map(|((_, c), e)| if *e == 0 || *c == i64::MAX { 0 } else { *e as i64 * c })
            .sum();
        let normalized: Vec<Poly> = polys
            .iter()
            .zip(&contents)
            .map(|(q, c)| if *c == i64::MAX { q.clone() } else { q.iter().map(|b| b.mul_pow_p(-c)).collect() })
            .collect();
        for (j, anc) in stack.iter().enumerate() {
            if same_polys(&anc.normalized, &normalized) {
                let coeff = p_inv_pow(self.p, exponent_content - anc.exponent_content);
                return Ok(Form { c: BigRational::zero(), refs: vec![(j, coeff)], err: Some(BigRational::zero()) });
            }
        }

        if depth >= self.max_depth {
            return Ok(self.unresolved(&polys));
        }

        stack.push(Ancestor { normalized, exponent_content });
        let me = stack.len() - 1;
        let mut children = Vec::with_capacity(self.p as usize);
        let rel = polys.iter().flatten().filter_map(|b| b.abs_precision()).max().unwrap_or(1).clamp(1, u32::MAX as i64)
            as u32;
        for c in 0..self.p {
            let cc = PadicNumber::from_i64(self.p, c as i64, rel);
            let child: Vec<Poly> = polys.iter().map(|q| child_poly(q, &cc)).collect();
            let f = self.node(child, depth + 1, stack)?;
            children.push(match self.mode {
                Mode::Integral => f.scaled(&p_inv_pow(self.p, 1)),
                Mode::Supremum => f,
            });
        }
        stack.pop();
        Ok(Form::combine(children, self.mode).resolve(me, self.mode))
    }

    /// Unresolved class: value 0, error bounded by the sup of the integrand when known.
    fn unresolved(&self, polys: &[Poly]) -> Form {
        let mut bound = BigRational::one();
        for (q, &e) in polys.iter().zip(&self.exps) {
            if e == 0 {
                continue;
            }
            if e > 0 {
                let c = content(q);
                if c == i64::MAX {
                    return Form::value(BigRational::zero());
                }
                bound *= p_inv_pow(self.p, e as i64 * c);
            } else if is_constant(q) {
                bound *= p_inv_pow(self.p, e as i64 * q[0].valuation().unwrap());
            } else {
                return Form { c: BigRational::zero(), refs: Vec::new(), err: None };
            }
        }
        Form { c: BigRational::zero(), refs: Vec::new(), err: Some(bound) }
    }
}

fn run(g: &NormIntegrand, polys: Vec<Poly>, depth: usize, mode: Mode) -> Result<IntegralOutcome> {
    if depth < 1 {
        return Err(Error::DomainError("depth must be at least 1".into()));
    }
    let engine = Engine { p: g.p, exps: g.factors.iter().map(|f| f.1).collect(), max_depth: depth, mode };
    let mut stack = Vec::new();
    let f = engine.node(polys, 0, &mut stack)?;
    debug_assert!(f.refs.is_empty());
    Ok(IntegralOutcome { value: f.c, error_bound: f.err })
}

/// ∫_{Z_p} of the integrand, reporting unresolved mass instead of failing.
pub fn integrate(g: &NormIntegrand, depth: usize) -> Result<IntegralOutcome> {
    run(g, g.factors.iter().map(|f| f.0.clone()).collect(), depth, Mode::Integral)
}

/// Exact ∫_{Z_p}; fails with `DepthInsufficient` if some class stays unresolved.
pub fn haar_integral(g: &NormIntegrand, depth: usize) -> Result<BigRational> {
    let out = integrate(g, depth)?;
    if out.is_exact() {
        Ok(out.value)
    } else {
        Err(Error::DepthInsufficient { partial: Box::new(out.value), error_bound: out.error_bound.map(Box::new) })
    }
}

/// Exact ∫ over the class a + p^k Z_p.
pub fn haar_integral_on_class(g: &NormIntegrand, a: i64, k: u32, depth: usize) -> Result<BigRational> {
    let p = g.p;
    let shift = PadicNumber::from_i64(p, a, k.max(1) + 64);
    let polys = g
        .factors
        .iter()
        .map(|(q, _)| {
            taylor_shift(q, &shift).into_iter().enumerate().map(|(j, b)| b.mul_pow_p(k as i64 * j as i64)).collect()
        })
        .collect();
    let out = run(g, polys, depth, Mode::Integral)?;
    if out.is_exact() {
        Ok(out.value * p_inv_pow(p, k as i64))
    } else {
        Err(Error::DepthInsufficient { partial: Box::new(out.value), error_bound: out.error_bound.map(Box::new) })
    }
}

/// sup over Z_p of the integrand.
pub fn supremum(g: &NormIntegrand, depth: usize) -> Result<BigRational> {
    let out = run(g, g.factors.iter().map(|f| f.0.clone()).collect(), depth, Mode::Supremum)?;
    if out.is_exact() {
        Ok(out.value)
    } else {
        Err(Error::DepthInsufficient { partial: Box::new(out.value), error_bound: out.error_bound.map(Box::new) })
    }
}

/// Result of a zero scan.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroScan {
    NonVanishing,
    Vanishes,
    Undecided,
}

/// Decides whether a polynomial has a zero in Z_p, up to the given depth.
pub fn scan_zeros(q: &Poly, depth: usize) -> ZeroScan {
    fn go(q: &Poly, p: u32, depth: usize, max_depth: usize) -> ZeroScan {
        if all_zero(q) || q[0].is_zero() || has_simple_root(q) {
            return ZeroScan::Vanishes;
        }
        if is_constant(q) {
            return ZeroScan::NonVanishing;
        }
        if depth >= max_depth {
            return ZeroScan::Undecided;
        }
        let mut undecided = false;
        for c in 0..p {
            let cc = PadicNumber::from_i64(p, c as i64, 1);
            match go(&child_poly(q, &cc), p, depth + 1, max_depth) {
                ZeroScan::Vanishes => return ZeroScan::Vanishes,
                ZeroScan::Undecided => undecided = true,
                ZeroScan::NonVanishing => {}
            }
        }
        if undecided {
            ZeroScan::Undecided
        } else {
            ZeroScan::NonVanishing
        }
    }
    match q.first() {
        None => ZeroScan::Vanishes,
        Some(b) => go(q, b.p(), 0, depth),
    }
}
