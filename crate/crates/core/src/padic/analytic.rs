use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::number::{ilog, ppow, PadicNumber};
use super::PrimeContext;
use crate::error::{Error, Result};

/// The Teichmüller representative of `a mod p` at relative precision `rel`.
pub fn teichmuller(p: u32, a: u32, rel: u32) -> PadicNumber {
    let modulus = ppow(p, rel);
    let pb = BigUint::from(p);
    let mut x = BigUint::from(a % p) % &modulus;
    for _ in 0..=rel {
        let y = x.modpow(&pb, &modulus);
        if y == x {
            break;
        }
        x = y;
    }
    PadicNumber::from_parts(p, 0, x, rel)
}

pub fn teichmuller_lift(a: u32, ctx: &PrimeContext) -> Result<PadicNumber> {
    if a == 0 || a >= ctx.p() {
        return Err(Error::DomainError(format!("residue {a} not in 1..{}", ctx.p() - 1)));
    }
    Ok(teichmuller(ctx.p(), a, ctx.precision()))
}

pub fn padic_exp(x: &PadicNumber, ctx: &PrimeContext) -> Result<PadicNumber> {
    let p = x.p();
    let Some(target) = x.abs_precision() else {
        return Ok(PadicNumber::one(p, ctx.precision()));
    };
    let v = x.valuation_bound();
    if v < 1 {
        return Err(Error::DomainError("exp needs v(x) >= 1".into()));
    }
    let mut sum = PadicNumber::one(p, target as u32);
    let mut term = PadicNumber::one(p, target as u32);
    let mut n: i64 = 1;
    while n * v - (n - 1) / (p as i64 - 1) < target {
        term = term.mul(x).div_int(n)?;
        sum = sum.add(&term);
        n += 1;
    }
    Ok(sum)
}

/// Logarithm on units, extended from 1 + pZ_p by discarding the torsion part.
pub fn padic_log(x: &PadicNumber) -> Result<PadicNumber> {
    if x.valuation() != Some(0) {
        return Err(Error::DomainError("log needs a unit".into()));
    }
    let p = x.p();
    let w = teichmuller(p, x.unit_residue(), x.rel_precision());
    let z = x.div(&w)?.sub(&PadicNumber::one(p, x.rel_precision()));
    log_one_plus(&z)
}

/// log(1 + z) for v(z) ≥ 1.
pub(crate) fn log_one_plus(z: &PadicNumber) -> Result<PadicNumber> {
    let p = z.p();
    let Some(target) = z.abs_precision() else {
        return Ok(PadicNumber::zero(p));
    };
    let v = z.valuation_bound();
    if v < 1 {
        return Err(Error::DomainError("log(1+z) needs v(z) >= 1".into()));
    }
    let mut sum = PadicNumber::zero_to(p, target);
    let mut zn = z.clone();
    let mut n: i64 = 1;
    while n * v - ilog(n as u64, p) < target {
        let term = zn.div_int(n)?;
        sum = if n % 2 == 1 { sum.add(&term) } else { sum.sub(&term) };
        zn = zn.mul(z);
        n += 1;
    }
    Ok(sum)
}

/// (x^(p^m) − 1)/p^m for x ∈ 1 + pZ_p.
pub fn frobenius_log(x: &PadicNumber, m: u32) -> Result<PadicNumber> {
    if m < 1 {
        return Err(Error::DomainError("m must be at least 1".into()));
    }
    let p = x.p();
    if x.valuation() != Some(0) || x.unit_residue() != 1 {
        return Err(Error::DomainError("frobenius_log needs x in 1 + pZ_p".into()));
    }
    let r = x.rel_precision();
    let y = x.with_rel(r + m).pow_big(&ppow(p, m));
    Ok(y.sub(&PadicNumber::one(p, r + m)).mul_pow_p(-(m as i64)))
}

/// The p^m-th root of 1 + p^m·x by Newton iteration from 1.
pub fn frobenius_exp_approx(x: &PadicNumber, m: u32, ctx: &PrimeContext) -> Result<PadicNumber> {
    if m < 1 {
        return Err(Error::DomainError("m must be at least 1".into()));
    }
    let p = x.p();
    let Some(target) = x.abs_precision() else {
        return Ok(PadicNumber::one(p, ctx.precision()));
    };
    if x.valuation_bound() < 1 {
        return Err(Error::DomainError("frobenius_exp_approx needs v(x) >= 1".into()));
    }
    let work = (target + m as i64) as u32;
    let k = ppow(p, m);
    let km1 = &k - 1u32;
    let c = PadicNumber::one(p, work).add(&x.mul_pow_p(m as i64));
    let mut z = PadicNumber::one(p, work);
    let max_iter = 2 * work as usize + 10;
    for _ in 0..max_iter {
        let zk1 = z.pow_big(&km1);
        let zk = zk1.mul(&z);
        let delta = zk.sub(&c).div(&zk1.mul_pow_p(m as i64))?;
        if delta.is_zero() {
            return Ok(z.truncate_abs(target));
        }
        z = z.sub(&delta).with_rel(work);
    }
    Err(Error::NonConvergence { iterations: max_iter })
}

/// Splits x = p^s · ω(a) · g with g ∈ 1 + pZ_p.
pub fn unit_decompose(x: &PadicNumber) -> Result<(i64, u32, PadicNumber)> {
    let Some(s) = x.valuation() else {
        return Err(Error::ZeroInput);
    };
    let p = x.p();
    let u = x.mul_pow_p(-s);
    let a = u.unit_residue();
    let g = u.div(&teichmuller(p, a, u.rel_precision()))?;
    Ok((s, a, g))
}

/// s·log p + ω(a)^l·log g, with the log p part kept formal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormalLogValue {
    pub log_p_coeff: Rational64,
    pub body: PadicNumber,
    pub char_index: u32,
}

impl FormalLogValue {
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.char_index != other.char_index {
            return Err(Error::DomainError("character indices differ".into()));
        }
        Ok(FormalLogValue {
            log_p_coeff: self.log_p_coeff + other.log_p_coeff,
            body: self.body.add(&other.body),
            char_index: self.char_index,
        })
    }
}

pub fn generalized_log(x: &PadicNumber, l: u32) -> Result<FormalLogValue> {
    let p = x.p();
    if l > p - 2 {
        return Err(Error::DomainError(format!("character index {l} not in 0..{}", p - 2)));
    }
    let (s, a, g) = unit_decompose(x)?;
    let w = teichmuller(p, a, g.rel_precision()).pow(l as i64)?;
    Ok(FormalLogValue { log_p_coeff: Rational64::from_integer(s), body: w.mul(&padic_log(&g)?), char_index: l })
}

/// The n-th root of a unit congruent to `seed` mod p, for n prime to p.
pub fn unit_nth_root(x: &PadicNumber, n: u32, seed: u32) -> Result<PadicNumber> {
    let p = x.p();
    if n == 0 || n.is_multiple_of(p) {
        return Err(Error::DomainError(format!("root index {n} must be prime to p")));
    }
    if x.valuation() != Some(0) {
        return Err(Error::DomainError("root of a non-unit".into()));
    }
    let rel = x.rel_precision();
    let check = BigUint::from(seed).modpow(&BigUint::from(n), &BigUint::from(p));
    if seed.is_multiple_of(p) || check.to_u32() != Some(x.unit_residue()) {
        return Err(Error::DomainError(format!("{seed} is not an {n}-th root mod p")));
    }
    let mut z = PadicNumber::from_i64(p, seed as i64, rel);
    let max_iter = 2 * rel as usize + 10;
    for _ in 0..max_iter {
        let zn1 = z.pow(n as i64 - 1)?;
        let delta = zn1.mul(&z).sub(x).div(&zn1.mul(&PadicNumber::from_i64(p, n as i64, rel)))?;
        if delta.is_zero() {
            return Ok(z);
        }
        z = z.sub(&delta).with_rel(rel);
    }
    Err(Error::NonConvergence { iterations: max_iter })
}
