//! Witt vectors over F_p, identified with Z_p through Teichmüller digits.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{ppow, teichmuller, PadicNumber};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WittVector {
    pub p: u32,
    pub digits: Vec<u32>,
}

impl WittVector {
    pub fn new(p: u32, digits: Vec<u32>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::DomainError("Witt vector needs at least one digit".into()));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= p) {
            return Err(Error::OutOfRange(format!("digit {d} not below {p}")));
        }
        Ok(WittVector { p, digits })
    }

    pub fn zero(p: u32, n: usize) -> Self {
        WittVector { p, digits: vec![0; n] }
    }

    pub fn one(p: u32, n: usize) -> Self {
        let mut w = Self::zero(p, n);
        w.digits[0] = 1;
        w
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, p: u32, n: usize) -> Self {
        WittVector { p, digits: (0..n).map(|_| rng.gen_range(0..p)).collect() }
    }
}

/// W_k = Σ_{i ≤ k} p^i X_i^(p^(k−i)) for the integer lifts X_i ∈ 0..p−1.
pub fn ghost_components(w: &WittVector) -> Vec<BigInt> {
    let p = w.p;
    (0..w.len())
        .map(|k| {
            (0..=k)
                .map(|i| {
                    let e = ppow(p, (k - i) as u32).to_u32().expect("ghost exponent fits in u32");
                    BigInt::from(ppow(p, i as u32)) * BigInt::from(w.digits[i]).pow(e)
                })
                .sum()
        })
        .collect()
}

/// Ghost components reduced mod p^m.
pub fn ghost_components_mod(w: &WittVector, m: u32) -> Vec<BigUint> {
    let p = w.p;
    let modulus = ppow(p, m);
    (0..w.len())
        .map(|k| {
            let mut acc = BigUint::zero();
            for i in 0..=k {
                let x = BigUint::from(w.digits[i]).modpow(&ppow(p, (k - i) as u32), &modulus);
                acc += ppow(p, i as u32) * x;
            }
            acc % &modulus
        })
        .collect()
}

/// Σ ω(d_i)·p^i, known mod p^n.
pub fn witt_to_zp(w: &WittVector) -> PadicNumber {
    let p = w.p;
    let n = w.len() as i64;
    let mut acc = PadicNumber::zero_to(p, n);
    for (i, &d) in w.digits.iter().enumerate() {
        if d != 0 {
            acc = acc.add(&teichmuller(p, d, (n - i as i64) as u32).mul_pow_p(i as i64));
        }
    }
    acc.truncate_abs(n)
}

/// Teichmüller digits of x ∈ Z_p, by repeated (x − ω(x mod p))/p.
pub fn zp_to_witt(x: &PadicNumber, n: usize) -> Result<WittVector> {
    let p = x.p();
    if n == 0 {
        return Err(Error::DomainError("length must be at least 1".into()));
    }
    if x.valuation_bound() < 0 {
        return Err(Error::DomainError("not a p-adic integer".into()));
    }
    match x.abs_precision() {
        Some(a) if a < n as i64 => return Err(Error::PrecisionExhausted(format!("need {n} digits, have {a}"))),
        _ => {}
    }
    let mut x = x.clone();
    let mut digits = Vec::with_capacity(n);
    for i in 0..n {
        let d = x.residue(1)?.to_u32().unwrap();
        digits.push(d);
        if i + 1 == n {
            break;
        }
        if d != 0 {
            let rel = x.abs_precision().unwrap_or(n as i64).max(1) as u32;
            x = x.sub(&teichmuller(p, d, rel));
        }
        x = x.mul_pow_p(-1);
    }
    WittVector::new(p, digits)
}

fn check_pair(a: &WittVector, b: &WittVector) -> Result<()> {
    if a.p != b.p {
        return Err(Error::ModulusMismatch);
    }
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(())
}

pub fn witt_add(a: &WittVector, b: &WittVector) -> Result<WittVector> {
    check_pair(a, b)?;
    zp_to_witt(&witt_to_zp(a).add(&witt_to_zp(b)), a.len())
}

pub fn witt_mul(a: &WittVector, b: &WittVector) -> Result<WittVector> {
    check_pair(a, b)?;
    zp_to_witt(&witt_to_zp(a).mul(&witt_to_zp(b)), a.len())
}

pub fn witt_neg(a: &WittVector) -> Result<WittVector> {
    zp_to_witt(&witt_to_zp(a).neg(), a.len())
}

/// (a_0, a_1, …) ↦ (0, a_0, a_1, …); drops the last digit unless `grow`.
pub fn verschiebung(w: &WittVector, grow: bool) -> WittVector {
    let mut digits = Vec::with_capacity(w.len() + 1);
    digits.push(0);
    digits.extend_from_slice(&w.digits);
    if !grow {
        digits.truncate(w.len());
    }
    WittVector { p: w.p, digits }
}

/// (a_0, a_1, …) ↦ (a_0^p, a_1^p, …), the identity on F_p digits.
pub fn frobenius_op(w: &WittVector) -> WittVector {
    let p = w.p as u64;
    let digits = w
        .digits
        .iter()
        .map(|&d| BigUint::from(d).modpow(&BigUint::from(p), &BigUint::from(p)).to_u32().unwrap())
        .collect();
    WittVector { p: w.p, digits }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WittOp {
    Add,
    Mul,
}

/// For each index i, v_p(ghost_i(a ∘ b) − ghost_i(a) ∘ ghost_i(b)), capped at `cap`.
pub fn ghost_defect(a: &WittVector, b: &WittVector, op: WittOp, cap: u32) -> Result<Vec<u32>> {
    let r = match op {
        WittOp::Add => witt_add(a, b)?,
        WittOp::Mul => witt_mul(a, b)?,
    };
    let m = ppow(a.p, cap);
    let (ga, gb, gr) = (ghost_components_mod(a, cap), ghost_components_mod(b, cap), ghost_components_mod(&r, cap));
    Ok((0..a.len())
        .map(|i| {
            let combined = match op {
                WittOp::Add => (&ga[i] + &gb[i]) % &m,
                WittOp::Mul => (&ga[i] * &gb[i]) % &m,
            };
            let diff = (&gr[i] + &m - combined) % &m;
            if diff.is_zero() {
                cap
            } else {
                let mut d = diff;
                let mut v = 0;
                while (&d % a.p).is_zero() {
                    d /= a.p;
                    v += 1;
                }
                v
            }
        })
        .collect())
}
