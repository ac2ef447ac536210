use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// p^k as a big integer.
pub(crate) fn ppow(p: u32, k: u32) -> BigUint {
    BigUint::from(p).pow(k)
}

/// Removes all factors of `p` from `n` and returns how many were removed.
pub(crate) fn strip_p(n: &mut BigUint, p: u32) -> u32 {
    if n.is_zero() {
        return 0;
    }
    let pb = BigUint::from(p);
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return k;
        }
        *n = q;
        k += 1;
    }
}

pub(crate) fn vp_u64(mut n: u64, p: u32) -> u32 {
    let p = p as u64;
    let mut k = 0;
    while n != 0 && n.is_multiple_of(p) {
        n /= p;
        k += 1;
    }
    k
}

/// floor(log_p n) for n ≥ 1.
pub(crate) fn ilog(n: u64, p: u32) -> i64 {
    let mut k = 0;
    let mut q = p as u64;
    while q <= n {
        k += 1;
        q = match q.checked_mul(p as u64) {
            Some(v) => v,
            None => break,
        };
    }
    k
}

fn mod_inverse(u: &BigUint, modulus: &BigUint) -> BigUint {
    let a = BigInt::from_biguint(Sign::Plus, u.clone());
    let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
    let eg = a.extended_gcd(&m);
    debug_assert!(eg.gcd.is_one());
    eg.x.mod_floor(&m).to_biguint().expect("nonnegative")
}

#[derive(Clone, Debug)]
enum Repr {
    /// Zero known to absolute precision `abs` (`None` for an exact zero).
    Zero { abs: Option<i64> },
    /// p^val · unit with `unit` a unit modulo p^rel.
    Unit { val: i64, unit: BigUint, rel: u32 },
}

/// An element of Q_p stored as p^v · u with u a unit known modulo p^rel.
#[derive(Clone, Debug)]
pub struct PadicNumber {
    p: u32,
    repr: Repr,
}

impl PadicNumber {
    pub fn zero(p: u32) -> Self {
        PadicNumber { p, repr: Repr::Zero { abs: None } }
    }

    /// Zero known modulo p^abs.
    pub fn zero_to(p: u32, abs: i64) -> Self {
        PadicNumber { p, repr: Repr::Zero { abs: Some(abs) } }
    }

    pub fn one(p: u32, rel: u32) -> Self {
        Self::from_parts(p, 0, BigUint::one(), rel)
    }

    /// Builds p^val · unit mod p^rel, absorbing any factors of p in `unit`.
    pub fn from_parts(p: u32, val: i64, unit: BigUint, rel: u32) -> Self {
        if rel == 0 {
            return Self::zero_to(p, val);
        }
        let mut u = unit % ppow(p, rel);
        if u.is_zero() {
            return Self::zero_to(p, val + rel as i64);
        }
        let k = strip_p(&mut u, p);
        PadicNumber { p, repr: Repr::Unit { val: val + k as i64, unit: u, rel: rel - k } }
    }

    pub fn from_bigint(p: u32, n: &BigInt, rel: u32) -> Self {
        if n.is_zero() {
            return Self::zero(p);
        }
        let mut mag = n.magnitude().clone();
        let v = strip_p(&mut mag, p);
        let modulus = ppow(p, rel);
        let mut u = mag % &modulus;
        if n.is_negative() {
            u = (&modulus - u) % &modulus;
        }
        Self::from_parts(p, v as i64, u, rel)
    }

    pub fn from_i64(p: u32, n: i64, rel: u32) -> Self {
        Self::from_bigint(p, &BigInt::from(n), rel)
    }

    pub fn from_rational(p: u32, q: &BigRational, rel: u32) -> Result<Self> {
        if q.denom().is_zero() {
            return Err(Error::DivisionByZero);
        }
        let num = Self::from_bigint(p, q.numer(), rel);
        let den = Self::from_bigint(p, q.denom(), rel);
        num.div(&den)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn valuation(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Unit { val, .. } => Some(*val),
        }
    }

    /// Valuation for nonzero values; the known lower bound for inexact
    /// zeros; `i64::MAX` for an exact zero.
    pub fn valuation_bound(&self) -> i64 {
        match &self.repr {
            Repr::Zero { abs: None } => i64::MAX,
            Repr::Zero { abs: Some(a) } => *a,
            Repr::Unit { val, .. } => *val,
        }
    }

    /// `None` for an exact zero.
    pub fn abs_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { abs } => *abs,
            Repr::Unit { val, rel, .. } => Some(val + *rel as i64),
        }
    }

    pub fn rel_precision(&self) -> u32 {
        match &self.repr {
            Repr::Zero { .. } => 0,
            Repr::Unit { rel, .. } => *rel,
        }
    }

    pub fn unit(&self) -> Option<&BigUint> {
        match &self.repr {
            Repr::Zero { .. } => None,
            Repr::Unit { unit, .. } => Some(unit),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { abs: None })
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    /// Residue of the unit part modulo p (0 for zero).
    pub fn unit_residue(&self) -> u32 {
        match &self.repr {
            Repr::Zero { .. } => 0,
            Repr::Unit { unit, .. } => (unit % self.p).to_u32().unwrap(),
        }
    }

    /// Little-endian base-p digits of the unit part.
    pub fn digits(&self) -> Vec<u32> {
        match &self.repr {
            Repr::Zero { .. } => Vec::new(),
            Repr::Unit { unit, rel, .. } => {
                let mut out = Vec::with_capacity(*rel as usize);
                let mut u = unit.clone();
                let pb = BigUint::from(self.p);
                for _ in 0..*rel {
                    let (q, r) = u.div_rem(&pb);
                    out.push(r.to_u32().unwrap());
                    u = q;
                }
                out
            }
        }
    }

    /// The value modulo p^k as an integer in [0, p^k).
    pub fn residue(&self, k: u32) -> Result<BigUint> {
        match &self.repr {
            Repr::Zero { abs } => match abs {
                Some(a) if *a < k as i64 => {
                    Err(Error::PrecisionExhausted(format!("zero known to p^{a}, residue mod p^{k} requested")))
                }
                _ => Ok(BigUint::zero()),
            },
            Repr::Unit { val, unit, rel } => {
                if *val < 0 {
                    return Err(Error::DomainError("value is not integral".into()));
                }
                if val + (*rel as i64) < k as i64 {
                    return Err(Error::PrecisionExhausted(format!(
                        "value known to p^{}, residue mod p^{k} requested",
                        val + *rel as i64
                    )));
                }
                if *val >= k as i64 {
                    return Ok(BigUint::zero());
                }
                Ok((unit * ppow(self.p, *val as u32)) % ppow(self.p, k))
            }
        }
    }

    /// The stored representative p^v·u as a rational number.
    pub fn to_rational(&self) -> BigRational {
        match &self.repr {
            Repr::Zero { .. } => BigRational::zero(),
            Repr::Unit { val, unit, .. } => {
                let u = BigInt::from_biguint(Sign::Plus, unit.clone());
                let pk = BigInt::from_biguint(Sign::Plus, ppow(self.p, val.unsigned_abs() as u32));
                if *val >= 0 {
                    BigRational::from_integer(u * pk)
                } else {
                    BigRational::new(u, pk)
                }
            }
        }
    }

    /// Changes the relative precision of a nonzero value, treating the stored
    /// representative as exact when growing. Zeros are returned unchanged.
    pub fn with_rel(&self, rel: u32) -> Self {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Unit { val, unit, .. } => Self::from_parts(self.p, *val, unit.clone(), rel.max(1)),
        }
    }

    /// Grows precision by `k` digits, treating the representative as exact.
    pub fn lift_by(&self, k: u32) -> Self {
        match &self.repr {
            Repr::Zero { abs: None } => self.clone(),
            Repr::Zero { abs: Some(a) } => Self::zero_to(self.p, a + k as i64),
            Repr::Unit { val, unit, rel } => {
                PadicNumber { p: self.p, repr: Repr::Unit { val: *val, unit: unit.clone(), rel: rel + k } }
            }
        }
    }

    /// Sets absolute precision to `abs`, treating the representative as exact.
    pub fn lift_to_abs(&self, abs: i64) -> Self {
        match &self.repr {
            Repr::Zero { .. } => Self::zero_to(self.p, abs),
            Repr::Unit { val, unit, .. } => {
                if *val >= abs {
                    Self::zero_to(self.p, abs)
                } else {
                    Self::from_parts(self.p, *val, unit.clone(), (abs - val) as u32)
                }
            }
        }
    }

    /// Forgets everything beyond p^abs.
    pub fn truncate_abs(&self, abs: i64) -> Self {
        match &self.repr {
            Repr::Zero { abs: a } => match a {
                Some(a) if *a <= abs => self.clone(),
                _ => Self::zero_to(self.p, abs),
            },
            Repr::Unit { val, unit, rel } => {
                if *val >= abs {
                    Self::zero_to(self.p, abs)
                } else if val + (*rel as i64) <= abs {
                    self.clone()
                } else {
                    Self::from_parts(self.p, *val, unit.clone(), (abs - val) as u32)
                }
            }
        }
    }

    /// Multiplies by p^k exactly.
    pub fn mul_pow_p(&self, k: i64) -> Self {
        match &self.repr {
            Repr::Zero { abs: None } => self.clone(),
            Repr::Zero { abs: Some(a) } => Self::zero_to(self.p, a + k),
            Repr::Unit { val, unit, rel } => {
                PadicNumber { p: self.p, repr: Repr::Unit { val: val + k, unit: unit.clone(), rel: *rel } }
            }
        }
    }

    /// Divides by a nonzero integer, keeping relative precision.
    pub fn div_int(&self, n: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::DivisionByZero);
        }
        let k = vp_u64(n.unsigned_abs(), self.p);
        let rest = n / (self.p as i64).pow(k);
        match &self.repr {
            Repr::Zero { abs: None } => Ok(self.clone()),
            Repr::Zero { abs: Some(a) } => Ok(Self::zero_to(self.p, a - k as i64)),
            Repr::Unit { val, unit, rel } => {
                let modulus = ppow(self.p, *rel);
                let r = BigInt::from(rest).mod_floor(&BigInt::from_biguint(Sign::Plus, modulus.clone()));
                let inv = mod_inverse(&r.to_biguint().unwrap(), &modulus);
                Ok(Self::from_parts(self.p, val - k as i64, unit * inv, *rel))
            }
        }
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Unit { val, unit, rel } => {
                let m = ppow(self.p, *rel);
                Self::from_parts(self.p, *val, &m - unit, *rel)
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed primes");
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs: a }, Repr::Zero { abs: b }) => match (a, b) {
                (None, None) => Self::zero(self.p),
                (Some(x), None) | (None, Some(x)) => Self::zero_to(self.p, *x),
                (Some(x), Some(y)) => Self::zero_to(self.p, (*x).min(*y)),
            },
            (Repr::Zero { abs }, Repr::Unit { .. }) => match abs {
                None => other.clone(),
                Some(a) => other.truncate_abs(*a),
            },
            (Repr::Unit { .. }, Repr::Zero { abs }) => match abs {
                None => self.clone(),
                Some(a) => self.truncate_abs(*a),
            },
            (Repr::Unit { val: va, unit: ua, rel: ra }, Repr::Unit { val: vb, unit: ub, rel: rb }) => {
                let v = (*va).min(*vb);
                let abs = (va + *ra as i64).min(vb + *rb as i64);
                let k = (abs - v) as u32;
                let modulus = ppow(self.p, k);
                let mut s = BigUint::zero();
                if ((va - v) as u32) < k {
                    s += ua * ppow(self.p, (va - v) as u32);
                }
                if ((vb - v) as u32) < k {
                    s += ub * ppow(self.p, (vb - v) as u32);
                }
                s %= &modulus;
                if s.is_zero() {
                    return Self::zero_to(self.p, abs);
                }
                Self::from_parts(self.p, v, s, k)
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed primes");
        match (&self.repr, &other.repr) {
            (Repr::Zero { abs: None }, _) | (_, Repr::Zero { abs: None }) => Self::zero(self.p),
            (Repr::Zero { abs: Some(a) }, Repr::Zero { abs: Some(b) }) => Self::zero_to(self.p, a + b),
            (Repr::Zero { abs: Some(a) }, Repr::Unit { val, .. })
            | (Repr::Unit { val, .. }, Repr::Zero { abs: Some(a) }) => Self::zero_to(self.p, a + val),
            (Repr::Unit { val: va, unit: ua, rel: ra }, Repr::Unit { val: vb, unit: ub, rel: rb }) => {
                let rel = (*ra).min(*rb);
                let u = (ua * ub) % ppow(self.p, rel);
                PadicNumber { p: self.p, repr: Repr::Unit { val: va + vb, unit: u, rel } }
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        match &self.repr {
            Repr::Zero { .. } => Err(Error::DivisionByZero),
            Repr::Unit { val, unit, rel } => {
                let inv = mod_inverse(unit, &ppow(self.p, *rel));
                Ok(PadicNumber { p: self.p, repr: Repr::Unit { val: -val, unit: inv, rel: *rel } })
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        Ok(self.pow_big(&BigUint::from(e as u64)))
    }

    pub fn pow_big(&self, e: &BigUint) -> Self {
        if e.is_zero() {
            let rel = match &self.repr {
                Repr::Unit { rel, .. } => *rel,
                Repr::Zero { abs: Some(a) } => (*a).max(1) as u32,
                Repr::Zero { abs: None } => 1,
            };
            return Self::one(self.p, rel);
        }
        let scale = |x: i64| -> i64 {
            let prod = BigInt::from(x) * BigInt::from_biguint(Sign::Plus, e.clone());
            prod.to_i64().unwrap_or(if x >= 0 { i64::MAX / 4 } else { i64::MIN / 4 })
        };
        match &self.repr {
            Repr::Zero { abs: None } => self.clone(),
            Repr::Zero { abs: Some(a) } => Self::zero_to(self.p, scale(*a)),
            Repr::Unit { val, unit, rel } => {
                let u = unit.modpow(e, &ppow(self.p, *rel));
                PadicNumber { p: self.p, repr: Repr::Unit { val: scale(*val), unit: u, rel: *rel } }
            }
        }
    }

    /// True when the two values agree to their common precision.
    pub fn agrees(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// Valuation of the difference, or its known lower bound when the
    /// values agree to common precision.
    pub fn diff_valuation(&self, other: &Self) -> i64 {
        self.sub(other).valuation_bound()
    }
}

impl PartialEq for PadicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.agrees(other)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&PadicNumber> for &PadicNumber {
            type Output = PadicNumber;
            fn $m(self, rhs: &PadicNumber) -> PadicNumber {
                PadicNumber::$m(self, rhs)
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> PadicNumber {
        PadicNumber::neg(self)
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Zero { abs: None } => write!(f, "0"),
            Repr::Zero { abs: Some(a) } => write!(f, "O({}^{})", self.p, a),
            Repr::Unit { val, rel, .. } => {
                write!(f, "{} + O({}^{})", self.to_rational(), self.p, val + *rel as i64)
            }
        }
    }
}
