//! Totally ramified extensions Z_p[x]/(g) for an Eisenstein polynomial g.

use std::sync::Arc;

use num_integer::Integer;
use num_rational::Rational64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{ilog, PadicNumber};

/// Monic g = x^e + g_{e−1}x^(e−1) + … + g_0 with p | g_i and v_p(g_0) = 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EisensteinModulus {
    pub p: u32,
    pub e: usize,
    /// g_0 … g_{e−1}; the leading 1 is implicit.
    pub coeffs: Vec<PadicNumber>,
}

impl EisensteinModulus {
    pub fn new(p: u32, coeffs: Vec<PadicNumber>) -> Result<Arc<Self>> {
        let e = coeffs.len();
        if e == 0 {
            return Err(Error::DomainError("degree must be at least 1".into()));
        }
        if coeffs.iter().any(|c| c.p() != p) {
            return Err(Error::ModulusMismatch);
        }
        if coeffs[0].valuation() != Some(1) {
            return Err(Error::DomainError("constant term must have valuation exactly 1".into()));
        }
        if let Some(i) = coeffs.iter().position(|c| c.valuation_bound() < 1) {
            return Err(Error::DomainError(format!("coefficient {i} is not divisible by p")));
        }
        Ok(Arc::new(EisensteinModulus { p, e, coeffs }))
    }

    /// x^e − c·p for a unit c.
    pub fn pure(p: u32, e: usize, c: i64, rel: u32) -> Result<Arc<Self>> {
        let mut coeffs = vec![PadicNumber::zero(p); e];
        if e > 0 {
            coeffs[0] = PadicNumber::from_i64(p, -c * p as i64, rel);
        }
        Self::new(p, coeffs)
    }

    fn rel(&self) -> u32 {
        self.coeffs.iter().map(|c| c.rel_precision()).max().unwrap_or(1).max(1)
    }

    /// g′(π).
    pub fn derivative_at_pi(self: &Arc<Self>) -> ExtElement {
        let mut c: Vec<PadicNumber> =
            (1..self.e).map(|k| self.coeffs[k].mul(&PadicNumber::from_i64(self.p, k as i64, self.rel()))).collect();
        c.push(PadicNumber::from_i64(self.p, self.e as i64, self.rel()));
        ExtElement::from_coeffs(self, c)
    }

    /// g evaluated at an element of the extension.
    pub fn eval(self: &Arc<Self>, x: &ExtElement) -> ExtElement {
        let mut acc = ExtElement::one(self);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(&ExtElement::constant(self, c.clone()));
        }
        acc
    }
}

/// Σ c_i π^i with 0 ≤ i < e.
#[derive(Clone, Debug)]
pub struct ExtElement {
    modulus: Arc<EisensteinModulus>,
    coeffs: Vec<PadicNumber>,
}

impl PartialEq for ExtElement {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a.agrees(b))
    }
}

impl ExtElement {
    /// Reduces a polynomial in π of any degree.
    pub fn from_coeffs(modulus: &Arc<EisensteinModulus>, mut c: Vec<PadicNumber>) -> Self {
        let e = modulus.e;
        let p = modulus.p;
        while c.len() > e {
            let top = c.pop().unwrap();
            if top.is_exact_zero() {
                continue;
            }
            // π^e = −Σ g_i π^i.
            let base = c.len() - e;
            for (i, g) in modulus.coeffs.iter().enumerate() {
                c[base + i] = c[base + i].sub(&top.mul(g));
            }
        }
        c.resize(e, PadicNumber::zero(p));
        ExtElement { modulus: modulus.clone(), coeffs: c }
    }

    pub fn zero(modulus: &Arc<EisensteinModulus>) -> Self {
        Self::from_coeffs(modulus, Vec::new())
    }

    pub fn constant(modulus: &Arc<EisensteinModulus>, c: PadicNumber) -> Self {
        Self::from_coeffs(modulus, vec![c])
    }

    pub fn one(modulus: &Arc<EisensteinModulus>) -> Self {
        Self::constant(modulus, PadicNumber::one(modulus.p, modulus.rel()))
    }

    /// The uniformizer π, the class of x.
    pub fn uniformizer(modulus: &Arc<EisensteinModulus>) -> Self {
        let p = modulus.p;
        Self::from_coeffs(modulus, vec![PadicNumber::zero(p), PadicNumber::one(p, modulus.rel())])
    }

    pub fn modulus(&self) -> &Arc<EisensteinModulus> {
        &self.modulus
    }

    pub fn coeffs(&self) -> &[PadicNumber] {
        &self.coeffs
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.modulus == other.modulus {
            Ok(())
        } else {
            Err(Error::ModulusMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.add(other))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul(other))
    }

    pub fn add(&self, other: &Self) -> Self {
        let c = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect();
        ExtElement { modulus: self.modulus.clone(), coeffs: c }
    }

    pub fn neg(&self) -> Self {
        ExtElement { modulus: self.modulus.clone(), coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let e = self.modulus.e;
        let mut c = vec![PadicNumber::zero(self.modulus.p); 2 * e - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_exact_zero() {
                    c[i + j] = c[i + j].add(&a.mul(b));
                }
            }
        }
        Self::from_coeffs(&self.modulus, c)
    }

    pub fn scale(&self, s: &PadicNumber) -> Self {
        ExtElement { modulus: self.modulus.clone(), coeffs: self.coeffs.iter().map(|c| c.mul(s)).collect() }
    }

    pub fn div_int(&self, n: i64) -> Result<Self> {
        let c = self.coeffs.iter().map(|c| c.div_int(n)).collect::<Result<_>>()?;
        Ok(ExtElement { modulus: self.modulus.clone(), coeffs: c })
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(&self.modulus);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        result
    }

    /// min_i (v_p(c_i) + i/e); `None` for zero.
    pub fn valuation(&self) -> Option<Rational64> {
        let e = self.modulus.e as i64;
        self.coeffs
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.valuation().map(|v| Rational64::new(v * e + i as i64, e)))
            .min()
    }

    /// Lower bound on the valuation, counting inexact zeros at their precision.
    pub fn valuation_bound(&self) -> Rational64 {
        let e = self.modulus.e as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| match c.valuation() {
                Some(v) => Rational64::new(v * e + i as i64, e),
                None => Rational64::new(c.abs_precision().unwrap_or(i64::MAX / (2 * e)) * e + i as i64, e),
            })
            .min()
            .unwrap_or(Rational64::from_integer(i64::MAX / 2))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// log(1 + self) by the alternating series; requires v(self) > 1/(p − 1).
    pub fn log_one_plus(&self) -> Result<Self> {
        let p = self.modulus.p;
        let Some(v) = self.valuation() else {
            return Ok(self.clone());
        };
        if v <= Rational64::new(1, p as i64 - 1) {
            return Err(Error::DomainError(format!("valuation {v} not above 1/(p−1)")));
        }
        let target = self.coeffs.iter().filter_map(|c| c.abs_precision()).max().unwrap_or(self.modulus.rel() as i64);
        let mut sum = Self::zero(&self.modulus);
        let mut power = self.clone();
        let mut n: i64 = 1;
        while v * n - ilog(n as u64, p) < Rational64::from_integer(target) {
            let term = power.div_int(n)?;
            sum = if n.is_odd() { sum.add(&term) } else { sum.sub(&term) };
            power = power.mul(self);
            n += 1;
        }
        Ok(sum)
    }
}

/// Different exponent d = e·v(g′(π)) and, in the tame convergent case, the
/// valuation of log(1 + g′(π)).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifferentOrder {
    pub e: usize,
    pub d: i64,
    pub log_order: Option<Rational64>,
}

impl DifferentOrder {
    pub fn log_order_checked(&self, p: u32) -> Result<Rational64> {
        self.log_order.ok_or(Error::WildRamificationUnsupported { e: self.e, p })
    }
}

pub fn different_order(g: &Arc<EisensteinModulus>) -> Result<DifferentOrder> {
    let dg = g.derivative_at_pi();
    let v = dg.valuation().ok_or(Error::DomainError("g′(π) vanishes".into()))?;
    let scaled = v * g.e as i64;
    if !scaled.is_integer() {
        return Err(Error::DomainError(format!("e·v(g′(π)) = {scaled} is not integral")));
    }
    let d = scaled.to_integer();
    let tame = (g.e as u64).gcd(&(g.p as u64)) == 1 && v > Rational64::new(1, g.p as i64 - 1);
    let log_order = if tame {
        let lv = dg.log_one_plus()?.valuation();
        match lv {
            Some(lv) if lv == Rational64::new(d, g.e as i64) => Some(lv),
            Some(lv) => return Err(Error::DomainError(format!("log order {lv} differs from d/e = {d}/{}", g.e))),
            None => return Err(Error::PrecisionExhausted("log(1 + g′(π)) vanished".into())),
        }
    } else {
        None
    };
    Ok(DifferentOrder { e: g.e, d, log_order })
}

/// Sampled check that φ = id + g is a contraction perturbation on B_ε, ε = p^(−k).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootDiffeoReport {
    pub samples: usize,
    /// Largest observed v(x − y) − v(g(x) − g(y)), i.e. log_p of the Lipschitz ratio.
    pub max_log_ratio: Rational64,
    /// log_p of ε^(e−1).
    pub bound_log: Rational64,
    pub bound_holds: bool,
    pub uniformizer_fixed: bool,
}

pub fn root_diffeo_check<R: Rng + ?Sized>(
    g: &Arc<EisensteinModulus>,
    k: u32,
    samples: usize,
    rng: &mut R,
) -> Result<RootDiffeoReport> {
    if g.e < 2 {
        return Err(Error::DomainError("ramification index must exceed 1".into()));
    }
    if k < 1 {
        return Err(Error::DomainError("radius must be below 1".into()));
    }
    let p = g.p;
    let rel = g.rel();
    let bound = (p as i64).pow(3);
    let sample = |rng: &mut R| {
        let c = (0..g.e).map(|_| PadicNumber::from_i64(p, rng.gen_range(0..bound), rel).mul_pow_p(k as i64)).collect();
        ExtElement::from_coeffs(g, c)
    };
    let bound_log = -Rational64::from_integer(k as i64 * (g.e as i64 - 1));
    let mut max_log_ratio = Rational64::from_integer(i64::MIN / 4);
    let mut taken = 0;
    while taken < samples {
        let x = sample(rng);
        let y = sample(rng);
        let Some(vxy) = x.sub(&y).valuation() else { continue };
        taken += 1;
        let diff = g.eval(&x).sub(&g.eval(&y));
        let vg = diff.valuation().unwrap_or_else(|| diff.valuation_bound());
        max_log_ratio = max_log_ratio.max(vxy - vg);
    }
    let pi = ExtElement::uniformizer(g);
    let image = pi.add(&g.eval(&pi));
    Ok(RootDiffeoReport {
        samples,
        max_log_ratio,
        bound_log,
        bound_holds: max_log_ratio <= bound_log,
        uniformizer_fixed: image == pi,
    })
}
