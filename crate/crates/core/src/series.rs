//! Truncated power series over Q_p.
//!
//! A series with `n` stored coefficients is known modulo x^n; every operation
//! returns a series whose length reflects what is actually determined by its
//! inputs (differentiation loses one coefficient, products keep the shorter
//! length, and so on).

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::padic::{ilog, vp_u64, PadicNumber};

#[derive(Clone, Debug)]
pub struct TruncSeries {
    p: u32,
    coeffs: Vec<PadicNumber>,
}

impl TruncSeries {
    pub fn new(p: u32, coeffs: Vec<PadicNumber>) -> Self {
        debug_assert!(coeffs.iter().all(|c| c.p() == p));
        TruncSeries { p, coeffs }
    }

    pub fn from_i64s(p: u32, rel: u32, coeffs: &[i64]) -> Self {
        Self::new(p, coeffs.iter().map(|&c| PadicNumber::from_i64(p, c, rel)).collect())
    }

    pub fn zero(p: u32, len: usize) -> Self {
        Self::new(p, vec![PadicNumber::zero(p); len])
    }

    pub fn constant(c: PadicNumber, len: usize) -> Self {
        let p = c.p();
        let mut s = Self::zero(p, len);
        if len > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    pub fn one(p: u32, len: usize, rel: u32) -> Self {
        Self::constant(PadicNumber::one(p, rel), len)
    }

    /// The series x.
    pub fn identity(p: u32, len: usize, rel: u32) -> Self {
        let mut s = Self::zero(p, len);
        if len > 1 {
            s.coeffs[1] = PadicNumber::one(p, rel);
        }
        s
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Number of known coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Truncation degree D (the series is known modulo x^(D+1)).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[PadicNumber] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Option<&PadicNumber> {
        self.coeffs.get(k)
    }

    pub fn truncate(&self, len: usize) -> Self {
        Self::new(self.p, self.coeffs.iter().take(len).cloned().collect())
    }

    pub fn map(&self, f: impl Fn(&PadicNumber) -> PadicNumber) -> Self {
        Self::new(self.p, self.coeffs.iter().map(f).collect())
    }

    fn zip(&self, other: &Self, f: impl Fn(&PadicNumber, &PadicNumber) -> PadicNumber) -> Self {
        let n = self.len().min(other.len());
        Self::new(self.p, (0..n).map(|k| f(&self.coeffs[k], &other.coeffs[k])).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.sub(b))
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, c: &PadicNumber) -> Self {
        self.map(|a| a.mul(c))
    }

    pub fn mul_pow_p(&self, k: i64) -> Self {
        self.map(|a| a.mul_pow_p(k))
    }

    pub fn div_int(&self, n: i64) -> Result<Self> {
        Ok(Self::new(self.p, self.coeffs.iter().map(|c| c.div_int(n)).collect::<Result<_>>()?))
    }

    /// Grows each coefficient's precision by `k` digits.
    pub fn lift_by(&self, k: u32) -> Self {
        self.map(|c| c.lift_by(k))
    }

    pub fn lift_to_abs(&self, abs: i64) -> Self {
        self.map(|c| c.lift_to_abs(abs))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.len().min(other.len());
        let mut out = vec![PadicNumber::zero(self.p); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                if b.is_exact_zero() {
                    continue;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(self.p, out)
    }

    pub fn pow_big(&self, e: &BigUint) -> Self {
        let n = self.len();
        let rel = self.coeffs.iter().map(|c| c.rel_precision()).max().unwrap_or(1).max(1);
        let mut result = Self::one(self.p, n, rel);
        let mut base = self.clone();
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                result = result.mul(&base);
            }
            if i + 1 < bits {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn pow(&self, e: u64) -> Self {
        self.pow_big(&BigUint::from(e))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.p,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.mul(&PadicNumber::from_i64(self.p, k as i64, c.rel_precision().max(1))))
                .collect(),
        )
    }

    /// Integral with zero constant term, plus the loss ledger of
    /// (index, digits lost) wherever the index is divisible by p.
    pub fn antiderivative(&self) -> Result<(Self, Vec<(usize, u32)>)> {
        let budget = self.coeffs.iter().map(|c| c.rel_precision()).max().unwrap_or(0);
        let mut out = Vec::with_capacity(self.len() + 1);
        let mut losses = Vec::new();
        out.push(PadicNumber::zero(self.p));
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = i as i64 + 1;
            let loss = vp_u64(k as u64, self.p);
            if loss > 0 {
                if budget > 0 && loss >= budget {
                    return Err(Error::PrecisionExhausted(format!(
                        "antiderivative at index {k} loses {loss} of {budget} digits"
                    )));
                }
                losses.push((k as usize, loss));
            }
            out.push(c.div_int(k)?);
        }
        Ok((Self::new(self.p, out), losses))
    }

    /// self(g(x)); requires g(0) = 0.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        match g.coeffs.first() {
            Some(c) if !c.is_zero() => return Err(Error::DomainError("inner series must vanish at 0".into())),
            _ => {}
        }
        let n = self.len().min(g.len());
        if n == 0 {
            return Ok(Self::zero(self.p, 0));
        }
        let g = g.truncate(n);
        let mut acc = Self::constant(self.coeffs[n - 1].clone(), n);
        for k in (0..n - 1).rev() {
            acc = acc.mul(&g);
            acc.coeffs[0] = acc.coeffs[0].add(&self.coeffs[k]);
        }
        Ok(acc)
    }

    /// Polynomial evaluation of the stored coefficients.
    pub fn eval(&self, x: &PadicNumber) -> PadicNumber {
        let mut acc = PadicNumber::zero(self.p);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// 1/self; the constant term must be nonzero.
    pub fn reciprocal(&self) -> Result<Self> {
        let n = self.len();
        if n == 0 {
            return Ok(self.clone());
        }
        let inv0 = self.coeffs[0].inv()?;
        let mut out: Vec<PadicNumber> = Vec::with_capacity(n);
        out.push(inv0.clone());
        for k in 1..n {
            let mut s = PadicNumber::zero(self.p);
            for i in 1..=k {
                s = s.add(&self.coeffs[i].mul(&out[k - i]));
            }
            out.push(s.mul(&inv0).neg());
        }
        Ok(Self::new(self.p, out))
    }

    /// Smallest known valuation among the coefficients (`i64::MAX` if all are exact zeros).
    pub fn min_valuation(&self) -> i64 {
        self.coeffs.iter().map(|c| c.valuation_bound()).min().unwrap_or(i64::MAX)
    }

    /// Largest absolute precision among inexact coefficients.
    fn max_abs_precision(&self) -> Option<i64> {
        self.coeffs.iter().filter_map(|c| c.abs_precision()).max()
    }

    /// log(self) for a series ≡ 1 mod p (constant term in 1 + pZ_p, others in pZ_p).
    pub fn log(&self) -> Result<Self> {
        let n = self.len();
        let mut w = self.clone();
        if let Some(c0) = w.coeffs.first_mut() {
            *c0 = c0.sub(&PadicNumber::one(self.p, c0.rel_precision().max(1)));
        }
        let v = w.min_valuation();
        if v < 1 {
            return Err(Error::DomainError("series log needs argument ≡ 1 mod p".into()));
        }
        let Some(target) = w.max_abs_precision() else {
            return Ok(Self::zero(self.p, n));
        };
        let mut sum = Self::zero(self.p, n);
        let mut wn = w.clone();
        let mut k: i64 = 1;
        while k * v - ilog(k as u64, self.p) < target {
            let term = wn.div_int(k)?;
            sum = if k % 2 == 1 { sum.add(&term) } else { sum.sub(&term) };
            wn = wn.mul(&w);
            k += 1;
        }
        Ok(sum)
    }

    /// exp(self) for a series with all coefficients in pZ_p.
    pub fn exp(&self) -> Result<Self> {
        let n = self.len();
        let v = self.min_valuation();
        if v < 1 {
            return Err(Error::DomainError("series exp needs coefficients in pZ_p".into()));
        }
        let target = self.max_abs_precision().unwrap_or(1).max(1);
        let one = Self::one(self.p, n, target as u32);
        let mut sum = one.clone();
        let mut term = one;
        let mut k: i64 = 1;
        while k * v - (k - 1) / (self.p as i64 - 1) < target {
            term = term.mul(self).div_int(k)?;
            sum = sum.add(&term);
            k += 1;
        }
        Ok(sum)
    }

    /// Coefficientwise agreement on the common length.
    pub fn agrees(&self, other: &Self) -> bool {
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a.agrees(b))
    }

    /// Minimum over the common length of the coefficient difference valuations.
    pub fn diff_valuation(&self, other: &Self) -> i64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.diff_valuation(b)).min().unwrap_or(i64::MAX)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl PartialEq for TruncSeries {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.agrees(other)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    #[serde(rename = "D")]
    d: usize,
    coeffs: Vec<PadicNumber>,
}

impl Serialize for TruncSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson { d: self.degree(), coeffs: self.coeffs.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruncSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SeriesJson::deserialize(d)?;
        let Some(first) = j.coeffs.first() else {
            return Err(serde::de::Error::custom("series needs at least one coefficient"));
        };
        let p = first.p();
        if j.coeffs.iter().any(|c| c.p() != p) {
            return Err(serde::de::Error::custom("mixed primes in series"));
        }
        let mut coeffs = j.coeffs;
        if coeffs.len() > j.d + 1 {
            coeffs.truncate(j.d + 1);
        }
        coeffs.resize(j.d + 1, PadicNumber::zero(p));
        Ok(TruncSeries::new(p, coeffs))
    }
}

/// Coefficients as rationals, for display and oracles.
pub fn rational_coeffs(s: &TruncSeries) -> Vec<num_rational::BigRational> {
    s.coeffs().iter().map(|c| c.to_rational()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(c: &[i64]) -> TruncSeries {
        TruncSeries::from_i64s(5, 10, c)
    }

    #[test]
    fn derivative_example() {
        assert_eq!(s(&[0, 1, 5]).derivative(), s(&[1, 10]));
    }

    #[test]
    fn antiderivative_loss_ledger() {
        let (a, losses) = s(&[0, 0, 0, 0, 1]).antiderivative().unwrap();
        assert_eq!(losses, vec![(5, 1)]);
        let c5 = &a.coeffs()[5];
        assert_eq!(c5.valuation(), Some(-1));
        let f = s(&[0, 3, 5, 7]);
        assert_eq!(f.derivative().antiderivative().unwrap().0, f);
    }

    #[test]
    fn compose_substitution() {
        // (1 + x + x^2) ∘ (x + x^2) = 1 + x + 2x^2 + 2x^3 + x^4
        let f = s(&[1, 1, 1, 0, 0]);
        let g = s(&[0, 1, 1, 0, 0]);
        assert_eq!(f.compose(&g).unwrap(), s(&[1, 1, 2, 2, 1]));
        assert!(f.compose(&f).is_err());
    }

    #[test]
    fn reciprocal_and_pow() {
        let f = s(&[1, 5, 0, 0]);
        let r = f.reciprocal().unwrap();
        assert_eq!(r, s(&[1, -5, 25, -125]));
        assert_eq!(f.pow(3), s(&[1, 15, 75, 125]));
    }

    #[test]
    fn log_exp_series() {
        let f = s(&[1, 10, 0, 0, 0]);
        let l = f.log().unwrap();
        assert_eq!(l.coeffs()[1], PadicNumber::from_i64(5, 10, 10));
        assert_eq!(l.coeffs()[2], PadicNumber::from_i64(5, -50, 10));
        assert_eq!(l.exp().unwrap(), f);
        assert!(s(&[2, 1]).log().is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = s(&[0, 1, 5, 25]);
        let t = serde_json::to_string(&f).unwrap();
        assert!(t.contains("\"D\":3"));
        let g: TruncSeries = serde_json::from_str(&t).unwrap();
        assert_eq!(f, g);
        assert_eq!(g.len(), 4);
    }
}
