//! Theta functions on the Tate curve G_m/q^Z.
//!
//! Everything is evaluated by truncating the product for θ at q^T. Each value
//! carries the relative precision that truncation guarantees, so identities
//! can be checked with plain agreement and their residual valuations reported.

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{is_prime, PadicNumber};

const GUARD: u32 = 8;

#[derive(Clone, Debug)]
pub struct TateCurve {
    p: u32,
    l: u32,
    t: u32,
    prec: u32,
    q: PadicNumber,
    q_tilde: Option<PadicNumber>,
    /// q^0 .. q^(T+1).
    qpow: Vec<PadicNumber>,
}

#[derive(Serialize, Deserialize)]
struct CurveJson {
    p: u32,
    l: u32,
    #[serde(rename = "qTilde", default, skip_serializing_if = "Option::is_none")]
    q_tilde: Option<PadicNumber>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<PadicNumber>,
    #[serde(rename = "T")]
    t: u32,
}

impl TateCurve {
    /// A curve with parameter q and no chosen 2l-th root.
    pub fn new(q: &PadicNumber, l: u32, t: u32) -> Result<Self> {
        Self::build(q, None, l, t)
    }

    /// The curve with q = q̃^(2l). The representative of q̃ is taken as exact.
    pub fn from_q_tilde(q_tilde: &PadicNumber, l: u32, t: u32) -> Result<Self> {
        let v = q_tilde.valuation().unwrap_or(0);
        if v < 1 {
            return Err(Error::DomainError("q-tilde must have positive valuation".into()));
        }
        let w = v as u32 * 2 * l;
        let prec = Self::working_precision(w, t);
        let qt = q_tilde.with_rel(prec);
        let q = qt.pow(2 * l as i64)?;
        Self::build(&q, Some(qt), l, t)
    }

    fn working_precision(w: u32, t: u32) -> u32 {
        w * (t + 2) + GUARD
    }

    fn build(q: &PadicNumber, q_tilde: Option<PadicNumber>, l: u32, t: u32) -> Result<Self> {
        let p = q.p();
        let w = match q.valuation() {
            Some(w) if w >= 1 => w as u32,
            _ => return Err(Error::DomainError("|q| < 1 required".into())),
        };
        // l = p is allowed: nothing here extracts l-th roots.
        if l < 3 || !is_prime(l as u64) {
            return Err(Error::DomainError(format!("torsion level {l} must be an odd prime")));
        }
        if t < 2 {
            return Err(Error::OutOfRange(format!("truncation order {t} below 2")));
        }
        let prec = Self::working_precision(w, t);
        let q = q.with_rel(prec);
        let mut qpow = vec![PadicNumber::one(p, prec)];
        for n in 1..=(t as usize + 1) {
            qpow.push(qpow[n - 1].mul(&q));
        }
        Ok(TateCurve { p, l, t, prec, q, q_tilde, qpow })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn truncation(&self) -> u32 {
        self.t
    }

    /// Relative precision carried by inputs and constants.
    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn q(&self) -> &PadicNumber {
        &self.q
    }

    pub fn q_tilde(&self) -> Result<&PadicNumber> {
        self.q_tilde.as_ref().ok_or(Error::MissingRoot)
    }

    pub fn q_valuation(&self) -> i64 {
        self.q.valuation().expect("q is nonzero")
    }

    pub fn num(&self, n: i64) -> PadicNumber {
        PadicNumber::from_i64(self.p, n, self.prec)
    }

    pub fn q_power(&self, k: i64) -> PadicNumber {
        match self.qpow.get(k.unsigned_abs() as usize) {
            Some(x) if k >= 0 => x.clone(),
            Some(x) => x.inv().expect("q is nonzero"),
            None => self.q.pow(k).expect("q is nonzero"),
        }
    }

    /// Some(k) when c = q^k at working precision.
    pub fn lattice_exponent(&self, c: &PadicNumber) -> Option<i64> {
        let v = c.valuation()?;
        let w = self.q_valuation();
        if v % w != 0 {
            return None;
        }
        let k = v / w;
        c.mul(&self.q_power(-k)).agrees(&PadicNumber::one(self.p, self.prec)).then_some(k)
    }

    /// u = rep·q^k with 0 ≤ v(rep) < v(q).
    pub fn reduce(&self, u: &PadicNumber) -> Result<(PadicNumber, i64)> {
        let v = u.valuation().ok_or(Error::ZeroInput)?;
        let k = v.div_euclid(self.q_valuation());
        Ok((u.mul(&self.q_power(-k)), k))
    }

    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> PadicNumber {
        let p = self.p;
        let mut unit = BigUint::from(rng.gen_range(1..p));
        let mut place = BigUint::from(p);
        for _ in 1..self.prec {
            unit += &place * rng.gen_range(0..p);
            place *= p;
        }
        PadicNumber::from_parts(p, 0, unit, self.prec)
    }
}

impl Serialize for TateCurve {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let q = if self.q_tilde.is_none() { Some(self.q.clone()) } else { None };
        CurveJson { p: self.p, l: self.l, q_tilde: self.q_tilde.clone(), q, t: self.t }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TateCurve {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = CurveJson::deserialize(d)?;
        let curve = match (&j.q_tilde, &j.q) {
            (Some(qt), _) => TateCurve::from_q_tilde(qt, j.l, j.t),
            (None, Some(q)) => TateCurve::new(q, j.l, j.t),
            (None, None) => Err(Error::MissingRoot),
        };
        let curve = curve.map_err(serde::de::Error::custom)?;
        if curve.p != j.p {
            return Err(serde::de::Error::custom("prime does not match the parameter"));
        }
        Ok(curve)
    }
}

/// θ(u) = (1 − u)·∏_{n ≥ 1}(1 − qⁿu)(1 − qⁿ/u), truncated at n = T.
pub fn theta_fundamental(u: &PadicNumber, curve: &TateCurve) -> Result<PadicNumber> {
    let s = u.valuation().ok_or(Error::ZeroInput)?;
    let w = curve.q_valuation();
    let t = curve.t as i64;
    if s.abs() > t * w {
        return Err(Error::OutOfRange(format!("v(u) = {s} exceeds T·v(q) = {}", t * w)));
    }
    let one = PadicNumber::one(curve.p, curve.prec);
    let inv = u.inv()?;
    let mut acc = one.sub(u);
    for n in 1..=curve.t as usize {
        acc = acc.mul(&one.sub(&curve.qpow[n].mul(u)));
        acc = acc.mul(&one.sub(&curve.qpow[n].mul(&inv)));
    }
    // Dropped factors are 1 + O(p^((T+1)w − |s|)).
    let tail = (t + 1) * w - s.abs();
    Ok(match acc.valuation() {
        Some(v) => acc.truncate_abs(v + tail),
        None => acc,
    })
}

/// θ_c(u) = θ(u/c).
pub fn theta_shifted(u: &PadicNumber, c: &PadicNumber, curve: &TateCurve) -> Result<PadicNumber> {
    theta_fundamental(&u.div(c)?, curve)
}

/// η(q) = ∏_{n ≥ 1}(1 − qⁿ), truncated at n = T.
pub fn eta(curve: &TateCurve) -> PadicNumber {
    let one = PadicNumber::one(curve.p, curve.prec);
    let acc = (1..=curve.t as usize).fold(one.clone(), |acc, n| acc.mul(&one.sub(&curve.qpow[n])));
    acc.truncate_abs((curve.t as i64 + 1) * curve.q_valuation())
}

fn theta_tilde_unchecked(ut: &PadicNumber, curve: &TateCurve) -> Result<PadicNumber> {
    let u = ut.mul(ut);
    Ok(eta(curve).mul(&theta_fundamental(&u, curve)?).div(ut)?.neg())
}

/// θ̃(ũ) = −η(q)·θ(ũ²)/ũ.
pub fn theta_tilde(ut: &PadicNumber, curve: &TateCurve) -> Result<PadicNumber> {
    curve.q_tilde()?;
    theta_tilde_unchecked(ut, curve)
}

/// Θ at the torsion point with index j, q̃^(j²), with its independent check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorsionValue {
    pub j: i64,
    pub value: PadicNumber,
    /// Order in q̃, i.e. j².
    pub order: i64,
    /// ζ^l = (−1)^tag for the unresolved 2l-th root of unity ζ.
    pub root_tag: u32,
    pub residual_valuation: i64,
    pub verified: bool,
}

/// Θ(q̃^j) = q̃^(j²), checked against the quotient θ̃(q^(j/2)ũ₀)/θ̃(ũ₀), ũ₀² = −1,
/// written in terms of θ as θ(−q^j)/(q̃^(jl)·θ(−1)) = Θ^(−l).
pub fn theta_torsion_value(j: i64, curve: &TateCurve) -> Result<TorsionValue> {
    let l = curve.l as i64;
    if j.rem_euclid(l) == 0 {
        return Err(Error::PoleAtTorsionPoint(j));
    }
    let qt = curve.q_tilde()?;
    let value = qt.pow(j * j)?;
    let minus_one = curve.num(-1);
    let r = theta_fundamental(&minus_one.mul(&curve.q_power(j)), curve)?
        .div(&qt.pow(j * l)?.mul(&theta_fundamental(&minus_one, curve)?))?;
    let rho = r.mul(&value.pow(l)?);
    let one = PadicNumber::one(curve.p, curve.prec);
    let (root_tag, residual_valuation, verified) = sign_coset(&rho, &one);
    Ok(TorsionValue { j, value, order: j * j, root_tag, residual_valuation, verified })
}

/// Which of ±1 the value is closest to, the valuation of the distance, and
/// whether it agrees with it to full precision.
fn sign_coset(rho: &PadicNumber, one: &PadicNumber) -> (u32, i64, bool) {
    let minus_one = one.neg();
    let (tag, target) =
        if rho.diff_valuation(one) >= rho.diff_valuation(&minus_one) { (0, one) } else { (1, &minus_one) };
    (tag, rho.diff_valuation(target), rho.agrees(target))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunctionalEquationReport {
    pub j: i64,
    /// Θ(q^(j/2)ũ)^l / (Θ(ũ)^l · u^j · q^(j²/2)) with u = ũ².
    pub residual: PadicNumber,
    /// The residual sits on (−1)^tag.
    pub root_tag: u32,
    pub residual_valuation: i64,
    pub holds: bool,
}

/// Checks the shift law of Θ on l-th powers, where Θ^l = θ̃(ũ₀)/θ̃(ũ).
pub fn functional_equation_check(ut: &PadicNumber, j: i64, curve: &TateCurve) -> Result<FunctionalEquationReport> {
    let shift = if j % 2 == 0 {
        curve.q_power(j / 2)
    } else {
        let qt =
            curve.q_tilde().map_err(|_| Error::BranchUnavailable(format!("q^({j}/2) needs a square root of q")))?;
        qt.pow(j * curve.l as i64)?
    };
    let here = theta_tilde_unchecked(ut, curve)?;
    let there = theta_tilde_unchecked(&shift.mul(ut), curve)?;
    if here.is_zero() || there.is_zero() {
        return Err(Error::Pole);
    }
    let u = ut.mul(ut);
    let half_sq =
        if (j * j) % 2 == 0 { curve.q_power(j * j / 2) } else { curve.q_tilde()?.pow(j * j * curve.l as i64)? };
    let residual = here.div(&there.mul(&u.pow(j)?).mul(&half_sq))?;
    let (root_tag, residual_valuation, exact) = sign_coset(&residual, &PadicNumber::one(curve.p, curve.prec));
    let holds = exact && root_tag as i64 == j.rem_euclid(2);
    Ok(FunctionalEquationReport { j, residual, root_tag, residual_valuation, holds })
}

/// scale · ∏θ(u/aᵢ) / ∏θ(u/bᵢ), a theta function of type c·u^r:
/// f(u) = c·u^r·f(qu).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThetaObject {
    pub scale: PadicNumber,
    pub zeros: Vec<PadicNumber>,
    pub poles: Vec<PadicNumber>,
    pub c: PadicNumber,
    pub r: i64,
}

impl ThetaObject {
    pub fn new(
        scale: PadicNumber,
        zeros: Vec<PadicNumber>,
        poles: Vec<PadicNumber>,
        curve: &TateCurve,
    ) -> Result<Self> {
        let prod = |xs: &[PadicNumber]| xs.iter().fold(PadicNumber::one(curve.p, curve.prec), |a, x| a.mul(x));
        let r = zeros.len() as i64 - poles.len() as i64;
        let mut c = prod(&poles).div(&prod(&zeros))?;
        if r % 2 != 0 {
            c = c.neg();
        }
        Ok(ThetaObject { scale, zeros, poles, c, r })
    }

    pub fn eval(&self, u: &PadicNumber, curve: &TateCurve) -> Result<PadicNumber> {
        let mut num = self.scale.clone();
        for a in &self.zeros {
            num = num.mul(&theta_shifted(u, a, curve)?);
        }
        let mut den = PadicNumber::one(curve.p, curve.prec);
        for b in &self.poles {
            den = den.mul(&theta_shifted(u, b, curve)?);
        }
        if den.is_zero() {
            return Err(Error::Pole);
        }
        num.div(&den)
    }

    /// v(f(u) − c·u^r·f(qu)) − v(f(u)).
    pub fn type_defect(&self, u: &PadicNumber, curve: &TateCurve) -> Result<i64> {
        let here = self.eval(u, curve)?;
        let there = self.eval(&curve.q.mul(u), curve)?;
        let rhs = self.c.mul(&u.pow(self.r)?).mul(&there);
        let v = here.valuation().ok_or(Error::Pole)?;
        Ok(here.diff_valuation(&rhs).saturating_sub(v))
    }

    pub fn mul(&self, other: &Self, curve: &TateCurve) -> Result<Self> {
        let zeros = self.zeros.iter().chain(&other.zeros).cloned().collect();
        let poles = self.poles.iter().chain(&other.poles).cloned().collect();
        Self::new(self.scale.mul(&other.scale), zeros, poles, curve)
    }

    pub fn divisor(&self, curve: &TateCurve) -> Result<TateDivisor> {
        let pts = self.zeros.iter().map(|a| (a.clone(), 1)).chain(self.poles.iter().map(|b| (b.clone(), -1)));
        TateDivisor::new(pts.collect(), curve)
    }
}

fn sample_points(curve: &TateCurve) -> impl Iterator<Item = PadicNumber> + '_ {
    (2..40).filter(move |n| n % curve.p as i64 != 0).map(move |n| curve.num(n))
}

fn assert_type(obj: &ThetaObject, curve: &TateCurve, count: usize) -> Result<()> {
    let need = (curve.t as i64 - 2) * curve.q_valuation();
    let mut checked = 0;
    for u in sample_points(curve) {
        match obj.type_defect(&u, curve) {
            Ok(d) if d >= need => checked += 1,
            Ok(d) => return Err(Error::PrecisionExhausted(format!("type relation holds only to p^{d}"))),
            Err(Error::Pole) => continue,
            Err(e) => return Err(e),
        }
        if checked == count {
            return Ok(());
        }
    }
    Err(Error::PrecisionExhausted("no usable sample points".into()))
}

/// c·∏θ_{aᵢ}/∏θ_{bᵢ} with zeros on ∪aᵢq^Z and poles on ∪bᵢq^Z. The zero
/// representatives are moved within their class so that ∏aᵢ = ∏bᵢ exactly.
pub fn build_periodic_function(zeros: &[PadicNumber], poles: &[PadicNumber], curve: &TateCurve) -> Result<ThetaObject> {
    if zeros.len() != poles.len() {
        return Err(Error::DomainError(format!("{} zeros against {} poles", zeros.len(), poles.len())));
    }
    let mut zeros = zeros.to_vec();
    if !zeros.is_empty() {
        let prod = |xs: &[PadicNumber]| xs.iter().fold(PadicNumber::one(curve.p, curve.prec), |a, x| a.mul(x));
        let ratio = prod(&zeros).div(&prod(poles))?;
        let k = curve.lattice_exponent(&ratio).ok_or(Error::ProductMismatch)?;
        zeros[0] = zeros[0].mul(&curve.q_power(-k));
    }
    let obj = ThetaObject::new(PadicNumber::one(curve.p, curve.prec), zeros, poles.to_vec(), curve)?;
    assert_type(&obj, curve, 2)?;
    Ok(obj)
}

/// θ(u)/θ_Q(u) for an l-torsion class Q, with its periodic l-th power.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorsionFunction {
    pub point: PadicNumber,
    /// Q^l = q^k.
    pub k: i64,
    pub object: ThetaObject,
    /// (θ(1/Q)/η²)^l, making the l-th power ~ (1 − u)^l at u = 1.
    pub norm: PadicNumber,
}

impl TorsionFunction {
    /// F(u) = norm·r(u)^l·u^k, which is q-periodic.
    pub fn lth_power(&self, u: &PadicNumber, curve: &TateCurve) -> Result<PadicNumber> {
        let r = self.object.eval(u, curve)?;
        Ok(self.norm.mul(&r.pow(curve.l as i64)?).mul(&u.pow(self.k)?))
    }

    /// F_{Q·q^m}(u)/F_Q(u), an l-th power of the ratio f_{Qq^m}/f_Q.
    pub fn representative_ratio(&self, m: i64, u: &PadicNumber, curve: &TateCurve) -> Result<PadicNumber> {
        let other = torsion_function(&self.point.mul(&curve.q_power(m)), curve)?;
        other.lth_power(u, curve)?.div(&self.lth_power(u, curve)?)
    }
}

pub fn torsion_function(q_point: &PadicNumber, curve: &TateCurve) -> Result<TorsionFunction> {
    if q_point.is_zero() || curve.lattice_exponent(q_point).is_some() {
        return Err(Error::NotTorsion);
    }
    let k = curve.lattice_exponent(&q_point.pow(curve.l as i64)?).ok_or(Error::NotTorsion)?;
    let one = PadicNumber::one(curve.p, curve.prec);
    let object = ThetaObject::new(one.clone(), vec![one.clone()], vec![q_point.clone()], curve)?;
    assert_type(&object, curve, 2)?;
    let e = eta(curve);
    let norm = theta_fundamental(&q_point.inv()?, curve)?.div(&e.mul(&e))?.pow(curve.l as i64)?;
    Ok(TorsionFunction { point: q_point.clone(), k, object, norm })
}

/// Dimension of the space of theta functions of type c·u^r.
pub fn dim_theta_space(c: &PadicNumber, r: i64, curve: &TateCurve) -> u64 {
    match r {
        r if r > 0 => r as u64,
        0 if curve.lattice_exponent(c).is_some() => 1,
        _ => 0,
    }
}

/// A divisor on E_q with representatives satisfying 0 ≤ v(point) < v(q).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TateDivisor {
    pub points: Vec<(PadicNumber, i64)>,
}

impl TateDivisor {
    pub fn new(points: Vec<(PadicNumber, i64)>, curve: &TateCurve) -> Result<Self> {
        let mut out: Vec<(PadicNumber, i64)> = Vec::new();
        for (pt, m) in points {
            let (rep, _) = curve.reduce(&pt)?;
            match out.iter_mut().find(|(x, _)| x.agrees(&rep)) {
                Some(slot) => slot.1 += m,
                None => out.push((rep, m)),
            }
        }
        out.retain(|(_, m)| *m != 0);
        out.sort_by_key(|(x, _)| (x.valuation(), x.digits()));
        Ok(TateDivisor { points: out })
    }

    pub fn degree(&self) -> i64 {
        self.points.iter().map(|(_, m)| m).sum()
    }

    pub fn add(&self, other: &Self, curve: &TateCurve) -> Result<Self> {
        Self::new(self.points.iter().chain(&other.points).cloned().collect(), curve)
    }

    /// ∏ point^mult as a class modulo q^Z, reduced.
    pub fn product(&self, curve: &TateCurve) -> Result<PadicNumber> {
        let mut acc = PadicNumber::one(curve.p, curve.prec);
        for (x, m) in &self.points {
            acc = acc.mul(&x.pow(*m)?);
        }
        Ok(curve.reduce(&acc)?.0)
    }

    /// Degree zero with product in q^Z.
    pub fn is_principal(&self, curve: &TateCurve) -> Result<bool> {
        Ok(self.degree() == 0 && curve.lattice_exponent(&self.product(curve)?).is_some())
    }
}

impl PartialEq for TateDivisor {
    fn eq(&self, other: &Self) -> bool {
        self.points.len() == other.points.len()
            && self.points.iter().zip(&other.points).all(|((a, m), (b, n))| m == n && a.agrees(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const P: u32 = 5;

    fn curve(l: u32, t: u32) -> TateCurve {
        TateCurve::from_q_tilde(&PadicNumber::from_i64(P, P as i64, 4), l, t).unwrap()
    }

    #[test]
    fn theta_zeros_and_type() {
        let c = curve(3, 12);
        let w = c.q_valuation();
        assert!(theta_fundamental(&c.num(1), &c).unwrap().is_zero());
        for k in -6..=6 {
            assert!(theta_fundamental(&c.q_power(k), &c).unwrap().is_zero(), "k = {k}");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let u = c.random_unit(&mut rng);
            let lhs = theta_fundamental(&u, &c).unwrap();
            let rhs = u.mul(&theta_fundamental(&c.q.mul(&u), &c).unwrap()).neg();
            assert!(lhs.diff_valuation(&rhs) - lhs.valuation().unwrap() >= (12 - 1) * w);
        }
        let u = c.num(7);
        assert_eq!(theta_shifted(&u, &c.num(1), &c).unwrap(), theta_fundamental(&u, &c).unwrap());
    }

    #[test]
    fn out_of_range_argument() {
        let c = curve(3, 4);
        let far = c.q_power(5);
        assert!(matches!(theta_fundamental(&far, &c), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn eta_against_factors() {
        let c = curve(3, 10);
        let e = eta(&c);
        assert!(e.diff_valuation(&c.num(1)) >= c.q_valuation());
        // Dividing out the first three factors leaves 1 + O(q^4).
        let one = c.num(1);
        let mut rest = e.clone();
        for n in 1..=3 {
            rest = rest.div(&one.sub(&c.q_power(n))).unwrap();
        }
        assert!(rest.diff_valuation(&one) >= 4 * c.q_valuation());
    }

    #[test]
    fn theta_tilde_relation_and_periodicity() {
        let c = curve(3, 12);
        assert!(theta_tilde(&c.num(1), &c).unwrap().is_zero());
        assert!(theta_tilde(&c.num(-1), &c).unwrap().is_zero());
        let half = c.q_tilde().unwrap().pow(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let ut = c.random_unit(&mut rng);
            let lhs = theta_tilde(&ut, &c).unwrap();
            // a = 1: −q^(1/2)·ũ²·θ̃(q^(1/2)ũ) with q^(1/2) = q̃^l.
            let rhs = half.mul(&ut.mul(&ut)).mul(&theta_tilde(&half.mul(&ut), &c).unwrap()).neg();
            let v = lhs.valuation().unwrap();
            assert!(lhs.diff_valuation(&rhs) - v >= 10 * c.q_valuation());
        }
        let bare = TateCurve::new(c.q(), 3, 12).unwrap();
        assert_eq!(theta_tilde(&c.num(2), &bare), Err(Error::MissingRoot));
    }

    #[test]
    fn theta_tilde_series_oracle() {
        // q̃ = p^4 makes q = p^24 an 8th power with q^(1/8) = p^3.
        let l = 3;
        let c = TateCurve::from_q_tilde(&PadicNumber::from_i64(P, 625, 4), l, 6).unwrap();
        let r = PadicNumber::from_i64(P, 125, c.precision());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let ut = c.random_unit(&mut rng);
            let mut sum = PadicNumber::zero(P);
            for n in -8i64..=8 {
                let e = 2 * n + 1;
                let term = r.pow(e * e).unwrap().mul(&ut.pow(e).unwrap());
                sum = if n % 2 == 0 { sum.add(&term) } else { sum.sub(&term) };
            }
            let series = sum.div(&r).unwrap();
            let product = theta_tilde(&ut, &c).unwrap();
            assert!(series.diff_valuation(&product) >= 5 * c.q_valuation());
        }
    }

    #[test]
    fn torsion_values() {
        let c3 = curve(3, 12);
        let v1 = theta_torsion_value(1, &c3).unwrap();
        assert!(v1.verified && v1.root_tag == 0);
        assert_eq!(v1.value, *c3.q_tilde().unwrap());
        let v2 = theta_torsion_value(2, &c3).unwrap();
        assert_eq!(v2.value, c3.q_tilde().unwrap().pow(4).unwrap());
        assert!(v2.verified);
        assert_eq!(theta_torsion_value(3, &c3).unwrap_err(), Error::PoleAtTorsionPoint(3));
        assert_eq!(theta_torsion_value(0, &c3).unwrap_err(), Error::PoleAtTorsionPoint(0));

        let c5 = TateCurve::from_q_tilde(&PadicNumber::from_i64(7, 7, 4), 5, 12).unwrap();
        assert_eq!(c5.q().valuation(), Some(10));
        let v = theta_torsion_value(2, &c5).unwrap();
        assert!(v.verified);
        assert_eq!(v.value, PadicNumber::from_i64(7, 7i64.pow(4), 40));

        let same = TateCurve::from_q_tilde(&PadicNumber::from_i64(5, 5, 4), 5, 12).unwrap();
        for j in 1..=2 {
            assert!(theta_torsion_value(j, &same).unwrap().verified);
        }
    }

    #[test]
    fn functional_equation() {
        let c = curve(3, 12);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ut = c.random_unit(&mut rng);
        let zero = functional_equation_check(&ut, 0, &c).unwrap();
        assert!(zero.holds && zero.root_tag == 0);
        for j in 1..=2 {
            let r = functional_equation_check(&ut, j, &c).unwrap();
            assert!(r.holds, "j = {j}");
            assert!(r.residual_valuation >= 8 * c.q_valuation());
            let moved = functional_equation_check(&c.q.mul(&ut), j, &c).unwrap();
            assert_eq!(moved.root_tag, r.root_tag);
        }
        let bare = TateCurve::new(c.q(), 3, 12).unwrap();
        assert!(matches!(functional_equation_check(&ut, 1, &bare), Err(Error::BranchUnavailable(_))));
        assert!(functional_equation_check(&ut, 2, &bare).unwrap().holds);
    }

    #[test]
    fn periodic_functions() {
        let c = curve(3, 12);
        let a = c.num(2);
        let b = c.num(3);
        let trivial = build_periodic_function(std::slice::from_ref(&a), std::slice::from_ref(&a), &c).unwrap();
        assert_eq!(trivial.eval(&c.num(7), &c).unwrap(), c.num(1));
        let f = build_periodic_function(&[a.clone(), b.clone()], &[a.mul(&b), c.num(1)], &c).unwrap();
        assert_eq!((f.c.clone(), f.r), (c.num(1), 0));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let u = c.random_unit(&mut rng);
            if let Ok(d) = f.type_defect(&u, &c) {
                assert!(d >= 10 * c.q_valuation());
            }
        }
        assert_eq!(
            build_periodic_function(std::slice::from_ref(&a), std::slice::from_ref(&b), &c).unwrap_err(),
            Error::ProductMismatch
        );
        // Representatives may differ by q-powers.
        let g = build_periodic_function(&[a.mul(&c.q)], std::slice::from_ref(&a), &c).unwrap();
        assert_eq!(g.r, 0);
    }

    #[test]
    fn torsion_functions() {
        let c = curve(3, 12);
        assert_eq!(torsion_function(&c.num(1), &c).unwrap_err(), Error::NotTorsion);
        assert_eq!(torsion_function(&c.num(2), &c).unwrap_err(), Error::NotTorsion);
        let q_pt = c.q_tilde().unwrap().pow(2).unwrap();
        let f = torsion_function(&q_pt, &c).unwrap();
        assert_eq!(f.object.c, q_pt);
        assert_eq!(f.k, 1);
        let u = c.num(7);
        let lhs = f.object.eval(&u, &c).unwrap();
        let rhs = q_pt.mul(&f.object.eval(&c.q.mul(&u), &c).unwrap());
        assert!(lhs.diff_valuation(&rhs) >= 10 * c.q_valuation());
        let per = f.lth_power(&u, &c).unwrap();
        assert!(
            per.diff_valuation(&f.lth_power(&c.q.mul(&u), &c).unwrap()) - per.valuation().unwrap()
                >= 9 * c.q_valuation()
        );
        let ratio = f.representative_ratio(1, &u, &c).unwrap();
        assert!(ratio.diff_valuation(&c.num(1)) >= 9 * c.q_valuation());
    }

    #[test]
    fn dimensions() {
        let c = curve(3, 6);
        assert_eq!(dim_theta_space(&c.num(5), 3, &c), 3);
        assert_eq!(dim_theta_space(&c.q_power(2), 0, &c), 1);
        assert_eq!(dim_theta_space(&c.num(2), 0, &c), 0);
        assert_eq!(dim_theta_space(&c.num(1), -1, &c), 0);
    }

    #[test]
    fn divisors() {
        let c = curve(3, 8);
        let a = c.num(2);
        let b = c.num(3);
        let f = ThetaObject::new(c.num(1), vec![a.clone()], vec![b.clone()], &c).unwrap();
        let g = ThetaObject::new(c.num(1), vec![b.mul(&c.q)], vec![c.num(11)], &c).unwrap();
        let sum = f.divisor(&c).unwrap().add(&g.divisor(&c).unwrap(), &c).unwrap();
        assert_eq!(f.mul(&g, &c).unwrap().divisor(&c).unwrap(), sum);
        assert_eq!(sum.degree(), 0);
        assert_eq!(sum.points.len(), 2);
        let principal = build_periodic_function(&[a.clone(), b.clone()], &[a.mul(&b), c.num(1)], &c).unwrap();
        assert!(principal.divisor(&c).unwrap().is_principal(&c).unwrap());
        assert!(!f.divisor(&c).unwrap().is_principal(&c).unwrap());
    }

    #[test]
    fn curve_json() {
        let c = curve(3, 24);
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"qTilde\"") && s.contains("\"T\":24"));
        let back: TateCurve = serde_json::from_str(&s).unwrap();
        assert_eq!(back.q(), c.q());
        assert!(TateCurve::from_q_tilde(&PadicNumber::from_i64(5, 5, 3), 4, 6).is_err());
        assert!(TateCurve::from_q_tilde(&PadicNumber::from_i64(5, 1, 3), 3, 6).is_err());
    }
}
