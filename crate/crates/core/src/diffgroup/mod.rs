//! The group of analytic diffeomorphisms φ = id + f of Z_p, with f a truncated
//! power series whose coefficients all lie in pZ_p.
//!
//! Every map here works on series truncated at a fixed degree D, so identities
//! hold modulo x^(D+1) and modulo the working precision.

mod extended;
mod finite;
mod frobenius;
pub mod random;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{haar_integral, supremum, NormIntegrand};
use crate::padic::{ppow, PadicNumber};
use crate::series::TruncSeries;

pub use extended::{extended_log, ExtendedDiff, ExtendedLog};
pub use finite::{reduce_mod, FiniteDiff};
pub use frobenius::{frobenius_schwarzian, frobenius_schwarzian_from_potential};

/// φ = id + f with the certificate v_p(c_k) ≥ 1 for all k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffElement {
    #[serde(flatten)]
    f: TruncSeries,
    certified: bool,
}

impl DiffElement {
    pub fn identity(p: u32, len: usize) -> Self {
        DiffElement { f: TruncSeries::zero(p, len), certified: true }
    }

    pub fn perturbation(&self) -> &TruncSeries {
        &self.f
    }

    pub fn certified(&self) -> bool {
        self.certified
    }

    pub fn p(&self) -> u32 {
        self.f.p()
    }

    /// Number of known coefficients (D + 1).
    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// The full series x + f.
    pub fn as_series(&self) -> TruncSeries {
        let rel = self.f.coeffs().iter().map(|c| c.rel_precision()).max().unwrap_or(1).max(1);
        TruncSeries::identity(self.p(), self.len(), rel).add(&self.f)
    }

    /// Dφ = 1 + Df.
    pub fn derivative(&self) -> TruncSeries {
        self.as_series().derivative()
    }

    pub fn eval(&self, x: &PadicNumber) -> PadicNumber {
        x.add(&self.f.eval(x))
    }
}

fn check_member(f: &TruncSeries) -> Result<()> {
    if let Some(c0) = f.coeff(0) {
        if !c0.is_zero() {
            return Err(Error::DomainError("perturbation must vanish at 0".into()));
        }
    }
    match f.coeffs().iter().skip(1).position(|c| c.valuation_bound() < 1) {
        Some(i) => Err(Error::NotAMember { index: i + 1 }),
        None => Ok(()),
    }
}

pub fn is_member(f: &TruncSeries) -> Result<DiffElement> {
    check_member(f)?;
    Ok(DiffElement { f: f.clone(), certified: true })
}

fn certified(f: TruncSeries) -> DiffElement {
    assert!(check_member(&f).is_ok(), "membership certificate violated");
    DiffElement { f, certified: true }
}

/// φ∘ψ = x + g + f(x + g).
pub fn compose(phi: &DiffElement, psi: &DiffElement) -> Result<DiffElement> {
    if phi.p() != psi.p() {
        return Err(Error::ModulusMismatch);
    }
    let inner = psi.as_series();
    let total = psi.f.add(&phi.f.compose(&inner)?);
    Ok(certified(total))
}

/// Fixed point of g = −f(x + g).
pub fn invert(phi: &DiffElement) -> Result<DiffElement> {
    let p = phi.p();
    let n = phi.len();
    let prec = phi.f.coeffs().iter().filter_map(|c| c.abs_precision()).max().unwrap_or(0).max(0) as usize;
    let max_iter = 4 * (prec + n) + 16;
    let mut g = TruncSeries::zero(p, n);
    for _ in 0..max_iter {
        let x_plus_g = TruncSeries::identity(p, n, prec.max(1) as u32).add(&g);
        let next = phi.f.compose(&x_plus_g)?.neg();
        if next.agrees(&g) && g.agrees(&next) {
            check_member(&next).map_err(|_| Error::NonConvergence { iterations: max_iter })?;
            return Ok(DiffElement { f: next, certified: true });
        }
        g = next;
    }
    Err(Error::NonConvergence { iterations: max_iter })
}

/// (1/p^m)((Dφ)^(p^m) − 1).
pub fn phi_m(phi: &DiffElement, m: u32) -> TruncSeries {
    let p = phi.p();
    let d = phi.derivative().lift_by(m);
    let powered = d.pow_big(&ppow(p, m));
    let rel = powered.coeffs().iter().map(|c| c.rel_precision()).max().unwrap_or(1).max(1);
    powered.sub(&TruncSeries::one(p, powered.len(), rel)).mul_pow_p(-(m as i64))
}

/// Inverse of `phi_m`: Newton p^m-th root of 1 + p^m·g, then x + ∫(root − 1).
pub fn phi_m_inverse(g: &TruncSeries, m: u32) -> Result<DiffElement> {
    let p = g.p();
    let n = g.len();
    if g.is_zero() {
        return Ok(DiffElement::identity(p, n + 1));
    }
    if g.min_valuation() < 1 {
        return Err(Error::NotInImage);
    }
    let a = g.coeffs().iter().filter_map(|c| c.abs_precision()).min().unwrap_or(1).max(1);
    let work = a + 2 * m as i64 + 2;
    let nn = ppow(p, m);
    let nm1 = &nn - 1u32;
    let one = TruncSeries::one(p, n, work as u32);
    let y = one.add(&g.lift_to_abs(work - m as i64).mul_pow_p(m as i64)).lift_to_abs(work);
    let mut r = one;
    let max_iter = 2 * work as usize + 16;
    let mut converged = false;
    for _ in 0..max_iter {
        let rn1 = r.pow_big(&nm1);
        let rn = rn1.mul(&r);
        let delta = rn.sub(&y).mul_pow_p(-(m as i64)).mul(&rn1.reciprocal()?);
        if delta.is_zero() {
            converged = true;
            break;
        }
        r = r.sub(&delta).lift_to_abs(work);
    }
    if !converged {
        return Err(Error::NotInImage);
    }
    let r = r.map(|c| c.truncate_abs(a));
    let df = r.sub(&TruncSeries::one(p, n, a as u32));
    let (f, _) = df.antiderivative()?;
    let phi = is_member(&f).map_err(|_| Error::NotInImage)?;
    if !phi_m(&phi, m).agrees(g) {
        return Err(Error::NotInImage);
    }
    Ok(phi)
}

/// log(Dφ).
pub fn phi_inf(phi: &DiffElement) -> Result<TruncSeries> {
    phi.derivative().log()
}

/// x + ∫(exp(g) − 1).
pub fn phi_inf_inverse(g: &TruncSeries) -> Result<DiffElement> {
    let p = g.p();
    if g.min_valuation() < 1 {
        return Err(Error::DomainError("argument needs all coefficients in pZ_p".into()));
    }
    if g.is_zero() {
        return Ok(DiffElement::identity(p, g.len() + 1));
    }
    let e = g.exp()?;
    let rel = e.coeffs().iter().map(|c| c.rel_precision()).max().unwrap_or(1).max(1);
    let (f, _) = e.sub(&TruncSeries::one(p, e.len(), rel)).antiderivative()?;
    is_member(&f)
}

/// Derivative of Φ_m at φ in the direction h: (Dφ)^(p^m − 1)·Dh.
pub fn phi_m_variation(phi: &DiffElement, h: &TruncSeries, m: u32) -> TruncSeries {
    let e = ppow(phi.p(), m) - 1u32;
    phi.derivative().pow_big(&e).mul(&h.derivative())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FinslerExponent {
    Finite(u32),
    Infinity,
}

/// F_r(h) = (∫|Dh|^r)^(1/r), kept as the exact radicand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinslerNorm {
    pub radicand: BigRational,
    pub r: FinslerExponent,
}

impl FinslerNorm {
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        let x = self.radicand.to_f64().unwrap_or(f64::NAN);
        match self.r {
            FinslerExponent::Finite(r) => x.powf(1.0 / r as f64),
            FinslerExponent::Infinity => x,
        }
    }
}

pub fn finsler_norm(h: &TruncSeries, r: FinslerExponent, depth: usize) -> Result<FinslerNorm> {
    let dh = h.derivative();
    let radicand = match r {
        FinslerExponent::Finite(0) => return Err(Error::DomainError("r must be at least 1".into())),
        FinslerExponent::Finite(k) => haar_integral(&NormIntegrand::from_series(&dh, k), depth)?,
        FinslerExponent::Infinity => supremum(&NormIntegrand::from_series(&dh, 1), depth)?,
    };
    Ok(FinslerNorm { radicand, r })
}

/// S{φ} = u″ − u′²/2 with u = log(Dφ).
pub fn schwarzian(phi: &DiffElement) -> TruncSeries {
    let u = phi_inf(phi).expect("Dφ ≡ 1 mod p for certified members");
    schwarzian_of_log(&u)
}

pub(crate) fn schwarzian_of_log(u: &TruncSeries) -> TruncSeries {
    let u1 = u.derivative();
    let u2 = u1.derivative();
    let half = u1.mul(&u1).truncate(u2.len()).div_int(2).expect("2 is a unit");
    u2.sub(&half)
}

pub fn bers(phi: &DiffElement) -> TruncSeries {
    schwarzian(phi)
}

/// The 1-cocycle ξ(φ) = φ − id.
pub fn cocycle(phi: &DiffElement) -> TruncSeries {
    phi.f.clone()
}

/// ξ(φ∘ψ) = ξ(φ)∘ψ + ξ(ψ).
pub fn cocycle_identity_check(phi: &DiffElement, psi: &DiffElement) -> Result<bool> {
    let lhs = cocycle(&compose(phi, psi)?);
    let rhs = cocycle(phi).compose(&psi.as_series())?.add(&cocycle(psi));
    Ok(lhs.agrees(&rhs))
}
