use serde::{Deserialize, Serialize};

use super::{phi_inf, schwarzian, DiffElement};
use crate::error::{Error, Result};
use crate::padic::{generalized_log, teichmuller, unit_decompose, PadicNumber};
use crate::series::TruncSeries;

/// a·(id + f) + b, an element of the diffeomorphism group extended by the affine group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendedDiff {
    pub a: PadicNumber,
    pub b: PadicNumber,
    pub core: DiffElement,
}

impl ExtendedDiff {
    pub fn new(a: PadicNumber, b: PadicNumber, core: DiffElement) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::ZeroScale);
        }
        Ok(ExtendedDiff { a, b, core })
    }

    pub fn from_core(core: DiffElement) -> Self {
        let p = core.p();
        ExtendedDiff { a: PadicNumber::one(p, 64), b: PadicNumber::zero(p), core }
    }

    pub fn as_series(&self) -> TruncSeries {
        let s = self.core.as_series().scale(&self.a);
        s.add(&TruncSeries::constant(self.b.clone(), s.len()))
    }

    /// (x ↦ a′x + b′) ∘ self.
    pub fn compose_affine_left(&self, a: &PadicNumber, b: &PadicNumber) -> Result<Self> {
        Self::new(a.mul(&self.a), a.mul(&self.b).add(b), self.core.clone())
    }

    /// Schwarzian through the quotient by the affine group: S{a·φ + b} = S{φ}.
    pub fn schwarzian(&self) -> TruncSeries {
        schwarzian(&self.core)
    }

    /// φ‴/φ′ − (3/2)(φ″/φ′)² evaluated on the full series a·(x + f) + b.
    pub fn schwarzian_direct(&self) -> Result<TruncSeries> {
        let s = self.as_series();
        let d1 = s.derivative();
        let d2 = d1.derivative();
        let d3 = d2.derivative();
        let inv = d1.reciprocal()?;
        let r2 = d2.mul(&inv);
        let r3 = d3.mul(&inv);
        let sq = r2.mul(&r2).truncate(r3.len()).scale(&PadicNumber::from_i64(s.p(), 3, 64)).div_int(2)?;
        Ok(r3.sub(&sq))
    }
}

/// s·log p + ω^l(ã)·log(g) applied to Dφ = a·(1 + Df), with log p kept formal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendedLog {
    pub s: i64,
    pub body: TruncSeries,
    pub char_index: u32,
}

pub fn extended_log(e: &ExtendedDiff, l: u32) -> Result<ExtendedLog> {
    if e.a.is_zero() {
        return Err(Error::ZeroScale);
    }
    let head = generalized_log(&e.a, l)?;
    let (s, residue, _) = unit_decompose(&e.a)?;
    let u = phi_inf(&e.core)?;
    let w = teichmuller(e.a.p(), residue, e.a.rel_precision()).pow(l as i64)?;
    let body = u.scale(&w).add(&TruncSeries::constant(head.body, u.len()));
    Ok(ExtendedLog { s, body, char_index: l })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffgroup::{is_member, phi_inf_inverse};

    const P: u32 = 5;

    fn member(c: &[i64]) -> DiffElement {
        is_member(&TruncSeries::from_i64s(P, 12, c)).unwrap()
    }

    fn num(n: i64) -> PadicNumber {
        PadicNumber::from_i64(P, n, 12)
    }

    #[test]
    fn trivial_element() {
        let e = ExtendedDiff::from_core(DiffElement::identity(P, 5));
        let v = extended_log(&e, 1).unwrap();
        assert_eq!(v.s, 0);
        assert!(v.body.is_zero());
        assert_eq!(ExtendedDiff::new(PadicNumber::zero(P), num(1), DiffElement::identity(P, 3)), Err(Error::ZeroScale));
    }

    #[test]
    fn translation_invariance() {
        let core = member(&[0, 0, 5, 25, 0]);
        let e1 = ExtendedDiff::new(num(50), num(3), core.clone()).unwrap();
        let e2 = ExtendedDiff::new(num(50), num(-17), core).unwrap();
        let (v1, v2) = (extended_log(&e1, 2).unwrap(), extended_log(&e2, 2).unwrap());
        assert_eq!(v1, v2);
        assert_eq!(v1.s, 2);
    }

    #[test]
    fn fibre_witness() {
        let l = 1;
        let core1 = member(&[0, 0, 5, 25, 10, 0]);
        let e1 = ExtendedDiff::new(num(1), num(0), core1.clone()).unwrap();
        let w = teichmuller(P, 2, 12);
        let twisted = crate::diffgroup::phi_inf(&core1).unwrap().scale(&w.pow(-(l as i64)).unwrap());
        let core2 = phi_inf_inverse(&twisted).unwrap();
        let e2 = ExtendedDiff::new(w.clone(), num(7), core2).unwrap();
        assert_ne!(e1.core, e2.core);
        assert_eq!(extended_log(&e1, l).unwrap(), extended_log(&e2, l).unwrap());
    }

    #[test]
    fn affine_left_invariance() {
        let core = member(&[0, 5, 10, 25, 0, 5, 0]);
        let e = ExtendedDiff::from_core(core.clone());
        let moved = e.compose_affine_left(&num(3), &num(11)).unwrap().compose_affine_left(&num(10), &num(-2)).unwrap();
        assert_eq!(moved.schwarzian(), schwarzian(&core));
        assert_eq!(moved.schwarzian_direct().unwrap(), schwarzian(&core));
        assert_eq!(e.schwarzian_direct().unwrap(), schwarzian(&core));
    }
}
