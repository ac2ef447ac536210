use num_bigint::BigUint;

use super::{schwarzian, DiffElement};
use crate::padic::{ppow, PadicNumber};
use crate::series::TruncSeries;

/// S_m{φ} = ((3p^m/2)(φ″/φ′)² + S{φ})·(φ′)^(p^m).
pub fn frobenius_schwarzian(phi: &DiffElement, m: u32) -> TruncSeries {
    let p = phi.p();
    let d1 = phi.derivative();
    let d2 = d1.derivative();
    let ratio = d2.mul(&d1.reciprocal().expect("Dφ is a unit series"));
    let rel = d1.coeffs().iter().map(|c| c.rel_precision()).max().unwrap_or(1).max(1);
    let three_halves = PadicNumber::from_i64(p, 3, rel).div_int(2).expect("2 is a unit");
    let first = ratio.mul(&ratio).scale(&three_halves).mul_pow_p(m as i64);
    let s = schwarzian(phi);
    let bracket = first.truncate(s.len()).add(&s);
    bracket.mul(&d1.pow_big(&ppow(p, m)))
}

/// Coefficients c[i][j] of y^i z^j for i + j < len.
#[derive(Clone)]
struct Bivariate {
    p: u32,
    len: usize,
    c: Vec<Vec<PadicNumber>>,
}

impl Bivariate {
    fn zero(p: u32, len: usize) -> Self {
        let c = (0..len).map(|i| vec![PadicNumber::zero(p); len - i]).collect();
        Bivariate { p, len, c }
    }

    fn one(p: u32, len: usize, rel: u32) -> Self {
        let mut b = Self::zero(p, len);
        if len > 0 {
            b.c[0][0] = PadicNumber::one(p, rel);
        }
        b
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.p, self.len);
        for i1 in 0..self.len {
            for j1 in 0..self.len - i1 {
                let a = &self.c[i1][j1];
                if a.is_exact_zero() {
                    continue;
                }
                for i2 in 0..self.len - i1 - j1 {
                    for j2 in 0..self.len - i1 - j1 - i2 {
                        let b = &other.c[i2][j2];
                        if b.is_exact_zero() {
                            continue;
                        }
                        let slot = &mut out.c[i1 + i2][j1 + j2];
                        *slot = slot.add(&a.mul(b));
                    }
                }
            }
        }
        out
    }

    fn pow(&self, e: &BigUint, rel: u32) -> Self {
        let mut result = Self::one(self.p, self.len, rel);
        let mut base = self.clone();
        for i in 0..e.bits() {
            if e.bit(i) {
                result = result.mul(&base);
            }
            if i + 1 < e.bits() {
                base = base.mul(&base);
            }
        }
        result
    }
}

/// V_m(y, z) = p^(−m)·(((φ(y) − φ(z))/(y − z))^(p^m) − 1) as a bivariate series.
fn potential(phi: &DiffElement, m: u32) -> Bivariate {
    let p = phi.p();
    let a = phi.as_series().lift_by(m);
    let len = a.len().saturating_sub(1);
    // (φ(y) − φ(z))/(y − z) = Σ_k a_k Σ_{i+j=k−1} y^i z^j.
    let mut q = Bivariate::zero(p, len);
    for (k, ak) in a.coeffs().iter().enumerate().skip(1) {
        for i in 0..k {
            q.c[i][k - 1 - i] = ak.clone();
        }
    }
    let rel = a.coeffs().iter().map(|c| c.rel_precision()).max().unwrap_or(1).max(1);
    let mut v = q.pow(&ppow(p, m), rel);
    if len > 0 {
        v.c[0][0] = v.c[0][0].sub(&PadicNumber::one(p, rel));
    }
    for row in v.c.iter_mut() {
        for c in row.iter_mut() {
            *c = c.mul_pow_p(-(m as i64));
        }
    }
    v
}

/// 6·D_yD_z V_m(y, z) restricted to the diagonal y = z.
pub fn frobenius_schwarzian_from_potential(phi: &DiffElement, m: u32) -> TruncSeries {
    let p = phi.p();
    let v = potential(phi, m);
    let out_len = v.len.saturating_sub(2);
    let coeffs = (0..out_len)
        .map(|n| {
            let mut acc = PadicNumber::zero(p);
            for i in 0..=n {
                let j = n - i;
                acc = acc.add(&v.c[i + 1][j + 1].mul(&PadicNumber::from_i64(p, (6 * (i + 1) * (j + 1)) as i64, 64)));
            }
            acc
        })
        .collect();
    TruncSeries::new(p, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffgroup::{is_member, phi_m};

    fn member(c: &[i64]) -> DiffElement {
        is_member(&TruncSeries::from_i64s(5, 12, c)).unwrap()
    }

    #[test]
    fn affine_core_vanishes() {
        let phi = member(&[0, 5, 0, 0, 0, 0]);
        assert!(frobenius_schwarzian(&phi, 1).is_zero());
        assert!(frobenius_schwarzian_from_potential(&phi, 1).is_zero());
    }

    #[test]
    fn closed_form_matches_potential() {
        let phi = member(&[0, 5, 10, 25, -5, 15, 0, 5]);
        for m in 1..=2 {
            let closed = frobenius_schwarzian(&phi, m);
            let oracle = frobenius_schwarzian_from_potential(&phi, m);
            assert_eq!(closed.len(), oracle.len());
            assert_eq!(closed, oracle, "m = {m}");
        }
    }

    #[test]
    fn limit_is_schwarzian() {
        let phi = member(&[0, 0, 5, 25, 10, 0, 0]);
        let s = schwarzian(&phi);
        for m in 1..=4 {
            assert!(frobenius_schwarzian(&phi, m).diff_valuation(&s) >= m as i64);
        }
    }

    #[test]
    fn potential_diagonal_is_phi_m() {
        // V_m(x, x) = Φ_m(φ): the diagonal of the potential before differentiation.
        let phi = member(&[0, 5, 10, 25, 0, 0]);
        for m in 1..=2 {
            let v = potential(&phi, m);
            let diag: Vec<PadicNumber> =
                (0..v.len).map(|n| (0..=n).fold(PadicNumber::zero(5), |acc, i| acc.add(&v.c[i][n - i]))).collect();
            assert_eq!(TruncSeries::new(5, diag), phi_m(&phi, m));
        }
    }
}
