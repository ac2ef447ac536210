use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{haar_integral, scan_zeros, NormIntegrand, ZeroScan};
use crate::error::{Error, Result};
use crate::padic::is_prime;

/// Class of a measure value modulo q − 1, normalized into 1..q−1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SerreInvariant {
    pub value: u64,
    pub q: u64,
}

fn normalize(n: &BigInt, q: u64) -> u64 {
    let m = BigInt::from(q - 1);
    ((n - 1u32).mod_floor(&m) + 1u32).to_u64().unwrap()
}

pub fn serre_ball_class(r: u64, q: u64) -> Result<SerreInvariant> {
    if r < 1 || q < 3 {
        return Err(Error::DomainError(format!("need r >= 1 and q >= 3, got r = {r}, q = {q}")));
    }
    Ok(SerreInvariant { value: normalize(&BigInt::from(r), q), q })
}

/// Invariant of ∫_{Z_p}|ω| for a form nonvanishing on Z_p; q must be a power of p.
pub fn serre_invariant_form(omega: &NormIntegrand, q: u64, depth: usize) -> Result<SerreInvariant> {
    let p = omega.p() as u64;
    let mut f = 0u32;
    let mut t = q;
    while t > 1 && t.is_multiple_of(p) {
        t /= p;
        f += 1;
    }
    if t != 1 || f == 0 {
        return Err(Error::DomainError(format!("q = {q} is not a power of p = {p}")));
    }
    for (poly, e) in omega.factors() {
        if *e == 0 {
            continue;
        }
        match scan_zeros(poly, depth) {
            ZeroScan::NonVanishing => {}
            ZeroScan::Vanishes => return Err(Error::VanishingForm),
            ZeroScan::Undecided => {
                return Err(Error::DepthInsufficient { partial: Box::new(Zero::zero()), error_bound: None })
            }
        }
    }
    let value = haar_integral(omega, depth).map_err(|e| match e {
        Error::VanishingDensity => Error::VanishingForm,
        other => other,
    })?;
    // value = N / q^m with m minimal.
    let pb = BigInt::from(p);
    let mut d = value.denom().clone();
    let mut k = 0u32;
    while (&d % &pb).is_zero() {
        d /= &pb;
        k += 1;
    }
    if !d.is_one() {
        return Err(Error::DomainError(format!("integral {value} is not of the form N/q^m")));
    }
    let m = k.div_ceil(f);
    let n = value.numer() * BigInt::from(q).pow(m) / value.denom();
    Ok(SerreInvariant { value: normalize(&n, q), q })
}

/// Number of projective points of y² = x³ + a4·x + a6 over F_p.
pub fn elliptic_point_count(a4: i64, a6: i64, p: u32) -> Result<u64> {
    if p < 5 || !is_prime(p as u64) {
        return Err(Error::DomainError(format!("p = {p} must be a prime >= 5")));
    }
    let pi = p as i64;
    let a = a4.rem_euclid(pi);
    let b = a6.rem_euclid(pi);
    if (4 * a * a % pi * a + 27 * b % pi * b).rem_euclid(pi) == 0 {
        return Err(Error::BadReduction(p));
    }
    let half = (p as u64 - 1) / 2;
    let mut count = 1u64;
    for x in 0..p as u64 {
        let rhs = (x * x % p as u64 * x + a as u64 * x + b as u64) % p as u64;
        count += if rhs == 0 {
            1
        } else if BigInt::from(rhs).modpow(&BigInt::from(half), &BigInt::from(p)).is_one() {
            2
        } else {
            0
        };
    }
    Ok(count)
}

pub fn elliptic_serre_invariant(a4: i64, a6: i64, p: u32) -> Result<SerreInvariant> {
    let n = elliptic_point_count(a4, a6, p)?;
    Ok(SerreInvariant { value: normalize(&BigInt::from(n), p as u64), q: p as u64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicNumber;

    fn brute_force(a4: i64, a6: i64, p: i64) -> u64 {
        let mut n = 1;
        for x in 0..p {
            for y in 0..p {
                if (y * y - x * x * x - a4 * x - a6).rem_euclid(p) == 0 {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn ball_classes() {
        assert_eq!(serre_ball_class(1, 5).unwrap().value, 1);
        assert_eq!(serre_ball_class(7, 5).unwrap().value, 3);
        assert_eq!(serre_ball_class(5, 5).unwrap().value, 1);
        assert!(serre_ball_class(0, 5).is_err());
    }

    #[test]
    fn elliptic_examples() {
        assert_eq!(brute_force(0, 1, 5), 6);
        assert_eq!(elliptic_point_count(0, 1, 5).unwrap(), 6);
        assert_eq!(elliptic_serre_invariant(0, 1, 5).unwrap().value, 2);
        assert_eq!(brute_force(1, 0, 7), 8);
        assert_eq!(elliptic_serre_invariant(1, 0, 7).unwrap().value, 2);
        assert_eq!(elliptic_point_count(0, 0, 5), Err(Error::BadReduction(5)));
        assert!(elliptic_point_count(1, 1, 3).is_err());
    }

    #[test]
    fn elliptic_matches_enumeration_and_hasse() {
        for p in [5i64, 7, 11, 13] {
            for a4 in 0..p {
                for a6 in 0..p {
                    match elliptic_point_count(a4, a6, p as u32) {
                        Ok(n) => {
                            assert_eq!(n, brute_force(a4, a6, p));
                            let d = n as f64 - (p + 1) as f64;
                            assert!(d * d <= 4.0 * p as f64);
                        }
                        Err(Error::BadReduction(_)) => {
                            assert_eq!((4 * a4.pow(3) + 27 * a6 * a6).rem_euclid(p), 0)
                        }
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
    }

    #[test]
    fn form_invariants() {
        let p = 5;
        let one = NormIntegrand::constant(PadicNumber::from_i64(p, 1, 8));
        assert_eq!(serre_invariant_form(&one, 5, 4).unwrap().value, 1);
        let unit = NormIntegrand::constant(PadicNumber::from_i64(p, 3, 8));
        assert_eq!(serre_invariant_form(&unit, 5, 4).unwrap().value, 1);
        let w = NormIntegrand::power(p, vec![PadicNumber::from_i64(p, 2, 8), PadicNumber::from_i64(p, 5, 8)], 1);
        assert_eq!(serre_invariant_form(&w, 5, 4).unwrap().value, 1);
        let x = NormIntegrand::power(p, vec![PadicNumber::zero(p), PadicNumber::from_i64(p, 1, 8)], 1);
        assert_eq!(serre_invariant_form(&x, 5, 4), Err(Error::VanishingForm));
        // |5 + 25x| integrates to 1/5 = 1/q: N = 1.
        let w = NormIntegrand::power(p, vec![PadicNumber::from_i64(p, 5, 8), PadicNumber::from_i64(p, 25, 8)], 1);
        assert_eq!(serre_invariant_form(&w, 5, 4).unwrap().value, 1);
        // x^2 + 2 has no root mod 5.
        let w = NormIntegrand::power(
            p,
            vec![PadicNumber::from_i64(p, 2, 8), PadicNumber::zero(p), PadicNumber::from_i64(p, 1, 8)],
            1,
        );
        assert_eq!(serre_invariant_form(&w, 25, 4).unwrap().value, 1);
        assert!(serre_invariant_form(&w, 6, 4).is_err());
        // Z_p is a single ball, so every nonvanishing form has invariant 1: ∫|x^2 + 5| = 21/25.
        let w = NormIntegrand::power(
            p,
            vec![PadicNumber::from_i64(p, 5, 8), PadicNumber::zero(p), PadicNumber::from_i64(p, 1, 8)],
            1,
        );
        assert_eq!(serre_invariant_form(&w, 5, 6).unwrap().value, 1);
    }
}
