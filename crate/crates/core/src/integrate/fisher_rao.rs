use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{haar_integral, p_inv_pow, scan_zeros, NormIntegrand, Poly, ZeroScan};
use crate::error::{Error, Result};
use crate::padic::PadicNumber;
use crate::series::TruncSeries;

/// Fisher–Rao components of the location-scale family of the density h = Df,
/// and the ultrametric bound for one tangent direction (dt, dσ).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FisherRao {
    pub g_tt: BigRational,
    pub g_ss: BigRational,
    pub g_ts: BigRational,
    /// Integral of |(Dh·dt + (h + zDh)·dσ)/h|²·|h| scaled by |σ|^(−2).
    pub combined: BigRational,
    /// max{g_tt|dt|², g_σσ|dσ|², g_tσ|dt||dσ|}.
    pub bound: BigRational,
    pub bound_holds: bool,
}

fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let p = a.first().or(b.first()).map(|c| c.p()).unwrap_or(3);
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(|| PadicNumber::zero(p));
            let y = b.get(i).cloned().unwrap_or_else(|| PadicNumber::zero(p));
            x.add(&y)
        })
        .collect()
}

fn poly_scale(a: &Poly, c: &PadicNumber) -> Poly {
    a.iter().map(|x| x.mul(c)).collect()
}

fn abs_sq(x: &PadicNumber) -> BigRational {
    match x.valuation() {
        Some(v) => p_inv_pow(x.p(), 2 * v),
        None => BigRational::zero(),
    }
}

pub fn fisher_rao_components(f: &TruncSeries, sigma: &PadicNumber, depth: usize) -> Result<FisherRao> {
    let one = PadicNumber::one(f.p(), 1);
    fisher_rao_bound(f, sigma, &one, &one, depth)
}

pub fn fisher_rao_bound(
    f: &TruncSeries,
    sigma: &PadicNumber,
    dt: &PadicNumber,
    ds: &PadicNumber,
    depth: usize,
) -> Result<FisherRao> {
    let p = f.p();
    let Some(vs) = sigma.valuation() else {
        return Err(Error::ZeroScale);
    };
    let h: Poly = f.derivative().coeffs().to_vec();
    if h.is_empty() {
        return Err(Error::VanishingDensity);
    }
    match scan_zeros(&h, depth) {
        ZeroScan::NonVanishing => {}
        ZeroScan::Vanishes => return Err(Error::VanishingDensity),
        ZeroScan::Undecided => {
            return Err(Error::DepthInsufficient { partial: Box::new(BigRational::zero()), error_bound: None })
        }
    }
    let dh: Poly = f.derivative().derivative().coeffs().to_vec();
    let mut zdh: Poly = vec![PadicNumber::zero(p)];
    zdh.extend(dh.iter().cloned());
    let b = poly_add(&h, &zdh);
    let scale = p_inv_pow(p, -2 * vs);
    let integral = |factors: Vec<(Poly, i32)>| -> Result<BigRational> {
        Ok(haar_integral(&NormIntegrand::product(p, factors), depth)? * &scale)
    };
    let g_tt = integral(vec![(dh.clone(), 2), (h.clone(), -1)])?;
    let g_ss = integral(vec![(b.clone(), 2), (h.clone(), -1)])?;
    let g_ts = integral(vec![(dh.clone(), 1), (b.clone(), 1), (h.clone(), -1)])?;
    let mixed = poly_add(&poly_scale(&dh, dt), &poly_scale(&b, ds));
    let combined = integral(vec![(mixed, 2), (h, -1)])?;
    let adt = abs_sq(dt);
    let ads = abs_sq(ds);
    let cross = match (dt.valuation(), ds.valuation()) {
        (Some(a), Some(b)) => p_inv_pow(p, a + b),
        _ => BigRational::zero(),
    };
    let candidates = [&g_tt * &adt, &g_ss * &ads, &g_ts * &cross];
    let bound = candidates.into_iter().max().unwrap();
    let bound_holds = combined <= bound;
    Ok(FisherRao { g_tt, g_ss, g_ts, combined, bound, bound_holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(c: &[i64]) -> TruncSeries {
        TruncSeries::from_i64s(5, 10, c)
    }

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn constant_density() {
        let f = series(&[0, 1, 0, 0]);
        let one = PadicNumber::from_i64(5, 1, 10);
        let r = fisher_rao_components(&f, &one, 4).unwrap();
        assert_eq!(r.g_tt, rat(0, 1));
        assert_eq!(r.g_ss, rat(1, 1));
        assert_eq!(r.g_ts, rat(0, 1));
        let five = PadicNumber::from_i64(5, 5, 10);
        let r = fisher_rao_components(&f, &five, 4).unwrap();
        assert_eq!(r.g_ss, rat(25, 1));
    }

    #[test]
    fn linear_density() {
        let f = series(&[0, 1, 5, 0]);
        let one = PadicNumber::from_i64(5, 1, 10);
        let r = fisher_rao_components(&f, &one, 6).unwrap();
        assert_eq!(r.g_tt, rat(1, 25));
        assert!(r.bound_holds);
    }

    #[test]
    fn vanishing_density_rejected() {
        let f = series(&[0, 0, 1, 0]);
        let one = PadicNumber::from_i64(5, 1, 10);
        assert_eq!(fisher_rao_components(&f, &one, 4), Err(Error::VanishingDensity));
        assert_eq!(fisher_rao_components(&series(&[0, 1]), &PadicNumber::zero(5), 4), Err(Error::ZeroScale));
    }
}
