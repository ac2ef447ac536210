//! Frobenius liftings t ↦ (1 + t)^(p^m) − 1, symbolic log-volumes, and a toy
//! log-theta lattice walker.

use std::fmt;

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{is_prime, padic_log, teichmuller_lift, unit_decompose, PadicNumber, PrimeContext};
use crate::witt::zp_to_witt;

fn pow_u(p: u32, k: u32) -> BigUint {
    BigUint::from(p).pow(k)
}

/// F_m(t) = (1 + t)^(p^m) − 1 mod p^(m+1).
pub fn frobenius_lift(t: u32, m: u32, p: u32) -> Result<BigUint> {
    if t >= p {
        return Err(Error::OutOfRange(format!("residue {t} not below {p}")));
    }
    let modulus = pow_u(p, m + 1);
    let y = BigUint::from(1 + t).modpow(&pow_u(p, m), &modulus);
    Ok((y + &modulus - 1u32) % &modulus)
}

/// lim F_m(t) = ω(1 + t) − 1.
pub fn lift_limit(t: u32, ctx: &PrimeContext) -> Result<PadicNumber> {
    let p = ctx.p();
    if t + 1 >= p {
        return Err(Error::DomainError(format!("1 + t must be a unit, got t = {t}")));
    }
    Ok(teichmuller_lift(t + 1, ctx)?.sub(&ctx.one()))
}

/// log of the principal part of x, read off from the Teichmüller digits:
/// x = ω(a₀)·g with a₀ the leading digit.
pub fn vertical_log(x: &PadicNumber, n: usize) -> Result<PadicNumber> {
    if x.valuation() != Some(0) {
        return Err(Error::DomainError("unit required".into()));
    }
    let digits = zp_to_witt(x, n)?;
    let ctx = PrimeContext::new(x.p(), n as u32, 1)?;
    let g = x.div(&teichmuller_lift(digits.digits[0], &ctx)?)?;
    padic_log(&g)
}

/// a·log p + Σ bᵢ·log(1 − p^(−fᵢ)), kept symbolic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogVolume {
    #[serde(rename = "logPCoeff")]
    pub log_p_coeff: Rational64,
    /// (bᵢ, fᵢ) sorted by fᵢ, with no zero bᵢ.
    #[serde(rename = "unitTerms")]
    pub unit_terms: Vec<(i64, u32)>,
}

impl LogVolume {
    pub fn zero() -> Self {
        LogVolume { log_p_coeff: Rational64::zero(), unit_terms: Vec::new() }
    }

    pub fn log_p(a: Rational64) -> Self {
        LogVolume { log_p_coeff: a, unit_terms: Vec::new() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.unit_terms.clone();
        for &(b, f) in &other.unit_terms {
            match terms.iter_mut().find(|(_, g)| *g == f) {
                Some(slot) => slot.0 += b,
                None => terms.push((b, f)),
            }
        }
        terms.retain(|(b, _)| *b != 0);
        terms.sort_by_key(|&(_, f)| f);
        LogVolume { log_p_coeff: self.log_p_coeff + other.log_p_coeff, unit_terms: terms }
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        LogVolume {
            log_p_coeff: self.log_p_coeff * k,
            unit_terms: self.unit_terms.iter().map(|&(b, f)| (b * k, f)).collect(),
        }
    }
}

impl fmt::Display for LogVolume {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{}*log(p)", self.log_p_coeff)?;
        for (b, f) in &self.unit_terms {
            write!(out, " + {b}*log(1-p^-{f})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum VolumeSubset {
    /// 1 + 𝔭R_𝔭.
    OnePlusP,
    /// R_𝔭^×.
    UnitsFull,
    /// R_𝔭^× modulo its torsion k^× × μ_(p^m).
    UnitsModTorsion,
    /// The log-shell, normalized by the degree n = ef.
    LogShellNormalized,
}

impl std::str::FromStr for VolumeSubset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "onePlusP" | "one-plus-p" => Ok(Self::OnePlusP),
            "unitsFull" | "units-full" => Ok(Self::UnitsFull),
            "unitsModTorsion" | "units-mod-torsion" => Ok(Self::UnitsModTorsion),
            "logShellNormalized" | "log-shell-normalized" => Ok(Self::LogShellNormalized),
            other => Err(Error::DomainError(format!("unknown subset {other}"))),
        }
    }
}

/// Log-volumes for a p-adic field with ramification e, residue degree f and
/// p-power torsion μ_(p^m).
pub fn log_volume(p: u32, e: u32, f: u32, m: u32, subset: VolumeSubset) -> Result<LogVolume> {
    if !is_prime(p as u64) || e == 0 || f == 0 {
        return Err(Error::DomainError(format!("bad field data p = {p}, e = {e}, f = {f}")));
    }
    let (e, f, m) = (e as i64, f as i64, m as i64);
    Ok(match subset {
        VolumeSubset::OnePlusP => LogVolume::log_p(Rational64::from_integer(-f)),
        VolumeSubset::UnitsFull => LogVolume { log_p_coeff: Rational64::zero(), unit_terms: vec![(1, f as u32)] },
        VolumeSubset::UnitsModTorsion => LogVolume::log_p(Rational64::from_integer(-(m + f))),
        VolumeSubset::LogShellNormalized => LogVolume::log_p(-(Rational64::new(m, e * f) + Rational64::new(1, e))),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HodgeCell {
    pub n: i64,
    pub m: i64,
    /// Sorted multiset of formal q̃-exponents.
    pub pilot_exponents: Vec<Rational64>,
    pub unit_part: PadicNumber,
    pub torsion_tag: u32,
}

impl HodgeCell {
    pub fn new(pilot_exponents: Vec<Rational64>, unit_part: PadicNumber, torsion_tag: u32) -> Result<Self> {
        let p = unit_part.p();
        if pilot_exponents.is_empty() {
            return Err(Error::DomainError("pilot exponents must be nonempty".into()));
        }
        if unit_part.valuation() != Some(0) || unit_part.unit_residue() != 1 {
            return Err(Error::DomainError("unit part must lie in 1 + pZ_p".into()));
        }
        if torsion_tag == 0 || torsion_tag >= p {
            return Err(Error::DomainError(format!("torsion tag {torsion_tag} not in 1..{}", p - 1)));
        }
        let mut pilot_exponents = pilot_exponents;
        pilot_exponents.sort();
        Ok(HodgeCell { n: 0, m: 0, pilot_exponents, unit_part, torsion_tag })
    }

    /// Pilot {1}, unit 1, tag 1.
    pub fn origin(p: u32, precision: u32) -> Self {
        HodgeCell {
            n: 0,
            m: 0,
            pilot_exponents: vec![Rational64::one()],
            unit_part: PadicNumber::one(p, precision),
            torsion_tag: 1,
        }
    }
}

/// Field data attached to every log-link.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkField {
    pub e: u32,
    pub f: u32,
    pub m: u32,
}

impl Default for LinkField {
    fn default() -> Self {
        LinkField { e: 1, f: 1, m: 1 }
    }
}

/// g ↦ 1 + log g; m increases by one.
pub fn log_link(cell: &HodgeCell, field: LinkField) -> Result<(HodgeCell, LogVolume)> {
    let p = cell.unit_part.p();
    let lg = padic_log(&cell.unit_part)?;
    // v(log g) ≥ 1 for odd p, so 1 + log g stays in 1 + pZ_p.
    let rel = cell.unit_part.abs_precision().unwrap_or(1).max(1) as u32;
    let unit_part = PadicNumber::one(p, rel).add(&lg);
    let volume = log_volume(p, field.e, field.f, field.m, VolumeSubset::LogShellNormalized)?;
    Ok((HodgeCell { m: cell.m + 1, unit_part, ..cell.clone() }, volume))
}

/// a ↦ {a·j² : 1 ≤ j ≤ (l − 1)/2}; n increases by one.
pub fn theta_link(cell: &HodgeCell, l: u32) -> Result<HodgeCell> {
    if l < 3 || !is_prime(l as u64) {
        return Err(Error::DomainError(format!("l = {l} must be an odd prime")));
    }
    let half = (l as i64 - 1) / 2;
    let mut pilot: Vec<Rational64> =
        cell.pilot_exponents.iter().flat_map(|a| (1..=half).map(move |j| a * (j * j))).collect();
    pilot.sort();
    Ok(HodgeCell { n: cell.n + 1, pilot_exponents: pilot, ..cell.clone() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Link {
    #[serde(rename = "T")]
    Theta,
    #[serde(rename = "L")]
    Log,
}

/// Parses a comma-separated program such as "T,L,T,L".
pub fn parse_program(s: &str) -> Result<Vec<Link>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t {
            "T" | "t" | "theta" => Ok(Link::Theta),
            "L" | "l" | "log" => Ok(Link::Log),
            other => Err(Error::DomainError(format!("unknown link {other}"))),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkTrace {
    pub cells: Vec<HodgeCell>,
    pub step_volumes: Vec<LogVolume>,
    pub cumulative: Vec<LogVolume>,
}

impl WalkTrace {
    pub fn total(&self) -> LogVolume {
        self.cumulative.last().cloned().unwrap_or_else(LogVolume::zero)
    }
}

/// Θ-links carry no volume; each log-link contributes the normalized log-shell.
pub fn lattice_walk(start: &HodgeCell, program: &[Link], l: u32, field: LinkField) -> Result<WalkTrace> {
    if program.is_empty() {
        return Err(Error::DomainError("empty program".into()));
    }
    let mut cells = vec![start.clone()];
    let mut step_volumes = Vec::with_capacity(program.len());
    let mut cumulative = Vec::with_capacity(program.len());
    let mut total = LogVolume::zero();
    for link in program {
        let here = cells.last().expect("nonempty");
        let (next, vol) = match link {
            Link::Theta => (theta_link(here, l)?, LogVolume::zero()),
            Link::Log => log_link(here, field)?,
        };
        total = total.add(&vol);
        cells.push(next);
        step_volumes.push(vol);
        cumulative.push(total.clone());
    }
    Ok(WalkTrace { cells, step_volumes, cumulative })
}

/// Unit part check against the factorization x = p^s·ω(a)·g.
pub fn vertical_log_matches(x: &PadicNumber, n: usize) -> Result<bool> {
    let (_, _, g) = unit_decompose(x)?;
    Ok(vertical_log(x, n)? == padic_log(&g)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64) -> Rational64 {
        Rational64::from_integer(a)
    }

    #[test]
    fn lifts() {
        assert_eq!(frobenius_lift(0, 3, 5).unwrap(), BigUint::zero());
        assert_eq!(frobenius_lift(1, 1, 5).unwrap(), BigUint::from(6u32));
        for p in [3u32, 5, 7] {
            for t in 0..p {
                for m in 1..=8 {
                    let fm = frobenius_lift(t, m, p).unwrap();
                    assert_eq!(&fm % p, BigUint::from(t));
                    if m > 1 {
                        let prev = frobenius_lift(t, m - 1, p).unwrap();
                        assert_eq!(fm % pow_u(p, m), prev % pow_u(p, m));
                    }
                }
            }
        }
        assert!(frobenius_lift(5, 1, 5).is_err());
    }

    #[test]
    fn limits() {
        let ctx = PrimeContext::new(5, 10, 1).unwrap();
        assert!(lift_limit(0, &ctx).unwrap().is_zero());
        assert_eq!(lift_limit(3, &ctx).unwrap(), ctx.int(-2));
        assert!(matches!(lift_limit(4, &ctx), Err(Error::DomainError(_))));
        let small = PrimeContext::new(5, 2, 1).unwrap();
        assert_eq!(lift_limit(1, &small).unwrap(), small.int(6));
        for t in 0..4 {
            let lim = lift_limit(t, &ctx).unwrap();
            for m in 1..=9 {
                let fm = frobenius_lift(t, m, 5).unwrap();
                let res = lim.residue(m).unwrap();
                assert_eq!(res, fm % pow_u(5, m), "t = {t}, m = {m}");
            }
        }
    }

    #[test]
    fn volumes() {
        assert_eq!(log_volume(3, 1, 1, 1, VolumeSubset::LogShellNormalized).unwrap(), LogVolume::log_p(r(-2)));
        assert_eq!(log_volume(5, 1, 2, 1, VolumeSubset::OnePlusP).unwrap(), LogVolume::log_p(r(-2)));
        assert_eq!(log_volume(5, 1, 1, 1, VolumeSubset::UnitsFull).unwrap().unit_terms, vec![(1, 1)]);
        assert_eq!(log_volume(5, 2, 3, 1, VolumeSubset::UnitsModTorsion).unwrap(), LogVolume::log_p(r(-4)));
        assert_eq!(
            log_volume(7, 2, 3, 1, VolumeSubset::LogShellNormalized).unwrap(),
            LogVolume::log_p(-(Rational64::new(1, 6) + Rational64::new(1, 2)))
        );
        let a = log_volume(5, 1, 2, 1, VolumeSubset::UnitsFull).unwrap();
        assert_eq!(a.add(&a.scale(-1)), LogVolume::zero());
        assert_eq!(a.to_string(), "0*log(p) + 1*log(1-p^-2)");
    }

    #[test]
    fn links() {
        let origin = HodgeCell::origin(5, 3);
        let (same, _) = log_link(&origin, LinkField::default()).unwrap();
        assert_eq!(same.unit_part, PadicNumber::one(5, 3));
        assert_eq!((same.n, same.m), (0, 1));
        let cell = HodgeCell::new(vec![r(1)], PadicNumber::from_i64(5, 6, 3), 2).unwrap();
        let (next, _) = log_link(&cell, LinkField::default()).unwrap();
        assert_eq!(next.unit_part, PadicNumber::from_i64(5, 56, 3));
        assert_eq!(next.torsion_tag, 2);

        let zero = HodgeCell::new(vec![r(0)], PadicNumber::one(5, 3), 1).unwrap();
        assert_eq!(theta_link(&zero, 5).unwrap().pilot_exponents, vec![r(0), r(0)]);
        assert_eq!(theta_link(&origin, 3).unwrap().pilot_exponents, vec![r(1)]);
        let t = theta_link(&origin, 5).unwrap();
        assert_eq!(t.pilot_exponents, vec![r(1), r(4)]);
        assert_eq!((t.n, t.m), (1, 0));
        assert!(HodgeCell::new(vec![], PadicNumber::one(5, 3), 1).is_err());
        assert!(HodgeCell::new(vec![r(1)], PadicNumber::from_i64(5, 2, 3), 1).is_err());
    }

    #[test]
    fn walks() {
        let origin = HodgeCell::origin(5, 6);
        let trace = lattice_walk(&origin, &parse_program("L").unwrap(), 5, LinkField::default()).unwrap();
        assert_eq!(trace.cells[1].pilot_exponents, origin.pilot_exponents);
        assert_eq!(trace.cells[1].unit_part, origin.unit_part);

        let trace = lattice_walk(&origin, &parse_program("T,L").unwrap(), 5, LinkField::default()).unwrap();
        let idx: Vec<_> = trace.cells.iter().map(|c| (c.n, c.m)).collect();
        assert_eq!(idx, vec![(0, 0), (1, 0), (1, 1)]);

        let field = LinkField { e: 2, f: 1, m: 1 };
        let single = log_volume(5, 2, 1, 1, VolumeSubset::LogShellNormalized).unwrap();
        let k = 4;
        let trace = lattice_walk(&origin, &vec![Link::Log; k], 5, field).unwrap();
        assert_eq!(trace.total(), single.scale(k as i64));
        assert!(lattice_walk(&origin, &[], 5, field).is_err());
        assert!(parse_program("T,X").is_err());
    }

    #[test]
    fn vertical_consistency() {
        for x in [2i64, 7, 13, 24, 101, -3] {
            assert!(vertical_log_matches(&PadicNumber::from_i64(5, x, 8), 8).unwrap(), "x = {x}");
        }
    }
}
