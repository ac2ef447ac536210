use clap::ValueEnum;
use num_bigint::BigInt;
use num_rational::BigRational;
use padic_teich::padic::is_prime;
use padic_teich::PadicNumber;

use crate::{config_err, CliError, GlobalArgs};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Validated global settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub p: u32,
    pub precision: u32,
    pub degree: usize,
    pub depth: usize,
    pub seed: u64,
}

impl RunConfig {
    pub fn from_args(g: &GlobalArgs) -> Result<Self, CliError> {
        if g.prime < 3 || !is_prime(g.prime as u64) {
            return Err(CliError::Config(format!("--prime {} is not an odd prime", g.prime)));
        }
        if !(1..=400).contains(&g.precision) {
            return Err(CliError::Config(format!("--precision {} outside 1..=400", g.precision)));
        }
        if !(1..=64).contains(&g.degree) {
            return Err(CliError::Config(format!("--degree {} outside 1..=64", g.degree)));
        }
        if !(1..=400).contains(&g.depth) {
            return Err(CliError::Config(format!("--depth {} outside 1..=400", g.depth)));
        }
        Ok(RunConfig { p: g.prime, precision: g.precision, degree: g.degree, depth: g.depth, seed: g.seed })
    }

    /// Parses "n" or "a/b" into Q_p at the configured precision.
    pub fn number(&self, s: &str) -> Result<PadicNumber, CliError> {
        let q = parse_rational(s)?;
        PadicNumber::from_rational(self.p, &q, self.precision).map_err(config_err)
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational, CliError> {
    let s = s.trim();
    let bad = || CliError::Config(format!("cannot parse {s:?} as a rational"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => {
            (n.trim().parse::<BigInt>().map_err(|_| bad())?, d.trim().parse::<BigInt>().map_err(|_| bad())?)
        }
        None => (s.parse::<BigInt>().map_err(|_| bad())?, BigInt::from(1)),
    };
    if d == BigInt::from(0) {
        return Err(CliError::Config("zero denominator".into()));
    }
    Ok(BigRational::new(n, d))
}

pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<T>().map_err(|_| CliError::Config(format!("bad {what} value {t:?}"))))
        .collect()
}
