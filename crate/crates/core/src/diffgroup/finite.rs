use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::DiffElement;
use crate::error::{Error, Result};
use crate::padic::PadicNumber;

const MAX_TABLE: u64 = 1 << 22;

/// A permutation of Z/p^m, the image of φ in the finite quotient at level m.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteDiff {
    pub p: u32,
    pub m: u32,
    pub table: Vec<u64>,
}

impl FiniteDiff {
    pub fn identity(p: u32, m: u32) -> Self {
        let n = (p as u64).pow(m);
        FiniteDiff { p, m, table: (0..n).collect() }
    }

    pub fn modulus(&self) -> u64 {
        self.table.len() as u64
    }

    pub fn apply(&self, x: u64) -> u64 {
        self.table[(x % self.modulus()) as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.table.iter().enumerate().all(|(i, &v)| i as u64 == v)
    }

    /// x ↦ self(other(x)).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.p != other.p || self.m != other.m {
            return Err(Error::ModulusMismatch);
        }
        Ok(FiniteDiff { p: self.p, m: self.m, table: other.table.iter().map(|&x| self.apply(x)).collect() })
    }

    /// Reduction to level k ≤ m.
    pub fn project(&self, k: u32) -> Result<Self> {
        if k > self.m {
            return Err(Error::OutOfRange(format!("level {k} above {}", self.m)));
        }
        let n = (self.p as u64).pow(k);
        let table: Vec<u64> = (0..n).map(|x| self.table[x as usize] % n).collect();
        if (0..self.modulus()).any(|x| self.table[x as usize] % n != table[(x % n) as usize]) {
            return Err(Error::NotBijective);
        }
        Ok(FiniteDiff { p: self.p, m: k, table })
    }
}

pub fn reduce_mod(phi: &DiffElement, m: u32) -> Result<FiniteDiff> {
    let p = phi.p();
    if m < 1 {
        return Err(Error::DomainError("level must be at least 1".into()));
    }
    let n = (p as u64)
        .checked_pow(m)
        .filter(|&n| n <= MAX_TABLE)
        .ok_or_else(|| Error::OutOfRange(format!("table of size {p}^{m} is too large")))?;
    let series = phi.as_series();
    let mut table = Vec::with_capacity(n as usize);
    let mut seen = vec![false; n as usize];
    for x in 0..n {
        let y = series.eval(&PadicNumber::from_i64(p, x as i64, m + 1)).residue(m)?.to_u64().unwrap();
        if std::mem::replace(&mut seen[y as usize], true) {
            return Err(Error::NotBijective);
        }
        table.push(y);
    }
    Ok(FiniteDiff { p, m, table })
}
