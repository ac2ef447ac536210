//! Capped-precision arithmetic in Q_p and the analytic functions built on it.

mod analytic;
mod json;
mod number;

pub use analytic::{
    frobenius_exp_approx, frobenius_log, generalized_log, padic_exp, padic_log, teichmuller, teichmuller_lift,
    unit_decompose, unit_nth_root, FormalLogValue,
};
pub use json::PadicJson;
pub use number::PadicNumber;
pub(crate) use number::{ilog, ppow, vp_u64};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime, working precision and default series degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeContext {
    p: u32,
    n: u32,
    d: usize,
}

impl PrimeContext {
    pub fn new(p: u32, n: u32, d: usize) -> Result<Self> {
        if p < 3 || !is_prime(p as u64) {
            return Err(Error::InvalidContext(format!("p = {p} must be an odd prime")));
        }
        if n < 2 {
            return Err(Error::InvalidContext(format!("precision {n} must be at least 2")));
        }
        if d < 1 {
            return Err(Error::InvalidContext("degree must be at least 1".into()));
        }
        Ok(PrimeContext { p, n, d })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn with_precision(&self, n: u32) -> Self {
        PrimeContext { n: n.max(2), ..*self }
    }

    pub fn with_degree(&self, d: usize) -> Self {
        PrimeContext { d: d.max(1), ..*self }
    }

    pub fn int(&self, n: i64) -> PadicNumber {
        PadicNumber::from_i64(self.p, n, self.n)
    }

    pub fn bigint(&self, n: &BigInt) -> PadicNumber {
        PadicNumber::from_bigint(self.p, n, self.n)
    }

    pub fn rational(&self, num: i64, den: i64) -> Result<PadicNumber> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        PadicNumber::from_rational(self.p, &BigRational::new(num.into(), den.into()), self.n)
    }

    pub fn zero(&self) -> PadicNumber {
        PadicNumber::zero(self.p)
    }

    pub fn one(&self) -> PadicNumber {
        PadicNumber::one(self.p, self.n)
    }
}
