use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::number::PadicNumber;

/// Wire form: `{ "p", "val", "digits", "prec" }`.
///
/// Nonzero values carry little-endian unit digits and `prec` is the relative
/// precision. Zeros have `val: null`, no digits, and `prec` equal to the
/// absolute precision (`null` for an exact zero).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PadicJson {
    pub p: u32,
    pub val: Option<i64>,
    #[serde(default)]
    pub digits: Vec<u32>,
    pub prec: Option<i64>,
}

impl From<&PadicNumber> for PadicJson {
    fn from(x: &PadicNumber) -> Self {
        match x.valuation() {
            None => PadicJson { p: x.p(), val: None, digits: Vec::new(), prec: x.abs_precision() },
            Some(v) => PadicJson { p: x.p(), val: Some(v), digits: x.digits(), prec: Some(x.rel_precision() as i64) },
        }
    }
}

impl TryFrom<PadicJson> for PadicNumber {
    type Error = String;

    fn try_from(j: PadicJson) -> Result<Self, String> {
        if j.p < 3 || !super::is_prime(j.p as u64) {
            return Err(format!("p = {} must be an odd prime", j.p));
        }
        match j.val {
            None => Ok(match j.prec {
                None => PadicNumber::zero(j.p),
                Some(a) => PadicNumber::zero_to(j.p, a),
            }),
            Some(v) => {
                let rel = j.prec.unwrap_or(j.digits.len() as i64);
                if rel < 1 || (rel as usize) < j.digits.len() {
                    return Err(format!("prec {rel} incompatible with {} digits", j.digits.len()));
                }
                let mut unit = BigUint::from(0u32);
                for &d in j.digits.iter().rev() {
                    if d >= j.p {
                        return Err(format!("digit {d} out of range for p = {}", j.p));
                    }
                    unit = unit * j.p + d;
                }
                Ok(PadicNumber::from_parts(j.p, v, unit, rel as u32))
            }
        }
    }
}

impl Serialize for PadicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PadicJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PadicNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PadicJson::deserialize(d)?;
        PadicNumber::try_from(j).map_err(serde::de::Error::custom)
    }
}
