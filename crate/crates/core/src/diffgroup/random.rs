//! Random certified members for property runs.

use rand::Rng;

use super::DiffElement;
use crate::padic::PadicNumber;
use crate::series::TruncSeries;

/// φ = x + Σ_{1 ≤ k ≤ degree} p·r_k·x^k, stored with `len` coefficients and
/// relative precision `rel`; r_k is uniform in 0..p^spread.
pub fn random_member_of_degree<R: Rng + ?Sized>(
    rng: &mut R,
    p: u32,
    degree: usize,
    len: usize,
    rel: u32,
    spread: u32,
) -> DiffElement {
    let bound = (p as i64).pow(spread);
    let coeffs = (0..len)
        .map(|k| {
            if k == 0 || k > degree {
                PadicNumber::zero(p)
            } else {
                PadicNumber::from_i64(p, p as i64 * rng.gen_range(0..bound), rel)
            }
        })
        .collect();
    super::is_member(&TruncSeries::new(p, coeffs)).expect("coefficients lie in pZ_p")
}

pub fn random_member<R: Rng + ?Sized>(rng: &mut R, p: u32, len: usize, rel: u32) -> DiffElement {
    random_member_of_degree(rng, p, len.saturating_sub(1), len, rel, 3)
}
