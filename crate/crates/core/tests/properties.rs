use num_bigint::BigUint;
use num_rational::{BigRational, Rational64};
use padic_teich::diffgroup::{
    cocycle_identity_check, compose, invert, phi_inf, phi_m, phi_m_inverse, random::random_member, reduce_mod,
    DiffElement,
};
use padic_teich::integrate::{haar_integral, NormIntegrand};
use padic_teich::lattice::{frobenius_lift, lattice_walk, lift_limit, HodgeCell, Link, LinkField};
use padic_teich::padic::{frobenius_log, padic_exp, padic_log, teichmuller};
use padic_teich::ramified::{EisensteinModulus, ExtElement};
use padic_teich::theta::{build_periodic_function, theta_fundamental, theta_torsion_value, TateCurve};
use padic_teich::witt::{frobenius_op, ghost_defect, verschiebung, witt_to_zp, zp_to_witt, WittOp, WittVector};
use padic_teich::{PadicNumber, PrimeContext};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn prime() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![3u32, 5, 7, 11])
}

fn nonzero(p: u32, rel: u32) -> impl Strategy<Value = PadicNumber> {
    (1i64..1_000_000, -3i64..4, any::<bool>()).prop_map(move |(n, shift, neg)| {
        let n = if neg { -n } else { n };
        PadicNumber::from_i64(p, n, rel).mul_pow_p(shift)
    })
}

fn principal_unit(p: u32, rel: u32) -> impl Strategy<Value = PadicNumber> {
    (0i64..1_000_000).prop_map(move |n| PadicNumber::from_i64(p, 1 + p as i64 * n, rel))
}

fn member(p: u32, len: usize) -> impl Strategy<Value = DiffElement> {
    any::<u64>().prop_map(move |seed| random_member(&mut ChaCha8Rng::seed_from_u64(seed), p, len, 12))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn field_laws(a in nonzero(5, 10), b in nonzero(5, 10), c in nonzero(5, 10)) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).valuation(), Some(a.valuation().unwrap() + b.valuation().unwrap()));
        prop_assert_eq!(a.div(&b).unwrap().mul(&b), a.clone());
        prop_assert!(a.add(&b).valuation_bound() >= a.valuation().unwrap().min(b.valuation().unwrap()));
    }

    #[test]
    fn json_round_trip(a in nonzero(7, 9)) {
        let s = serde_json::to_string(&a).unwrap();
        let back: PadicNumber = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back.rel_precision(), a.rel_precision());
        prop_assert_eq!(back, a);
    }

    #[test]
    fn teichmuller_is_root_of_unity(p in prime(), a in 1u32..11) {
        let a = 1 + (a - 1) % (p - 1);
        let w = teichmuller(p, a, 12);
        prop_assert_eq!(w.pow(p as i64 - 1).unwrap(), PadicNumber::one(p, 12));
        prop_assert_eq!(w.unit_residue(), a);
    }

    #[test]
    fn exp_inverts_log(x in principal_unit(5, 12)) {
        let ctx = PrimeContext::new(5, 12, 1).unwrap();
        let l = padic_log(&x).unwrap();
        prop_assert_eq!(padic_exp(&l, &ctx).unwrap(), x.clone());
        for m in 1..=4u32 {
            prop_assert!(frobenius_log(&x, m).unwrap().diff_valuation(&l) >= m as i64);
        }
    }

    #[test]
    fn diff_group_laws(a in member(5, 7), b in member(5, 7), c in member(5, 7)) {
        let ab_c = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let a_bc = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        prop_assert!(ab_c.perturbation().agrees(a_bc.perturbation()));
        let inv = invert(&a).unwrap();
        prop_assert!(compose(&a, &inv).unwrap().perturbation().is_zero());
        prop_assert!(compose(&inv, &a).unwrap().perturbation().is_zero());
        prop_assert!(cocycle_identity_check(&a, &b).unwrap());
        prop_assert!(reduce_mod(&a, 1).unwrap().is_identity());
    }

    #[test]
    fn log_map_is_a_cocycle(a in member(5, 7), b in member(5, 7)) {
        // log D(φ∘ψ) = (log Dφ)∘ψ + log Dψ.
        let lhs = phi_inf(&compose(&a, &b).unwrap()).unwrap();
        let rhs = phi_inf(&a).unwrap().compose(&b.as_series()).unwrap().add(&phi_inf(&b).unwrap());
        prop_assert!(lhs.agrees(&rhs));
    }

    #[test]
    fn phi_m_round_trip(a in member(5, 6), m in 1u32..3) {
        let back = phi_m_inverse(&phi_m(&a, m), m).unwrap();
        prop_assert!(back.perturbation().agrees(a.perturbation()));
    }

    #[test]
    fn haar_translation_invariance(a in 0i64..125, r in 1u32..4) {
        let shifted = NormIntegrand::power(5, vec![PadicNumber::from_i64(5, -a, 8), PadicNumber::one(5, 8)], r);
        let centred = NormIntegrand::power(5, vec![PadicNumber::zero(5), PadicNumber::one(5, 8)], r);
        prop_assert_eq!(haar_integral(&shifted, 40).unwrap(), haar_integral(&centred, 40).unwrap());
    }

    #[test]
    fn witt_transport(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = WittVector::random(&mut rng, 5, n);
        let b = WittVector::random(&mut rng, 5, n);
        prop_assert_eq!(zp_to_witt(&witt_to_zp(&a), n).unwrap(), a.clone());
        for op in [WittOp::Add, WittOp::Mul] {
            let d = ghost_defect(&a, &b, op, n as u32 + 1).unwrap();
            for (i, v) in d.iter().enumerate() {
                prop_assert!(*v as usize > i);
            }
        }
        let vf = verschiebung(&frobenius_op(&a), false);
        let fv = frobenius_op(&verschiebung(&a, false));
        let times_p = witt_to_zp(&a).mul_pow_p(1);
        prop_assert!(witt_to_zp(&vf).agrees(&times_p));
        prop_assert!(witt_to_zp(&fv).agrees(&times_p));
    }

    #[test]
    fn ramified_valuation_law(x in prop::collection::vec(1i64..500, 3), y in prop::collection::vec(1i64..500, 3)) {
        let g = EisensteinModulus::pure(7, 3, 1, 10).unwrap();
        let mk = |c: &[i64]| ExtElement::from_coeffs(&g, c.iter().map(|&n| PadicNumber::from_i64(7, n, 10)).collect());
        let (a, b) = (mk(&x), mk(&y));
        if let (Some(va), Some(vb)) = (a.valuation(), b.valuation()) {
            prop_assert_eq!(a.mul(&b).valuation(), Some(va + vb));
            prop_assert!(a.add(&b).valuation_bound() >= va.min(vb));
        }
    }

    #[test]
    fn lift_compatibility(p in prime(), t in 0u32..11, m in 2u32..9) {
        let t = t % p;
        let fm = frobenius_lift(t, m, p).unwrap();
        let prev = frobenius_lift(t, m - 1, p).unwrap();
        let pm = BigUint::from(p).pow(m);
        prop_assert_eq!(&fm % &pm, prev % &pm);
        if t + 1 < p {
            let ctx = PrimeContext::new(p, 10, 1).unwrap();
            prop_assert_eq!(lift_limit(t, &ctx).unwrap().residue(m).unwrap(), fm % pm);
        }
    }

    #[test]
    fn walk_volumes_add(a in prop::collection::vec(any::<bool>(), 1..6), b in prop::collection::vec(any::<bool>(), 1..6)) {
        let to_links = |v: &[bool]| v.iter().map(|&t| if t { Link::Theta } else { Link::Log }).collect::<Vec<_>>();
        let (pa, pb) = (to_links(&a), to_links(&b));
        let start = HodgeCell::new(vec![Rational64::from_integer(1)], PadicNumber::from_i64(5, 6, 6), 1).unwrap();
        let field = LinkField { e: 2, f: 3, m: 1 };
        let ta = lattice_walk(&start, &pa, 5, field).unwrap();
        let tb = lattice_walk(ta.cells.last().unwrap(), &pb, 5, field).unwrap();
        let joined: Vec<Link> = pa.iter().chain(&pb).copied().collect();
        let tab = lattice_walk(&start, &joined, 5, field).unwrap();
        prop_assert_eq!(tab.total(), ta.total().add(&tb.total()));
        for c in &tab.cells {
            prop_assert_eq!(c.torsion_tag, 1);
            prop_assert_eq!(c.unit_part.unit_residue(), 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn theta_objects_keep_their_type(seed in any::<u64>()) {
        let curve = TateCurve::from_q_tilde(&PadicNumber::from_i64(5, 5, 4), 3, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = curve.random_unit(&mut rng);
        let b = curve.random_unit(&mut rng);
        let f = build_periodic_function(&[a.clone(), b.clone()], &[a.mul(&b), curve.num(1)], &curve).unwrap();
        let need = (curve.truncation() as i64 - 3) * curve.q_valuation();
        for _ in 0..10 {
            let u = curve.random_unit(&mut rng);
            if let Ok(d) = f.type_defect(&u, &curve) {
                prop_assert!(d >= need);
            }
        }
    }

    #[test]
    fn theta_zero_locus(seed in any::<u64>()) {
        let curve = TateCurve::from_q_tilde(&PadicNumber::from_i64(7, 7, 4), 3, 10).unwrap();
        for k in -5..=5 {
            prop_assert!(theta_fundamental(&curve.q_power(k), &curve).unwrap().is_zero());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = curve.random_unit(&mut rng);
        let th = theta_fundamental(&u, &curve).unwrap();
        // Off the class of 1 every factor is a unit.
        if u.unit_residue() != 1 {
            prop_assert_eq!(th.valuation(), Some(0));
        } else {
            prop_assert!(th.valuation().unwrap() >= 1);
        }
    }
}

#[test]
fn torsion_orders_grow_by_odd_gaps() {
    let curve = TateCurve::from_q_tilde(&PadicNumber::from_i64(7, 7, 4), 11, 8).unwrap();
    let orders: Vec<i64> = (1..=5).map(|j| theta_torsion_value(j, &curve).unwrap().order).collect();
    for j in 1..orders.len() {
        assert_eq!(orders[j] - orders[j - 1], 2 * j as i64 + 1);
    }
}

#[test]
fn haar_of_power_matches_shell_sum() {
    for r in 1..=4u32 {
        let g = NormIntegrand::power(5, vec![PadicNumber::zero(5), PadicNumber::one(5, 8)], r);
        let exact = haar_integral(&g, 40).unwrap();
        let five = BigRational::from_integer(5.into());
        let shell =
            |k: u32| (BigRational::from_integer(1.into()) - five.recip()) * five.pow(-(k as i32) * (r as i32 + 1));
        let partial: BigRational = (0..30).map(shell).sum();
        assert!(exact > partial);
        assert!(&exact - &partial < five.pow(-30 * (r as i32 + 1)));
    }
}
