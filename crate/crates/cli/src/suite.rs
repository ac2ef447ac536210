use num_bigint::BigUint;
use num_rational::{BigRational, Rational64};
use padic_teich::diffgroup::{
    cocycle_identity_check, compose, invert, phi_inf, phi_m, phi_m_inverse, random::random_member, reduce_mod,
};
use padic_teich::integrate::{elliptic_point_count, elliptic_serre_invariant, haar_integral, NormIntegrand};
use padic_teich::lattice::{frobenius_lift, lattice_walk, lift_limit, HodgeCell, Link, LinkField};
use padic_teich::theta::{build_periodic_function, theta_fundamental, theta_torsion_value, TateCurve};
use padic_teich::witt::{frobenius_op, ghost_defect, verschiebung, witt_to_zp, zp_to_witt, WittOp, WittVector};
use padic_teich::{PadicNumber, PrimeContext};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::output::{Output, Table};
use crate::{config_err, CliError, RunConfig, SuiteName};

/// Truncation order for theta checks.
const THETA_T: u32 = 12;
/// Torsion level for theta checks.
const THETA_L: u32 = 3;

type Check = (&'static str, Result<(), String>);

#[derive(Serialize)]
struct Counterexample {
    case: usize,
    detail: String,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CheckReport {
    suite: &'static str,
    check: &'static str,
    passed: usize,
    failed: usize,
    counterexample: Option<Counterexample>,
}

struct Env {
    cfg: RunConfig,
    curve: Option<TateCurve>,
}

fn ensure(ok: bool, detail: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(detail())
    }
}

fn case_rng(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

pub fn run(cfg: &RunConfig, which: SuiteName, cases: usize) -> Result<Output, CliError> {
    if cases == 0 {
        return Err(CliError::Config("--cases must be at least 1".into()));
    }
    let names: Vec<SuiteName> = match which {
        SuiteName::All => {
            vec![SuiteName::Diffgroup, SuiteName::Witt, SuiteName::Theta, SuiteName::Integrate, SuiteName::Lattice]
        }
        s => vec![s],
    };
    let curve = if names.contains(&SuiteName::Theta) {
        let qt = PadicNumber::from_i64(cfg.p, cfg.p as i64, 4);
        Some(TateCurve::from_q_tilde(&qt, THETA_L, THETA_T).map_err(config_err)?)
    } else {
        None
    };
    let env = Env { cfg: cfg.clone(), curve };

    let mut reports: Vec<CheckReport> = Vec::new();
    for name in names {
        let label = suite_label(name);
        let results: Vec<Vec<Check>> = (0..cases)
            .into_par_iter()
            .map(|case| {
                let mut rng = case_rng(cfg.seed, case);
                run_case(&env, name, &mut rng)
            })
            .collect();
        let first = reports.len();
        for (case, checks) in results.into_iter().enumerate() {
            for (check, res) in checks {
                let idx = match reports[first..].iter().position(|r| r.check == check) {
                    Some(i) => first + i,
                    None => {
                        reports.push(CheckReport { suite: label, check, passed: 0, failed: 0, counterexample: None });
                        reports.len() - 1
                    }
                };
                let r = &mut reports[idx];
                match res {
                    Ok(()) => r.passed += 1,
                    Err(detail) => {
                        r.failed += 1;
                        if r.counterexample.is_none() {
                            r.counterexample = Some(Counterexample { case, detail });
                        }
                    }
                }
            }
        }
    }

    let failed: usize = reports.iter().map(|r| r.failed).sum();
    let mut table = Table::new(&["suite", "check", "passed", "failed", "counterexample"]);
    for r in &reports {
        let ce = r.counterexample.as_ref().map(|c| format!("case {}: {}", c.case, c.detail)).unwrap_or_default();
        table.push(vec![json!(r.suite), json!(r.check), json!(r.passed), json!(r.failed), json!(ce)]);
    }
    let json = json!({
        "suite": suite_label(which),
        "p": cfg.p,
        "seed": cfg.seed,
        "cases": cases,
        "passed": failed == 0,
        "checks": reports,
    });
    let out = Output { json, table: Some(table) };
    if failed > 0 {
        let first = reports.iter().find(|r| r.failed > 0).unwrap();
        return Err(CliError::Assertion {
            message: format!("{} check {} failed {} time(s)", first.suite, first.check, first.failed),
            output: Some(out),
        });
    }
    Ok(out)
}

fn suite_label(s: SuiteName) -> &'static str {
    match s {
        SuiteName::Diffgroup => "diffgroup",
        SuiteName::Witt => "witt",
        SuiteName::Theta => "theta",
        SuiteName::Integrate => "integrate",
        SuiteName::Lattice => "lattice",
        SuiteName::All => "all",
    }
}

fn run_case(env: &Env, name: SuiteName, rng: &mut ChaCha8Rng) -> Vec<Check> {
    match name {
        SuiteName::Diffgroup => diffgroup_case(&env.cfg, rng),
        SuiteName::Witt => witt_case(&env.cfg, rng),
        SuiteName::Theta => theta_case(env.curve.as_ref().expect("curve built for theta"), rng),
        SuiteName::Integrate => integrate_case(&env.cfg, rng),
        SuiteName::Lattice => lattice_case(&env.cfg, rng),
        SuiteName::All => unreachable!(),
    }
}

fn diffgroup_case(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let (p, len, rel) = (cfg.p, cfg.degree.max(2), cfg.precision.max(4));
    let a = random_member(rng, p, len, rel);
    let b = random_member(rng, p, len, rel);
    let c = random_member(rng, p, len, rel);
    let show = |x: &padic_teich::diffgroup::DiffElement| serde_json::to_string(x).unwrap_or_default();

    let assoc = (|| {
        let ab_c = compose(&compose(&a, &b)?, &c)?;
        let a_bc = compose(&a, &compose(&b, &c)?)?;
        Ok::<_, padic_teich::Error>(ab_c.perturbation().agrees(a_bc.perturbation()))
    })();
    let inverse = invert(&a)
        .and_then(|inv| Ok(compose(&a, &inv)?.perturbation().is_zero() && compose(&inv, &a)?.perturbation().is_zero()));
    let cocycle = (|| {
        let lhs = phi_inf(&compose(&a, &b)?)?;
        let rhs = phi_inf(&a)?.compose(&b.as_series())?.add(&phi_inf(&b)?);
        Ok::<_, padic_teich::Error>(lhs.agrees(&rhs))
    })();
    let phi_m_ok = phi_m_inverse(&phi_m(&a, 1), 1).map(|back| back.perturbation().agrees(a.perturbation()));
    let reduce = reduce_mod(&a, 1).map(|f| f.is_identity());

    let verdict = |r: padic_teich::Result<bool>, what: &str| match r {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!("{what} fails for a = {}, b = {}", show(&a), show(&b))),
        Err(e) => Err(format!("{what}: {e}")),
    };
    vec![
        ("associativity", verdict(assoc, "associativity")),
        ("inverse", verdict(inverse, "inverse")),
        ("cocycle-identity", verdict(cocycle_identity_check(&a, &b), "cocycle identity")),
        ("log-cocycle", verdict(cocycle, "log cocycle")),
        ("phi-m-round-trip", verdict(phi_m_ok, "phi_1 round trip")),
        ("reduce-mod-p", verdict(reduce, "reduction mod p")),
    ]
}

fn witt_case(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let p = cfg.p;
    let n = rng.gen_range(1..=cfg.degree.clamp(1, 8));
    let a = WittVector::random(rng, p, n);
    let b = WittVector::random(rng, p, n);
    let show = |w: &WittVector| format!("{:?}", witt_to_zp(w).digits());

    let round = ensure(zp_to_witt(&witt_to_zp(&a), n).ok().as_ref() == Some(&a), || {
        format!("Z_p round trip fails for digits {}", show(&a))
    });
    let mut ghost = Ok(());
    for op in [WittOp::Add, WittOp::Mul] {
        match ghost_defect(&a, &b, op, n as u32 + 1) {
            Ok(d) => {
                if let Some(i) = d.iter().enumerate().position(|(i, v)| (*v as usize) < i + 1) {
                    ghost = Err(format!("{op:?} ghost component {i} off for {} and {}", show(&a), show(&b)));
                    break;
                }
            }
            Err(e) => {
                ghost = Err(e.to_string());
                break;
            }
        }
    }
    let times_p = witt_to_zp(&a).mul_pow_p(1);
    let vf = witt_to_zp(&verschiebung(&frobenius_op(&a), false)).agrees(&times_p);
    let fv = witt_to_zp(&frobenius_op(&verschiebung(&a, false))).agrees(&times_p);
    vec![
        ("zp-round-trip", round),
        ("ghost-levelwise", ghost),
        ("vf-equals-p", ensure(vf, || format!("VF ≠ p for {}", show(&a)))),
        ("fv-equals-p", ensure(fv, || format!("FV ≠ p for {}", show(&a)))),
    ]
}

fn theta_case(curve: &TateCurve, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let w = curve.q_valuation();
    let t = curve.truncation() as i64;
    let u = curve.random_unit(rng);

    let quasi = theta_fundamental(&u, curve).and_then(|lhs| {
        let rhs = u.mul(&theta_fundamental(&curve.q().mul(&u), curve)?);
        let lhs_v = lhs.valuation().unwrap_or(0);
        Ok(lhs.add(&rhs).valuation_bound() - lhs_v)
    });
    let quasi = match quasi {
        Ok(r) => ensure(r >= (t - 1) * w, || format!("θ(qu) + u⁻¹θ(u) only O(p^{r}) at u = {:?}", u.digits())),
        Err(e) => Err(e.to_string()),
    };

    let a = curve.random_unit(rng);
    let b = curve.random_unit(rng);
    let typed = match build_periodic_function(&[a.clone(), b.clone()], &[a.mul(&b), curve.num(1)], curve) {
        Ok(f) => {
            let v = curve.random_unit(rng);
            match f.type_defect(&v, curve) {
                Ok(d) => ensure(d >= (t - 3) * w, || format!("type defect O(p^{d}) at u = {:?}", v.digits())),
                // Sample landed on a pole.
                Err(_) => Ok(()),
            }
        }
        Err(e) => Err(e.to_string()),
    };

    let k = rng.gen_range(-4i64..=4);
    let zero = match theta_fundamental(&curve.q_power(k), curve) {
        Ok(z) => ensure(z.is_zero(), || format!("θ(q^{k}) ≠ 0")),
        Err(e) => Err(e.to_string()),
    };

    let j = rng.gen_range(1..curve.l() as i64);
    let torsion = match theta_torsion_value(j, curve) {
        Ok(tv) => {
            let expected = curve.q_tilde().ok().and_then(|qt| qt.pow(j * j).ok());
            ensure(tv.verified && Some(&tv.value) == expected.as_ref(), || format!("torsion value at j = {j}"))
        }
        Err(e) => Err(e.to_string()),
    };
    vec![("quasi-periodicity", quasi), ("periodic-type", typed), ("zero-locus", zero), ("torsion-value", torsion)]
}

fn integrate_case(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let p = cfg.p;
    let depth = cfg.depth;
    let r = rng.gen_range(1u32..=4);
    let a = rng.gen_range(0..(p as i64).pow(3));
    let rel = 8;
    let shifted = NormIntegrand::power(p, vec![PadicNumber::from_i64(p, -a, rel), PadicNumber::one(p, rel)], r);
    let centred = NormIntegrand::power(p, vec![PadicNumber::zero(p), PadicNumber::one(p, rel)], r);
    let one = BigRational::from_integer(1.into());
    let pr = BigRational::from_integer(p.into());
    let closed = (&one - pr.recip()) / (&one - pr.pow(-(r as i32) - 1));

    let (translation, power) = match (haar_integral(&shifted, depth), haar_integral(&centred, depth)) {
        (Ok(s), Ok(c)) => (
            ensure(s == c, || format!("∫|x−{a}|^{r} = {s} but ∫|x|^{r} = {c}")),
            ensure(c == closed, || format!("∫|x|^{r} = {c}, expected {closed}")),
        ),
        (Err(e), _) | (_, Err(e)) => (Err(e.to_string()), Err(e.to_string())),
    };

    let mut checks = vec![("translation-invariance", translation), ("power-closed-form", power)];
    if p >= 5 {
        let (a4, a6) = loop {
            let a4 = rng.gen_range(0..p as i64);
            let a6 = rng.gen_range(0..p as i64);
            if elliptic_point_count(a4, a6, p).is_ok() {
                break (a4, a6);
            }
        };
        let brute = brute_count(a4, a6, p as i64);
        let serre = match elliptic_serre_invariant(a4, a6, p) {
            Ok(s) => {
                let expected = (brute as i64 - 1).rem_euclid(p as i64 - 1) + 1;
                ensure(s.value as i64 == expected, || format!("curve ({a4},{a6}): {} vs {expected}", s.value))
            }
            Err(e) => Err(e.to_string()),
        };
        checks.push(("serre-elliptic", serre));
    }
    checks
}

fn brute_count(a4: i64, a6: i64, p: i64) -> u64 {
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

fn lattice_case(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<Check> {
    let p = cfg.p;
    let t = rng.gen_range(0..p);
    let m = rng.gen_range(2u32..=8);
    let lift = (|| {
        let fm = frobenius_lift(t, m, p)?;
        let prev = frobenius_lift(t, m - 1, p)?;
        let pm = BigUint::from(p).pow(m);
        let mut ok = &fm % &pm == prev % &pm;
        if t + 1 < p {
            let ctx = PrimeContext::new(p, m + 2, 1)?;
            ok &= lift_limit(t, &ctx)?.residue(m)? == fm % pm;
        }
        Ok::<_, padic_teich::Error>(ok)
    })();
    let lift = match lift {
        Ok(ok) => ensure(ok, || format!("F_{m}({t}) incompatible")),
        Err(e) => Err(e.to_string()),
    };

    let program = |rng: &mut ChaCha8Rng| -> Vec<Link> {
        let n = rng.gen_range(1..=5);
        (0..n).map(|_| if rng.gen_bool(0.5) { Link::Theta } else { Link::Log }).collect()
    };
    let (pa, pb) = (program(rng), program(rng));
    let field = LinkField { e: rng.gen_range(1..=3), f: rng.gen_range(1..=3), m: rng.gen_range(1..=2) };
    let unit = PadicNumber::from_i64(p, 1 + p as i64 * rng.gen_range(0..100), cfg.precision);
    let walk = (|| {
        let start = HodgeCell::new(vec![Rational64::from_integer(1)], unit.clone(), 1)?;
        let l = 5;
        let ta = lattice_walk(&start, &pa, l, field)?;
        let tb = lattice_walk(ta.cells.last().unwrap(), &pb, l, field)?;
        let joined: Vec<Link> = pa.iter().chain(&pb).copied().collect();
        let tab = lattice_walk(&start, &joined, l, field)?;
        let additive = tab.total() == ta.total().add(&tb.total());
        let tags = tab.cells.iter().all(|c| c.torsion_tag == 1 && c.unit_part.unit_residue() == 1);
        Ok::<_, padic_teich::Error>((additive, tags))
    })();
    let (additive, tags) = match walk {
        Ok((a, t)) => (
            ensure(a, || format!("volumes not additive for {pa:?} then {pb:?}")),
            ensure(t, || format!("cell invariants broken along {pa:?} then {pb:?}")),
        ),
        Err(e) => (Err(e.to_string()), Err(e.to_string())),
    };
    vec![("lift-compatibility", lift), ("walk-additivity", additive), ("cell-invariants", tags)]
}
