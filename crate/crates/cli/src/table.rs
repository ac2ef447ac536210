use num_bigint::BigUint;
use padic_teich::integrate::{elliptic_point_count, elliptic_serre_invariant};
use padic_teich::lattice::{frobenius_lift, lift_limit, log_volume, VolumeSubset};
use padic_teich::padic::is_prime;
use padic_teich::theta::{theta_torsion_value, TateCurve};
use padic_teich::PrimeContext;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::parse_list;
use crate::output::{padic_digits, Output, Table};
use crate::{config_err, CliError, RunConfig, TableArgs, TableTarget};

pub fn run(cfg: &RunConfig, args: &TableArgs) -> Result<Output, CliError> {
    match args.target {
        TableTarget::TorsionTheta => torsion_theta(cfg, args),
        TableTarget::LogVolume => log_volume_grid(args),
        TableTarget::SerreElliptic => serre_elliptic(cfg, args),
        TableTarget::FrobeniusLift => frobenius_lifts(cfg, args),
    }
}

fn assertion(what: String, table: Table) -> CliError {
    CliError::Assertion { message: what, output: Some(Output::table(table)) }
}

fn torsion_theta(cfg: &RunConfig, args: &TableArgs) -> Result<Output, CliError> {
    let qt = match &args.q_tilde {
        Some(s) => cfg.number(s)?,
        None => cfg.number(&cfg.p.to_string())?,
    };
    let curve = TateCurve::from_q_tilde(&qt, args.l, args.t).map_err(config_err)?;
    let half = (args.l as i64 - 1) / 2;
    let values: Vec<_> = (1..=half)
        .into_par_iter()
        .map(|j| theta_torsion_value(j, &curve))
        .collect::<Result<_, _>>()
        .map_err(config_err)?;
    let mut table = Table::new(&["j", "order", "verified", "rootTag", "residualValuation", "value"]);
    for tv in &values {
        table.push(vec![
            json!(tv.j),
            json!(tv.order),
            json!(tv.verified),
            json!(tv.root_tag),
            json!(tv.residual_valuation),
            padic_digits(&tv.value.with_rel(cfg.precision)),
        ]);
    }
    if let Some(tv) = values.iter().find(|tv| !tv.verified || tv.order != tv.j * tv.j) {
        return Err(assertion(format!("torsion value at j = {} not verified", tv.j), table));
    }
    Ok(Output::table(table))
}

fn log_volume_grid(args: &TableArgs) -> Result<Output, CliError> {
    let primes: Vec<u32> = parse_list(&args.primes, "prime")?;
    let es: Vec<u32> = parse_list(&args.e_values, "e")?;
    let fs: Vec<u32> = parse_list(&args.f_values, "f")?;
    let ms: Vec<u32> = parse_list(&args.m_values, "m")?;
    if primes.is_empty() || es.is_empty() || fs.is_empty() || ms.is_empty() {
        return Err(CliError::Config("empty grid".into()));
    }
    if let Some(p) = primes.iter().find(|&&p| p < 3 || !is_prime(p as u64)) {
        return Err(CliError::Config(format!("{p} is not an odd prime")));
    }
    if es.contains(&0) || fs.contains(&0) {
        return Err(CliError::Config("e and f must be positive".into()));
    }
    let subsets = [
        VolumeSubset::OnePlusP,
        VolumeSubset::UnitsFull,
        VolumeSubset::UnitsModTorsion,
        VolumeSubset::LogShellNormalized,
    ];
    let mut table = Table::new(&["p", "e", "f", "m", "onePlusP", "unitsFull", "unitsModTorsion", "logShellNormalized"]);
    for &p in &primes {
        for &e in &es {
            for &f in &fs {
                for &m in &ms {
                    let mut row = vec![json!(p), json!(e), json!(f), json!(m)];
                    for s in subsets {
                        row.push(json!(log_volume(p, e, f, m, s).map_err(config_err)?.to_string()));
                    }
                    table.push(row);
                }
            }
        }
    }
    Ok(Output::table(table))
}

fn parse_curves(s: &str) -> Result<Vec<(i64, i64)>, CliError> {
    s.split(';')
        .map(str::trim)
        .filter(|c| !c.is_empty())
        .map(|c| {
            let v: Vec<i64> = parse_list(c, "curve coefficient")?;
            match v[..] {
                [a4, a6] => Ok((a4, a6)),
                _ => Err(CliError::Config(format!("curve {c:?} needs exactly a4,a6"))),
            }
        })
        .collect()
}

fn serre_elliptic(cfg: &RunConfig, args: &TableArgs) -> Result<Output, CliError> {
    let p = cfg.p;
    if p < 5 {
        return Err(CliError::Config("serre-elliptic needs p >= 5".into()));
    }
    let curves = match &args.curves {
        Some(s) => parse_curves(s)?,
        None => (0..p as i64)
            .flat_map(|a4| (0..p as i64).map(move |a6| (a4, a6)))
            .filter(|&(a4, a6)| elliptic_point_count(a4, a6, p).is_ok())
            .take(10)
            .collect(),
    };
    if curves.is_empty() {
        return Err(CliError::Config("no curves given".into()));
    }
    let rows: Vec<(i64, i64, u64, u64, u64)> = curves
        .par_iter()
        .map(|&(a4, a6)| {
            let n = elliptic_point_count(a4, a6, p)?;
            let s = elliptic_serre_invariant(a4, a6, p)?;
            Ok((a4, a6, n, s.value, s.q - 1))
        })
        .collect::<padic_teich::Result<_>>()
        .map_err(config_err)?;
    let mut table = Table::new(&["a4", "a6", "count", "invariant", "modulus"]);
    for &(a4, a6, n, inv, modulus) in &rows {
        table.push(vec![json!(a4), json!(a6), json!(n), json!(inv), json!(modulus)]);
    }
    if let Some(&(a4, a6, n, inv, m)) = rows.iter().find(|r| (r.2 + r.4 - r.3) % r.4 != 0) {
        return Err(assertion(format!("curve ({a4},{a6}): invariant {inv} ≠ {n} mod {m}"), table));
    }
    Ok(Output::table(table))
}

fn frobenius_lifts(cfg: &RunConfig, args: &TableArgs) -> Result<Output, CliError> {
    let p = cfg.p;
    if args.max_m == 0 || args.max_m > 64 {
        return Err(CliError::Config("--max-m must be in 1..=64".into()));
    }
    let grid: Vec<(u32, u32)> = (0..p).flat_map(|t| (1..=args.max_m).map(move |m| (t, m))).collect();
    let rows: Vec<(u32, u32, BigUint, Option<BigUint>)> = grid
        .par_iter()
        .map(|&(t, m)| {
            let fm = frobenius_lift(t, m, p)?;
            let limit = if t + 1 < p {
                let ctx = PrimeContext::new(p, m + 2, 1)?;
                Some(lift_limit(t, &ctx)?.residue(m + 1)?)
            } else {
                None
            };
            Ok((t, m, fm, limit))
        })
        .collect::<padic_teich::Result<_>>()
        .map_err(config_err)?;
    let mut table = Table::new(&["t", "m", "lift", "limitResidue", "agrees"]);
    let mut bad = None;
    for (t, m, fm, limit) in &rows {
        let agrees = limit.as_ref().map(|l| l == fm);
        if agrees == Some(false) && bad.is_none() {
            bad = Some((*t, *m));
        }
        table.push(vec![
            json!(t),
            json!(m),
            json!(fm.to_string()),
            limit.as_ref().map_or(Value::Null, |l| json!(l.to_string())),
            agrees.map_or(Value::Null, Value::Bool),
        ]);
    }
    if let Some((t, m)) = bad {
        return Err(assertion(format!("F_{m}({t}) disagrees with ω(1+t) − 1"), table));
    }
    Ok(Output::table(table))
}
