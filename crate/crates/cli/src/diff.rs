use std::path::PathBuf;

use padic_teich::diffgroup::{compose, frobenius_schwarzian, invert, is_member, schwarzian, DiffElement};
use padic_teich::series::rational_coeffs;
use padic_teich::TruncSeries;
use serde_json::json;

use crate::output::{rational, Output, Table};
use crate::{config_err, CliError, DiffOp, RunConfig};

fn load(path: &PathBuf, p: u32) -> Result<DiffElement, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let s: TruncSeries =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if s.p() != p {
        return Err(CliError::Config(format!("{}: series is over p = {}, not {p}", path.display(), s.p())));
    }
    is_member(&s).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn run(cfg: &RunConfig, op: DiffOp, files: &[PathBuf], m: Option<u32>) -> Result<Output, CliError> {
    let want = if op == DiffOp::Compose { 2 } else { 1 };
    if files.len() != want {
        return Err(CliError::Config(format!("expected {want} input file(s), got {}", files.len())));
    }
    let inputs = files.iter().map(|f| load(f, cfg.p)).collect::<Result<Vec<_>, _>>()?;
    let (result, json) = match op {
        DiffOp::Compose | DiffOp::Invert => {
            let e = if op == DiffOp::Compose { compose(&inputs[0], &inputs[1]) } else { invert(&inputs[0]) };
            let e = e.map_err(config_err)?;
            (e.perturbation().clone(), serde_json::to_value(&e).map_err(config_err)?)
        }
        DiffOp::Schwarzian => {
            let s = match m {
                Some(m) => frobenius_schwarzian(&inputs[0], m),
                None => schwarzian(&inputs[0]),
            };
            let json = serde_json::to_value(&s).map_err(config_err)?;
            (s, json)
        }
    };
    let mut table = Table::new(&["k", "coefficient"]);
    for (k, c) in rational_coeffs(&result).iter().enumerate() {
        table.push(vec![json!(k), rational(c)]);
    }
    Ok(Output { json, table: Some(table) })
}
