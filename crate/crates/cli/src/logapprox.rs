use padic_teich::padic::{frobenius_log, padic_log};
use serde_json::json;

use crate::output::{padic_digits, Output, Table};
use crate::{config_err, CliError, RunConfig};

/// Rows (m, v_p(L_m(x) − log x)) for m = 1..max_m; the valuation column must not decrease.
pub fn run(cfg: &RunConfig, x: &str, max_m: u32) -> Result<Output, CliError> {
    if max_m == 0 {
        return Err(CliError::Config("--max-m must be at least 1".into()));
    }
    let x = cfg.number(x)?;
    if x.valuation() != Some(0) || x.unit_residue() != 1 {
        return Err(CliError::Config("x must lie in 1 + pZ_p".into()));
    }
    let log = padic_log(&x).map_err(config_err)?;
    let mut table = Table::new(&["m", "valuation", "agrees", "frobeniusLog"]);
    let mut vals = Vec::new();
    for m in 1..=max_m {
        let approx = frobenius_log(&x, m).map_err(config_err)?;
        let v = approx.diff_valuation(&log);
        vals.push(v);
        table.push(vec![json!(m), json!(v), json!(approx.agrees(&log)), padic_digits(&approx)]);
    }
    let out = Output::table(table);
    if let Some(w) = vals.windows(2).position(|w| w[1] < w[0]) {
        return Err(CliError::Assertion {
            message: format!("valuation drops from m = {} to m = {}", w + 1, w + 2),
            output: Some(out),
        });
    }
    Ok(out)
}
