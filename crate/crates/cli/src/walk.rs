use num_rational::Rational64;
use padic_teich::lattice::{lattice_walk, parse_program, HodgeCell, Link, LinkField};
use serde_json::json;

use crate::config::parse_list;
use crate::output::{Output, Table};
use crate::{config_err, CliError, RunConfig, WalkArgs};

pub fn run(cfg: &RunConfig, args: &WalkArgs) -> Result<Output, CliError> {
    let program = parse_program(&args.steps).map_err(config_err)?;
    let pilots: Vec<Rational64> = parse_list(&args.pilot, "pilot exponent")?;
    let unit = cfg.number(&args.unit)?;
    let start = HodgeCell::new(pilots, unit, args.tag).map_err(config_err)?;
    let field = LinkField { e: args.e, f: args.f, m: args.mu };
    if field.e == 0 || field.f == 0 {
        return Err(CliError::Config("--e and --f must be positive".into()));
    }
    let trace = lattice_walk(&start, &program, args.l, field).map_err(config_err)?;

    let mut table = Table::new(&["step", "link", "n", "m", "stepVolume", "cumulative"]);
    for (i, link) in program.iter().enumerate() {
        let cell = &trace.cells[i + 1];
        table.push(vec![
            json!(i + 1),
            json!(match link {
                Link::Theta => "T",
                Link::Log => "L",
            }),
            json!(cell.n),
            json!(cell.m),
            json!(trace.step_volumes[i].to_string()),
            json!(trace.cumulative[i].to_string()),
        ]);
    }
    let json = json!({
        "p": cfg.p,
        "l": args.l,
        "steps": program,
        "field": { "e": field.e, "f": field.f, "m": field.m },
        "trace": trace,
        "total": trace.total(),
        "totalDisplay": trace.total().to_string(),
    });
    Ok(Output { json, table: Some(table) })
}
