use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::Format;

/// A JSON document with an optional tabular view for CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub json: Value,
    pub table: Option<Table>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({ "columns": self.columns, "rows": self.rows })
    }
}

impl Output {
    pub fn table(table: Table) -> Self {
        Output { json: table.to_json(), table: Some(table) }
    }

    pub fn render(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).map_err(|e| e.to_string())?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let table = self.table.as_ref().ok_or("this command has no CSV form")?;
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&table.columns).map_err(|e| e.to_string())?;
                for row in &table.rows {
                    w.write_record(row.iter().map(cell)).map_err(|e| e.to_string())?;
                }
                String::from_utf8(w.into_inner().map_err(|e| e.to_string())?).map_err(|e| e.to_string())
            }
        }
    }

    pub fn write(&self, format: Format, out: Option<&Path>) -> Result<(), String> {
        let text = self.render(format)?;
        match out {
            Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
            None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Exact rational as "a" or "a/b".
pub fn rational(q: &num_rational::BigRational) -> Value {
    Value::String(q.to_string())
}

/// Little-endian digit string: "v<val>:d0 d1 ...", or "O(p^k)" for a zero.
pub fn padic_digits(x: &padic_teich::PadicNumber) -> Value {
    let s = match x.valuation() {
        Some(v) => {
            let d: Vec<String> = x.digits().iter().map(u32::to_string).collect();
            format!("v{v}:{}", d.join(" "))
        }
        None => match x.abs_precision() {
            Some(k) => format!("O(p^{k})"),
            None => "0".to_string(),
        },
    };
    Value::String(s)
}
