//! CSV and JSON rendering. Every float is written with 17 significant digits.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::CliError;

pub const SCHEMA_VERSION: &str = "1";

pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        let s = format!("{x:.16e}");
        // explicit exponent sign, as JSON writers print it
        match s.split_once('e') {
            Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
            _ => s,
        }
    }
}

fn float_value(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(fmt_float(x).parse::<Number>().expect("formatted float is valid JSON"))
    } else {
        Value::String(fmt_float(x))
    }
}

/// Rewrite every non-integer number in `v` in the 17-digit format.
fn reformat(v: &mut Value) {
    match v {
        Value::Number(n) if !(n.is_u64() || n.is_i64()) => {
            if let Some(x) = n.as_f64() {
                *v = float_value(x);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(reformat),
        Value::Object(map) => map.values_mut().for_each(reformat),
        _ => {}
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Value {
    let mut v = serde_json::to_value(value).expect("serializable");
    reformat(&mut v);
    v
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_float(*x),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(x) => float_value(*x),
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Set when the table holds partial results.
    pub incomplete: Option<String>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        if let Some(reason) = &self.incomplete {
            s.push_str(&format!("# incomplete: {reason}\n"));
        }
        s
    }

    pub fn to_json_value(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let mut m = Map::new();
        m.insert(
            "columns".into(),
            Value::Array(self.columns.iter().map(|&c| Value::from(c)).collect()),
        );
        m.insert("rows".into(), Value::Array(rows));
        Value::Object(m)
    }
}

/// A single JSON object carrying the schema version and command name.
/// Keys are written in sorted order.
pub fn envelope(command: &str, fields: Vec<(&str, Value)>) -> String {
    let mut m = Map::new();
    m.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
    m.insert("command".into(), Value::from(command));
    for (k, v) in fields {
        m.insert(k.into(), v);
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("serializable");
    s.push('\n');
    s
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300, -7.5e12, f64::MIN_POSITIVE] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_float(-7.5e12), "-7.5000000000000000e+12");
    }

    #[test]
    fn json_numbers_use_the_fixed_format() {
        let v = to_json(&(0.5f64, 3u64, -2i64));
        assert_eq!(v.to_string(), "[5.0000000000000000e-1,3,-2]");
    }

    #[test]
    fn csv_marks_partial_output() {
        let mut t = Table::new(&["p", "x"]);
        t.push(vec![Cell::Int(1), Cell::Float(0.25)]);
        t.incomplete = Some("budget".into());
        assert_eq!(t.to_csv(), "p,x\n1,2.5000000000000000e-1\n# incomplete: budget\n");
    }
}
