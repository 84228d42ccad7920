//! Tables with a config-echo header, written as CSV or JSON.
//!
//! CSV floats use 17 significant digits in scientific notation; JSON numbers
//! use the shortest representation that round-trips. Both are byte-stable.

use std::io::Write;
use std::path::PathBuf;

use micz_core::HalfInt;
use serde_json::{Map, Value};

use crate::args::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Rational(HalfInt),
    Text(String),
    Bool(bool),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => fmt_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Rational(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) => float_json(*v),
            Cell::Int(v) => Value::from(*v),
            Cell::Rational(v) => float_json(v.value()),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Missing => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<HalfInt> for Cell {
    fn from(v: HalfInt) -> Self {
        Cell::Rational(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Float)
    }
}

pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn float_json(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or_else(|| Value::from(v.to_string()), Value::Number)
}

/// Resolved parameters in insertion order, echoed into every output.
#[derive(Debug, Clone, Default)]
pub struct Meta {
    entries: Vec<(String, Cell)>,
}

impl Meta {
    pub fn new(command: &str) -> Self {
        let mut m = Meta::default();
        m.push("micz", micz_core::VERSION);
        m.push("command", command);
        m
    }

    pub fn push(&mut self, key: &str, value: impl Into<Cell>) {
        self.entries.push((key.to_string(), value.into()));
    }

    fn json(&self) -> Value {
        let mut map = Map::new();
        for (k, v) in &self.entries {
            map.insert(k.clone(), v.json());
        }
        Value::Object(map)
    }
}

pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn render(meta: &Meta, table: &Table, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => {
            let mut out = Vec::new();
            for (k, v) in &meta.entries {
                writeln!(out, "# {k} = {}", v.csv()).expect("in-memory write");
            }
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&table.columns).expect("in-memory write");
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::csv)).expect("in-memory write");
            }
            w.into_inner().expect("in-memory write")
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let mut map = Map::new();
                    for (c, v) in table.columns.iter().zip(row) {
                        map.insert(c.to_string(), v.json());
                    }
                    Value::Object(map)
                })
                .collect();
            let mut doc = Map::new();
            doc.insert("meta".into(), meta.json());
            doc.insert("rows".into(), Value::Array(rows));
            let mut out = serde_json::to_vec_pretty(&Value::Object(doc)).expect("serialisable");
            out.push(b'\n');
            out
        }
    }
}

/// Where output goes: an explicit path, the default directory from
/// `MICZ_OUTPUT_DIR`, or stdout.
pub fn destination(explicit: Option<PathBuf>, command: &str, format: Format) -> Option<PathBuf> {
    explicit.or_else(|| {
        std::env::var_os("MICZ_OUTPUT_DIR")
            .filter(|d| !d.is_empty())
            .map(|d| PathBuf::from(d).join(format!("{command}.{}", format.extension())))
    })
}
