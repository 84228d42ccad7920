//! Optional TOML config: one table per subcommand, keys spelled like the
//! long flags (`r-min` or `r_min`). A flag given on the command line wins.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use micz_core::HalfInt;
use toml::{Table, Value};

/// A user-facing configuration problem; the message names the field.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<micz_core::Error> for ConfigError {
    fn from(e: micz_core::Error) -> Self {
        ConfigError(e.to_string())
    }
}

pub fn bad(field: &str, why: impl fmt::Display) -> ConfigError {
    ConfigError(format!("invalid `{field}`: {why}"))
}

pub fn load(path: &Path) -> Result<Table, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    text.parse::<Table>()
        .map_err(|e| ConfigError(format!("config {} is not valid TOML: {e}", path.display())))
}

/// The keys of one subcommand's table, tracked so leftovers can be rejected.
pub struct Section {
    name: String,
    table: Table,
    used: BTreeSet<String>,
}

impl Section {
    pub fn from_file(file: Option<&Table>, command: &str) -> Result<Self, ConfigError> {
        let table = match file.and_then(|t| t.get(command)) {
            None => Table::new(),
            Some(Value::Table(t)) => t.clone(),
            Some(_) => return Err(ConfigError(format!("config entry `{command}` must be a table"))),
        };
        if let Some(file) = file {
            if let Some(other) = file.iter().find(|(_, v)| !v.is_table()).map(|(k, _)| k) {
                return Err(ConfigError(format!(
                    "config key `{other}` must sit inside a subcommand table"
                )));
            }
        }
        Ok(Section {
            name: command.to_string(),
            table,
            used: BTreeSet::new(),
        })
    }

    fn raw(&mut self, key: &str) -> Option<(String, Value)> {
        let alt = key.replace('-', "_");
        for k in [key.to_string(), alt] {
            if let Some(v) = self.table.get(&k) {
                self.used.insert(k.clone());
                return Some((k, v.clone()));
            }
        }
        None
    }

    fn field(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    pub fn f64(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((_, Value::Float(v))) => Ok(Some(v)),
            Some((_, Value::Integer(v))) => Ok(Some(v as f64)),
            Some((_, v)) => Err(bad(&self.field(key), format!("expected a number, got {v}"))),
        }
    }

    pub fn usize(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((_, Value::Integer(v))) if v >= 0 => Ok(Some(v as usize)),
            Some((_, v)) => Err(bad(
                &self.field(key),
                format!("expected a non-negative integer, got {v}"),
            )),
        }
    }

    pub fn string(&mut self, key: &str) -> Result<Option<String>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((_, Value::String(s))) => Ok(Some(s)),
            Some((_, Value::Integer(v))) => Ok(Some(v.to_string())),
            Some((_, Value::Float(v))) => Ok(Some(v.to_string())),
            Some((_, v)) => Err(bad(&self.field(key), format!("expected a string, got {v}"))),
        }
    }

    /// Integers, half-integers as `"1/2"`, or decimals such as `0.5`.
    pub fn half_int(&mut self, key: &str) -> Result<Option<HalfInt>, ConfigError> {
        let text = match self.raw(key) {
            None => return Ok(None),
            Some((_, Value::String(s))) => s,
            Some((_, Value::Integer(v))) => v.to_string(),
            Some((_, Value::Float(v))) => v.to_string(),
            Some((_, v)) => return Err(bad(&self.field(key), format!("expected a rational, got {v}"))),
        };
        text.parse().map(Some).map_err(|e| bad(&self.field(key), e))
    }

    /// `tolerances = { quadrature = 1e-8 }`.
    pub fn number_table(&mut self, key: &str) -> Result<Vec<(String, f64)>, ConfigError> {
        match self.raw(key) {
            None => Ok(Vec::new()),
            Some((_, Value::Table(t))) => t
                .iter()
                .map(|(k, v)| match v {
                    Value::Float(x) => Ok((k.clone(), *x)),
                    Value::Integer(x) => Ok((k.clone(), *x as f64)),
                    _ => Err(bad(&format!("{}.{k}", self.field(key)), "expected a number")),
                })
                .collect(),
            Some((_, v)) => Err(bad(&self.field(key), format!("expected a table, got {v}"))),
        }
    }

    pub fn finish(self) -> Result<(), ConfigError> {
        match self.table.keys().find(|k| !self.used.contains(*k)) {
            Some(k) => Err(ConfigError(format!("unknown config key `{}.{k}`", self.name))),
            None => Ok(()),
        }
    }
}
