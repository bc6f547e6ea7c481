//! Tabular output as versioned CSV or JSON.

use std::io::Write;

use anyhow::Result;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Display base for logarithmic quantities. Computation is always in nats.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogBase {
    E,
    Two,
    Ten,
}

impl LogBase {
    pub fn unit(self) -> &'static str {
        match self {
            LogBase::E => "nats",
            LogBase::Two => "bits",
            LogBase::Ten => "hartleys",
        }
    }

    fn convert(self, nats: f64) -> f64 {
        match self {
            LogBase::E => nats,
            LogBase::Two => nats / std::f64::consts::LN_2,
            LogBase::Ten => nats / std::f64::consts::LN_10,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Cell {
    /// A logarithmic quantity in nats, converted for display.
    Log(f64),
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n as i64)
    }
}

fn num_text(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

impl Cell {
    fn text(&self, base: LogBase) -> String {
        match self {
            Cell::Log(x) => num_text(base.convert(*x)),
            Cell::Num(x) => num_text(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self, base: LogBase) -> Value {
        let float = |x: f64| {
            serde_json::Number::from_f64(x).map_or_else(|| Value::String(num_text(x)), Value::Number)
        };
        match self {
            Cell::Log(x) => float(base.convert(*x)),
            Cell::Num(x) => float(*x),
            Cell::Int(n) => json!(n),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

/// Column name and whether its values are logarithmic.
pub struct Column {
    pub name: &'static str,
    pub log: bool,
}

pub fn col(name: &'static str) -> Column {
    Column { name, log: false }
}

pub fn log_col(name: &'static str) -> Column {
    Column { name, log: true }
}

pub struct Table {
    pub command: &'static str,
    /// The formula the values come from, recorded in the header.
    pub formula: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    /// Summary values, written as header comments in CSV.
    pub meta: Vec<(&'static str, Cell)>,
}

impl Table {
    pub fn new(command: &'static str, formula: impl Into<String>, columns: Vec<Column>) -> Self {
        Table { command, formula: formula.into(), columns, rows: Vec::new(), meta: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &'static str, value: impl Into<Cell>) {
        self.meta.push((key, value.into()));
    }

    pub fn write(&self, out: &mut dyn Write, format: Format, base: LogBase) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out, base),
            Format::Json => self.write_json(out, base),
        }
    }

    fn write_csv(&self, out: &mut dyn Write, base: LogBase) -> Result<()> {
        writeln!(
            out,
            "# p1energy schema={SCHEMA_VERSION} command={} units={}",
            self.command,
            base.unit()
        )?;
        writeln!(out, "# formula: {}", self.formula)?;
        for (k, v) in &self.meta {
            writeln!(out, "# {k}={}", v.text(base))?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(|c| {
            if c.log {
                format!("{}[{}]", c.name, base.unit())
            } else {
                c.name.to_string()
            }
        }))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.text(base)))?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_json(&self, out: &mut dyn Write, base: LogBase) -> Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let m: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.name.to_string(), v.json(base)))
                    .collect();
                Value::Object(m)
            })
            .collect();
        let meta: Map<String, Value> =
            self.meta.iter().map(|(k, v)| (k.to_string(), v.json(base))).collect();
        let log_columns: Vec<&str> =
            self.columns.iter().filter(|c| c.log).map(|c| c.name).collect();
        let doc = json!({
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "units": base.unit(),
            "log_columns": log_columns,
            "formula": self.formula,
            "meta": meta,
            "rows": rows,
        });
        serde_json::to_writer_pretty(&mut *out, &doc)?;
        writeln!(out)?;
        Ok(())
    }
}
