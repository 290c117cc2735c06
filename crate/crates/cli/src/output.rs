//! Tables, metadata headers and file/stdout sinks.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use zeeman_core::grid::Field2D;
use zeeman_core::SCHEMA_VERSION;

use crate::config::{FormatArg, RunConfig};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format!("{v:e}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => json!(v.to_string()),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra `# key=value` lines, after the config echo.
    pub notes: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, cfg: &RunConfig) -> String {
        match cfg.format {
            FormatArg::Csv => self.to_csv(cfg),
            FormatArg::Json => self.to_json(cfg),
        }
    }

    pub fn to_csv(&self, cfg: &RunConfig) -> String {
        let mut out = header(cfg);
        for (k, v) in &self.notes {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, cfg: &RunConfig) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: serde_json::Map<String, Value> =
                    self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect();
                Value::Object(obj)
            })
            .collect();
        let notes: serde_json::Map<String, Value> = self.notes.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "config": cfg,
            "columns": self.columns,
            "notes": notes,
            "rows": rows,
        });
        pretty(&doc)
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

/// `# schema_version=..` then one `# config.key=value` line per setting.
pub fn header(cfg: &RunConfig) -> String {
    let mut out = format!("# schema_version={SCHEMA_VERSION}\n");
    for (k, v) in cfg.echo() {
        let _ = writeln!(out, "# {k}={v}");
    }
    out
}

/// Copies the config echo into a field's metadata.
pub fn annotate(field: &mut Field2D, cfg: &RunConfig) {
    for (k, v) in cfg.echo() {
        field.metadata.insert(k, v);
    }
}

pub fn write_file(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Writes to `--out` when set, stdout otherwise.
pub fn emit(cfg: &RunConfig, text: &str) -> CliResult<()> {
    match &cfg.out {
        Some(p) => write_file(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

/// Binary PGM, black at the most negative value, white at the most positive,
/// p increasing upward.
pub fn pgm(field: &Field2D) -> Vec<u8> {
    let g = &field.grid;
    let lo = field.min();
    let hi = field.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = format!("P5\n{} {}\n255\n", g.nq, g.np).into_bytes();
    for j in (0..g.np).rev() {
        for i in 0..g.nq {
            let t = (field.at(i, j) - lo) / span;
            out.push((t * 255.0).round().clamp(0.0, 255.0) as u8);
        }
    }
    out
}

pub fn write_pgm(path: &Path, field: &Field2D) -> CliResult<()> {
    std::fs::write(path, pgm(field)).map_err(|e| CliError::io(path, e))
}

pub fn field_json(field: &Field2D) -> String {
    pretty(&json!({
        "schema_version": SCHEMA_VERSION,
        "field": field,
    }))
}
