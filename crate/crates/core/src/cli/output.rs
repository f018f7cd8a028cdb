use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::Path;

use super::config::Format;
use super::CliError;

/// Version string echoed into every output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Formats a real with 17 significant digits (round-trip exact).
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// One CSV cell.
pub enum Cell {
    Real(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Real(x) => fmt_real(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => {
                if s.contains([',', '"', '\n']) {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.clone()
                }
            }
            Cell::Empty => String::new(),
        }
    }
}

/// A table with optional comment lines that follow the standard header.
pub struct Table {
    pub notes: Vec<(String, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

/// A rendered run: the subcommand, its effective configuration and its result.
pub struct Report<'a, C: Serialize> {
    pub subcommand: &'a str,
    pub config: &'a C,
    pub json: Value,
    pub table: Table,
}

impl<C: Serialize> Report<'_, C> {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        let config = serde_json::to_value(self.config).map_err(|e| CliError::Config(e.to_string()))?;
        match format {
            Format::Json => {
                let doc = json!({
                    "version": VERSION,
                    "subcommand": self.subcommand,
                    "config": config,
                    "result": self.json,
                });
                let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Config(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut s = String::new();
                s.push_str(&format!("# winter-nls {VERSION}\n"));
                s.push_str(&format!("# subcommand: {}\n", self.subcommand));
                s.push_str(&format!("# config: {config}\n"));
                for (k, v) in &self.table.notes {
                    s.push_str(&format!("# {k}: {v}\n"));
                }
                s.push_str(&self.table.columns.join(","));
                s.push('\n');
                for row in &self.table.rows {
                    let line: Vec<String> = row.iter().map(Cell::render).collect();
                    s.push_str(&line.join(","));
                    s.push('\n');
                }
                Ok(s)
            }
        }
    }
}

/// Writes `body` to `path` through a temporary file in the same directory and an atomic rename,
/// or to standard output when `path` is `None`.
pub fn write_output(path: Option<&Path>, body: &str) -> Result<(), CliError> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes()).map_err(CliError::Io)?;
            out.flush().map_err(CliError::Io)
        }
        Some(p) => {
            let dir = match p.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(CliError::Io)?;
            tmp.write_all(body.as_bytes()).map_err(CliError::Io)?;
            tmp.as_file().sync_all().map_err(CliError::Io)?;
            tmp.persist(p).map_err(|e| CliError::Io(e.error))?;
            Ok(())
        }
    }
}
