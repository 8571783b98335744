//! Provenance-stamped CSV and JSON writers.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const TOOL: &str = "satbody";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A table of string cells with a fixed header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

pub fn cell<T: ToString>(v: T) -> String {
    v.to_string()
}

pub fn opt_cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct Wrapped<'a, T: Serialize> {
    tool: &'a str,
    version: &'a str,
    seed: u64,
    config: &'a ExperimentConfig,
    result: &'a T,
}

/// `{tool, version, seed, config, result}` as pretty JSON with a trailing
/// newline.
pub fn json_document<T: Serialize>(config: &ExperimentConfig, result: &T) -> Result<String, CliError> {
    let doc = Wrapped {
        tool: TOOL,
        version: VERSION,
        seed: config.seed,
        config,
        result,
    };
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

/// CSV with `#` provenance lines ahead of the header. LF line endings.
pub fn csv_document(config: &ExperimentConfig, table: &Table) -> Result<String, CliError> {
    let mut out = Vec::new();
    writeln!(out, "# tool: {TOOL}")?;
    writeln!(out, "# version: {VERSION}")?;
    writeln!(out, "# seed: {}", config.seed)?;
    writeln!(out, "# config: {}", serde_json::to_string(config)?)?;
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut out);
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    String::from_utf8(out).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

/// Reads the `result` member of a provenance-wrapped JSON file, or the whole
/// document when it is not wrapped.
pub fn read_result<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("bad JSON in {}: {e}", path.display())))?;
    if let Some(inner) = value.get_mut("result") {
        value = inner.take();
    }
    serde_json::from_value(value).map_err(|e| CliError::Usage(format!("bad contents in {}: {e}", path.display())))
}
