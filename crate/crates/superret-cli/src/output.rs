//! CSV and JSON writers.
//!
//! CSV files are UTF-8 with `\n` line endings, a fixed header row, `.` as
//! the decimal separator, round-trip float precision, and the literal `nan`
//! for masked cells.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::CliError;

/// Round-trip float formatting: plain decimal in the comfortable range,
/// scientific outside it, `nan` for masked values.
pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        return "nan".to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if !(1e-4..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// Opens `path` for writing, with `-` meaning stdout.
pub fn open_sink(path: &str) -> Result<Box<dyn Write>, CliError> {
    if path == "-" {
        Ok(Box::new(BufWriter::new(io::stdout())))
    } else {
        let file = File::create(path)
            .map_err(|e| CliError::Io(format!("cannot write {path}: {e}")))?;
        Ok(Box::new(BufWriter::new(file)))
    }
}

pub fn write_csv(
    path: &str,
    header: &[&str],
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<(), CliError> {
    let mut sink = open_sink(path)?;
    let io_err = |e: io::Error| CliError::Io(format!("writing {path}: {e}"));
    writeln!(sink, "{}", header.join(",")).map_err(io_err)?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|&v| fmt_float(v)).collect();
        writeln!(sink, "{}", line.join(",")).map_err(io_err)?;
    }
    sink.flush().map_err(io_err)
}

pub fn write_json_rows(
    path: &str,
    header: &[&str],
    rows: impl Iterator<Item = Vec<f64>>,
) -> Result<(), CliError> {
    let records: Vec<serde_json::Value> = rows
        .map(|row| {
            let mut obj = serde_json::Map::new();
            for (name, &v) in header.iter().zip(row.iter()) {
                obj.insert(
                    name.to_string(),
                    if v.is_finite() {
                        serde_json::json!(v)
                    } else {
                        serde_json::Value::Null
                    },
                );
            }
            serde_json::Value::Object(obj)
        })
        .collect();
    write_json(path, &serde_json::Value::Array(records))
}

pub fn write_json(path: &str, value: &serde_json::Value) -> Result<(), CliError> {
    let mut sink = open_sink(path)?;
    let io_err = |e: io::Error| CliError::Io(format!("writing {path}: {e}"));
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("encoding JSON for {path}: {e}")))?;
    writeln!(sink, "{text}").map_err(io_err)?;
    sink.flush().map_err(io_err)
}

/// Derives the per-`n` output path for multi-grid commands:
/// `fig2.csv -> fig2_n3.csv`.
pub fn path_with_suffix(path: &str, suffix: &str) -> String {
    let p = Path::new(path);
    match (p.parent(), p.file_stem(), p.extension()) {
        (parent, Some(stem), Some(ext)) => {
            let name = format!("{}{suffix}.{}", stem.to_string_lossy(), ext.to_string_lossy());
            parent
                .map(|d| d.join(&name).to_string_lossy().into_owned())
                .unwrap_or(name)
        }
        _ => format!("{path}{suffix}"),
    }
}
