//! CSV and JSON output.
//!
//! CSV has a header row, RFC-4180 quoting and shortest round-trip floats;
//! missing values are empty fields. JSON keeps struct field order.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::config::OutputFormat;
use crate::{Error, Result};

/// Rows as CSV text. The header is written even when `rows` is empty.
pub fn csv_string<T: Serialize>(headers: &[&str], rows: &[T]) -> Result<String> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    writer.write_record(headers).map_err(csv_error)?;
    for row in rows {
        writer.serialize(row).map_err(csv_error)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialize(e.to_string()))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Serialize(e.to_string())
}

pub fn json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Serialize(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// A table in the requested format.
pub fn table_string<T: Serialize>(format: OutputFormat, headers: &[&str], rows: &[T]) -> Result<String> {
    match format {
        OutputFormat::Csv => csv_string(headers, rows),
        OutputFormat::Json => json_string(rows),
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
