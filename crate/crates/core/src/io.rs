//! CSV and JSON input/output.
//!
//! A CSV file holds one observation per row. If the first record contains a
//! field that does not parse as a number, it is taken as a header and skipped.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::data::DataMatrix;
use crate::error::{Result, RpdcError};

/// Parses a numeric matrix from CSV text.
pub fn parse_csv<R: Read>(reader: R) -> Result<DataMatrix> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0usize;
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| RpdcError::Parse(e.to_string()))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if line == 0 => continue,
            Err(_) => {
                return Err(RpdcError::Parse(format!("non-numeric field on line {}", line + 1)));
            }
        };
        match cols {
            None => cols = Some(values.len()),
            Some(c) if c != values.len() => {
                return Err(RpdcError::Parse(format!(
                    "line {} has {} fields, expected {}",
                    line + 1,
                    values.len(),
                    c
                )));
            }
            _ => {}
        }
        data.extend(values);
        rows += 1;
    }
    let cols = cols.ok_or_else(|| RpdcError::Parse("no data rows".into()))?;
    DataMatrix::from_row_major(rows, cols, data)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<DataMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| RpdcError::Io(format!("{}: {e}", path.display())))?;
    parse_csv(file)
}

/// Writes `m` with 17 significant digits, so reading it back is exact.
pub fn write_csv_to<W: Write>(m: &DataMatrix, writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for row in m.rows_iter() {
        wtr.write_record(row.iter().map(|v| format!("{v:.16e}")))
            .map_err(|e| RpdcError::Io(e.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_csv(m: &DataMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_csv_to(m, File::create(path)?)
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| RpdcError::Io(e.to_string()))
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let mut f = File::create(path)?;
    f.write_all(to_json_string(value)?.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}
