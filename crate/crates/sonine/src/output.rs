//! Result files. Floats go to CSV in `{:.16e}` (17 significant digits, so
//! values round-trip) and to JSON in serde's shortest round-trip form.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn prepare(dir: &Path, file: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    Ok(dir.join(file))
}

pub fn write_csv<I, R>(
    dir: &Path,
    file: &str,
    header: &[&str],
    rows: I,
) -> Result<PathBuf, CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let path = prepare(dir, file)?;
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, file: &str, value: &T) -> Result<PathBuf, CliError> {
    let path = prepare(dir, file)?;
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

/// Records as CSV with one column per field, in field order.
pub fn write_records_csv<T: Serialize>(
    dir: &Path,
    file: &str,
    header: &[&str],
    records: &[T],
) -> Result<PathBuf, CliError> {
    let path = prepare(dir, file)?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(&path)?;
    w.write_record(header)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }
}
