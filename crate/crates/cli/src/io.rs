//! CSV ingestion and report writing.

use std::fs;
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{CliError, CliResult};

/// Aligned pair of return series.
#[derive(Debug, Clone)]
pub struct PairSeries {
    pub dates: Vec<String>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Rows dropped because a value was missing.
    pub dropped: usize,
}

fn reader(path: &Path) -> CliResult<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(CliError::io(path))?;
    Ok(csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn column(headers: &csv::StringRecord, name: &str, path: &Path) -> CliResult<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Data(format!("{}: no column named '{name}'", path.display())))
}

fn parse_value(cell: &str, line: u64, name: &str) -> CliResult<Option<f64>> {
    if cell.is_empty() || cell.eq_ignore_ascii_case("na") {
        return Ok(None);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(CliError::Data(format!(
            "line {line}, column '{name}': '{cell}' is not a finite number"
        ))),
    }
}

/// Read two numeric columns, with an optional ISO-8601 date column. Rows
/// with a missing value in either column are dropped.
pub fn read_pairs(
    path: &Path,
    date_col: Option<&str>,
    x_col: &str,
    y_col: &str,
) -> CliResult<PairSeries> {
    let mut rdr = reader(path)?;
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let di = date_col.map(|d| column(&headers, d, path)).transpose()?;
    let (xi, yi) = (
        column(&headers, x_col, path)?,
        column(&headers, y_col, path)?,
    );
    let mut out = PairSeries {
        dates: Vec::new(),
        x: Vec::new(),
        y: Vec::new(),
        dropped: 0,
    };
    let mut last: Option<NaiveDate> = None;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let cell = |i: usize| rec.get(i).unwrap_or("");
        if let (Some(di), Some(name)) = (di, date_col) {
            let d = NaiveDate::parse_from_str(cell(di), "%Y-%m-%d").map_err(|e| {
                CliError::Data(format!(
                    "line {line}, column '{name}': '{}' is not an ISO-8601 date ({e})",
                    cell(di)
                ))
            })?;
            if last.is_some_and(|l| d <= l) {
                return Err(CliError::Data(format!(
                    "line {line}: dates must be strictly increasing"
                )));
            }
            last = Some(d);
            out.dates.push(d.format("%Y-%m-%d").to_string());
        }
        match (
            parse_value(cell(xi), line, x_col)?,
            parse_value(cell(yi), line, y_col)?,
        ) {
            (Some(a), Some(b)) => {
                out.x.push(a);
                out.y.push(b);
            }
            _ => {
                out.dropped += 1;
                if di.is_some() {
                    out.dates.pop();
                }
            }
        }
    }
    Ok(out)
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.kind() {
        csv::ErrorKind::Io(_) => CliError::Data(format!("{}: {e}", path.display())),
        _ => CliError::Data(format!("{}: malformed CSV: {e}", path.display())),
    }
}

/// Headers of a CSV file.
pub fn read_headers(path: &Path) -> CliResult<Vec<String>> {
    let mut rdr = reader(path)?;
    Ok(rdr
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect())
}

/// Plain-text number: shortest round-trip form, scientific outside [1e-4, 1e15).
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if x == 0.0 || (1e-4..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))
}

/// Write `header` then CSV `rows` (first row is the column names).
pub fn write_csv(path: &Path, header: &str, rows: &[Vec<String>]) -> CliResult<()> {
    let mut buf = header.as_bytes().to_vec();
    {
        let mut w = csv::WriterBuilder::new().from_writer(&mut buf);
        for r in rows {
            w.write_record(r)
                .map_err(|e| CliError::Compute(e.to_string()))?;
        }
        w.flush().map_err(CliError::io(path))?;
    }
    write_file(path, &buf)
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Compute(e.to_string()))?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let mut f = fs::File::create(path).map_err(CliError::io(path))?;
    f.write_all(bytes).map_err(CliError::io(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(0.1), "0.1");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(1e-10), "1e-10");
        assert_eq!(num(-2.5e20), "-2.5e20");
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
    }
}
