//! CSV input for evaluation matrices.
//!
//! ```text
//! #range,-0.5,1
//! loss_a,loss_b,loss_c      <- optional header row
//! 0.25,1,-0.5
//! 0,0.75,0.5
//! ```

use std::fs::File;
use std::io::Read;
use std::path::Path;

use csv::{ReaderBuilder, StringRecord, Trim};

use super::EvaluationMatrix;
use crate::error::{Error, Result};

const RANGE_TAG: &str = "#range";

fn line_of(record: &StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn parse_error(line: u64, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    parse_error(line, 0, err.to_string())
}

impl EvaluationMatrix {
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_reader(File::open(path)?)
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        Self::from_csv_reader(text.as_bytes())
    }

    /// Reads the `#range,a,b` line, an optional header of function names and
    /// one row of function values per sample point.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(Trim::All)
            .from_reader(reader);
        let mut records = rdr.records();

        let first = match records.next() {
            Some(r) => r.map_err(csv_error)?,
            None => return Err(parse_error(1, 1, "empty input: expected a `#range,a,b` line")),
        };
        let (a, b) = parse_range(&first)?;

        let mut names = None;
        let mut rows = Vec::new();
        for record in records {
            let record = record.map_err(csv_error)?;
            let line = line_of(&record);
            if record.iter().all(str::is_empty) {
                continue;
            }
            if rows.is_empty() && names.is_none() && record.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
                names = Some(record.iter().map(str::to_string).collect::<Vec<_>>());
                continue;
            }
            let row = record
                .iter()
                .enumerate()
                .map(|(col, field)| {
                    field.parse::<f64>().map_err(|_| {
                        parse_error(line, col + 1, format!("`{field}` is not a decimal number"))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push((line, row));
        }

        if rows.is_empty() {
            return Err(parse_error(1, 1, "no sample rows after the `#range` line"));
        }
        let width = names.as_ref().map_or(rows[0].1.len(), Vec::len);
        if let Some((line, row)) = rows.iter().find(|(_, row)| row.len() != width) {
            return Err(parse_error(*line, row.len().min(width) + 1, format!(
                "row has {} values, expected {width}",
                row.len()
            )));
        }
        let row_lines: Vec<u64> = rows.iter().map(|(l, _)| *l).collect();
        let rows: Vec<Vec<f64>> = rows.into_iter().map(|(_, r)| r).collect();

        let built = match names {
            Some(names) => EvaluationMatrix::with_names(rows, a, b, names),
            None => EvaluationMatrix::new(rows, a, b),
        };
        built.map_err(|err| match err {
            Error::OutOfRange { row, column, value, a, b } => parse_error(
                row_lines[row],
                column + 1,
                format!("value {value} outside the declared range [{a}, {b}]"),
            ),
            other => other,
        })
    }
}

fn parse_range(record: &StringRecord) -> Result<(f64, f64)> {
    let line = line_of(record).max(1);
    if record.get(0) != Some(RANGE_TAG) {
        return Err(parse_error(line, 1, "first line must be the `#range,a,b` declaration"));
    }
    if record.len() != 3 {
        return Err(parse_error(line, 1, "the `#range` line must have exactly two values: `#range,a,b`"));
    }
    let value = |col: usize| {
        record[col]
            .parse::<f64>()
            .map_err(|_| parse_error(line, col + 1, format!("`#range` bound `{}` is not a number", &record[col])))
    };
    Ok((value(1)?, value(2)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_range_header_and_rows() {
        let e = EvaluationMatrix::from_csv_str("#range,-0.5,1\nx,y\n0.25,1\n-0.5,0.75\n").unwrap();
        assert_eq!((e.a(), e.b(), e.m(), e.k()), (-0.5, 1.0, 2, 3));
        assert_eq!(e.names().unwrap(), &["x", "y", "f0"]);
        assert_eq!(e.value(1, 0), -0.5);
    }

    #[test]
    fn header_is_optional() {
        let e = EvaluationMatrix::from_csv_str("#range,0,1\n1,0\n1e-1,0\n").unwrap();
        assert_eq!((e.m(), e.k()), (2, 2));
        assert!(e.names().is_none());
        assert_eq!(e.value(1, 0), 0.1);
    }

    #[test]
    fn missing_range_line_is_named() {
        let err = EvaluationMatrix::from_csv_str("0.1,0.2\n").unwrap_err();
        assert!(err.to_string().contains("#range"), "{err}");
        let err = EvaluationMatrix::from_csv_str("").unwrap_err();
        assert!(err.to_string().contains("#range"), "{err}");
    }

    #[test]
    fn bad_cells_report_line_and_column() {
        match EvaluationMatrix::from_csv_str("#range,0,1\n0.1,0.2\n0.3,abc\n").unwrap_err() {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (3, 2)),
            other => panic!("{other}"),
        }
        match EvaluationMatrix::from_csv_str("#range,0,1\n0.1,0.2\n0.3,1.2\n").unwrap_err() {
            Error::Parse { line, column, message } => {
                assert_eq!((line, column), (3, 2));
                assert!(message.contains("1.2"));
            }
            other => panic!("{other}"),
        }
        assert!(EvaluationMatrix::from_csv_str("#range,0,1\n0.1,0.2\n0.3\n").is_err());
        assert!(EvaluationMatrix::from_csv_str("#range,0\n0.1\n").is_err());
    }
}
