//! Delimited text datasets.
//!
//! The default layout has one header row of event names followed by one row
//! per sample. With `transpose`, each line is an event name followed by that
//! event's cells; a first line whose cells are not all `0`/`1` is taken as a
//! header of sample ids and skipped. The delimiter is the first of tab, comma
//! or semicolon found on the first line (tab if none).

use std::path::Path;

use progressa_core::{AlterationMatrix, BitColumn, EventCatalog};

use crate::error::{CliError, Result};

fn detect_delimiter(first_line: &str) -> u8 {
    [b'\t', b',', b';'].into_iter().find(|&d| first_line.as_bytes().contains(&d)).unwrap_or(b'\t')
}

struct Records {
    /// `(line, cells)` for every non-blank line.
    lines: Vec<(usize, Vec<String>)>,
}

fn records(text: &str, path: &Path) -> Result<Records> {
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(detect_delimiter(first))
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut lines = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            CliError::Data { path: path.to_path_buf(), line, column: 0, message: e.to_string() }
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        lines.push((line, rec.iter().map(|c| c.trim().to_string()).collect()));
    }
    Ok(Records { lines })
}

fn cell(value: &str, path: &Path, line: usize, column: usize, event: &str) -> Result<bool> {
    match value {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(CliError::Data {
            path: path.to_path_buf(),
            line,
            column,
            message: format!("event `{event}`: expected 0 or 1, found `{other}`"),
        }),
    }
}

/// Parses a dataset; `path` is only used in error messages.
pub fn parse_matrix(text: &str, transpose: bool, path: &Path) -> Result<AlterationMatrix> {
    let Records { lines } = records(text, path)?;
    let data_err = |line, column, message: String| CliError::Data { path: path.to_path_buf(), line, column, message };
    if lines.is_empty() {
        return Err(progressa_core::Error::EmptyMatrix.into());
    }
    if transpose {
        let mut body = &lines[..];
        if body[0].1[1..].iter().any(|c| c != "0" && c != "1") {
            body = &body[1..];
        }
        if body.is_empty() {
            return Err(progressa_core::Error::EmptyMatrix.into());
        }
        let m = body[0].1.len() - 1;
        let mut names = Vec::with_capacity(body.len());
        let mut columns = Vec::with_capacity(body.len());
        for (line, cells) in body {
            if cells.len() - 1 != m {
                return Err(data_err(*line, cells.len(), format!("expected {m} samples, found {}", cells.len() - 1)));
            }
            let bits = cells[1..]
                .iter()
                .enumerate()
                .map(|(c, v)| cell(v, path, *line, c + 2, &cells[0]))
                .collect::<Result<Vec<bool>>>()?;
            names.push(cells[0].clone());
            columns.push(BitColumn::from_bools(&bits));
        }
        let catalog = EventCatalog::new(names)?;
        return Ok(AlterationMatrix::from_columns(catalog, columns)?);
    }

    let (header_line, names) = &lines[0];
    if names.iter().any(String::is_empty) {
        return Err(data_err(*header_line, 0, "empty event name in header".into()));
    }
    let n = names.len();
    let mut rows = Vec::with_capacity(lines.len() - 1);
    for (line, cells) in &lines[1..] {
        if cells.len() != n {
            return Err(data_err(*line, cells.len().min(n) + 1, format!("expected {n} cells, found {}", cells.len())));
        }
        rows.push(
            cells.iter().enumerate().map(|(c, v)| cell(v, path, *line, c + 1, &names[c])).collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(AlterationMatrix::from_rows(names.iter().cloned(), &rows)?)
}

pub fn read_matrix(path: &Path, transpose: bool) -> Result<AlterationMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_matrix(&text, transpose, path)
}

/// Tab-separated, samples as rows, newline-terminated.
pub fn format_matrix(matrix: &AlterationMatrix) -> String {
    let mut out = matrix.catalog().names().join("\t");
    out.push('\n');
    for row in matrix.rows() {
        let cells: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
        out.push_str(&cells.join("\t"));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, transpose: bool) -> Result<AlterationMatrix> {
        parse_matrix(text, transpose, Path::new("test.tsv"))
    }

    #[test]
    fn delimiters() {
        let tab = parse("a\tb\tc\n1\t1\t1\n1\t0\t1\n", false).unwrap();
        let comma = parse("a,b,c\n1,1,1\n1,0,1\n", false).unwrap();
        assert_eq!(tab, comma);
        assert_eq!((tab.n_samples(), tab.n_events()), (2, 3));
    }

    #[test]
    fn bad_cell_is_located() {
        let err = parse("a\tb\n1\t0\n0\t2\n", false).unwrap_err();
        match err {
            CliError::Data { line, column, message, .. } => {
                assert_eq!((line, column), (3, 2));
                assert!(message.contains("`2`"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn transposed_with_and_without_header() {
        let plain = parse("a\tb\n1\t0\n1\t1\n0\t1\n", false).unwrap();
        let rows = parse("a\t1\t1\t0\nb\t0\t1\t1\n", true).unwrap();
        let header = parse("event\ts1\ts2\ts3\na\t1\t1\t0\nb\t0\t1\t1\n", true).unwrap();
        assert_eq!(plain, rows);
        assert_eq!(plain, header);
    }

    #[test]
    fn round_trip_is_byte_exact() {
        let text = "x\ty\tz\n1\t0\t1\n0\t0\t1\n";
        let m = parse(text, false).unwrap();
        assert_eq!(format_matrix(&m), text);
        assert_eq!(parse(&format_matrix(&m), false).unwrap(), m);
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(parse("", false), Err(CliError::Core(progressa_core::Error::EmptyMatrix))));
        assert!(matches!(parse("a\ta\n1\t0\n", false), Err(CliError::Core(progressa_core::Error::DuplicateEvent(_)))));
        assert!(matches!(parse("a\tb\n1\n", false), Err(CliError::Data { line: 2, .. })));
    }
}
