//! Loading spaces from JSON (`{"points": [...], "dist": [[...]]}`) or CSV
//! (a header row of labels followed by the matrix rows).

use std::path::Path;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::space::{FiniteMetricSpace, SpaceFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceFormat {
    Json,
    Csv,
}

impl SpaceFormat {
    /// `.csv` selects CSV; anything else is read as JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => SpaceFormat::Csv,
            _ => SpaceFormat::Json,
        }
    }
}

pub fn parse_space_file(path: impl AsRef<Path>) -> Result<FiniteMetricSpace> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_space_str(&text, SpaceFormat::from_path(path))
}

pub fn parse_space_str(text: &str, format: SpaceFormat) -> Result<FiniteMetricSpace> {
    match format {
        SpaceFormat::Json => parse_json(text),
        SpaceFormat::Csv => parse_csv(text),
    }
}

fn parse_json(text: &str) -> Result<FiniteMetricSpace> {
    let file: SpaceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    FiniteMetricSpace::try_from(file)
}

fn parse_csv(text: &str) -> Result<FiniteMetricSpace> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let csv_error = |e: csv::Error| {
        let (line, column) = e.position().map_or((0, 0), |p| (p.line() as usize, 1));
        Error::Parse { line, column, message: e.to_string() }
    };
    let points: Vec<String> = reader.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let row = record
            .iter()
            .enumerate()
            .map(|(col, cell)| {
                cell.parse::<Rational>().map_err(|e| Error::Parse { line, column: col + 1, message: e.to_string() })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    FiniteMetricSpace::new(points, rows)
}

pub fn to_json(space: &FiniteMetricSpace) -> String {
    serde_json::to_string_pretty(space).expect("spaces serialize")
}

pub fn to_csv(space: &FiniteMetricSpace) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(space.points()).expect("in-memory write");
    for row in space.rows() {
        writer.write_record(row.iter().map(|r| r.to_string())).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn json_round_trip() {
        let s4 = models::s4();
        assert_eq!(parse_space_str(&to_json(&s4), SpaceFormat::Json).unwrap(), s4);
    }

    #[test]
    fn csv_round_trip_and_decimals() {
        let x4 = models::x4();
        assert_eq!(parse_space_str(&to_csv(&x4), SpaceFormat::Csv).unwrap(), x4);
        let s = parse_space_str("a,b\n0,0.5\n0.5,0\n", SpaceFormat::Csv).unwrap();
        assert_eq!(s.distance("a", "b").unwrap(), &Rational::new(1, 2));
    }

    #[test]
    fn csv_asymmetry_names_the_cells() {
        let err = parse_space_str("a,b\n0,1\n2,0\n", SpaceFormat::Csv).unwrap_err();
        assert!(matches!(&err, Error::Asymmetric { a, b, .. } if a == "a" && b == "b"), "{err}");
    }

    #[test]
    fn reports_positions() {
        let err = parse_space_str("{\"points\": [\"a\"],\n \"dist\": [[0,]]}", SpaceFormat::Json).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_space_str("a,b\n0,1\n1,x\n", SpaceFormat::Csv).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, column: 2, .. }), "{err}");
    }
}
