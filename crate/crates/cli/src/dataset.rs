use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use symstat_core::rational::{parse_decimal, Rational};

const BUDWORM_CSV: &str = include_str!("../data/budworm.csv");
const AR1_CSV: &str = include_str!("../data/ar1.csv");

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("CSV has no header row")]
    NoHeader,
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("row {row}: expected {expected} fields, found {found}")]
    Ragged { row: usize, expected: usize, found: usize },
    #[error("row {row}, column `{column}`: `{value}` is not a finite number")]
    NotNumeric { row: usize, column: String, value: String },
    #[error("no column named `{0}`")]
    MissingColumn(String),
    #[error("bad transform `{0}`; expected `log2:<column>`, `log:<column>` or `log10:<column>`")]
    BadTransform(String),
    #[error("column `{column}` has a non-positive value in row {row}")]
    NonPositive { column: String, row: usize },
}

/// A rectangular numeric table with named columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
    source: Option<PathBuf>,
}

impl Dataset {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, DataError> {
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].contains(c) {
                return Err(DataError::DuplicateColumn(c.clone()));
            }
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != columns.len() {
                return Err(DataError::Ragged { row: i + 1, expected: columns.len(), found: r.len() });
            }
            if let Some(j) = r.iter().position(|v| !v.is_finite()) {
                return Err(DataError::NotNumeric { row: i + 1, column: columns[j].clone(), value: r[j].to_string() });
            }
        }
        Ok(Dataset { columns, rows, source: None })
    }

    /// Reads comma-separated values with a header row.
    pub fn from_reader(reader: impl Read) -> Result<Self, DataError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let columns: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if columns.is_empty() || columns.iter().all(String::is_empty) {
            return Err(DataError::NoHeader);
        }
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| match e.kind() {
                csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
                    DataError::Ragged { row: i + 1, expected: *expected_len as usize, found: *len as usize }
                }
                _ => DataError::Csv(e),
            })?;
            let row = rec
                .iter()
                .zip(&columns)
                .map(|(field, col)| match field.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(DataError::NotNumeric { row: i + 1, column: col.clone(), value: field.to_string() }),
                })
                .collect::<Result<Vec<f64>, _>>()?;
            rows.push(row);
        }
        Dataset::new(columns, rows)
    }

    pub fn from_path(path: &Path) -> Result<Self, DataError> {
        let file = std::fs::File::open(path).map_err(|source| DataError::Io { path: path.to_path_buf(), source })?;
        let mut d = Dataset::from_reader(file)?;
        d.source = Some(path.to_path_buf());
        Ok(d)
    }

    /// Writes the table back as CSV. Values use the shortest representation
    /// that parses to the same `f64`, so reading the output reproduces the
    /// dataset exactly.
    pub fn to_writer(&self, writer: impl Write) -> Result<(), DataError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| v.to_string()))?;
        }
        w.flush().map_err(|e| DataError::Csv(e.into()))?;
        Ok(())
    }

    pub fn to_path(&self, path: &Path) -> Result<(), DataError> {
        let file = std::fs::File::create(path).map_err(|source| DataError::Io { path: path.to_path_buf(), source })?;
        self.to_writer(file)
    }

    /// Male budworm batches: raw dose, deaths and batch size.
    pub fn budworm() -> Self {
        Dataset::from_reader(BUDWORM_CSV.as_bytes()).expect("embedded budworm data parses")
    }

    /// The four-point series used by the AR(1) demo, in column `x`.
    pub fn ar1() -> Self {
        Dataset::from_reader(AR1_CSV.as_bytes()).expect("embedded AR(1) data parses")
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn source(&self) -> Option<&Path> {
        self.source.as_deref()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, DataError> {
        self.columns.iter().position(|c| c == name).ok_or_else(|| DataError::MissingColumn(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>, DataError> {
        let j = self.index_of(name)?;
        Ok(self.rows.iter().map(|r| r[j]).collect())
    }

    /// Applies `log2:col` (or `log:`, `log10:`) in place; the column is
    /// renamed to `log2(col)`. Returns the original and new names.
    pub fn transform(&mut self, spec: &str) -> Result<(String, String), DataError> {
        let (fun, col) = spec.split_once(':').ok_or_else(|| DataError::BadTransform(spec.to_string()))?;
        let f: fn(f64) -> f64 = match fun {
            "log2" => f64::log2,
            "log" => f64::ln,
            "log10" => f64::log10,
            _ => return Err(DataError::BadTransform(spec.to_string())),
        };
        let j = self.index_of(col)?;
        if let Some(i) = self.rows.iter().position(|r| r[j] <= 0.0) {
            return Err(DataError::NonPositive { column: col.to_string(), row: i + 1 });
        }
        for r in &mut self.rows {
            r[j] = f(r[j]);
        }
        self.columns[j] = format!("{fun}({col})");
        Ok((col.to_string(), self.columns[j].clone()))
    }
}

/// The decimal a value was written as, recovered exactly: `0.1` maps to
/// `1/10` rather than to the nearest binary fraction.
pub fn exact(v: f64) -> Rational {
    let text = v.to_string();
    let (neg, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.as_str()),
    };
    let q = parse_decimal(digits).expect("finite floats print as plain decimals");
    if neg {
        -q
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use symstat_core::rational::frac;

    #[test]
    fn embedded_tables() {
        let b = Dataset::budworm();
        assert_eq!(b.columns(), ["dose", "ndead", "ntotal"]);
        assert_eq!(b.column("ndead").unwrap(), vec![1.0, 4.0, 9.0, 13.0, 18.0, 20.0]);
        assert_eq!(Dataset::ar1().column("x").unwrap(), vec![0.1, -0.9, 0.4, 0.0]);
    }

    #[test]
    fn log2_transform_renames() {
        let mut b = Dataset::budworm();
        b.transform("log2:dose").unwrap();
        assert_eq!(b.column("log2(dose)").unwrap(), vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert!(matches!(b.transform("sqrt:ndead"), Err(DataError::BadTransform(_))));
        assert!(matches!(b.transform("log2:nope"), Err(DataError::MissingColumn(_))));
    }

    #[test]
    fn malformed_input() {
        let ragged = Dataset::from_reader("a,b\n1,2\n3\n".as_bytes());
        assert!(matches!(ragged, Err(DataError::Ragged { row: 2, expected: 2, found: 1 })));
        let text = Dataset::from_reader("a,b\n1,x\n".as_bytes());
        assert!(matches!(text, Err(DataError::NotNumeric { row: 1, .. })));
        assert!(matches!(Dataset::from_reader("a,a\n1,2\n".as_bytes()), Err(DataError::DuplicateColumn(_))));
        assert!(matches!(Dataset::from_reader("".as_bytes()), Err(DataError::NoHeader)));
    }

    #[test]
    fn decimals_round_to_what_was_written() {
        assert_eq!(exact(0.1), frac(1, 10));
        assert_eq!(exact(-0.9), frac(-9, 10));
        assert_eq!(exact(0.0), frac(0, 1));
        assert_eq!(exact(1e-7), frac(1, 10_000_000));
    }
}
