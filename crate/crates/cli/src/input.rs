//! Reading metrics, point clouds, groups and orbit representatives from
//! JSON or CSV files.
//!
//! A file whose first non-blank character is `{` is read as JSON; anything
//! else as headerless CSV, one matrix row or point per line, with `#`
//! starting a comment line.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;

use crate::report::InputDigest;
use crate::CliError;

pub type Rows = Vec<Vec<f64>>;

/// A metric given either directly or through the points it comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricSource {
    Distances(Rows),
    Points(Rows),
}

/// Group input: generators to be closed, or an already closed list.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupSource {
    Generators {
        dim: usize,
        generators: Vec<DMatrix<f64>>,
        tolerance: Option<f64>,
    },
    Closed {
        matrices: Vec<DMatrix<f64>>,
        tolerance: Option<f64>,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MetricJson {
    Distances { n: usize, distances: Rows },
    Points { points: Rows },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GroupJson {
    Generators {
        dim: usize,
        generators: Vec<Rows>,
        #[serde(default)]
        tolerance: Option<f64>,
    },
    Closed {
        matrices: Vec<Rows>,
        #[serde(default)]
        tolerance: Option<f64>,
    },
}

#[derive(Deserialize)]
struct RepresentativesJson {
    representatives: Rows,
}

enum Parsed {
    Json(String),
    Csv(Rows),
}

fn read(path: &Path) -> Result<(String, InputDigest), CliError> {
    let bytes =
        fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let digest = InputDigest::of(path, &bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::Input(format!("{} is not valid UTF-8", path.display())))?;
    Ok((text, digest))
}

fn parse(path: &Path) -> Result<(Parsed, InputDigest), CliError> {
    let (text, digest) = read(path)?;
    let parsed = if text.trim_start().starts_with('{') {
        Parsed::Json(text)
    } else {
        Parsed::Csv(parse_csv(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?)
    };
    Ok((parsed, digest))
}

fn parse_csv(text: &str) -> Result<Rows, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(col, field)| {
                field
                    .parse::<f64>()
                    .map_err(|_| format!("row {}, column {}: {field:?} is not a number", line + 1, col + 1))
            })
            .collect::<Result<Vec<f64>, String>>()?;
        rows.push(row);
    }
    check_rectangular(&rows)?;
    Ok(rows)
}

fn check_rectangular(rows: &Rows) -> Result<(), String> {
    if let Some(first) = rows.first() {
        if let Some((k, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != first.len()) {
            return Err(format!(
                "row {} has {} entries, expected {}",
                k + 1,
                row.len(),
                first.len()
            ));
        }
    }
    Ok(())
}

fn json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str, expected: &str) -> Result<T, CliError> {
    serde_json::from_str(text)
        .map_err(|e| CliError::Input(format!("{}: expected {expected} ({e})", path.display())))
}

fn rectangular(path: &Path, rows: Rows) -> Result<Rows, CliError> {
    check_rectangular(&rows).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(rows)
}

/// Dense matrix from rectangular rows; shape checks are left to the library.
pub fn to_matrix(rows: &Rows) -> DMatrix<f64> {
    let cols = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
}

/// Reads a metric: JSON `{"n", "distances"}` or `{"points"}`, or CSV holding
/// a distance matrix (or one point per row when `csv_points` is set).
pub fn metric(path: &Path, csv_points: bool) -> Result<(MetricSource, InputDigest), CliError> {
    let (parsed, digest) = parse(path)?;
    let source = match parsed {
        Parsed::Json(text) => {
            match json(path, &text, r#"{"n", "distances"} or {"points"}"#)? {
                MetricJson::Distances { n, distances } => {
                    if distances.len() != n {
                        return Err(CliError::Input(format!(
                            "{}: n = {n} but {} distance rows given",
                            path.display(),
                            distances.len()
                        )));
                    }
                    MetricSource::Distances(rectangular(path, distances)?)
                }
                MetricJson::Points { points } => MetricSource::Points(rectangular(path, points)?),
            }
        }
        Parsed::Csv(rows) if csv_points => MetricSource::Points(rows),
        Parsed::Csv(rows) => MetricSource::Distances(rows),
    };
    Ok((source, digest))
}

/// Reads orbit representatives: JSON `{"representatives"}` or CSV points.
pub fn representatives(path: &Path) -> Result<(Rows, InputDigest), CliError> {
    let (parsed, digest) = parse(path)?;
    let rows = match parsed {
        Parsed::Json(text) => {
            let r: RepresentativesJson = json(path, &text, r#"{"representatives"}"#)?;
            rectangular(path, r.representatives)?
        }
        Parsed::Csv(rows) => rows,
    };
    Ok((rows, digest))
}

/// Reads a group: JSON `{"dim", "generators", "tolerance"}` or
/// `{"matrices", "tolerance"}`.
pub fn group(path: &Path) -> Result<(GroupSource, InputDigest), CliError> {
    let (parsed, digest) = parse(path)?;
    let Parsed::Json(text) = parsed else {
        return Err(CliError::Input(format!("{}: group files must be JSON", path.display())));
    };
    let square = |rows: Rows| -> Result<DMatrix<f64>, CliError> {
        let rows = rectangular(path, rows)?;
        if rows.iter().any(|r| r.len() != rows.len()) {
            return Err(CliError::Input(format!(
                "{}: group matrices must be square",
                path.display()
            )));
        }
        Ok(to_matrix(&rows))
    };
    let source = match json(path, &text, r#"{"dim", "generators"} or {"matrices"}"#)? {
        GroupJson::Generators {
            dim,
            generators,
            tolerance,
        } => {
            let generators = generators.into_iter().map(square).collect::<Result<Vec<_>, _>>()?;
            if let Some(g) = generators.iter().find(|g| g.nrows() != dim) {
                return Err(CliError::Input(format!(
                    "{}: dim = {dim} but a generator is {}x{}",
                    path.display(),
                    g.nrows(),
                    g.ncols()
                )));
            }
            GroupSource::Generators {
                dim,
                generators,
                tolerance,
            }
        }
        GroupJson::Closed { matrices, tolerance } => GroupSource::Closed {
            matrices: matrices.into_iter().map(square).collect::<Result<Vec<_>, _>>()?,
            tolerance,
        },
    };
    Ok((source, digest))
}
