use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markets::Market;
use crate::types::{euclidean_norm, ReturnVector};

/// What each CSV row holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CsvKind {
    /// Price levels; consecutive rows are turned into ratios.
    Prices,
    /// Gross returns, passed through unchanged.
    Returns,
}

/// Handling of return vectors whose norm exceeds the bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundPolicy {
    /// Rescale the vector onto the bound and record a warning.
    Clamp,
    #[default]
    Reject,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsvSource {
    pub path: PathBuf,
    pub kind: CsvKind,
    pub bound_policy: BoundPolicy,
    pub m_bound: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsvData {
    pub asset_names: Vec<String>,
    pub returns: Vec<ReturnVector>,
    pub warnings: Vec<String>,
}

/// Reads a header row of asset names followed by one row per period.
pub fn load_csv(src: &CsvSource) -> Result<CsvData> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(&src.path)
        .map_err(|e| csv_error(&src.path, e))?;
    let asset_names: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(&src.path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    let width = asset_names.len();
    if width == 0 || asset_names.iter().all(String::is_empty) {
        return Err(Error::Parse {
            path: src.path.clone(),
            line: 1,
            message: "missing header row".into(),
        });
    }

    let mut rows: Vec<(u64, Vec<f64>)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(&src.path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(Error::Parse {
                path: src.path.clone(),
                line,
                message: format!("expected {width} fields, found {}", record.len()),
            });
        }
        let mut values = Vec::with_capacity(width);
        for (column, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                path: src.path.clone(),
                line,
                message: format!("column {}: {field:?} is not a number", column + 1),
            })?;
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Data {
                    path: src.path.clone(),
                    line,
                    column: column + 1,
                    message: format!("value {v} must be finite and positive"),
                });
            }
            values.push(v);
        }
        rows.push((line, values));
    }

    let ratios: Vec<(u64, Vec<f64>)> = match src.kind {
        CsvKind::Returns => rows,
        CsvKind::Prices => {
            if rows.len() < 2 {
                return Err(Error::Parse {
                    path: src.path.clone(),
                    line: rows.first().map_or(1, |r| r.0),
                    message: "price files need at least two rows".into(),
                });
            }
            rows.windows(2)
                .map(|w| {
                    (
                        w[1].0,
                        w[1].1.iter().zip(&w[0].1).map(|(p, q)| p / q).collect(),
                    )
                })
                .collect()
        }
    };

    let mut returns = Vec::with_capacity(ratios.len());
    let mut warnings = Vec::new();
    for (line, mut values) in ratios {
        let norm = euclidean_norm(&values);
        if norm > src.m_bound {
            match src.bound_policy {
                BoundPolicy::Reject => {
                    return Err(Error::BoundViolation {
                        path: src.path.clone(),
                        line,
                        norm,
                        bound: src.m_bound,
                    })
                }
                BoundPolicy::Clamp => {
                    warnings.push(format!(
                        "{}:{line}: return norm {norm} exceeds bound {}; clamped",
                        src.path.display(),
                        src.m_bound
                    ));
                    let scale = src.m_bound / norm;
                    values.iter_mut().for_each(|v| *v *= scale);
                }
            }
        }
        let x = ReturnVector::with_bound(values, src.m_bound * (1.0 + 1e-12)).map_err(|e| {
            Error::Data {
                path: src.path.clone(),
                line,
                column: 0,
                message: e.to_string(),
            }
        })?;
        returns.push(x);
    }
    Ok(CsvData {
        asset_names,
        returns,
        warnings,
    })
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse {
            path: path.to_owned(),
            line,
            message: format!("{other:?}"),
        },
    }
}

/// Writes returns in the format read by [`load_csv`] with
/// [`CsvKind::Returns`]. Values use the shortest representation that
/// parses back to the same `f64`.
pub fn write_returns_csv(
    path: &Path,
    asset_names: &[String],
    returns: &[ReturnVector],
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{}", asset_names.join(","))?;
    for x in returns {
        let fields: Vec<String> = x.as_slice().iter().map(|v| format!("{v:?}")).collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Replays a recorded return sequence.
#[derive(Clone, Debug)]
pub struct CsvMarket {
    data: CsvData,
    position: usize,
}

impl CsvMarket {
    pub fn new(data: CsvData) -> Self {
        Self { data, position: 0 }
    }

    pub fn len(&self) -> usize {
        self.data.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.returns.is_empty()
    }

    pub fn data(&self) -> &CsvData {
        &self.data
    }
}

impl Market for CsvMarket {
    fn dim(&self) -> usize {
        self.data.asset_names.len()
    }

    fn next_return(&mut self) -> Result<ReturnVector> {
        let x = self
            .data
            .returns
            .get(self.position)
            .cloned()
            .ok_or_else(|| {
                Error::Config(format!("data has only {} periods", self.data.returns.len()))
            })?;
        self.position += 1;
        Ok(x)
    }
}
