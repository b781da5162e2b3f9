//! CSV and JSON codecs plus atomic file output.
//!
//! Every table starts with an `interval` column counting from 0. Numbers are written with
//! exactly nine fractional digits, so values on that decimal lattice round-trip exactly and
//! reruns produce byte-identical files.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bems::TariffSet;
use crate::error::{Error, Result};

/// Fixed 9-digit decimal; negative zero prints as zero.
pub fn format_number(v: f64) -> Result<String> {
    if !v.is_finite() {
        return Err(Error::InvalidParameter(format!("cannot serialize non-finite value {v}")));
    }
    let s = format!("{v:.9}");
    Ok(if s == "-0.000000000" { s[1..].to_string() } else { s })
}

/// Rounds to the 9-digit lattice the CSV codec preserves.
pub fn quantize(v: f64) -> f64 {
    format!("{v:.9}").parse().expect("formatted float parses")
}

/// A table of named numeric columns of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Series {
    pub fn new() -> Self {
        Self {
            names: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub fn with(mut self, name: impl Into<String>, column: Vec<f64>) -> Self {
        self.names.push(name.into());
        self.columns.push(column);
        self
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.columns[i].as_slice())
    }

    /// Removes and returns a column.
    pub fn take(&mut self, name: &str) -> Option<Vec<f64>> {
        let i = self.names.iter().position(|n| n == name)?;
        self.names.remove(i);
        Some(self.columns.remove(i))
    }
}

impl Default for Series {
    fn default() -> Self {
        Self::new()
    }
}

pub fn write_series<W: Write>(w: W, series: &Series) -> Result<()> {
    let rows = series.rows();
    if let Some((name, col)) = series.names.iter().zip(&series.columns).find(|(_, c)| c.len() != rows) {
        return Err(Error::InvalidParameter(format!(
            "column '{name}' has {} rows, expected {rows}",
            col.len()
        )));
    }
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["interval"];
    header.extend(series.names.iter().map(String::as_str));
    out.write_record(&header)?;
    let mut record = Vec::with_capacity(header.len());
    for t in 0..rows {
        record.clear();
        record.push(t.to_string());
        for col in &series.columns {
            record.push(format_number(col[t])?);
        }
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_series<R: Read>(r: R) -> Result<Series> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header = rdr.headers()?.clone();
    if header.get(0) != Some("interval") {
        return Err(Error::Parse {
            row: 0,
            reason: "first column must be 'interval'".into(),
        });
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if let Some(dup) = names.iter().enumerate().find(|(i, n)| names[..*i].contains(n)) {
        return Err(Error::Parse {
            row: 0,
            reason: format!("duplicate column '{}'", dup.1),
        });
    }
    let mut columns = vec![Vec::new(); names.len()];
    for (t, record) in rdr.records().enumerate() {
        let record = record?;
        let row = t + 1;
        let idx: usize = record[0].parse().map_err(|_| Error::Parse {
            row,
            reason: format!("bad interval index '{}'", &record[0]),
        })?;
        if idx != t {
            return Err(Error::Parse {
                row,
                reason: format!("interval {idx} out of sequence, expected {t}"),
            });
        }
        for (j, col) in columns.iter_mut().enumerate() {
            let field = &record[j + 1];
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                row,
                reason: format!("column '{}': '{field}' is not a number", names[j]),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row,
                    reason: format!("column '{}': non-finite value", names[j]),
                });
            }
            col.push(v);
        }
    }
    Ok(Series { names, columns })
}

pub fn write_tariff_csv<W: Write>(w: W, tariffs: &TariffSet) -> Result<()> {
    let s = Series::new()
        .with("tou", tariffs.tou.clone())
        .with("fit", tariffs.fit.clone())
        .with("market_price", tariffs.market_price.clone());
    write_series(w, &s)
}

pub fn read_tariff_csv<R: Read>(r: R) -> Result<TariffSet> {
    let mut s = read_series(r)?;
    let mut get = |name: &str| {
        s.take(name).ok_or_else(|| Error::Parse {
            row: 0,
            reason: format!("missing column '{name}'"),
        })
    };
    let (tou, fit, market_price) = (get("tou")?, get("fit")?, get("market_price")?);
    TariffSet::new(tou, fit, market_price)
}

/// Per-appliance kW columns (in the given order) followed by `solar`.
pub fn write_profile_csv<W: Write>(w: W, appliances: &[(String, Vec<f64>)], solar: &[f64]) -> Result<()> {
    let mut s = Series::new();
    for (id, values) in appliances {
        if id == "solar" || id == "interval" {
            return Err(Error::InvalidParameter(format!("appliance id '{id}' is reserved")));
        }
        s = s.with(id.clone(), values.clone());
    }
    write_series(w, &s.with("solar", solar.to_vec()))
}

/// Named per-appliance kW columns.
pub type ApplianceColumns = Vec<(String, Vec<f64>)>;

/// Inverse of [`write_profile_csv`]: `(appliance columns, solar)`.
pub fn read_profile_csv<R: Read>(r: R) -> Result<(ApplianceColumns, Vec<f64>)> {
    let mut s = read_series(r)?;
    let solar = s.take("solar").ok_or_else(|| Error::Parse {
        row: 0,
        reason: "missing column 'solar'".into(),
    })?;
    Ok((s.names.into_iter().zip(s.columns).collect(), solar))
}

fn partial_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".partial");
    path.with_file_name(name)
}

/// Writes through `<path>.partial` and renames on success, so a finished file is never
/// half-written. On failure the `.partial` file is left behind for inspection.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    body(&mut buf)?;
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = partial_path(path);
    fs::write(&tmp, &buf)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, |buf| {
        serde_json::to_writer_pretty(&mut *buf, value)?;
        buf.push(b'\n');
        Ok(())
    })
}

pub fn write_series_file(path: &Path, series: &Series) -> Result<()> {
    write_atomic(path, |buf| write_series(buf, series))
}
