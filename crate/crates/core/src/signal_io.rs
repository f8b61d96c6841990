//! Signal ingestion and artifact writers.
//!
//! Signal files come in two layouts:
//!
//! - `csv`: one decimal amplitude per line. Lines starting with `#` are
//!   headers/comments and blank lines are ignored.
//! - `f64le`: the 8-byte magic `HFT1\0\0\0\0`, a little-endian `u64` sample
//!   count, then that many little-endian IEEE-754 doubles.
//!
//! Other sources (`.mat`, `.wav`) need converting to one of these first.
//!
//! Feature tables are CSV with a `f1..fm,label` header. Numbers are written
//! with Rust's shortest round-trip formatting (never more than 17
//! significant digits), so reading a file back reproduces every value
//! bit-for-bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{EvalReport, Projection};
use crate::features::{FeatureMatrix, LabeledDataset};

pub const F64LE_MAGIC: [u8; 8] = *b"HFT1\0\0\0\0";

/// One labeled recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSeries {
    values: Vec<f64>,
    pub sample_rate_hz: f64,
    pub state_label: String,
    pub source_id: String,
}

impl SignalSeries {
    /// Validates that `values` is non-empty and finite and that the sample
    /// rate is positive.
    pub fn new(
        values: Vec<f64>,
        sample_rate_hz: f64,
        state_label: impl Into<String>,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySignal);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if !(sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) {
            return Err(Error::invalid(format!(
                "sample rate must be positive, got {sample_rate_hz}"
            )));
        }
        Ok(Self {
            values,
            sample_rate_hz,
            state_label: state_label.into(),
            source_id: source_id.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.state_label = label.into();
        self
    }

    pub fn with_sample_rate(mut self, hz: f64) -> Result<Self> {
        if !(hz > 0.0 && hz.is_finite()) {
            return Err(Error::invalid(format!(
                "sample rate must be positive, got {hz}"
            )));
        }
        self.sample_rate_hz = hz;
        Ok(self)
    }

    /// Concatenate several recordings of one state in the given order.
    pub fn pool(parts: &[SignalSeries], state_label: &str) -> Result<Self> {
        let first = parts.first().ok_or(Error::EmptySignal)?;
        let values: Vec<f64> = parts
            .iter()
            .flat_map(|s| s.values.iter().copied())
            .collect();
        let source = parts
            .iter()
            .map(|s| s.source_id.as_str())
            .collect::<Vec<_>>()
            .join("+");
        Self::new(values, first.sample_rate_hz, state_label, source)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalFormat {
    Csv,
    F64le,
}

impl SignalFormat {
    pub fn extension(self) -> &'static str {
        match self {
            SignalFormat::Csv => "csv",
            SignalFormat::F64le => "f64",
        }
    }

    /// Guess the format from a file extension; anything but `.f64`/`.bin`
    /// is treated as CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("f64") | Some("bin") => SignalFormat::F64le,
            _ => SignalFormat::Csv,
        }
    }
}

impl FromStr for SignalFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(SignalFormat::Csv),
            "f64le" => Ok(SignalFormat::F64le),
            other => Err(Error::invalid(format!("unknown signal format '{other}'"))),
        }
    }
}

/// Read one recording. The state label defaults to the file stem and the
/// sample rate to 1 Hz; both can be replaced afterwards.
pub fn read_signal(path: impl AsRef<Path>, format: SignalFormat) -> Result<SignalSeries> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let values = match format {
        SignalFormat::Csv => parse_csv_signal(path, &bytes)?,
        SignalFormat::F64le => parse_f64le_signal(path, &bytes)?,
    };
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    SignalSeries::new(values, 1.0, label, path.display().to_string())
}

fn parse_error(path: &Path, location: String, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        location,
        message: message.into(),
    }
}

fn parse_csv_signal(path: &Path, bytes: &[u8]) -> Result<Vec<f64>> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| parse_error(path, format!("byte {}", e.valid_up_to()), "invalid UTF-8"))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let loc = || format!("line {}", i + 1);
        let v: f64 = line
            .parse()
            .map_err(|_| parse_error(path, loc(), format!("malformed number '{line}'")))?;
        if !v.is_finite() {
            return Err(parse_error(
                path,
                loc(),
                format!("non-finite value '{line}'"),
            ));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(parse_error(path, "line 1".into(), "empty signal"));
    }
    Ok(values)
}

fn parse_f64le_signal(path: &Path, bytes: &[u8]) -> Result<Vec<f64>> {
    if bytes.len() < 16 {
        return Err(parse_error(
            path,
            format!("offset {}", bytes.len()),
            "truncated header (need 16 bytes)",
        ));
    }
    if bytes[..8] != F64LE_MAGIC {
        return Err(parse_error(
            path,
            "offset 0".into(),
            "bad magic, expected HFT1",
        ));
    }
    let count = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let body = &bytes[16..];
    if !body.len().is_multiple_of(8) || (body.len() / 8) as u64 != count {
        return Err(parse_error(
            path,
            "offset 8".into(),
            format!(
                "count mismatch: header says {count} samples, body holds {} bytes",
                body.len()
            ),
        ));
    }
    if count == 0 {
        return Err(parse_error(path, "offset 8".into(), "empty signal"));
    }
    let mut values = Vec::with_capacity(count as usize);
    for (i, chunk) in body.chunks_exact(8).enumerate() {
        let v = f64::from_le_bytes(chunk.try_into().expect("8 bytes"));
        if !v.is_finite() {
            return Err(parse_error(
                path,
                format!("offset {}", 16 + 8 * i),
                format!("non-finite value at sample {i}"),
            ));
        }
        values.push(v);
    }
    Ok(values)
}

pub fn write_signal(
    series: &SignalSeries,
    path: impl AsRef<Path>,
    format: SignalFormat,
) -> Result<()> {
    let path = path.as_ref();
    let bytes = match format {
        SignalFormat::Csv => {
            let mut out = String::with_capacity(series.len() * 20);
            let _ = writeln!(
                out,
                "# state={} sample_rate_hz={}",
                series.state_label, series.sample_rate_hz
            );
            for v in series.values() {
                let _ = writeln!(out, "{v}");
            }
            out.into_bytes()
        }
        SignalFormat::F64le => {
            let mut out = Vec::with_capacity(16 + 8 * series.len());
            out.extend_from_slice(&F64LE_MAGIC);
            out.extend_from_slice(&(series.len() as u64).to_le_bytes());
            for v in series.values() {
                out.extend_from_slice(&v.to_le_bytes());
            }
            out
        }
    };
    write_bytes(path, &bytes)
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn check_label(label: &str) -> Result<()> {
    if label.contains([',', '\n', '\r', '"']) {
        return Err(Error::invalid(format!(
            "label '{label}' cannot contain commas, quotes or newlines"
        )));
    }
    Ok(())
}

fn feature_header(cols: usize) -> String {
    let mut header: String = (1..=cols).map(|k| format!("f{k},")).collect();
    header.push_str("label\n");
    header
}

fn push_row(out: &mut String, row: &[f64], label: &str) {
    for v in row {
        let _ = write!(out, "{v},");
    }
    out.push_str(label);
    out.push('\n');
}

/// Write one state's feature matrix as `f1..fm,label` CSV.
pub fn write_feature_matrix(matrix: &FeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    check_label(&matrix.state_label)?;
    let mut out = feature_header(matrix.cols());
    for row in matrix.rows_iter() {
        push_row(&mut out, row, &matrix.state_label);
    }
    write_bytes(path.as_ref(), out.as_bytes())
}

/// Write a harmonized dataset; the label column carries state names.
pub fn write_dataset(data: &LabeledDataset, path: impl AsRef<Path>) -> Result<()> {
    for name in &data.label_names {
        check_label(name)?;
    }
    let mut out = feature_header(data.m_star);
    for (row, &label) in data.features.iter().zip(&data.labels) {
        push_row(&mut out, row, &data.label_names[label]);
    }
    write_bytes(path.as_ref(), out.as_bytes())
}

/// Feature CSV read back into memory.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<String>,
}

impl FeatureTable {
    /// Convert to a dataset, numbering labels by first appearance.
    pub fn into_dataset(self) -> Result<LabeledDataset> {
        let mut names: Vec<String> = Vec::new();
        let mut labels = Vec::with_capacity(self.labels.len());
        for l in &self.labels {
            let idx = match names.iter().position(|n| n == l) {
                Some(i) => i,
                None => {
                    names.push(l.clone());
                    names.len() - 1
                }
            };
            labels.push(idx);
        }
        LabeledDataset::new(self.rows, labels, names)
    }
}

pub fn read_feature_csv(path: impl AsRef<Path>) -> Result<FeatureTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_error(path, "line 1".into(), "missing header"))?;
    let mut columns: Vec<String> = header.split(',').map(str::to_string).collect();
    if columns.last().map(String::as_str) != Some("label") {
        return Err(parse_error(
            path,
            "line 1".into(),
            "last header column must be 'label'",
        ));
    }
    columns.pop();
    let width = columns.len();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width + 1 {
            return Err(parse_error(
                path,
                format!("line {}", i + 1),
                format!("expected {} fields, found {}", width + 1, fields.len()),
            ));
        }
        let row = fields[..width]
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| {
                    parse_error(
                        path,
                        format!("line {}", i + 1),
                        format!("malformed number '{f}'"),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
        labels.push(fields[width].to_string());
    }
    Ok(FeatureTable {
        columns,
        rows,
        labels,
    })
}

/// Serialize an evaluation report as pretty JSON with a trailing newline.
pub fn report_to_json(report: &EvalReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn write_report(report: &EvalReport, path: impl AsRef<Path>) -> Result<()> {
    let json = report_to_json(report)?;
    write_bytes(path.as_ref(), json.as_bytes())
}

pub fn read_report(path: impl AsRef<Path>) -> Result<EvalReport> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Write a 2D projection as `x,y,label` CSV.
pub fn write_projection(projection: &Projection, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::from("x,y,label\n");
    for (&(x, y), &label) in projection.points.iter().zip(&projection.labels) {
        let name = &projection.label_names[label];
        check_label(name)?;
        let _ = writeln!(out, "{x},{y},{name}");
    }
    write_bytes(path.as_ref(), out.as_bytes())
}
