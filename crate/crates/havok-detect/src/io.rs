//! File ingestion and plot-ready diagnostic dumps.
//!
//! Data files are CSV (comma separated, `.` decimal, optional single
//! header row auto-detected by a non-numeric first row) or JSON lines;
//! generated files carry the sample value in the first column and an
//! optional 0/1 truth flag in the second.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::detector::DetectionReport;
use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::synth::GroundTruth;
use crate::threshold::{Histogram, ThresholdModel};

/// Input format of a data file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputFormat {
    #[default]
    Csv,
    JsonLines,
}

/// Column selector: by header name or zero-based index.
#[derive(Debug, Clone)]
pub enum ColumnSel {
    Index(usize),
    Name(String),
}

impl Default for ColumnSel {
    fn default() -> Self {
        ColumnSel::Index(0)
    }
}

impl std::str::FromStr for ColumnSel {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnSel::Index(i),
            Err(_) => ColumnSel::Name(s.to_string()),
        })
    }
}

/// Where and how to read a series.
#[derive(Debug, Clone)]
pub struct InputSpec {
    pub path: PathBuf,
    pub format: InputFormat,
    pub value_column: ColumnSel,
    /// Sample period in seconds.
    pub sample_period: f64,
    /// Optional 0/1 truth column for scoring.
    pub truth_column: Option<ColumnSel>,
}

/// A loaded series plus the truth flags, when the file carries them.
#[derive(Debug, Clone)]
pub struct LoadedSeries {
    pub series: TimeSeries,
    /// Indices of rows whose truth flag was nonzero.
    pub truth_indices: Option<Vec<usize>>,
}

fn resolve_column(sel: &ColumnSel, header: Option<&[String]>, line: usize) -> Result<usize> {
    match sel {
        ColumnSel::Index(i) => Ok(*i),
        ColumnSel::Name(name) => header
            .and_then(|h| h.iter().position(|c| c == name))
            .ok_or_else(|| Error::Parse {
                line,
                message: format!("column '{name}' not found in header"),
            }),
    }
}

fn parse_value(field: &str, line: usize) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("'{field}' is not a number"),
    })
}

/// Read a series (and optional truth flags) from a CSV or JSON-lines file.
pub fn read_series(spec: &InputSpec) -> Result<LoadedSeries> {
    match spec.format {
        InputFormat::Csv => read_csv(spec),
        InputFormat::JsonLines => read_jsonl(spec),
    }
}

fn read_csv(spec: &InputSpec) -> Result<LoadedSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(&spec.path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("cannot open {}: {e}", spec.path.display()),
            )),
            _ => Error::Parse {
                line: 0,
                message: e.to_string(),
            },
        })?;

    let mut records: Vec<csv::StringRecord> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        records.push(record);
    }
    if records.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "file has no rows".into(),
        });
    }

    // header detection: a non-numeric first row is a header
    let first_numeric = records[0]
        .iter()
        .next()
        .map(|f| f.trim().parse::<f64>().is_ok())
        .unwrap_or(false);
    let (header, data_start): (Option<Vec<String>>, usize) = if first_numeric {
        (None, 0)
    } else {
        (
            Some(records[0].iter().map(|s| s.trim().to_string()).collect()),
            1,
        )
    };

    let value_col = resolve_column(&spec.value_column, header.as_deref(), 1)?;
    let truth_col = spec
        .truth_column
        .as_ref()
        .map(|sel| resolve_column(sel, header.as_deref(), 1))
        .transpose()?;

    let mut samples = Vec::with_capacity(records.len());
    let mut truth = truth_col.map(|_| Vec::new());
    for (i, record) in records.iter().enumerate().skip(data_start) {
        let line = i + 1;
        let field = record.get(value_col).ok_or_else(|| Error::Parse {
            line,
            message: format!("missing column {value_col}"),
        })?;
        samples.push(parse_value(field, line)?);
        if let (Some(col), Some(flags)) = (truth_col, truth.as_mut()) {
            let field = record.get(col).ok_or_else(|| Error::Parse {
                line,
                message: format!("missing truth column {col}"),
            })?;
            if parse_value(field, line)? != 0.0 {
                flags.push(samples.len() - 1);
            }
        }
    }

    Ok(LoadedSeries {
        series: TimeSeries::new(samples, spec.sample_period)?,
        truth_indices: truth,
    })
}

fn read_jsonl(spec: &InputSpec) -> Result<LoadedSeries> {
    let file = File::open(&spec.path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("cannot open {}: {e}", spec.path.display()),
        ))
    })?;
    let reader = BufReader::new(file);
    let mut samples = Vec::new();
    let mut truth: Option<Vec<usize>> = spec.truth_column.as_ref().map(|_| Vec::new());
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let field = |sel: &ColumnSel| -> Result<f64> {
            let v = match sel {
                ColumnSel::Index(idx) => value.get(idx),
                ColumnSel::Name(name) => value.get(name),
            };
            v.and_then(|v| v.as_f64()).ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("no numeric field {sel:?}"),
            })
        };
        samples.push(field(&spec.value_column)?);
        if let (Some(sel), Some(flags)) = (spec.truth_column.as_ref(), truth.as_mut()) {
            if field(sel)? != 0.0 {
                flags.push(samples.len() - 1);
            }
        }
    }
    Ok(LoadedSeries {
        series: TimeSeries::new(samples, spec.sample_period)?,
        truth_indices: truth,
    })
}

/// Write a generated series as CSV: `value` column plus a 0/1 `truth`
/// flag column when ground truth is given.
pub fn write_series_csv(
    path: &Path,
    series: &TimeSeries,
    truth: Option<&GroundTruth>,
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let flags: Option<Vec<u8>> = truth.map(|t| {
        let mut flags = vec![0u8; series.len()];
        for &i in &t.event_indices {
            if i < flags.len() {
                flags[i] = 1;
            }
        }
        flags
    });
    match &flags {
        Some(_) => writeln!(out, "value,truth")?,
        None => writeln!(out, "value")?,
    }
    for (i, v) in series.samples().iter().enumerate() {
        match &flags {
            Some(f) => writeln!(out, "{v},{}", f[i])?,
            None => writeln!(out, "{v}")?,
        }
    }
    Ok(())
}

/// One singular value per line, for spectrum plots.
pub fn write_spectrum_csv(path: &Path, singular_values: &[f64]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for s in singular_values {
        writeln!(out, "{s}")?;
    }
    Ok(())
}

/// Three-column decision trace `(v, r_force, d)`.
pub fn write_trace_csv(path: &Path, report: &DetectionReport) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "v,r_force,d")?;
    let t = &report.trace;
    for i in 0..t.d.len() {
        writeln!(
            out,
            "{},{},{}",
            t.v.samples()[i],
            t.r_force.samples()[i],
            t.d.samples()[i]
        )?;
    }
    Ok(())
}

/// Histogram with the fitted mixture curve:
/// `(bin_center, empirical_density, fitted_density)`.
pub fn write_histogram_csv(path: &Path, hist: &Histogram, model: &ThresholdModel) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "bin_center,empirical_density,fitted_density")?;
    for i in 0..hist.bins() {
        let c = hist.center(i);
        writeln!(out, "{c},{},{}", hist.density()[i], model.density(c))?;
    }
    Ok(())
}

/// Write the JSON report.
pub fn write_report(path: &Path, report: &DetectionReport, include_traces: bool) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(report.to_json(include_traces).as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}
