// SPDX-License-Identifier: MIT OR Apache-2.0

//! CSV readers and writers for series, regions, coverage reports and
//! histogram samples.
//!
//! Floats are written with 17 significant digits so that a write/read
//! round trip is lossless. Rows end in `\n`.

use std::io::{Read, Write};

use crate::confidence::{ConfidenceRegion, RegionKind};
use crate::error::{Error, Result};
use crate::gaussgen::TimeSeries;
use crate::montecarlo::CoverageReport;

pub const SERIES_HEADER: [&str; 2] = ["index", "value"];
pub const REGION_HEADER: [&str; 6] = ["x", "lower", "upper", "center", "method", "level"];
pub const REPORT_HEADER: [&str; 8] = [
    "hurst",
    "N",
    "method",
    "hurst_mode",
    "point",
    "coverage",
    "mean_width",
    "reps_failed",
];
pub const HISTOGRAM_HEADER: [&str; 2] = ["rep", "value"];

/// Shortest text that still carries 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// Writes `index,value` rows, plus a `driver` column when the series carries
/// its Gaussian driver.
pub fn write_series<W: Write>(out: W, series: &TimeSeries) -> Result<()> {
    let mut w = writer(out);
    match &series.driver {
        Some(driver) => {
            w.write_record(["index", "value", "driver"])?;
            for (i, (v, d)) in series.values.iter().zip(driver).enumerate() {
                w.write_record([i.to_string(), format_f64(*v), format_f64(*d)])?;
            }
        }
        None => {
            w.write_record(SERIES_HEADER)?;
            for (i, v) in series.values.iter().enumerate() {
                w.write_record([i.to_string(), format_f64(*v)])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn parse_float(field: &str, line: usize, column: &str) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| {
        Error::Format(format!(
            "line {line}: cannot parse {column} '{field}' as a number"
        ))
    })
}

/// Reads a series written by [`write_series`]. The `index` column is
/// optional; a single unnamed numeric column is also accepted.
pub fn read_series<R: Read>(input: R) -> Result<TimeSeries> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut records = r.records();
    let Some(first) = records.next() else {
        return Err(Error::Format("empty series file".into()));
    };
    let first = first?;
    let has_header = first.iter().any(|f| f.parse::<f64>().is_err());
    let (value_col, driver_col) = if has_header {
        let find = |name: &str| first.iter().position(|f| f.eq_ignore_ascii_case(name));
        let value = find("value")
            .ok_or_else(|| Error::Format("series header lacks a 'value' column".into()))?;
        (value, find("driver"))
    } else if first.len() >= 2 {
        (1, None)
    } else {
        (0, None)
    };

    let mut values = Vec::new();
    let mut driver = driver_col.map(|_| Vec::new());
    let mut push = |record: &csv::StringRecord, line: usize| -> Result<()> {
        let field = record
            .get(value_col)
            .ok_or_else(|| Error::Format(format!("line {line}: missing value column")))?;
        values.push(parse_float(field, line, "value")?);
        if let (Some(col), Some(d)) = (driver_col, driver.as_mut()) {
            let field = record
                .get(col)
                .ok_or_else(|| Error::Format(format!("line {line}: missing driver column")))?;
            d.push(parse_float(field, line, "driver")?);
        }
        Ok(())
    };
    if !has_header {
        push(&first, 1)?;
    }
    for (i, record) in records.enumerate() {
        push(&record?, i + 2)?;
    }
    if values.is_empty() {
        return Err(Error::Format("series file has no data rows".into()));
    }
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Format(format!("non-finite value at index {pos}")));
    }
    Ok(TimeSeries {
        values,
        driver,
        ..TimeSeries::default()
    })
}

/// One row per grid point; a quantile interval is one row with `x = p`.
pub fn write_region<W: Write>(out: W, region: &ConfidenceRegion) -> Result<()> {
    let mut w = writer(out);
    w.write_record(REGION_HEADER)?;
    let method = region.method.as_str();
    let level = format_f64(region.level);
    for pt in &region.points {
        let x = match region.kind {
            RegionKind::Band => pt.x,
            RegionKind::QuantileInterval { p } => p,
        };
        w.write_record([
            format_f64(x).as_str(),
            &format_f64(pt.lower),
            &format_f64(pt.upper),
            &format_f64(pt.center),
            method,
            &level,
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_report<W: Write>(out: W, report: &CoverageReport) -> Result<()> {
    let mut w = writer(out);
    w.write_record(REPORT_HEADER)?;
    for c in &report.cells {
        w.write_record([
            format_f64(c.hurst).as_str(),
            &c.length.to_string(),
            c.method.as_str(),
            c.hurst_mode.as_str(),
            &format_f64(c.point),
            &format_f64(c.coverage),
            &format_f64(c.mean_width),
            &c.reps_failed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_histogram<W: Write>(out: W, samples: &[f64]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(HISTOGRAM_HEADER)?;
    for (i, v) in samples.iter().enumerate() {
        w.write_record([i.to_string(), format_f64(*v)])?;
    }
    w.flush()?;
    Ok(())
}
