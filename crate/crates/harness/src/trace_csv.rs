//! Trace CSV files.
//!
//! Header `k,F,gap,theta,gamma,G,Ghat,inner,grad_calls,seconds`, optionally
//! preceded by an `algo` column in merged files. A trace of `K` steps has
//! `K + 1` rows: row `K` holds only `F(x_K)` and its gap. Reals are written as
//! `{:.16e}` (17 significant digits, so reading back is exact); fields that do
//! not apply are left empty.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use bregman_core::SolverTrace;

use crate::{HarnessError, Result};

pub const HEADER: [&str; 10] = ["k", "F", "gap", "theta", "gamma", "G", "Ghat", "inner", "grad_calls", "seconds"];

#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub k: usize,
    pub f: f64,
    pub gap: Option<f64>,
    pub theta: Option<f64>,
    pub gamma: Option<f64>,
    pub gain: Option<f64>,
    pub local_gain: Option<f64>,
    pub inner: Option<usize>,
    pub grad_calls: Option<usize>,
    pub seconds: Option<f64>,
}

fn finite(v: f64) -> Option<f64> {
    (!v.is_nan()).then_some(v)
}

/// Rows for a trace; the gap column is filled when `f_star` is known.
pub fn trace_rows(trace: &SolverTrace, f_star: Option<f64>) -> Vec<CsvRow> {
    if trace.rows.is_empty() {
        return Vec::new();
    }
    let gap = |f: f64| f_star.map(|s| f - s);
    let mut rows: Vec<CsvRow> = trace
        .rows
        .iter()
        .map(|r| CsvRow {
            k: r.k,
            f: r.f,
            gap: gap(r.f),
            theta: finite(r.theta),
            gamma: finite(r.gamma),
            gain: finite(r.gain),
            local_gain: finite(r.local_gain),
            inner: Some(r.inner),
            grad_calls: Some(r.grad_calls),
            seconds: Some(r.seconds),
        })
        .collect();
    rows.push(CsvRow {
        k: trace.rows.len(),
        f: trace.final_f,
        gap: gap(trace.final_f),
        theta: None,
        gamma: None,
        gain: None,
        local_gain: None,
        inner: None,
        grad_calls: None,
        seconds: None,
    });
    rows
}

fn fmt_real(v: Option<f64>) -> String {
    match v {
        Some(x) if !x.is_nan() => format!("{x:.16e}"),
        _ => String::new(),
    }
}

fn fmt_int(v: Option<usize>) -> String {
    v.map(|i| i.to_string()).unwrap_or_default()
}

fn record(row: &CsvRow) -> [String; 10] {
    [
        row.k.to_string(),
        fmt_real(Some(row.f)),
        fmt_real(row.gap),
        fmt_real(row.theta),
        fmt_real(row.gamma),
        fmt_real(row.gain),
        fmt_real(row.local_gain),
        fmt_int(row.inner),
        fmt_int(row.grad_calls),
        fmt_real(row.seconds),
    ]
}

pub fn write_rows<W: Write>(out: W, rows: &[CsvRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush()?;
    Ok(())
}

/// Merged file: an `algo` column followed by the trace columns.
pub fn write_merged<W: Write>(out: W, runs: &[(String, Vec<CsvRow>)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(std::iter::once("algo").chain(HEADER))?;
    for (name, rows) in runs {
        for row in rows {
            w.write_record(std::iter::once(name.clone()).chain(record(row)))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace_csv(path: &Path, trace: &SolverTrace, f_star: Option<f64>) -> Result<()> {
    let file = File::create(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    write_rows(file, &trace_rows(trace, f_star))
}

fn parse_real(s: &str, line: usize, col: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| HarnessError::Parse {
        line,
        msg: format!("column {col}: invalid number `{s}`"),
    })
}

fn parse_int(s: &str, line: usize, col: &str) -> Result<Option<usize>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| HarnessError::Parse {
        line,
        msg: format!("column {col}: invalid integer `{s}`"),
    })
}

/// Reads a single-trace or merged file; the label is empty for single traces.
pub fn read_rows<R: Read>(input: R) -> Result<Vec<(String, CsvRow)>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let offset = usize::from(header.first().map(String::as_str) == Some("algo"));
    if header[offset..] != HEADER {
        return Err(HarnessError::Parse {
            line: 1,
            msg: format!("unexpected header {}", header.join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let field = |j: usize| rec.get(j + offset).unwrap_or("");
        let k = parse_int(field(0), line, "k")?.ok_or_else(|| HarnessError::Parse {
            line,
            msg: "missing k".into(),
        })?;
        let f = parse_real(field(1), line, "F")?.ok_or_else(|| HarnessError::Parse {
            line,
            msg: "missing F".into(),
        })?;
        let row = CsvRow {
            k,
            f,
            gap: parse_real(field(2), line, "gap")?,
            theta: parse_real(field(3), line, "theta")?,
            gamma: parse_real(field(4), line, "gamma")?,
            gain: parse_real(field(5), line, "G")?,
            local_gain: parse_real(field(6), line, "Ghat")?,
            inner: parse_int(field(7), line, "inner")?,
            grad_calls: parse_int(field(8), line, "grad_calls")?,
            seconds: parse_real(field(9), line, "seconds")?,
        };
        let label = if offset == 1 { rec.get(0).unwrap_or("").to_string() } else { String::new() };
        out.push((label, row));
    }
    Ok(out)
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let file = File::open(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    Ok(read_rows(file)?.into_iter().map(|(_, r)| r).collect())
}
