//! CSV trace files.
//!
//! Header `iter,agent,x0,..,x{n-1},f,step,best_f,max_dist`; one row per agent
//! per iteration, iterations ascending, agents (1-based) ascending within an
//! iteration. Floats use Rust's shortest round-trip formatting, so parsing a
//! file recovers bit-identical values.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::IterationRecord;

/// Shortest round-trip text for `v`; exponent form outside `[1e-5, 1e16)`.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

pub fn header(dim: usize) -> String {
    let mut h = String::from("iter,agent");
    for j in 0..dim {
        let _ = write!(h, ",x{j}");
    }
    h.push_str(",f,step,best_f,max_dist");
    h
}

/// Renders the trace as CSV text.
pub fn render_trace(trace: &[IterationRecord]) -> Result<String> {
    let Some(first) = trace.first() else {
        return Err(Error::config("cannot write an empty trace"));
    };
    let dim = first.positions.first().map_or(0, |p| p.dim());
    let mut out = header(dim);
    out.push('\n');
    for rec in trace {
        for (a, x) in rec.positions.iter().enumerate() {
            let _ = write!(out, "{},{}", rec.iteration, a + 1);
            for c in x.coords() {
                let _ = write!(out, ",{}", format_float(*c));
            }
            for v in [
                rec.values[a],
                rec.step_lengths[a],
                rec.best_value,
                rec.max_pairwise_distance,
            ] {
                let _ = write!(out, ",{}", format_float(v));
            }
            out.push('\n');
        }
    }
    Ok(out)
}

pub fn write_trace<W: Write>(trace: &[IterationRecord], mut out: W) -> io::Result<()> {
    let text = render_trace(trace)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e.to_string()))?;
    out.write_all(text.as_bytes())
}

pub fn write_trace_csv(trace: &[IterationRecord], path: &Path) -> Result<()> {
    let text = render_trace(trace)?;
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iter: u64,
    /// 1-based agent index.
    pub agent: usize,
    pub coords: Vec<f64>,
    pub f: f64,
    pub step: f64,
    pub best_f: f64,
    pub max_dist: f64,
}

fn parse_float(field: &str, line: usize, name: &str) -> Result<f64> {
    let v: f64 = field
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: {name} is not a number: {field:?}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("line {line}: {name} is not finite")));
    }
    Ok(v)
}

/// Parses a trace file produced by [`write_trace_csv`].
pub fn parse_trace(text: &str) -> Result<Vec<TraceRow>> {
    let mut lines = text.lines();
    let head = lines
        .next()
        .ok_or_else(|| Error::Parse("empty trace".into()))?;
    let columns = head.split(',').count();
    if columns < 7 || head != header(columns - 6) {
        return Err(Error::Parse(format!("unexpected header: {head:?}")));
    }
    let dim = columns - 6;
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let lineno = n + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns {
            return Err(Error::Parse(format!(
                "line {lineno}: expected {columns} fields, found {}",
                fields.len()
            )));
        }
        let iter = fields[0]
            .parse()
            .map_err(|_| Error::Parse(format!("line {lineno}: bad iteration {:?}", fields[0])))?;
        let agent: usize = fields[1]
            .parse()
            .map_err(|_| Error::Parse(format!("line {lineno}: bad agent {:?}", fields[1])))?;
        if agent == 0 {
            return Err(Error::Parse(format!("line {lineno}: agents are 1-based")));
        }
        let coords = fields[2..2 + dim]
            .iter()
            .enumerate()
            .map(|(j, s)| parse_float(s, lineno, &format!("x{j}")))
            .collect::<Result<Vec<_>>>()?;
        let rest = &fields[2 + dim..];
        rows.push(TraceRow {
            iter,
            agent,
            coords,
            f: parse_float(rest[0], lineno, "f")?,
            step: parse_float(rest[1], lineno, "step")?,
            best_f: parse_float(rest[2], lineno, "best_f")?,
            max_dist: parse_float(rest[3], lineno, "max_dist")?,
        });
    }
    Ok(rows)
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRow>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_trace(&text)
}
