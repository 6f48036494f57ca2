//! Number formatting and the two file formats.

use std::io::{Read, Write};

use fracmix_core::assembly::XGrid;
use fracmix_core::caputo::TimeGrid;
use fracmix_core::modes::ProblemParameters;
use fracmix_core::scan::LevelMap;
use fracmix_core::verify::{Grids, SampledField};
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: &str = "1";

/// 17 significant digits, `.` decimal point; `nan` for NaN.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_level_map<W: Write>(map: &LevelMap, out: W) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["p", "q", "k", "delta", "sign"])?;
    for c in &map.cells {
        let (delta, sign) = match (c.delta, c.sign()) {
            (Some(d), Some(s)) => (num(d), s.to_string()),
            _ => ("nan".to_string(), "unknown".to_string()),
        };
        w.write_record([num(c.p), num(c.q), c.k.to_string(), delta, sign])?;
    }
    w.flush()?;
    Ok(())
}

/// Solution grid: the lower branch for `t` from `-p` to `0`, then the
/// upper branch from `0` to `q`, so the `t = 0` line appears twice (lower
/// first). Within a time line `x` increases.
pub fn write_solution_grid<W: Write>(field: &SampledField, out: W) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["x", "t", "u", "f"])?;
    let xs = field.grids.x.nodes();
    for (grid, rows) in [(&field.grids.lower, &field.lower), (&field.grids.upper, &field.upper)] {
        for (t, row) in grid.nodes().into_iter().zip(rows) {
            for ((x, u), f) in xs.iter().zip(row).zip(&field.source) {
                w.write_record([num(*x), num(t), num(*u), num(*f)])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_solution_grid`].
pub fn read_solution_grid<R: Read>(alpha: f64, beta: f64, input: R) -> CliResult<SampledField> {
    let mut r = csv::ReaderBuilder::new().from_reader(input);
    if r.headers()?.iter().collect::<Vec<_>>() != ["x", "t", "u", "f"] {
        return Err(CliError::usage("solution grid header must be x,t,u,f"));
    }
    let mut rows: Vec<[f64; 4]> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let mut v = [0.0; 4];
        for (slot, field) in v.iter_mut().zip(rec.iter()) {
            *slot = field
                .trim()
                .parse()
                .map_err(|_| CliError::usage(format!("not a number: {field}")))?;
        }
        rows.push(v);
    }
    let nx = rows.iter().take_while(|r| r[1] == rows[0][1]).count();
    if nx < 5 || !rows.len().is_multiple_of(nx) {
        return Err(CliError::usage("solution grid is not rectangular"));
    }
    let lines: Vec<&[[f64; 4]]> = rows.chunks(nx).collect();
    let times: Vec<f64> = lines.iter().map(|l| l[0][1]).collect();
    let split = times
        .iter()
        .position(|&t| t == 0.0)
        .ok_or_else(|| CliError::usage("solution grid has no t = 0 line"))?;
    if times.get(split + 1) != Some(&0.0) {
        return Err(CliError::usage("solution grid needs the t = 0 line once per branch"));
    }
    let (lower, upper) = lines.split_at(split + 1);
    let p = -times[0];
    let q = times[times.len() - 1];
    let params = ProblemParameters::new(alpha, beta, p, q)?;
    let grids = Grids {
        x: XGrid::new(nx - 1)?,
        upper: TimeGrid::new(0.0, q, upper.len())?,
        lower: TimeGrid::new(-p, 0.0, lower.len())?,
    };
    let values = |ls: &[&[[f64; 4]]]| -> Vec<Vec<f64>> { ls.iter().map(|l| l.iter().map(|r| r[2]).collect()).collect() };
    let source = lines[0].iter().map(|r| r[3]).collect();
    Ok(SampledField::new(params, grids, values(upper), values(lower), source)?)
}
