//! Trace CSV with columns `iter, point_repr, residual, alpha_ok, cauchy_window_max`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::PointRepr;
use crate::picard::IterationTrace;

/// One step `x_n -> x_{n+1}`; `alpha_ok` is empty when no weight was attached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub point_repr: String,
    pub residual: f64,
    pub alpha_ok: Option<bool>,
    pub cauchy_window_max: f64,
}

pub fn trace_rows<P: PointRepr>(trace: &IterationTrace<P>) -> Vec<TraceRow> {
    trace
        .residuals
        .iter()
        .enumerate()
        .map(|(n, r)| TraceRow {
            iter: n,
            point_repr: trace.iterates[n].repr(),
            residual: *r,
            alpha_ok: trace.alpha_flags.as_ref().map(|f| f[n]),
            cauchy_window_max: trace.cauchy_window_max[n],
        })
        .collect()
}

pub fn write_trace<W: Write>(rows: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["iter", "point_repr", "residual", "alpha_ok", "cauchy_window_max"])
        .map_err(|e| Error::Format(e.to_string()))?;
    for row in rows {
        w.serialize(row).map_err(|e| Error::Format(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

/// Parses a trace; a file without rows is a format error.
pub fn read_trace<R: Read>(input: R) -> Result<Vec<TraceRow>> {
    let mut reader = csv::Reader::from_reader(input);
    let rows = reader
        .deserialize::<TraceRow>()
        .enumerate()
        .map(|(k, r)| r.map_err(|e| Error::Format(format!("trace row {}: {e}", k + 1))))
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(Error::Format("trace has no rows".into()));
    }
    Ok(rows)
}
