//! Per-experiment summary tables.

use std::path::Path;

use crate::error::{Error, Result};

use super::experiments::{Complexity, DoaPoint, FxpAccuracy, OffsetFree, RestToRest};
use super::log::{format_decimal, SimLog};

/// A small CSV table with string cells, written with the log's number
/// formatting.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn num(v: f64) -> String {
    format_decimal(v)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, num)
}

pub fn tracking_summary(log: &SimLog, input_bound: &[f64; 3]) -> Table {
    let mut t = Table::new(&["samples", "max_tracking_error", "max_wheel_speed", "max_input_violation", "max_iters", "overflows"]);
    t.push(vec![
        log.rows.len().to_string(),
        num(log.max_tracking_error()),
        num(log.max_abs_wheel_speed()),
        num(log.max_input_violation(input_bound)),
        log.max_iters().to_string(),
        log.overflow_count().to_string(),
    ]);
    t
}

pub fn offset_free_summary(r: &OffsetFree) -> Table {
    let mut t = Table::new(&["axis", "error_with_governor", "error_without_governor"]);
    for (i, axis) in ["roll", "pitch", "yaw"].iter().enumerate() {
        t.push(vec![axis.to_string(), num(r.error_with[i]), num(r.error_without[i])]);
    }
    t
}

pub fn doa_summary(points: &[DoaPoint]) -> Table {
    let mut t = Table::new(&["roll", "pitch", "yaw", "modified", "standard"]);
    for p in points {
        t.push(vec![
            num(p.attitude[0]),
            num(p.attitude[1]),
            num(p.attitude[2]),
            u8::from(p.modified).to_string(),
            u8::from(p.standard).to_string(),
        ]);
    }
    t
}

pub fn discrepancy_series(r: &FxpAccuracy) -> Table {
    let mut t = Table::new(&["time", "roll_deg", "pitch_deg", "yaw_deg"]);
    for (row, d) in r.fixed.rows.iter().zip(&r.discrepancy_deg) {
        t.push(vec![num(row.time), num(d[0]), num(d[1]), num(d[2])]);
    }
    t
}

pub fn rest_to_rest_summary(runs: &[RestToRest]) -> Table {
    let mut t = Table::new(&["input_bound", "settling_time", "max_input_violation", "max_iters"]);
    for r in runs {
        t.push(vec![num(r.input_bound), opt(r.settling_time), num(r.max_violation), r.log.max_iters().to_string()]);
    }
    t
}

pub fn complexity_summary(rows: &[(String, Complexity)]) -> Table {
    let mut t = Table::new(&["constraints", "n", "m", "ops_per_iter", "data_bytes"]);
    for (name, c) in rows {
        t.push(vec![name.clone(), c.n.to_string(), c.m.to_string(), c.ops_per_iter.to_string(), c.data_bytes.to_string()]);
    }
    t
}
