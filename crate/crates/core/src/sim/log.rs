use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// CSV header, in field order.
pub const LOG_COLUMNS: [&str; 23] = [
    "time",
    "roll",
    "pitch",
    "yaw",
    "omega_1",
    "omega_2",
    "omega_3",
    "wheel_1",
    "wheel_2",
    "wheel_3",
    "u_1",
    "u_2",
    "u_3",
    "r_1",
    "r_2",
    "r_3",
    "r_bar_1",
    "r_bar_2",
    "r_bar_3",
    "iters",
    "ops",
    "infeasibility",
    "overflow",
];

/// One controller sample. State columns are the plant state at the sample
/// instant; `u` is the input then applied over the following period.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRow {
    pub time: f64,
    pub attitude: [f64; 3],
    pub body_rate: [f64; 3],
    pub wheel_speed: [f64; 3],
    pub u: [f64; 3],
    /// Reference after the governor.
    pub reference: [f64; 3],
    pub true_reference: [f64; 3],
    pub iters: u64,
    pub ops: u64,
    pub infeasibility: f64,
    pub overflow: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimLog {
    pub rows: Vec<LogRow>,
}

impl SimLog {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.time).collect()
    }

    pub fn max_iters(&self) -> u64 {
        self.rows.iter().map(|r| r.iters).max().unwrap_or(0)
    }

    pub fn overflow_count(&self) -> usize {
        self.rows.iter().filter(|r| r.overflow).count()
    }

    /// Largest amount by which any logged input leaves `[-bound, bound]`.
    pub fn max_input_violation(&self, bound: &[f64; 3]) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| (0..3).map(move |i| r.u[i].abs() - bound[i]))
            .fold(0.0, f64::max)
    }

    pub fn max_abs_wheel_speed(&self) -> f64 {
        self.rows.iter().flat_map(|r| r.wheel_speed).fold(0.0, |a, w| a.max(w.abs()))
    }

    pub fn max_tracking_error(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| (0..3).map(move |i| (r.attitude[i] - r.true_reference[i]).abs()))
            .fold(0.0, f64::max)
    }

    fn record(row: &LogRow) -> Vec<String> {
        let mut out = vec![format_decimal(row.time)];
        for group in [&row.attitude, &row.body_rate, &row.wheel_speed, &row.u, &row.reference, &row.true_reference] {
            out.extend(group.iter().map(|v| format_decimal(*v)));
        }
        out.push(row.iters.to_string());
        out.push(row.ops.to_string());
        out.push(format_decimal(row.infeasibility));
        out.push(u8::from(row.overflow).to_string());
        out
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(LOG_COLUMNS).map_err(csv_err)?;
        for row in &self.rows {
            wr.write_record(Self::record(row)).map_err(csv_err)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let header = rd.headers().map_err(csv_err)?;
        if header.iter().ne(LOG_COLUMNS) {
            return Err(Error::Io(format!("unexpected log header: {header:?}")));
        }
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(csv_err)?;
            let f = |i: usize| -> Result<f64> {
                rec[i].parse().map_err(|_| Error::Io(format!("bad number {:?} in column {}", &rec[i], LOG_COLUMNS[i])))
            };
            let triple = |i: usize| -> Result<[f64; 3]> { Ok([f(i)?, f(i + 1)?, f(i + 2)?]) };
            let int = |i: usize| -> Result<u64> {
                rec[i].parse().map_err(|_| Error::Io(format!("bad integer {:?} in column {}", &rec[i], LOG_COLUMNS[i])))
            };
            rows.push(LogRow {
                time: f(0)?,
                attitude: triple(1)?,
                body_rate: triple(4)?,
                wheel_speed: triple(7)?,
                u: triple(10)?,
                reference: triple(13)?,
                true_reference: triple(16)?,
                iters: int(19)?,
                ops: int(20)?,
                infeasibility: f(21)?,
                overflow: int(22)? != 0,
            });
        }
        Ok(SimLog { rows })
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_log(log: &SimLog, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    log.write_csv(std::io::BufWriter::new(file))
}

pub fn read_log(path: impl AsRef<Path>) -> Result<SimLog> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    SimLog::read_csv(std::io::BufReader::new(file))
}

/// Plain decimal notation (no exponent) rounded to 12 significant digits.
pub fn format_decimal(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0.00000000000".into();
    }
    let sci = format!("{:.11e}", v.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let sign = if v < 0.0 { "-" } else { "" };
    let body = if exp >= 11 {
        format!("{digits}{}", "0".repeat((exp - 11) as usize))
    } else if exp >= 0 {
        let (int, frac) = digits.split_at(exp as usize + 1);
        format!("{int}.{frac}")
    } else {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    };
    format!("{sign}{body}")
}
