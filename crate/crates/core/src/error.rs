use thiserror::Error;

use crate::fixed_point::FixedFormat;
use crate::solver::SolverResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid fixed-point format: {0}")]
    InvalidFormat(String),

    #[error("fixed-point overflow: {value} does not fit {format}")]
    Overflow { value: f64, format: FixedFormat },

    #[error("fixed-point operands have different formats ({0} vs {1})")]
    FormatMismatch(FixedFormat, FixedFormat),

    #[error("|theta| = {theta} rad is within {guard} rad of the Euler-angle singularity")]
    GimbalLock { theta: f64, guard: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{what} did not converge within {iters} iterations")]
    Convergence { what: &'static str, iters: usize },

    #[error("solver hit its iteration cap (infeasibility {})", best.infeasibility)]
    MaxItersExceeded { best: Box<SolverResult> },

    #[error("fixed-point overflow in solver iteration {iteration}")]
    SolverOverflow { iteration: usize },

    #[error("simulation diverged at t = {time} s: {reason}")]
    SimDiverged { time: f64, reason: String },

    #[error("fixed-point overflow aborted the run at t = {time} s")]
    OverflowAbort { time: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
