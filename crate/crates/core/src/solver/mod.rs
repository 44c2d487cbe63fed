//! Dual gradient projection QP solver, generic over the scalar arithmetic so
//! the same iteration runs in double precision or emulated fixed point.

mod arith;
mod gpd;
mod lipschitz;

pub use arith::{Arithmetic, ArithmeticKind, FixedPoint, Float64, Instrumented};
pub use gpd::{GpdSolver, Iterate, SolveStatus, SolverConfig, SolverResult};
pub use lipschitz::{compute_lipschitz, largest_eigenvalue, LIPSCHITZ_INFLATION};

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::mpc::CondensedQp;

/// A solver whose arithmetic is chosen at runtime.
#[derive(Debug)]
pub enum QpSolver {
    Float(GpdSolver<Float64>),
    Fixed(GpdSolver<FixedPoint>),
}

impl QpSolver {
    pub fn new(hessian: &DMatrix<f64>, constraints: &DMatrix<f64>, cfg: SolverConfig, kind: ArithmeticKind) -> Result<Self> {
        Ok(match kind.format()? {
            None => QpSolver::Float(GpdSolver::new(hessian, constraints, cfg, Float64)?),
            Some(fmt) => QpSolver::Fixed(GpdSolver::new(hessian, constraints, cfg, FixedPoint(fmt))?),
        })
    }

    pub fn for_qp(qp: &CondensedQp, cfg: SolverConfig, kind: ArithmeticKind) -> Result<Self> {
        Self::new(&qp.hessian, &qp.constraints, cfg, kind)
    }

    pub fn solve(&self, h: &DVector<f64>, d: &DVector<f64>, warm_y: Option<&DVector<f64>>) -> Result<SolverResult> {
        match self {
            QpSolver::Float(s) => s.solve(h, d, warm_y),
            QpSolver::Fixed(s) => s.solve(h, d, warm_y),
        }
    }

    pub fn solve_observed<F: FnMut(&Iterate<'_>)>(
        &self,
        h: &DVector<f64>,
        d: &DVector<f64>,
        warm_y: Option<&DVector<f64>>,
        observer: F,
    ) -> Result<SolverResult> {
        match self {
            QpSolver::Float(s) => s.solve_observed(h, d, warm_y, observer),
            QpSolver::Fixed(s) => s.solve_observed(h, d, warm_y, observer),
        }
    }

    pub fn num_primal(&self) -> usize {
        match self {
            QpSolver::Float(s) => s.num_primal(),
            QpSolver::Fixed(s) => s.num_primal(),
        }
    }

    pub fn num_dual(&self) -> usize {
        match self {
            QpSolver::Float(s) => s.num_dual(),
            QpSolver::Fixed(s) => s.num_dual(),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match self {
            QpSolver::Float(s) => s.lipschitz(),
            QpSolver::Fixed(s) => s.lipschitz(),
        }
    }
}
