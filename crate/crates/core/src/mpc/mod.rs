//! MPC problem setup: weights and horizons, constraint description,
//! condensing into a dense QP, and the reference-side integrator.
//!
//! The decision vector of the modified formulation stacks
//! `(du_0 .. du_{Nc-1}, xv_0 .. xv_{Nc-1})`: input increments followed by the
//! virtual state offsets. Both are held at their last value past the control
//! horizon. The standard formulation keeps only the increments.

mod condense;
mod dare;
mod governor;

pub use condense::{condense, update_qp_vectors, CondensedQp, QpVectors};
pub use dare::{dare_residual, solve_dare, terminal_weight_dare};
pub use governor::{governor_update, ReferenceGovernor};

use nalgebra::{DMatrix, DVector, Matrix3, SMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::control_model::{DiscreteModel, ModelState, StateMatrix, NU, NX};
use crate::error::{Error, Result};

pub type InputWeight = SMatrix<f64, NU, NU>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    /// Input increments plus virtual state offsets.
    #[default]
    Modified,
    /// Plain tracking MPC over input increments.
    Standard,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpcConfig {
    pub horizon: usize,
    pub control_horizon: usize,
    pub q1: StateMatrix,
    pub q2: StateMatrix,
    pub r: InputWeight,
    pub pf: StateMatrix,
    pub ts: f64,
    pub formulation: Formulation,
}

impl MpcConfig {
    /// Horizons 10/2, `Q1 = diag(100 I, 0.1 I)`, `Q2 = 50 I`, `R = 0.01 I` and
    /// `Pf` from the Riccati equation of `(A, B, Q1, R)`.
    pub fn reference(model: &DiscreteModel) -> Result<Self> {
        let q1 = StateMatrix::from_diagonal(&ModelState::from_column_slice(&[100.0, 100.0, 100.0, 0.1, 0.1, 0.1]));
        let r = InputWeight::identity() * 0.01;
        let pf = terminal_weight_dare(model, &q1, &r)?;
        Ok(Self {
            horizon: 10,
            control_horizon: 2,
            q1,
            q2: StateMatrix::identity() * 50.0,
            r,
            pf,
            ts: model.ts,
            formulation: Formulation::Modified,
        })
    }

    pub fn with_formulation(mut self, formulation: Formulation) -> Self {
        self.formulation = formulation;
        self
    }

    /// Number of primal variables of the condensed QP.
    pub fn num_primal(&self) -> usize {
        match self.formulation {
            Formulation::Modified => (NU + NX) * self.control_horizon,
            Formulation::Standard => NU * self.control_horizon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.control_horizon < 1 || self.control_horizon > self.horizon {
            return Err(Error::Parameter(format!(
                "need 1 <= Nc <= N, got Nc = {}, N = {}",
                self.control_horizon, self.horizon
            )));
        }
        if !(self.ts > 0.0) {
            return Err(Error::Parameter("sampling period must be positive".into()));
        }
        for (name, m) in [("Q1", &self.q1), ("Q2", &self.q2), ("Pf", &self.pf)] {
            check_psd(name, &DMatrix::from_column_slice(NX, NX, m.as_slice()))?;
        }
        let r = DMatrix::from_column_slice(NU, NU, self.r.as_slice());
        check_symmetric("R", &r)?;
        if r.cholesky().is_none() {
            return Err(Error::Parameter("R must be positive definite".into()));
        }
        Ok(())
    }
}

fn check_symmetric(name: &str, m: &DMatrix<f64>) -> Result<()> {
    let scale = m.amax().max(1.0);
    if (m - m.transpose()).amax() > 1e-9 * scale {
        return Err(Error::Parameter(format!("{name} must be symmetric")));
    }
    Ok(())
}

fn check_psd(name: &str, m: &DMatrix<f64>) -> Result<()> {
    check_symmetric(name, m)?;
    let scale = m.amax().max(1.0);
    let min_eig = m.clone().symmetric_eigen().eigenvalues.min();
    if min_eig < -1e-9 * scale {
        return Err(Error::Parameter(format!("{name} must be positive semidefinite (min eigenvalue {min_eig})")));
    }
    Ok(())
}

/// Prediction steps a constraint block applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepRange {
    /// `k = 0 .. Nc-1` (inputs and input increments).
    Control,
    /// `k = 1 .. N` (predicted states).
    Prediction,
}

impl StepRange {
    pub fn steps(&self, horizon: usize, control_horizon: usize) -> std::ops::Range<usize> {
        match self {
            StepRange::Control => 0..control_horizon,
            StepRange::Prediction => 1..horizon + 1,
        }
    }
}

/// `lo <= Cc x_k + Dc u_k + Ec du_k <= hi` for every step in `steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintBlock {
    pub name: String,
    pub cc: DMatrix<f64>,
    pub dc: DMatrix<f64>,
    pub ec: DMatrix<f64>,
    pub lo: DVector<f64>,
    pub hi: DVector<f64>,
    pub steps: StepRange,
}

impl ConstraintBlock {
    fn boxed(name: &str, cc: DMatrix<f64>, dc: DMatrix<f64>, ec: DMatrix<f64>, lo: &[f64], hi: &[f64], steps: StepRange) -> Self {
        Self {
            name: name.to_string(),
            cc,
            dc,
            ec,
            lo: DVector::from_column_slice(lo),
            hi: DVector::from_column_slice(hi),
            steps,
        }
    }

    pub fn input_bounds(lo: [f64; 3], hi: [f64; 3]) -> Self {
        Self::boxed(
            "u",
            DMatrix::zeros(3, NX),
            DMatrix::identity(3, NU),
            DMatrix::zeros(3, NU),
            &lo,
            &hi,
            StepRange::Control,
        )
    }

    pub fn input_rate_bounds(max: [f64; 3]) -> Self {
        Self::boxed(
            "du",
            DMatrix::zeros(3, NX),
            DMatrix::zeros(3, NU),
            DMatrix::identity(3, NU),
            &max.map(|v| -v),
            &max,
            StepRange::Control,
        )
    }

    pub fn attitude_bounds(max: [f64; 3]) -> Self {
        let mut cc = DMatrix::zeros(3, NX);
        cc.view_mut((0, 0), (3, 3)).fill_with_identity();
        Self::boxed("attitude", cc, DMatrix::zeros(3, NU), DMatrix::zeros(3, NU), &max.map(|v| -v), &max, StepRange::Prediction)
    }

    pub fn wheel_speed_bounds(max: [f64; 3]) -> Self {
        let mut cc = DMatrix::zeros(3, NX);
        cc.view_mut((0, 3), (3, 3)).fill_with_identity();
        Self::boxed("wheel_speed", cc, DMatrix::zeros(3, NU), DMatrix::zeros(3, NU), &max.map(|v| -v), &max, StepRange::Prediction)
    }

    pub fn rows(&self) -> usize {
        self.lo.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.rows();
        let dims_ok = self.hi.len() == k
            && self.cc.shape() == (k, NX)
            && self.dc.shape() == (k, NU)
            && self.ec.shape() == (k, NU);
        if !dims_ok {
            return Err(Error::Dimension(format!("constraint block '{}' has inconsistent shapes", self.name)));
        }
        if self.lo.iter().zip(self.hi.iter()).any(|(l, h)| !(l <= h)) {
            return Err(Error::Parameter(format!("constraint block '{}' needs lo <= hi", self.name)));
        }
        if self.ec.amax() > 0.0 && self.steps != StepRange::Control {
            return Err(Error::Parameter(format!(
                "constraint block '{}': input increments only exist inside the control horizon",
                self.name
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConstraintSpec {
    pub blocks: Vec<ConstraintBlock>,
}

impl ConstraintSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, block: ConstraintBlock) -> Self {
        self.blocks.push(block);
        self
    }

    /// Two QP rows (upper and lower) per bound row and step.
    pub fn num_rows(&self, horizon: usize, control_horizon: usize) -> usize {
        self.blocks
            .iter()
            .map(|b| 2 * b.rows() * b.steps.steps(horizon, control_horizon).len())
            .sum()
    }
}

/// Attitude reference plus zero wheel-speed reference.
pub fn lift_reference(r: &Vector3<f64>) -> ModelState {
    let mut rt = ModelState::zeros();
    rt.fixed_rows_mut::<3>(0).copy_from(r);
    rt
}

/// `u = u_prev + du_0`.
pub fn extract_control(z: &DVector<f64>, u_prev: &Vector3<f64>) -> Vector3<f64> {
    u_prev + Vector3::new(z[0], z[1], z[2])
}

/// Diagonal weight helper for configuration code.
pub fn diag6(d: [f64; 6]) -> StateMatrix {
    StateMatrix::from_diagonal(&ModelState::from_column_slice(&d))
}

pub fn diag3(d: [f64; 3]) -> InputWeight {
    Matrix3::from_diagonal(&Vector3::from(d))
}
