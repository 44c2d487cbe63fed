//! Reduced-order linear prediction model.
//!
//! State `(phi, theta, psi, a1', a2', a3')`: attitude plus wheel speeds, with
//! body rates eliminated through momentum exchange. The continuous `Ac` is
//! nilpotent (`Ac^2 = 0`), so the zero-order-hold discretization is exact in
//! closed form.

use nalgebra::{SMatrix, SVector};

use crate::dynamics::InertiaParams;
use crate::error::{Error, Result};

pub const NX: usize = 6;
pub const NU: usize = 3;

pub type StateMatrix = SMatrix<f64, NX, NX>;
pub type InputMatrix = SMatrix<f64, NX, NU>;
pub type ModelState = SVector<f64, NX>;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub ac: StateMatrix,
    pub bc: InputMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteModel {
    pub a: StateMatrix,
    pub b: InputMatrix,
    pub ts: f64,
}

/// Wheel acceleration gain `J / (J Jw - Jw^2)`.
pub fn wheel_gain(j: f64, jw: f64) -> Result<f64> {
    let den = j * jw - jw * jw;
    if !(den > 0.0 && j > 0.0) {
        return Err(Error::Parameter(format!("wheel gain undefined for J = {j}, Jw = {jw}")));
    }
    Ok(j / den)
}

pub fn build_continuous_model(params: &InertiaParams) -> Result<LinearModel> {
    let mut ac = StateMatrix::zeros();
    let mut bc = InputMatrix::zeros();
    for i in 0..3 {
        let (j, jw) = (params.body[i], params.wheel[i]);
        if !(jw > 0.0 && j > jw) {
            return Err(Error::Parameter(format!("axis {}: need J > Jw > 0 (J = {j}, Jw = {jw})", i + 1)));
        }
        ac[(i, i + 3)] = -jw / j;
        bc[(i + 3, i)] = wheel_gain(j, jw)?;
    }
    Ok(LinearModel { ac, bc })
}

pub fn discretize_zoh(model: &LinearModel, ts: f64) -> Result<DiscreteModel> {
    if !(ts > 0.0 && ts.is_finite()) {
        return Err(Error::Parameter(format!("sampling period must be positive, got {ts}")));
    }
    let a = StateMatrix::identity() + model.ac * ts;
    let b = model.bc * ts + model.ac * model.bc * (0.5 * ts * ts);
    Ok(DiscreteModel { a, b, ts })
}

impl DiscreteModel {
    pub fn for_spacecraft(params: &InertiaParams, ts: f64) -> Result<Self> {
        discretize_zoh(&build_continuous_model(params)?, ts)
    }

    pub fn step(&self, x: &ModelState, u: &SVector<f64, NU>) -> ModelState {
        self.a * x + self.b * u
    }
}
