//! Nonlinear rigid-body spacecraft with three reaction wheels on the principal
//! axes. Euler-angle kinematics, full gyroscopic and wheel-coupling terms.
//!
//! This is the simulated plant; the controller never sees it.

use nalgebra::{SVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type StateRates = SVector<f64, 9>;

pub const DEFAULT_GIMBAL_GUARD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InertiaParams {
    /// Principal spacecraft inertias (kg m^2).
    pub body: [f64; 3],
    /// Wheel inertias about their spin axes (kg m^2).
    pub wheel: [f64; 3],
}

impl InertiaParams {
    pub fn new(body: [f64; 3], wheel: [f64; 3]) -> Result<Self> {
        let p = Self { body, wheel };
        p.validate()?;
        Ok(p)
    }

    /// J = (3000, 1500, 2000), wheels 50 each.
    pub fn reference_spacecraft() -> Self {
        Self { body: [3000.0, 1500.0, 2000.0], wheel: [50.0; 3] }
    }

    pub fn validate(&self) -> Result<()> {
        for i in 0..3 {
            let (j, jw) = (self.body[i], self.wheel[i]);
            if !(j.is_finite() && jw.is_finite() && jw > 0.0 && j > jw) {
                return Err(Error::Parameter(format!(
                    "axis {}: need J > Jw > 0, got J = {j}, Jw = {jw}",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlantState {
    /// Roll, pitch, yaw (rad).
    pub attitude: Vector3<f64>,
    /// Body angular rates (rad/s).
    pub body_rate: Vector3<f64>,
    /// Wheel speeds relative to the body (rad/s).
    pub wheel_speed: Vector3<f64>,
}

impl PlantState {
    pub fn at_rest(attitude: Vector3<f64>) -> Self {
        Self { attitude, ..Self::default() }
    }

    pub fn to_vector(&self) -> StateRates {
        let mut v = StateRates::zeros();
        v.fixed_rows_mut::<3>(0).copy_from(&self.attitude);
        v.fixed_rows_mut::<3>(3).copy_from(&self.body_rate);
        v.fixed_rows_mut::<3>(6).copy_from(&self.wheel_speed);
        v
    }

    pub fn from_vector(v: &StateRates) -> Self {
        Self {
            attitude: v.fixed_rows::<3>(0).into(),
            body_rate: v.fixed_rows::<3>(3).into(),
            wheel_speed: v.fixed_rows::<3>(6).into(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|x| x.is_finite())
    }

    /// Body-frame total angular momentum `(J + Jw) w + Jw a'`; its norm is
    /// invariant under internal (wheel) torques.
    pub fn angular_momentum(&self, params: &InertiaParams) -> Vector3<f64> {
        Vector3::from_fn(|i, _| {
            (params.body[i] + params.wheel[i]) * self.body_rate[i] + params.wheel[i] * self.wheel_speed[i]
        })
    }
}

/// Wheel motor torques (N m).
pub type ControlInput = Vector3<f64>;

/// Everything the right-hand side needs besides state and input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plant {
    pub params: InertiaParams,
    /// External body torque (N m), constant over a step.
    pub disturbance: Vector3<f64>,
    pub gimbal_guard: f64,
}

impl Plant {
    pub fn new(params: InertiaParams) -> Self {
        Self { params, disturbance: Vector3::zeros(), gimbal_guard: DEFAULT_GIMBAL_GUARD }
    }

    pub fn with_disturbance(mut self, torque: Vector3<f64>) -> Self {
        self.disturbance = torque;
        self
    }

    pub fn derivative(&self, x: &PlantState, u: &ControlInput) -> Result<StateRates> {
        let (phi, theta) = (x.attitude[0], x.attitude[1]);
        if theta.abs() >= std::f64::consts::FRAC_PI_2 - self.gimbal_guard || !theta.is_finite() {
            return Err(Error::GimbalLock { theta, guard: self.gimbal_guard });
        }
        let (sp, cp) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        let [w1, w2, w3] = [x.body_rate[0], x.body_rate[1], x.body_rate[2]];
        let [a1, a2, a3] = [x.wheel_speed[0], x.wheel_speed[1], x.wheel_speed[2]];
        let [j1, j2, j3] = self.params.body;
        let [jw1, jw2, jw3] = self.params.wheel;
        let d = self.disturbance;

        let mut r = StateRates::zeros();
        r[0] = (ct * w1 + sp * st * w2 + cp * st * w3) / ct;
        r[1] = cp * w2 - sp * w3;
        r[2] = (sp * w2 + cp * w3) / ct;
        r[3] = ((j2 - j3) * w2 * w3 - jw1 * (a3 * w2 - a2 * w3) - u[0] + d[0]) / (j1 + jw1);
        r[4] = ((j3 - j1) * w1 * w3 - jw2 * (a1 * w3 - a3 * w1) - u[1] + d[1]) / (j2 + jw2);
        r[5] = ((j1 - j2) * w1 * w2 - jw3 * (a2 * w1 - a1 * w2) - u[2] + d[2]) / (j3 + jw3);
        r[6] = u[0] / jw1;
        r[7] = u[1] / jw2;
        r[8] = u[2] / jw3;
        Ok(r)
    }

    /// One classical RK4 step with `u` held.
    pub fn step(&self, x: &PlantState, u: &ControlInput, dt: f64) -> Result<PlantState> {
        let x0 = x.to_vector();
        let at = |v: StateRates| self.derivative(&PlantState::from_vector(&v), u);
        let k1 = at(x0)?;
        let k2 = at(x0 + 0.5 * dt * k1)?;
        let k3 = at(x0 + 0.5 * dt * k2)?;
        let k4 = at(x0 + dt * k3)?;
        Ok(PlantState::from_vector(&(x0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))))
    }

    /// Integrates over `duration` with fixed steps of `dt`; `duration` should
    /// be a whole multiple of `dt`.
    pub fn advance(&self, x: &PlantState, u: &ControlInput, duration: f64, dt: f64) -> Result<PlantState> {
        let steps = (duration / dt).round().max(1.0) as usize;
        let h = duration / steps as f64;
        (0..steps).try_fold(*x, |s, _| self.step(&s, u, h))
    }
}

pub fn plant_derivative(x: &PlantState, u: &ControlInput, params: &InertiaParams) -> Result<StateRates> {
    Plant::new(*params).derivative(x, u)
}

pub fn integrate_step(x: &PlantState, u: &ControlInput, params: &InertiaParams, dt: f64) -> Result<PlantState> {
    Plant::new(*params).step(x, u, dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> InertiaParams {
        InertiaParams::reference_spacecraft()
    }

    #[test]
    fn equilibrium_has_zero_rates() {
        let r = plant_derivative(&PlantState::default(), &ControlInput::zeros(), &params()).unwrap();
        assert_eq!(r, StateRates::zeros());
    }

    #[test]
    fn pitch_rate_maps_to_theta_dot_at_zero_attitude() {
        let x = PlantState { body_rate: Vector3::new(0.0, 1.0, 0.0), ..Default::default() };
        let r = plant_derivative(&x, &ControlInput::zeros(), &params()).unwrap();
        assert_eq!((r[0], r[1], r[2]), (0.0, 1.0, 0.0));
    }

    #[test]
    fn wheel_torque_reacts_on_body() {
        let r = plant_derivative(&PlantState::default(), &Vector3::new(1.0, 0.0, 0.0), &params()).unwrap();
        assert!((r[3] + 1.0 / 3050.0).abs() < 1e-15);
        assert!((r[3] + 3.2787e-4).abs() < 1e-8);
        assert!((r[6] - 0.02).abs() < 1e-15);
        assert_eq!((r[4], r[5], r[7], r[8]), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn gimbal_guard_trips() {
        let x = PlantState::at_rest(Vector3::new(0.0, std::f64::consts::FRAC_PI_2 - 1e-4, 0.0));
        let err = plant_derivative(&x, &ControlInput::zeros(), &params()).unwrap_err();
        assert!(matches!(err, Error::GimbalLock { .. }));
        assert!(integrate_step(&x, &ControlInput::zeros(), &params(), 0.01).is_err());
    }

    #[test]
    fn rest_stays_at_rest() {
        let x = integrate_step(&PlantState::default(), &ControlInput::zeros(), &params(), 0.37).unwrap();
        assert_eq!(x, PlantState::default());
    }

    #[test]
    fn wheel_spin_up_matches_euler_limit() {
        let x = integrate_step(&PlantState::default(), &Vector3::new(1.0, 0.0, 0.0), &params(), 0.01).unwrap();
        assert!((x.wheel_speed[0] - 0.0002).abs() < 1e-12);
    }

    #[test]
    fn disturbance_enters_body_rates_only() {
        let plant = Plant::new(params()).with_disturbance(Vector3::new(0.01, 0.0, -0.02));
        let r = plant.derivative(&PlantState::default(), &ControlInput::zeros()).unwrap();
        assert!((r[3] - 0.01 / 3050.0).abs() < 1e-16);
        assert!((r[5] + 0.02 / 2050.0).abs() < 1e-16);
        assert_eq!((r[6], r[7], r[8]), (0.0, 0.0, 0.0));
    }

    #[test]
    fn bad_inertias_are_rejected() {
        assert!(InertiaParams::new([3000.0, 1500.0, 2000.0], [50.0; 3]).is_ok());
        assert!(InertiaParams::new([50.0, 1500.0, 2000.0], [50.0; 3]).is_err());
        assert!(InertiaParams::new([3000.0, 1500.0, 2000.0], [0.0, 50.0, 50.0]).is_err());
    }
}
