//! Closed-loop simulation: nonlinear plant, MPC with the reference
//! governor, and the dual gradient projection solver, plus the experiments
//! built on top of them.

mod config;
mod experiments;
mod log;
pub mod report;

pub use config::{DoaSettings, ReferenceProgram, ScenarioConfig};
pub use experiments::{
    complexity_table, count_complexity, experiment_domain_of_attraction, experiment_fixed_point_accuracy, experiment_offset_free,
    experiment_rest_to_rest, settling_time, steady_state_error, Complexity, DoaPoint, FxpAccuracy, OffsetFree,
    RestToRest,
};
pub use log::{format_decimal, read_log, write_log, LogRow, SimLog, LOG_COLUMNS};

use nalgebra::{DVector, Vector3};

use crate::control_model::ModelState;
use crate::dynamics::{Plant, PlantState};
use crate::error::{Error, Result};
use crate::mpc::{condense, extract_control, lift_reference, CondensedQp, ReferenceGovernor};
use crate::solver::{QpSolver, SolverResult};

/// Attitude magnitude (rad) past which a run counts as diverged.
const DIVERGENCE_ATTITUDE: f64 = 100.0;
/// Body-rate magnitude (rad/s) past which a run counts as diverged.
const DIVERGENCE_RATE: f64 = 10.0;

/// The sampled controller: governor, condensed QP and solver, with the
/// previous input and dual vector carried between samples.
#[derive(Debug)]
pub struct Controller {
    qp: CondensedQp,
    solver: QpSolver,
    governor: Option<ReferenceGovernor>,
    warm_start: bool,
    u_prev: Vector3<f64>,
    y_prev: Option<DVector<f64>>,
}

/// What the controller decided at one sample.
#[derive(Debug, Clone)]
pub struct ControlStep {
    pub u: Vector3<f64>,
    /// Reference handed to the MPC after the governor.
    pub reference: Vector3<f64>,
    pub solve: SolverResult,
}

impl Controller {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let model = cfg.model()?;
        let mpc = cfg.mpc_config(&model)?;
        let qp = condense(&model, &mpc, &cfg.constraints())?;
        let solver = QpSolver::for_qp(&qp, cfg.solver_config(), cfg.arithmetic)?;
        let governor = cfg
            .integral_action
            .then(|| ReferenceGovernor::new(cfg.ts, Vector3::from(cfg.windup_limit)).with_gain(cfg.integral_gain));
        Ok(Self { qp, solver, governor, warm_start: cfg.warm_start, u_prev: Vector3::zeros(), y_prev: None })
    }

    pub fn qp(&self) -> &CondensedQp {
        &self.qp
    }

    pub fn solver(&self) -> &QpSolver {
        &self.solver
    }

    /// One controller sample from the measured plant state and the true
    /// reference.
    pub fn step(&mut self, state: &PlantState, r_bar: &Vector3<f64>) -> Result<ControlStep> {
        let reference = match &mut self.governor {
            Some(g) => g.update(&state.attitude, r_bar),
            None => *r_bar,
        };
        let mut x = ModelState::zeros();
        x.fixed_rows_mut::<3>(0).copy_from(&state.attitude);
        x.fixed_rows_mut::<3>(3).copy_from(&state.wheel_speed);
        let v = self.qp.vectors(&x, &lift_reference(&reference), &self.u_prev);
        let warm = if self.warm_start { self.y_prev.as_ref() } else { None };
        let solve = self.solver.solve(&v.h, &v.d, warm)?;
        let u = extract_control(&solve.z, &self.u_prev);
        self.u_prev = u;
        self.y_prev = Some(solve.y.clone());
        Ok(ControlStep { u, reference, solve })
    }
}

/// Runs the scenario: at every sample the controller reads attitude and
/// wheel speeds, and the nonlinear plant is integrated over one period with
/// the input held.
pub fn run_closed_loop(cfg: &ScenarioConfig) -> Result<SimLog> {
    let mut controller = Controller::new(cfg)?;
    let plant = Plant {
        params: cfg.params()?,
        disturbance: Vector3::from(cfg.disturbance),
        gimbal_guard: cfg.gimbal_guard,
    };
    let mut x = cfg.initial_state;
    let mut log = SimLog::default();
    for k in 0..cfg.num_samples() {
        let time = k as f64 * cfg.ts;
        let r_bar = cfg.reference.at(time);
        let step = controller.step(&x, &r_bar)?;
        if step.solve.overflow && cfg.abort_on_overflow {
            return Err(Error::OverflowAbort { time });
        }
        log.rows.push(LogRow {
            time,
            attitude: x.attitude.into(),
            body_rate: x.body_rate.into(),
            wheel_speed: x.wheel_speed.into(),
            u: step.u.into(),
            reference: step.reference.into(),
            true_reference: r_bar.into(),
            iters: step.solve.iters as u64,
            ops: step.solve.ops,
            infeasibility: step.solve.infeasibility,
            overflow: step.solve.overflow,
        });
        x = plant.advance(&x, &step.u, cfg.ts, cfg.integrator_dt).map_err(|e| match e {
            Error::GimbalLock { theta, .. } => {
                Error::SimDiverged { time, reason: format!("pitch reached {theta:.6} rad (gimbal lock)") }
            }
            other => other,
        })?;
        if !x.is_finite() || x.attitude.amax() > DIVERGENCE_ATTITUDE || x.body_rate.amax() > DIVERGENCE_RATE {
            return Err(Error::SimDiverged { time: time + cfg.ts, reason: "state left the bounded region".into() });
        }
    }
    Ok(log)
}
