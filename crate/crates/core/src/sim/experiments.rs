use nalgebra::{DVector, Vector3};
use rayon::prelude::*;

use crate::dynamics::PlantState;
use crate::error::Result;
use crate::mpc::{condense, CondensedQp, Formulation};
use crate::solver::{ArithmeticKind, QpSolver, SolverConfig};

use super::config::{DoaSettings, ReferenceProgram, ScenarioConfig};
use super::log::SimLog;
use super::run_closed_loop;

/// Per-axis max of `|attitude - r_bar|` over samples at or after `after`.
pub fn steady_state_error(log: &SimLog, after: f64) -> [f64; 3] {
    let mut e = [0.0f64; 3];
    for row in log.rows.iter().filter(|r| r.time >= after) {
        for i in 0..3 {
            e[i] = e[i].max((row.attitude[i] - row.true_reference[i]).abs());
        }
    }
    e
}

/// First sample time after which every axis stays within `tol` of the true
/// reference until the end of the log.
pub fn settling_time(log: &SimLog, tol: f64) -> Option<f64> {
    let inside = |i: usize| {
        let r = &log.rows[i];
        (0..3).all(|k| (r.attitude[k] - r.true_reference[k]).abs() <= tol)
    };
    let mut first = None;
    for i in (0..log.rows.len()).rev() {
        if !inside(i) {
            break;
        }
        first = Some(log.rows[i].time);
    }
    first
}

#[derive(Debug, Clone)]
pub struct OffsetFree {
    pub with_governor: SimLog,
    pub without_governor: SimLog,
    pub error_with: [f64; 3],
    pub error_without: [f64; 3],
}

/// Runs the scenario with and without the reference integrator and reports
/// the steady-state attitude errors.
pub fn experiment_offset_free(cfg: &ScenarioConfig) -> Result<OffsetFree> {
    let with_governor = run_closed_loop(&ScenarioConfig { integral_action: true, ..cfg.clone() })?;
    let without_governor = run_closed_loop(&ScenarioConfig { integral_action: false, ..cfg.clone() })?;
    Ok(OffsetFree {
        error_with: steady_state_error(&with_governor, cfg.steady_state_after),
        error_without: steady_state_error(&without_governor, cfg.steady_state_after),
        with_governor,
        without_governor,
    })
}

#[derive(Debug, Clone)]
pub struct RestToRest {
    pub input_bound: f64,
    pub log: SimLog,
    pub settling_time: Option<f64>,
    pub max_violation: f64,
}

/// One run per entry of `cfg.rest_to_rest_bounds`, each with that symmetric
/// torque bound on every wheel.
pub fn experiment_rest_to_rest(cfg: &ScenarioConfig) -> Result<Vec<RestToRest>> {
    cfg.rest_to_rest_bounds
        .iter()
        .map(|&b| {
            let bound = [b; 3];
            let log = run_closed_loop(&ScenarioConfig { input_bound: bound, ..cfg.clone() })?;
            Ok(RestToRest {
                input_bound: b,
                settling_time: settling_time(&log, cfg.settle_tolerance),
                max_violation: log.max_input_violation(&bound),
                log,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoaPoint {
    pub attitude: [f64; 3],
    pub modified: bool,
    pub standard: bool,
}

/// Regulation to the origin from every grid attitude (zero rates and wheel
/// speeds) with the modified and the standard formulation. A point converges
/// when the attitude enters the target ball and stays there until the
/// timeout.
pub fn experiment_domain_of_attraction(base: &ScenarioConfig, grid: &DoaSettings) -> Vec<DoaPoint> {
    let points = grid.grid();
    points
        .par_iter()
        .map(|p| {
            let run = |formulation| {
                let cfg = ScenarioConfig {
                    initial_state: PlantState::at_rest(*p),
                    reference: ReferenceProgram::Constant { value: [0.0; 3] },
                    duration: grid.timeout,
                    formulation,
                    ..base.clone()
                };
                converged_and_stays(&cfg, grid.target_radius)
            };
            DoaPoint { attitude: (*p).into(), modified: run(Formulation::Modified), standard: run(Formulation::Standard) }
        })
        .collect()
}

/// The suffix after the last sample outside the ball is inside by
/// construction, so "enters and stays" reduces to the final sample.
fn converged_and_stays(cfg: &ScenarioConfig, radius: f64) -> bool {
    match run_closed_loop(cfg) {
        Ok(log) => log.rows.last().is_some_and(|r| Vector3::from(r.attitude).norm() <= radius),
        Err(_) => false,
    }
}

#[derive(Debug, Clone)]
pub struct FxpAccuracy {
    pub fixed: SimLog,
    pub reference: SimLog,
    /// Per-sample, per-axis `|attitude_fixed - attitude_float|` in degrees.
    pub discrepancy_deg: Vec<[f64; 3]>,
    pub max_deg: f64,
}

/// Runs the scenario with `arithmetic` and with float64 and compares the
/// attitude trajectories.
pub fn experiment_fixed_point_accuracy(cfg: &ScenarioConfig, arithmetic: ArithmeticKind) -> Result<FxpAccuracy> {
    let (fixed, reference) = rayon::join(
        || run_closed_loop(&ScenarioConfig { arithmetic, ..cfg.clone() }),
        || run_closed_loop(&ScenarioConfig { arithmetic: ArithmeticKind::Float64, ..cfg.clone() }),
    );
    let (fixed, reference) = (fixed?, reference?);
    let discrepancy_deg: Vec<[f64; 3]> = fixed
        .rows
        .iter()
        .zip(&reference.rows)
        .map(|(a, b)| std::array::from_fn(|i| (a.attitude[i] - b.attitude[i]).abs().to_degrees()))
        .collect();
    let max_deg = discrepancy_deg.iter().flatten().fold(0.0, |m: f64, v| m.max(*v));
    Ok(FxpAccuracy { fixed, reference, discrepancy_deg, max_deg })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Complexity {
    pub n: usize,
    pub m: usize,
    pub ops_per_iter: u64,
    pub data_bytes: usize,
}

/// Problem size, operations per solver iteration as counted by the
/// instrumented arithmetic, and stored data at the word length of
/// `arithmetic`. Stored data is the two iteration matrices, the maps from
/// (state, reference, previous input) to the linear cost and the constraint
/// right-hand side, and the iterate vectors.
pub fn count_complexity(qp: &CondensedQp, arithmetic: ArithmeticKind) -> Result<Complexity> {
    let (n, m) = (qp.num_primal(), qp.num_dual());
    let cfg = SolverConfig { max_iters: 1, eps_v: 0.0, eps_g: 0.0, ..SolverConfig::default() };
    let solver = QpSolver::for_qp(qp, cfg, arithmetic)?;
    let res = solver.solve(&DVector::zeros(n), &DVector::from_element(m, 1.0), None)?;
    let entries = 2 * n * m + n * (qp.h_state.ncols() + qp.h_reference.ncols() + qp.h_input.ncols())
        + m * (1 + qp.d_state.ncols() + qp.d_input.ncols())
        + n
        + 2 * m;
    Ok(Complexity { n, m, ops_per_iter: res.ops / res.iters.max(1) as u64, data_bytes: entries * arithmetic.word_bytes() })
}

/// The three constraint sets compared in the complexity table: input bounds;
/// plus input-rate bounds; plus attitude and wheel-speed bounds. Bounds not
/// set in `cfg` take 0.5 N m per sample, pi/3 rad and 10 rad/s.
pub fn complexity_table(cfg: &ScenarioConfig) -> Result<Vec<(String, Complexity)>> {
    let rate = Some(cfg.input_rate_bound.unwrap_or([0.5; 3]));
    let variants = [
        ("u", ScenarioConfig { input_rate_bound: None, attitude_bound: None, wheel_speed_bound: None, ..cfg.clone() }),
        ("u+du", ScenarioConfig { input_rate_bound: rate, attitude_bound: None, wheel_speed_bound: None, ..cfg.clone() }),
        (
            "u+du+x",
            ScenarioConfig {
                input_rate_bound: rate,
                attitude_bound: Some(cfg.attitude_bound.unwrap_or([std::f64::consts::FRAC_PI_3; 3])),
                wheel_speed_bound: Some(cfg.wheel_speed_bound.unwrap_or([10.0; 3])),
                ..cfg.clone()
            },
        ),
    ];
    variants
        .iter()
        .map(|(name, c)| {
            let model = c.model()?;
            let qp = condense(&model, &c.mpc_config(&model)?, &c.constraints())?;
            Ok((name.to_string(), count_complexity(&qp, c.arithmetic)?))
        })
        .collect()
}
