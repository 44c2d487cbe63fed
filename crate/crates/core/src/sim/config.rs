use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::control_model::DiscreteModel;
use crate::dynamics::{InertiaParams, PlantState, DEFAULT_GIMBAL_GUARD};
use crate::error::{Error, Result};
use crate::mpc::{diag3, diag6, terminal_weight_dare, ConstraintBlock, ConstraintSpec, Formulation, MpcConfig};
use crate::solver::{ArithmeticKind, SolverConfig};

/// Attitude command as a function of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ReferenceProgram {
    Constant {
        value: [f64; 3],
    },
    Step {
        initial: [f64; 3],
        target: [f64; 3],
        /// Switch time (s).
        time: f64,
    },
    /// `amplitude * sin(2 pi frequency t + phase)` per axis.
    Sinusoid {
        amplitude: [f64; 3],
        /// Hz.
        frequency: [f64; 3],
        phase: [f64; 3],
    },
}

impl Default for ReferenceProgram {
    fn default() -> Self {
        ReferenceProgram::Constant { value: [0.0; 3] }
    }
}

impl ReferenceProgram {
    /// Slow small-angle sinusoids, one frequency per axis.
    pub fn default_sinusoid() -> Self {
        ReferenceProgram::Sinusoid { amplitude: [0.1, 0.05, 0.08], frequency: [0.01, 0.02, 0.015], phase: [0.0; 3] }
    }

    pub fn at(&self, t: f64) -> Vector3<f64> {
        match self {
            ReferenceProgram::Constant { value } => Vector3::from(*value),
            ReferenceProgram::Step { initial, target, time } => {
                Vector3::from(if t < *time { *initial } else { *target })
            }
            ReferenceProgram::Sinusoid { amplitude, frequency, phase } => Vector3::from_fn(|i, _| {
                amplitude[i] * (2.0 * std::f64::consts::PI * frequency[i] * t + phase[i]).sin()
            }),
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        let ok = match self {
            ReferenceProgram::Constant { value } => finite(value),
            ReferenceProgram::Step { initial, target, time } => finite(initial) && finite(target) && time.is_finite(),
            ReferenceProgram::Sinusoid { amplitude, frequency, phase } => {
                finite(amplitude) && finite(frequency) && finite(phase)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config("reference program has non-finite entries".into()))
        }
    }
}

/// Grid and pass criterion for the domain-of-attraction sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DoaSettings {
    pub roll_range: [f64; 2],
    pub pitch_range: [f64; 2],
    pub roll_points: usize,
    pub pitch_points: usize,
    pub yaw: f64,
    pub target_radius: f64,
    pub timeout: f64,
}

impl Default for DoaSettings {
    fn default() -> Self {
        Self {
            roll_range: [-1.6, 1.6],
            pitch_range: [-1.1, 1.1],
            roll_points: 13,
            pitch_points: 7,
            yaw: 0.0,
            target_radius: 0.05,
            timeout: 600.0,
        }
    }
}

impl DoaSettings {
    pub fn grid(&self) -> Vec<Vector3<f64>> {
        let axis = |range: [f64; 2], count: usize| -> Vec<f64> {
            if count <= 1 {
                return vec![0.5 * (range[0] + range[1])];
            }
            (0..count)
                .map(|k| range[0] + (range[1] - range[0]) * k as f64 / (count - 1) as f64)
                .collect()
        };
        let rolls = axis(self.roll_range, self.roll_points);
        let pitches = axis(self.pitch_range, self.pitch_points);
        pitches
            .iter()
            .flat_map(|&p| rolls.iter().map(move |&r| Vector3::new(r, p, self.yaw)))
            .collect()
    }
}

/// Everything one closed-loop run needs. Serialized as a flat JSON document;
/// missing keys take the reference-spacecraft defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub inertia: [f64; 3],
    pub wheel_inertia: [f64; 3],
    /// Controller sampling period (s).
    pub ts: f64,
    pub horizon: usize,
    pub control_horizon: usize,
    pub q1_diag: [f64; 6],
    pub q2_diag: [f64; 6],
    pub r_diag: [f64; 3],
    pub formulation: Formulation,
    /// Symmetric wheel torque bound (N m).
    pub input_bound: [f64; 3],
    /// Symmetric bound on input increments per sample (N m).
    pub input_rate_bound: Option<[f64; 3]>,
    /// Symmetric attitude box (rad).
    pub attitude_bound: Option<[f64; 3]>,
    /// Symmetric wheel-speed bound (rad/s).
    pub wheel_speed_bound: Option<[f64; 3]>,
    pub reference: ReferenceProgram,
    /// Constant external body torque (N m).
    pub disturbance: [f64; 3],
    pub initial_state: PlantState,
    /// Simulated time (s).
    pub duration: f64,
    pub arithmetic: ArithmeticKind,
    pub integrator_dt: f64,
    pub integral_action: bool,
    /// Multiplies the integrated attitude error; 1 is the plain integral.
    pub integral_gain: f64,
    pub windup_limit: [f64; 3],
    pub eps_v: f64,
    pub eps_g: f64,
    pub max_iters: usize,
    pub equilibrate: bool,
    pub warm_start: bool,
    pub abort_on_overflow: bool,
    pub gimbal_guard: f64,
    pub doa: DoaSettings,
    /// Input bounds compared by the rest-to-rest experiment.
    pub rest_to_rest_bounds: [f64; 2],
    /// Settling tolerance per axis (rad).
    pub settle_tolerance: f64,
    /// Start of the steady-state window for offset measurements (s).
    pub steady_state_after: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            inertia: [3000.0, 1500.0, 2000.0],
            wheel_inertia: [50.0; 3],
            ts: 0.5,
            horizon: 10,
            control_horizon: 2,
            q1_diag: [100.0, 100.0, 100.0, 0.1, 0.1, 0.1],
            q2_diag: [50.0; 6],
            r_diag: [0.01; 3],
            formulation: Formulation::Modified,
            input_bound: [1.0; 3],
            input_rate_bound: None,
            attitude_bound: None,
            wheel_speed_bound: Some([10.0; 3]),
            reference: ReferenceProgram::default(),
            disturbance: [0.0; 3],
            initial_state: PlantState::default(),
            duration: 100.0,
            arithmetic: ArithmeticKind::Float64,
            integrator_dt: 0.01,
            integral_action: true,
            integral_gain: 1.0,
            windup_limit: [0.5; 3],
            eps_v: 1e-6,
            eps_g: 1e-6,
            max_iters: 2000,
            equilibrate: true,
            warm_start: true,
            abort_on_overflow: false,
            gimbal_guard: DEFAULT_GIMBAL_GUARD,
            doa: DoaSettings::default(),
            rest_to_rest_bounds: [3.0, 0.2],
            settle_tolerance: 0.005,
            steady_state_after: 200.0,
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Sinusoidal tracking with the reference weights and bounds, no
    /// reference integrator.
    pub fn sinusoid_tracking() -> Self {
        Self {
            reference: ReferenceProgram::default_sinusoid(),
            duration: 600.0,
            integral_action: false,
            ..Self::default()
        }
    }

    /// Hold zero attitude against a constant 0.01 N m body torque.
    pub fn offset_free() -> Self {
        Self { disturbance: [0.01; 3], duration: 300.0, ..Self::default() }
    }

    /// Step to (0.08, -0.03, -0.1) rad at t = 0, no reference integrator.
    pub fn rest_to_rest() -> Self {
        Self {
            reference: ReferenceProgram::Constant { value: [0.08, -0.03, -0.1] },
            duration: 200.0,
            integral_action: false,
            ..Self::default()
        }
    }

    /// Regulation to zero from rest, no reference integrator.
    pub fn domain_of_attraction() -> Self {
        Self { integral_action: false, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.duration > 0.0) {
            return fail(format!("duration must be positive, got {}", self.duration));
        }
        if !(self.ts > 0.0) || !(self.integrator_dt > 0.0) {
            return fail("ts and integrator_dt must be positive".into());
        }
        let ratio = self.ts / self.integrator_dt;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio {
            return fail(format!("integrator_dt = {} does not divide ts = {}", self.integrator_dt, self.ts));
        }
        if self.control_horizon < 1 || self.control_horizon > self.horizon {
            return fail(format!("need 1 <= control_horizon <= horizon, got {} / {}", self.control_horizon, self.horizon));
        }
        let nonneg = |v: &[f64]| v.iter().all(|x| *x >= 0.0 && x.is_finite());
        let bounds_ok = nonneg(&self.input_bound)
            && self.input_rate_bound.as_ref().is_none_or(|b| nonneg(b))
            && self.attitude_bound.as_ref().is_none_or(|b| nonneg(b))
            && self.wheel_speed_bound.as_ref().is_none_or(|b| nonneg(b));
        if !bounds_ok {
            return fail("bounds must be finite and nonnegative".into());
        }
        if !(self.integral_gain > 0.0 && self.integral_gain.is_finite()) {
            return fail(format!("integral_gain must be positive, got {}", self.integral_gain));
        }
        if !nonneg(&self.windup_limit) {
            return fail("windup_limit must be finite and nonnegative".into());
        }
        if !self.initial_state.is_finite() {
            return fail("initial state must be finite".into());
        }
        self.reference.validate()?;
        self.arithmetic.format()?;
        self.solver_config().validate()?;
        Ok(())
    }

    pub fn params(&self) -> Result<InertiaParams> {
        InertiaParams::new(self.inertia, self.wheel_inertia)
    }

    pub fn model(&self) -> Result<DiscreteModel> {
        DiscreteModel::for_spacecraft(&self.params()?, self.ts)
    }

    pub fn mpc_config(&self, model: &DiscreteModel) -> Result<MpcConfig> {
        let q1 = diag6(self.q1_diag);
        let r = diag3(self.r_diag);
        let pf = terminal_weight_dare(model, &q1, &r)?;
        let cfg = MpcConfig {
            horizon: self.horizon,
            control_horizon: self.control_horizon,
            q1,
            q2: diag6(self.q2_diag),
            r,
            pf,
            ts: self.ts,
            formulation: self.formulation,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn constraints(&self) -> ConstraintSpec {
        let neg = |b: [f64; 3]| b.map(|v| -v);
        let mut spec = ConstraintSpec::new().with(ConstraintBlock::input_bounds(neg(self.input_bound), self.input_bound));
        if let Some(b) = self.input_rate_bound {
            spec = spec.with(ConstraintBlock::input_rate_bounds(b));
        }
        if let Some(b) = self.attitude_bound {
            spec = spec.with(ConstraintBlock::attitude_bounds(b));
        }
        if let Some(b) = self.wheel_speed_bound {
            spec = spec.with(ConstraintBlock::wheel_speed_bounds(b));
        }
        spec
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            lipschitz: None,
            eps_v: self.eps_v,
            eps_g: self.eps_g,
            max_iters: self.max_iters,
            equilibrate: self.equilibrate,
        }
    }

    /// Number of controller samples in the run.
    pub fn num_samples(&self) -> usize {
        ((self.duration / self.ts) + 1e-9).floor() as usize
    }
}
