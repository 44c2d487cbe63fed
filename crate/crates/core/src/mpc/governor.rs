use nalgebra::Vector3;

/// External integrator on the attitude reference. The controller is fed
/// `r = r_bar - integral(attitude - r_bar)`, forward-Euler at the controller
/// sample rate with unit gain and a clamp on the accumulated error.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceGovernor {
    accumulated_error: Vector3<f64>,
    ts: f64,
    windup_limit: Vector3<f64>,
    gain: f64,
}

impl ReferenceGovernor {
    pub fn new(ts: f64, windup_limit: Vector3<f64>) -> Self {
        Self { accumulated_error: Vector3::zeros(), ts, windup_limit: windup_limit.abs(), gain: 1.0 }
    }

    /// Scales the integrated error by `gain` (default 1).
    pub fn with_gain(mut self, gain: f64) -> Self {
        self.gain = gain;
        self
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn accumulated_error(&self) -> Vector3<f64> {
        self.accumulated_error
    }

    pub fn update(&mut self, attitude: &Vector3<f64>, r_bar: &Vector3<f64>) -> Vector3<f64> {
        let acc = self.accumulated_error + (attitude - r_bar) * (self.gain * self.ts);
        self.accumulated_error = acc.zip_map(&self.windup_limit, |a, w| a.clamp(-w, w));
        r_bar - self.accumulated_error
    }

    pub fn reset(&mut self) {
        self.accumulated_error = Vector3::zeros();
    }
}

pub fn governor_update(g: &mut ReferenceGovernor, attitude: &Vector3<f64>, r_bar: &Vector3<f64>) -> Vector3<f64> {
    g.update(attitude, r_bar)
}
