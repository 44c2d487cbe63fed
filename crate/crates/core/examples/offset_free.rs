//! Constant disturbance torque with and without the reference integrator.
//! An optional argument sets the integrator gain (default 1).

use attitude_mpc::sim::{experiment_offset_free, ScenarioConfig};

fn main() -> attitude_mpc::Result<()> {
    let gain = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let cfg = ScenarioConfig { integral_gain: gain, ..ScenarioConfig::offset_free() };
    let r = experiment_offset_free(&cfg)?;
    println!("disturbance {:?} N m, integrator gain {gain}", cfg.disturbance);
    println!("steady-state error after {} s:", cfg.steady_state_after);
    let fmt = |e: [f64; 3]| e.map(|v| format!("{v:.3e}")).join(", ");
    println!("  with integrator    [{}] rad", fmt(r.error_with));
    println!("  without integrator [{}] rad", fmt(r.error_without));
    Ok(())
}
