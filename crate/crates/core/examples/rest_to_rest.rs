//! Step maneuver under a loose and a tight torque bound.

use attitude_mpc::sim::{experiment_rest_to_rest, ScenarioConfig};

fn main() -> attitude_mpc::Result<()> {
    let cfg = ScenarioConfig::rest_to_rest();
    for r in experiment_rest_to_rest(&cfg)? {
        let peak = r.log.rows.iter().flat_map(|row| row.u).fold(0.0f64, |a, u| a.max(u.abs()));
        println!(
            "|u| <= {:>3} N m: settles in {:?} s, peak torque {peak:.4}, worst violation {:.1e}",
            r.input_bound, r.settling_time, r.max_violation
        );
    }
    Ok(())
}
