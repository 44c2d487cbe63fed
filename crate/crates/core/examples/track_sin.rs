//! Sinusoidal attitude tracking in float64. Pass a duration in seconds to
//! shorten or lengthen the run (default 600).

use attitude_mpc::sim::{run_closed_loop, ScenarioConfig};

fn main() -> attitude_mpc::Result<()> {
    let duration = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(600.0);
    let cfg = ScenarioConfig { duration, ..ScenarioConfig::sinusoid_tracking() };
    let log = run_closed_loop(&cfg)?;
    for row in log.rows.iter().step_by(60) {
        println!(
            "t = {:6.1}  attitude = [{:+.4}, {:+.4}, {:+.4}]  reference = [{:+.4}, {:+.4}, {:+.4}]  iters = {}",
            row.time,
            row.attitude[0],
            row.attitude[1],
            row.attitude[2],
            row.true_reference[0],
            row.true_reference[1],
            row.true_reference[2],
            row.iters
        );
    }
    println!("max tracking error {:.4} rad, max wheel speed {:.3} rad/s", log.max_tracking_error(), log.max_abs_wheel_speed());
    Ok(())
}
