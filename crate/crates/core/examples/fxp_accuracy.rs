//! Closed loop with the solver in fixed point against float64, for a few
//! word formats.

use attitude_mpc::sim::{experiment_fixed_point_accuracy, ScenarioConfig};
use attitude_mpc::solver::ArithmeticKind;

fn main() -> attitude_mpc::Result<()> {
    let cfg = ScenarioConfig { duration: 200.0, ..ScenarioConfig::sinusoid_tracking() };
    for (w, p) in [(32, 16), (32, 20), (40, 24)] {
        let r = experiment_fixed_point_accuracy(&cfg, ArithmeticKind::fixed(w, p))?;
        println!(
            "{w} bits, {p} fractional: max discrepancy {:.3e} deg, {} samples hit the iteration cap",
            r.max_deg,
            r.fixed.rows.iter().filter(|row| row.iters as usize >= cfg.max_iters).count()
        );
    }
    Ok(())
}
