//! One MPC sample solved by dual gradient projection in float64 and in
//! 32-bit fixed point.

use attitude_mpc::control_model::ModelState;
use attitude_mpc::mpc::{condense, extract_control, lift_reference};
use attitude_mpc::sim::ScenarioConfig;
use attitude_mpc::solver::{ArithmeticKind, QpSolver};
use nalgebra::Vector3;

fn main() -> attitude_mpc::Result<()> {
    let cfg = ScenarioConfig::default();
    let model = cfg.model()?;
    let qp = condense(&model, &cfg.mpc_config(&model)?, &cfg.constraints())?;
    println!("n = {}, m = {}", qp.num_primal(), qp.num_dual());

    // 0.2 rad roll error, wheels at rest
    let x = ModelState::from_column_slice(&[0.2, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let v = qp.vectors(&x, &lift_reference(&Vector3::zeros()), &Vector3::zeros());

    for kind in [ArithmeticKind::Float64, ArithmeticKind::fixed(32, 16)] {
        let solver = QpSolver::for_qp(&qp, cfg.solver_config(), kind)?;
        let res = solver.solve(&v.h, &v.d, None)?;
        let u = extract_control(&res.z, &Vector3::zeros());
        println!(
            "{kind:?}: {:?} after {} iterations, u = [{:.6}, {:.6}, {:.6}], infeasibility {:.1e}, {} ops",
            res.status, res.iters, u[0], u[1], u[2], res.infeasibility, res.ops
        );
    }
    Ok(())
}
