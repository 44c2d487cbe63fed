//! Reduced prediction model and its zero-order-hold discretization.

use attitude_mpc::control_model::{build_continuous_model, discretize_zoh};
use attitude_mpc::dynamics::InertiaParams;
use attitude_mpc::mpc::{dare_residual, MpcConfig};
use nalgebra::DMatrix;

fn main() -> attitude_mpc::Result<()> {
    let params = InertiaParams::reference_spacecraft();
    let lin = build_continuous_model(&params)?;
    println!("Ac ={:.7}", lin.ac);
    println!("Bc ={:.7}", lin.bc);

    let d = discretize_zoh(&lin, 0.5)?;
    println!("A ={:.7}", d.a);
    println!("B ={:.4e}", d.b);

    // terminal weight from the Riccati equation
    let mpc = MpcConfig::reference(&d)?;
    let dm = |m: &[f64], r, c| DMatrix::from_column_slice(r, c, m);
    let res = dare_residual(
        &dm(d.a.as_slice(), 6, 6),
        &dm(d.b.as_slice(), 6, 3),
        &dm(mpc.q1.as_slice(), 6, 6),
        &dm(mpc.r.as_slice(), 3, 3),
        &dm(mpc.pf.as_slice(), 6, 6),
    );
    println!("Pf diagonal = {:.3}", mpc.pf.diagonal().transpose());
    println!("Riccati residual = {:.2e}", res.amax());
    Ok(())
}
