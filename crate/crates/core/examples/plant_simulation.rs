//! Open-loop plant: a short wheel torque pulse on roll, then coasting.
//! Total angular momentum stays constant while body and wheel trade it.

use attitude_mpc::dynamics::{InertiaParams, Plant, PlantState};
use nalgebra::Vector3;

fn main() -> attitude_mpc::Result<()> {
    let params = InertiaParams::reference_spacecraft();
    let plant = Plant::new(params);
    let mut x = PlantState::at_rest(Vector3::new(0.0, 0.05, 0.0));
    let h0 = x.angular_momentum(&params);

    println!("{:>6} {:>11} {:>11} {:>11} {:>11}", "t", "roll", "omega_1", "wheel_1", "|h - h0|");
    for k in 0..=60 {
        let t = k as f64;
        if k % 10 == 0 {
            let dh = (x.angular_momentum(&params) - h0).norm();
            println!("{t:6.1} {:11.6} {:11.3e} {:11.6} {dh:11.2e}", x.attitude[0], x.body_rate[0], x.wheel_speed[0]);
        }
        let u = if t < 10.0 { Vector3::new(0.5, 0.0, 0.0) } else { Vector3::zeros() };
        x = plant.advance(&x, &u, 1.0, 0.01)?;
    }
    Ok(())
}
