//! Problem size, operations per iteration and stored data for the three
//! constraint sets, with 32-bit words.

use attitude_mpc::sim::{complexity_table, ScenarioConfig};
use attitude_mpc::solver::ArithmeticKind;

fn main() -> attitude_mpc::Result<()> {
    let cfg = ScenarioConfig { arithmetic: ArithmeticKind::fixed(32, 16), ..ScenarioConfig::default() };
    println!("{:8} {:>3} {:>4} {:>9} {:>8}", "set", "n", "m", "ops/iter", "bytes");
    for (name, c) in complexity_table(&cfg)? {
        println!("{name:8} {:>3} {:>4} {:>9} {:>8}", c.n, c.m, c.ops_per_iter, c.data_bytes);
    }
    Ok(())
}
