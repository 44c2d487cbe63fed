//! Regulation to the origin from a grid of roll/pitch attitudes with the
//! modified and the standard formulation. The default grid is coarse; pass
//! `full` for the 13 x 7 grid.

use attitude_mpc::sim::{experiment_domain_of_attraction, DoaSettings, ScenarioConfig};

fn main() {
    let cfg = ScenarioConfig::domain_of_attraction();
    let grid = match std::env::args().nth(1).as_deref() {
        Some("full") => cfg.doa.clone(),
        _ => DoaSettings { roll_points: 5, pitch_points: 3, ..cfg.doa.clone() },
    };
    let points = experiment_domain_of_attraction(&cfg, &grid);
    println!("{:>7} {:>7} {:>9} {:>9}", "roll", "pitch", "modified", "standard");
    for p in &points {
        println!("{:7.3} {:7.3} {:>9} {:>9}", p.attitude[0], p.attitude[1], p.modified, p.standard);
    }
}
