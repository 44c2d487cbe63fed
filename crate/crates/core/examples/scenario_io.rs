//! Scenario files and logs: writes every preset as JSON to a directory
//! (default `configs`), reloads one, runs it briefly and round-trips the log
//! through CSV.

use std::path::PathBuf;

use attitude_mpc::sim::{read_log, run_closed_loop, write_log, ScenarioConfig};
use attitude_mpc::solver::ArithmeticKind;

fn main() -> attitude_mpc::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "configs".into()));
    std::fs::create_dir_all(&dir)?;
    let fixed = ArithmeticKind::fixed(32, 16);
    let presets = [
        ("track_sin", ScenarioConfig::sinusoid_tracking()),
        ("offset_free", ScenarioConfig::offset_free()),
        ("doa", ScenarioConfig::domain_of_attraction()),
        ("fxp_accuracy", ScenarioConfig { arithmetic: fixed, ..ScenarioConfig::sinusoid_tracking() }),
        ("rest_to_rest", ScenarioConfig::rest_to_rest()),
        ("complexity", ScenarioConfig { arithmetic: fixed, ..ScenarioConfig::default() }),
    ];
    for (name, cfg) in &presets {
        std::fs::write(dir.join(format!("{name}.json")), cfg.to_json())?;
    }

    let mut cfg = ScenarioConfig::load(dir.join("rest_to_rest.json"))?;
    cfg.duration = 10.0;
    let log = run_closed_loop(&cfg)?;
    let path = std::env::temp_dir().join("attitude_mpc_example_log.csv");
    write_log(&log, &path)?;
    let back = read_log(&path)?;
    println!("wrote {} presets to {}", presets.len(), dir.display());
    println!("{} rows written and read back from {}", back.rows.len(), path.display());
    Ok(())
}
