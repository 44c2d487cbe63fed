use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use attitude_mpc::sim::{self, report, ScenarioConfig};
use attitude_mpc::solver::ArithmeticKind;
use attitude_mpc::Error;

#[derive(Parser)]
#[command(name = "attitude-mpc", version, about = "Closed-loop spacecraft attitude MPC experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sinusoidal attitude tracking.
    TrackSin(Common),
    /// Constant disturbance with and without the reference integrator.
    OffsetFree(Common),
    /// Domain-of-attraction grid, modified vs standard formulation.
    Doa(Common),
    /// Fixed-point vs float64 closed loop on the same scenario.
    FxpAccuracy(Common),
    /// Step maneuver under loose and tight torque bounds.
    RestToRest(Common),
    /// Problem size, operations per iteration and data size.
    Complexity(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario JSON; missing keys take the experiment's defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    word_bits: Option<u32>,
    #[arg(long)]
    frac_bits: Option<u32>,
    /// Use float64 arithmetic in the solver.
    #[arg(long, conflicts_with_all = ["word_bits", "frac_bits"])]
    float: bool,
}

impl Common {
    fn scenario(&self, preset: ScenarioConfig) -> Result<ScenarioConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                merge(preset, &text)?
            }
            None => preset,
        };
        if self.float {
            cfg.arithmetic = ArithmeticKind::Float64;
        } else if self.word_bits.is_some() || self.frac_bits.is_some() {
            cfg.arithmetic = ArithmeticKind::fixed(self.word_bits.unwrap_or(32), self.frac_bits.unwrap_or(16));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Fixed-point format for the accuracy comparison; 32/16 unless
    /// overridden.
    fn fixed_arithmetic(&self, cfg: &ScenarioConfig) -> ArithmeticKind {
        if self.float {
            ArithmeticKind::Float64
        } else if self.word_bits.is_some() || self.frac_bits.is_some() {
            ArithmeticKind::fixed(self.word_bits.unwrap_or(32), self.frac_bits.unwrap_or(16))
        } else if matches!(cfg.arithmetic, ArithmeticKind::Fixed { .. }) {
            cfg.arithmetic
        } else {
            ArithmeticKind::fixed(32, 16)
        }
    }
}

/// Overlays the keys present in `text` on the preset.
fn merge(preset: ScenarioConfig, text: &str) -> Result<ScenarioConfig, Error> {
    let mut base = serde_json::to_value(&preset).map_err(|e| Error::Config(e.to_string()))?;
    let over: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let serde_json::Value::Object(over) = over else {
        return Err(Error::Config("config must be a JSON object".into()));
    };
    let obj = base.as_object_mut().expect("config serializes to an object");
    for (k, v) in over {
        obj.insert(k, v);
    }
    serde_json::from_value(base).map_err(|e| Error::Config(e.to_string()))
}

fn run(cmd: Command) -> Result<(), Error> {
    let prepare = |c: &Common, preset: ScenarioConfig| -> Result<(ScenarioConfig, PathBuf), Error> {
        let cfg = c.scenario(preset)?;
        std::fs::create_dir_all(&c.out).map_err(|e| Error::Io(format!("{}: {e}", c.out.display())))?;
        std::fs::write(c.out.join("config.json"), cfg.to_json())?;
        Ok((cfg, c.out.clone()))
    };
    let path = |dir: &Path, name: &str| dir.join(name);
    match cmd {
        Command::TrackSin(c) => {
            let (cfg, out) = prepare(&c, ScenarioConfig::sinusoid_tracking())?;
            let log = sim::run_closed_loop(&cfg)?;
            sim::write_log(&log, path(&out, "track_sin.csv"))?;
            report::tracking_summary(&log, &cfg.input_bound).write(path(&out, "summary.csv"))?;
            println!("max tracking error {:.6} rad, max wheel speed {:.4} rad/s", log.max_tracking_error(), log.max_abs_wheel_speed());
        }
        Command::OffsetFree(c) => {
            let (cfg, out) = prepare(&c, ScenarioConfig::offset_free())?;
            let r = sim::experiment_offset_free(&cfg)?;
            sim::write_log(&r.with_governor, path(&out, "with_governor.csv"))?;
            sim::write_log(&r.without_governor, path(&out, "without_governor.csv"))?;
            report::offset_free_summary(&r).write(path(&out, "summary.csv"))?;
            println!("steady-state error with integrator {:?} rad, without {:?} rad", r.error_with, r.error_without);
        }
        Command::Doa(c) => {
            let (cfg, out) = prepare(&c, ScenarioConfig::domain_of_attraction())?;
            let points = sim::experiment_domain_of_attraction(&cfg, &cfg.doa);
            report::doa_summary(&points).write(path(&out, "doa.csv"))?;
            let count = |f: fn(&sim::DoaPoint) -> bool| points.iter().filter(|p| f(p)).count();
            println!(
                "{} points: modified converges from {}, standard from {}",
                points.len(),
                count(|p| p.modified),
                count(|p| p.standard)
            );
        }
        Command::FxpAccuracy(c) => {
            let (cfg, out) = prepare(&c, ScenarioConfig::sinusoid_tracking())?;
            let r = sim::experiment_fixed_point_accuracy(&cfg, c.fixed_arithmetic(&cfg))?;
            sim::write_log(&r.fixed, path(&out, "fixed.csv"))?;
            sim::write_log(&r.reference, path(&out, "float.csv"))?;
            report::discrepancy_series(&r).write(path(&out, "discrepancy.csv"))?;
            println!("max attitude discrepancy {:.3e} deg", r.max_deg);
        }
        Command::RestToRest(c) => {
            let (cfg, out) = prepare(&c, ScenarioConfig::rest_to_rest())?;
            let runs = sim::experiment_rest_to_rest(&cfg)?;
            for r in &runs {
                sim::write_log(&r.log, path(&out, &format!("bound_{}.csv", r.input_bound)))?;
                println!("|u| <= {} N m: settling time {:?} s", r.input_bound, r.settling_time);
            }
            report::rest_to_rest_summary(&runs).write(path(&out, "summary.csv"))?;
        }
        Command::Complexity(c) => {
            let preset = ScenarioConfig { arithmetic: ArithmeticKind::fixed(32, 16), ..ScenarioConfig::default() };
            let (cfg, out) = prepare(&c, preset)?;
            let rows = sim::complexity_table(&cfg)?;
            report::complexity_summary(&rows).write(path(&out, "complexity.csv"))?;
            for (name, k) in &rows {
                println!("{name:8} n = {:3}  m = {:3}  ops/iter = {:5}  data = {} B", k.n, k.m, k.ops_per_iter, k.data_bytes);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::SimDiverged { .. } => 2,
                Error::OverflowAbort { .. } => 3,
                _ => 1,
            })
        }
    }
}
