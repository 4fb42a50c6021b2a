//! Batch front end: plan, optimize, report.

pub mod config;
pub mod scenes;
pub mod trajio;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::catenary::tether_polyline;
use crate::geometry::{distance, Trajectory};
use crate::metrics::{compare, compute_metrics, metrics_csv, Comparison, TrajectoryMetrics};
use crate::optimizer::{build_problem, solve, OptError, SolveOutcome};
use crate::planner::{plan_initial_trajectory, PlanError};
use crate::world::io::{read_cloud_file, read_grid_file};
use crate::world::{ObstacleCloud, World, WorldError};

use config::{load_config, Config};
use scenes::{generate_scene, write_scene, SceneKind, SceneParams};
use trajio::{format_polyline, read_trajectory, write_trajectory};

pub const EXIT_OK: i32 = 0;
/// Planning failed: no path, or start/goal/interpolant infeasible.
pub const EXIT_NO_PATH: i32 = 2;
pub const EXIT_NUMERICAL_FAILURE: i32 = 3;
/// I/O, parse or configuration error.
pub const EXIT_INPUT: i32 = 4;
/// The initial trajectory has fewer than 5 states.
pub const EXIT_TOO_SHORT: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Optimize(#[from] OptError),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error("{0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("configuration error: {0}")]
    Config(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Plan(PlanError::InvalidConfig(_)) => EXIT_INPUT,
            CliError::Plan(_) => EXIT_NO_PATH,
            CliError::Optimize(OptError::TooShort(_)) => EXIT_TOO_SHORT,
            CliError::Optimize(OptError::NumericalFailure { .. }) => EXIT_NUMERICAL_FAILURE,
            CliError::Optimize(OptError::InvalidConfig(_)) => EXIT_INPUT,
            CliError::World(_) | CliError::Io(_) | CliError::Parse(_) | CliError::Config(_) => EXIT_INPUT,
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn load_scenario_world(cfg: &Config) -> Result<World, CliError> {
    let grid = read_grid_file(&cfg.scenario.grid)?;
    Ok(match &cfg.scenario.cloud {
        Some(path) => World::new(grid, ObstacleCloud::new(read_cloud_file(path)?)),
        None => World::from_grid(grid),
    })
}

/// Everything a full run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub initial: Trajectory,
    pub outcome: SolveOutcome,
    pub initial_metrics: TrajectoryMetrics,
    pub optimized_metrics: TrajectoryMetrics,
    pub comparison: Comparison,
}

fn elapsed(cfg: &Config, t: Instant) -> f64 {
    if cfg.report.timing {
        t.elapsed().as_secs_f64()
    } else {
        0.0
    }
}

pub fn plan_stage(cfg: &Config, world: &World) -> Result<(Trajectory, f64), CliError> {
    let t0 = Instant::now();
    let s = &cfg.scenario;
    let traj = plan_initial_trajectory(s.start, s.goal, s.anchor, &cfg.planner, world)?;
    Ok((traj, elapsed(cfg, t0)))
}

pub fn optimize_stage(cfg: &Config, world: &World, initial: &Trajectory) -> Result<(SolveOutcome, f64), CliError> {
    let t0 = Instant::now();
    let mut prob = build_problem(initial, world, &cfg.optimizer_config())?;
    let outcome = solve(&mut prob)?;
    Ok((outcome, elapsed(cfg, t0)))
}

/// Plans and optimizes without touching the filesystem.
pub fn run_pipeline(cfg: &Config, world: &World) -> Result<RunOutput, CliError> {
    let (initial, tci) = plan_stage(cfg, world)?;
    let (outcome, tco) = optimize_stage(cfg, world, &initial)?;
    Ok(assemble(cfg, world, initial, outcome, tci, tco))
}

fn assemble(cfg: &Config, world: &World, initial: Trajectory, outcome: SolveOutcome, tci: f64, tco: f64) -> RunOutput {
    let opt = cfg.optimizer_config();
    let initial_metrics = TrajectoryMetrics { compute_time: tci, ..compute_metrics(&initial, world, &opt) };
    let optimized_metrics =
        TrajectoryMetrics { compute_time: tco, ..compute_metrics(&outcome.trajectory, world, &opt) };
    let comparison = compare(&initial_metrics, &optimized_metrics);
    RunOutput { initial, outcome, initial_metrics, optimized_metrics, comparison }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn write_traj_outputs(cfg: &Config, dir: &Path, name: &str, t: &Trajectory) -> Result<(), CliError> {
    write_trajectory(&dir.join(format!("{name}.traj")), t)?;
    if cfg.report.json {
        let json = serde_json::to_string_pretty(t).expect("trajectory serializes");
        write_file(&dir.join(format!("{name}.json")), &json)?;
    }
    Ok(())
}

fn write_tethers(cfg: &Config, dir: &Path, t: &Trajectory) -> Result<(), CliError> {
    for (i, s) in t.states.iter().enumerate() {
        let length = s.tether_length.max(distance(t.anchor, s.position));
        let poly = tether_polyline(t.anchor, s.position, length, cfg.optimizer.segments)
            .map_err(|e| CliError::Config(format!("tether of state {i}: {e}")))?;
        write_file(&dir.join(format!("tether_{i:03}.xyz")), &format_polyline(&poly.points))?;
    }
    Ok(())
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

/// Full pipeline with file output. `initial.traj` is written as soon as
/// planning succeeds; nothing is written when planning fails.
pub fn run_scenario(cfg: &Config, out: &Path) -> Result<RunOutput, CliError> {
    let world = load_scenario_world(cfg)?;
    let (initial, tci) = plan_stage(cfg, &world)?;
    create_dir(out)?;
    write_traj_outputs(cfg, out, "initial", &initial)?;
    let (outcome, tco) = optimize_stage(cfg, &world, &initial)?;
    let run = assemble(cfg, &world, initial, outcome, tci, tco);
    write_traj_outputs(cfg, out, "optimized", &run.outcome.trajectory)?;
    if cfg.report.tether_files {
        write_tethers(cfg, out, &run.outcome.trajectory)?;
    }
    write_file(&out.join("trace.csv"), &run.outcome.trace_csv())?;
    write_file(
        &out.join("metrics.csv"),
        &metrics_csv(&cfg.scenario.signature(), &run.initial_metrics, &run.optimized_metrics),
    )?;
    Ok(run)
}

fn describe_metrics(label: &str, m: &TrajectoryMetrics) -> String {
    format!(
        "{label}: length {:.3} m, duration {:.3} s, uav clearance mean/min {:.3}/{:.3} m, tether clearance mean/min {:.3}/{:.3} m, \
         speed mean/max {:.3}/{:.3} m/s, accel mean/|mean|/max {:.4}/{:.4}/{:.4} m/s^2\n",
        m.length,
        m.duration,
        m.uav_clearance_mean,
        m.uav_clearance_min,
        m.tether_clearance_mean,
        m.tether_clearance_min,
        m.speed_mean,
        m.speed_max,
        m.accel_mean,
        m.accel_abs_mean,
        m.accel_max
    )
}

#[derive(Debug, Parser)]
#[command(name = "tetherplan", version, about = "Trajectory planning and optimization for a tethered UAV")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Scenario configuration (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a configuration value, e.g. `--set optimizer.gamma_v=0.1`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Also write trajectories as JSON.
    #[arg(long)]
    pub json: bool,
}

impl ConfigArgs {
    fn load(&self) -> Result<Config, CliError> {
        let mut cfg = load_config(self.config.as_deref(), &self.overrides)?;
        cfg.report.json |= self.json;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan, optimize and write every output.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plan the initial trajectory only.
    Plan {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Optimize an existing trajectory file.
    Optimize {
        #[command(flatten)]
        config: ConfigArgs,
        /// Trajectory to refine.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print metrics of a trajectory, optionally compared with a second one.
    Metrics {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        input: PathBuf,
        /// Optimized trajectory to compare against `--input`.
        #[arg(long)]
        compare: Option<PathBuf>,
        /// Directory for `metrics.csv` when comparing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic scene (grid, cloud, scenario.toml).
    GenScene {
        /// One of arc, corridor, confined, duct, open.
        kind: String,
        #[arg(long)]
        out: PathBuf,
        /// Scene parameters, e.g. `seed=3,density=0.5,width=1.2,resolution=0.2`.
        #[arg(long = "seed-scene", default_value = "")]
        seed_scene: String,
    },
}

/// Runs one command and returns what it prints on success.
pub fn execute(command: &Command) -> Result<String, CliError> {
    match command {
        Command::Run { config, out } => {
            let cfg = config.load()?;
            let run = run_scenario(&cfg, out)?;
            Ok(format!(
                "{}\n{}optimizer: {} accepted steps, cost {:.6e} -> {:.6e} ({})\n",
                cfg.scenario.signature(),
                run.comparison.report(),
                run.outcome.iterations,
                run.outcome.initial_cost,
                run.outcome.final_cost,
                run.outcome.termination
            ))
        }
        Command::Plan { config, out } => {
            let cfg = config.load()?;
            let world = load_scenario_world(&cfg)?;
            let (initial, _) = plan_stage(&cfg, &world)?;
            create_dir(out)?;
            write_traj_outputs(&cfg, out, "initial", &initial)?;
            let m = compute_metrics(&initial, &world, &cfg.optimizer_config());
            Ok(format!("{} states\n{}", initial.len(), describe_metrics("initial", &m)))
        }
        Command::Optimize { config, input, out } => {
            let cfg = config.load()?;
            let world = load_scenario_world(&cfg)?;
            let initial = read_trajectory(input)?;
            let (outcome, _) = optimize_stage(&cfg, &world, &initial)?;
            create_dir(out)?;
            write_traj_outputs(&cfg, out, "optimized", &outcome.trajectory)?;
            if cfg.report.tether_files {
                write_tethers(&cfg, out, &outcome.trajectory)?;
            }
            write_file(&out.join("trace.csv"), &outcome.trace_csv())?;
            let m = compute_metrics(&outcome.trajectory, &world, &cfg.optimizer_config());
            Ok(format!(
                "cost {:.6e} -> {:.6e} after {} accepted steps ({})\n{}",
                outcome.initial_cost,
                outcome.final_cost,
                outcome.iterations,
                outcome.termination,
                describe_metrics("optimized", &m)
            ))
        }
        Command::Metrics { config, input, compare: other, out } => {
            let cfg = config.load()?;
            let world = load_scenario_world(&cfg)?;
            let opt = cfg.optimizer_config();
            let a = compute_metrics(&read_trajectory(input)?, &world, &opt);
            let Some(other) = other else {
                return Ok(describe_metrics("trajectory", &a));
            };
            let b = compute_metrics(&read_trajectory(other)?, &world, &opt);
            if let Some(out) = out {
                create_dir(out)?;
                write_file(&out.join("metrics.csv"), &metrics_csv(&cfg.scenario.signature(), &a, &b))?;
            }
            Ok(compare(&a, &b).report())
        }
        Command::GenScene { kind, out, seed_scene } => {
            let kind: SceneKind = kind.parse()?;
            let scene = generate_scene(kind, &SceneParams::parse(seed_scene)?)?;
            let path = write_scene(&scene, out)?;
            Ok(format!("{kind} scene with {} obstacle points written to {}\n", scene.cloud().len(), path.display()))
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(text) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
