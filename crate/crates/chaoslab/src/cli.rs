//! Command-line front end: simulate, analyze, build datasets, train,
//! evaluate, and reproduce the experiment matrix.
//!
//! Angles on the command line are degrees (the paper's convention); CSV
//! bodies are radians. Every run writes a manifest JSON echoing its resolved
//! configuration, and `--from-manifest` replays one exactly. The environment
//! variable `CHAOSLAB_OUT` prefixes all output paths.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::lyapunov::DegreeRange;
use crate::analysis::{lyapunov_grid, stability_at};
use crate::dataset::{
    make_timestep_dataset, make_windows_with_fraction, read_timestep_csv, training_angle_grid,
};
use crate::dynamics::{total_energy, PendulumParams, System, DEFAULT_DAMPING};
use crate::error::{ChaosError, Result};
use crate::eval::metrics::{read_metrics_csv, write_metrics_csv, MetricsRecord, Scenario};
use crate::eval::{r2, rmse, rmse_heatmap, trajectory_plot};
use crate::integrator::{fmt_f64, integrate_from_deg, Trajectory};
use crate::models::{
    evaluate_sliding, evaluate_timestep, train_sliding, train_timestep, ModelConfig, ModelKind,
    PredictionSet, Protocol, TrainedModel, ALL_KINDS,
};

#[derive(Debug, Parser, Serialize, Deserialize)]
#[command(
    name = "chaoslab",
    about = "Multi-pendulum chaos simulation, analysis, and forecasting workbench",
    version
)]
pub struct Cli {
    /// Replay a recorded run exactly from its manifest JSON.
    #[arg(long, global = true, value_name = "MANIFEST")]
    pub from_manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Integrate the pendulum and write a trajectory CSV.
    Simulate(SimulateArgs),
    /// Lyapunov-exponent heatmap over a grid of initial conditions.
    Lyapunov(LyapunovArgs),
    /// Eigenvalue stability report at an equilibrium point.
    Stability(StabilityArgs),
    /// Build a training dataset.
    #[command(subcommand)]
    Dataset(DatasetCommand),
    /// Train one model on a dataset directory.
    Train(TrainArgs),
    /// Evaluate a checkpoint against a test CSV.
    Eval(EvalArgs),
    /// Run the full model matrix for one scenario suite.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    /// Pendulum system: double or triple.
    #[arg(long, default_value = "double")]
    pub system: System,
    /// Initial angles in degrees, comma separated (e.g. 120,0 or 120,0,0).
    #[arg(long, value_delimiter = ',', required = true)]
    pub theta: Vec<f64>,
    /// Per-joint damping constants (1/s), comma separated; defaults to 0.
    #[arg(long, value_delimiter = ',')]
    pub damping: Option<Vec<f64>>,
    /// Integration horizon in seconds.
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    /// Step size in seconds.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Append a total-energy column to the CSV.
    #[arg(long, default_value_t = false)]
    pub emit_energy: bool,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize, Deserialize)]
pub struct LyapunovArgs {
    #[arg(long, default_value = "double")]
    pub system: System,
    /// Inclusive degree grid start:end:step applied to theta1 and theta2.
    #[arg(long, default_value = "0:180:15")]
    pub grid: String,
    /// Perturbation of theta1 in degrees.
    #[arg(long, default_value_t = 0.1)]
    pub perturb: f64,
    /// Trajectory duration in seconds.
    #[arg(long, default_value_t = 10.0)]
    pub duration: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Heatmap CSV path.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional heatmap SVG path.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize, Deserialize)]
pub struct StabilityArgs {
    #[arg(long, default_value = "double")]
    pub system: System,
    /// Equilibrium angles in degrees, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub point: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub damping: Option<Vec<f64>>,
    /// Optional report CSV (re,im rows plus classification).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum DatasetCommand {
    /// Time-conditioned dataset over a grid of initial angles plus hold-out.
    Timestep(TimestepDatasetArgs),
    /// Single-trajectory sliding-window dataset.
    Window(WindowDatasetArgs),
}

#[derive(Debug, Args, Serialize, Deserialize)]
pub struct TimestepDatasetArgs {
    #[arg(long, default_value = "double")]
    pub system: System,
    /// First angle in degrees, held fixed across the grid.
    #[arg(long, default_value_t = 120.0)]
    pub theta1: f64,
    /// Varied-angle grid start:end:step in degrees (theta2 for double,
    /// theta3 for triple).
    #[arg(long, default_value = "0:3:0.1")]
    pub vary: String,
    /// Hold-out value of the varied angle in degrees.
    #[arg(long, default_value_t = 2.05)]
    pub holdout: f64,
    /// Rows sampled per trajectory.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    /// Apply the default damping constant to every joint.
    #[arg(long, default_value_t = false)]
    pub friction: bool,
    /// Explicit per-joint damping constants (overrides --friction).
    #[arg(long, value_delimiter = ',')]
    pub damping: Option<Vec<f64>>,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Output directory (train.csv, holdout.csv, normalizer.json, manifest.json).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize, Deserialize)]
pub struct WindowDatasetArgs {
    #[arg(long, default_value = "double")]
    pub system: System,
    /// Initial angles in degrees, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub theta: Vec<f64>,
    /// Window length W.
    #[arg(long, default_value_t = 50)]
    pub window: usize,
    /// Chronological train fraction.
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long, default_value_t = false)]
    pub friction: bool,
    #[arg(long, value_delimiter = ',')]
    pub damping: Option<Vec<f64>>,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Output directory (trajectory.csv, manifest.json).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize, Deserialize)]
pub struct TrainArgs {
    /// Model kind: ar, linsgd, ffnn, vrnn, lstm, gru, birnn, strnn.
    #[arg(long)]
    pub model: ModelKind,
    /// Dataset directory produced by `dataset`.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Training epochs (gradient kinds).
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Hidden size (gradient kinds).
    #[arg(long)]
    pub hidden: Option<usize>,
    /// AR order for the time-step protocol.
    #[arg(long)]
    pub ar_order: Option<usize>,
    /// Checkpoint JSON path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize, Deserialize)]
pub struct EvalArgs {
    /// Checkpoint JSON from `train`.
    #[arg(long)]
    pub ckpt: PathBuf,
    /// Test CSV: a hold-out dataset CSV (time-step) or a dataset directory
    /// (sliding window).
    #[arg(long)]
    pub test: PathBuf,
    /// Metrics CSV to write (appends the row it computes).
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    /// Actual-vs-predicted SVG path.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Prediction dump CSV path.
    #[arg(long)]
    pub pred_out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize, Deserialize)]
pub struct ReproduceArgs {
    /// One of double-friction, double-frictionless, triple-friction,
    /// triple-frictionless.
    #[arg(long)]
    pub suite: String,
    /// Seeds 0..seeds, one run per seed per model.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Output directory for datasets, checkpoints, metrics, and the heatmap.
    #[arg(long)]
    pub out: PathBuf,
}

/// Resolves a path under `CHAOSLAB_OUT` when that is set and the path is
/// relative.
pub fn resolve_out(path: &Path) -> PathBuf {
    match std::env::var_os("CHAOSLAB_OUT") {
        Some(root) if path.is_relative() => PathBuf::from(root).join(path),
        _ => path.to_path_buf(),
    }
}

fn parse_range(text: &str) -> Result<DegreeRange> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(ChaosError::Config(format!(
            "range must be start:end:step, got '{text}'"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .map_err(|e| ChaosError::Config(format!("bad range component '{p}': {e}")))
        })
        .collect::<Result<_>>()?;
    DegreeRange::new(nums[0], nums[1], nums[2])
}

fn params_for(system: System, damping: Option<&[f64]>, friction: bool) -> Result<PendulumParams> {
    let base = PendulumParams::unit(system);
    match damping {
        Some(c) => base.with_damping(c),
        None if friction => base.with_uniform_damping(DEFAULT_DAMPING),
        None => Ok(base),
    }
}

fn write_manifest(command: &Command, out_dir: &Path, stem: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join(format!("{stem}manifest.json"));
    std::fs::write(&path, serde_json::to_string_pretty(command)?)?;
    Ok(path)
}

fn manifest_for_file(command: &Command, primary_out: &Path) -> Result<PathBuf> {
    let dir = primary_out.parent().unwrap_or(Path::new("."));
    let stem = primary_out
        .file_stem()
        .map(|s| format!("{}.", s.to_string_lossy()))
        .unwrap_or_default();
    write_manifest(command, dir, &stem)
}

/// Executes a parsed invocation; `--from-manifest` wins over a subcommand.
pub fn run(cli: Cli) -> Result<()> {
    if let Some(manifest) = &cli.from_manifest {
        let text = std::fs::read_to_string(manifest)?;
        let command: Command = serde_json::from_str(&text)?;
        return dispatch(command);
    }
    match cli.command {
        Some(command) => dispatch(command),
        None => Err(ChaosError::Config(
            "no subcommand given (try --help or --from-manifest)".into(),
        )),
    }
}

pub fn dispatch(command: Command) -> Result<()> {
    match &command {
        Command::Simulate(args) => simulate(args)?,
        Command::Lyapunov(args) => lyapunov(args)?,
        Command::Stability(args) => stability(args)?,
        Command::Dataset(args) => dataset(args)?,
        Command::Train(args) => train(args)?,
        Command::Eval(args) => eval_cmd(args)?,
        Command::Reproduce(args) => reproduce(args)?,
    }
    // echo the resolved configuration next to the primary artifact
    match &command {
        Command::Simulate(a) => manifest_for_file(&command, &resolve_out(&a.out)).map(|_| ()),
        Command::Lyapunov(a) => manifest_for_file(&command, &resolve_out(&a.out)).map(|_| ()),
        Command::Stability(a) => match &a.out {
            Some(out) => manifest_for_file(&command, &resolve_out(out)).map(|_| ()),
            None => Ok(()),
        },
        Command::Dataset(DatasetCommand::Timestep(a)) => {
            write_manifest(&command, &resolve_out(&a.out), "").map(|_| ())
        }
        Command::Dataset(DatasetCommand::Window(a)) => {
            write_manifest(&command, &resolve_out(&a.out), "").map(|_| ())
        }
        Command::Train(a) => manifest_for_file(&command, &resolve_out(&a.out)).map(|_| ()),
        Command::Eval(a) => match (&a.metrics, &a.pred_out, &a.plot) {
            (Some(p), _, _) | (None, Some(p), _) | (None, None, Some(p)) => {
                manifest_for_file(&command, &resolve_out(p)).map(|_| ())
            }
            _ => Ok(()),
        },
        Command::Reproduce(a) => write_manifest(&command, &resolve_out(&a.out), "run.").map(|_| ()),
    }
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    if args.theta.len() != args.system.joint_count() {
        return Err(ChaosError::Config(format!(
            "{} system needs {} angles, got {}",
            args.system,
            args.system.joint_count(),
            args.theta.len()
        )));
    }
    let params = params_for(args.system, args.damping.as_deref(), false)?;
    let traj = integrate_from_deg(&params, &args.theta, args.t_end, args.dt)?;
    let out = resolve_out(&args.out);
    if let Some(dir) = out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    if args.emit_energy {
        write_trajectory_with_energy(&traj, &params, &out)?;
    } else {
        traj.write_csv(&out)?;
    }
    println!(
        "wrote {} rows to {}",
        traj.states.len(),
        out.display()
    );
    Ok(())
}

fn write_trajectory_with_energy(traj: &Trajectory, params: &PendulumParams, path: &Path) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let n = traj.joint_count();
    let mut header = String::from("t");
    for i in 1..=n {
        header.push_str(&format!(",theta{i},u{i}"));
    }
    header.push_str(",energy");
    writeln!(out, "{header}")?;
    for (k, state) in traj.states.iter().enumerate() {
        write!(out, "{}", fmt_f64(traj.time_at(k)))?;
        for v in state.as_flat() {
            write!(out, ",{}", fmt_f64(*v))?;
        }
        writeln!(out, ",{}", fmt_f64(total_energy(state, params)?))?;
    }
    out.flush()?;
    Ok(())
}

fn lyapunov(args: &LyapunovArgs) -> Result<()> {
    let range = parse_range(&args.grid)?;
    let params = PendulumParams::unit(args.system);
    let steps = (args.duration / args.dt).round() as usize;
    let grid = lyapunov_grid(&params, range, range, args.perturb, steps, args.dt)?;
    let out = resolve_out(&args.out);
    if let Some(dir) = out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    grid.write_csv(&out)?;
    if let Some(svg) = &args.svg {
        grid.write_svg(&resolve_out(svg))?;
    }
    println!("wrote {} cells to {}", grid.cell_count(), out.display());
    Ok(())
}

fn stability(args: &StabilityArgs) -> Result<()> {
    if args.point.len() != args.system.joint_count() {
        return Err(ChaosError::Config(format!(
            "{} system needs {} angles, got {}",
            args.system,
            args.system.joint_count(),
            args.point.len()
        )));
    }
    let params = params_for(args.system, args.damping.as_deref(), false)?;
    let report = stability_at(&params, &args.point)?;
    println!("equilibrium at {:?} degrees", args.point);
    for e in &report.eigenvalues {
        println!("  {:+.7}{:+.7}i", e.re, e.im);
    }
    println!("classification: {}", report.classification);
    if let Some(out) = &args.out {
        let out = resolve_out(out);
        if let Some(dir) = out.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        report.write_csv(&out)?;
    }
    Ok(())
}

fn dataset(args: &DatasetCommand) -> Result<()> {
    match args {
        DatasetCommand::Timestep(a) => {
            let params = params_for(a.system, a.damping.as_deref(), a.friction)?;
            let range = parse_range(&a.vary)?;
            let grid = training_angle_grid(a.system, a.theta1, range.start, range.end, range.step)?;
            let holdout_cond = match a.system {
                System::Double => vec![a.theta1, a.holdout],
                System::Triple => vec![a.theta1, 0.0, a.holdout],
            };
            if grid.iter().any(|c| {
                c.iter()
                    .zip(&holdout_cond)
                    .all(|(x, y)| (x - y).abs() < 1e-9)
            }) {
                return Err(ChaosError::Config(format!(
                    "hold-out {holdout_cond:?} collides with the training grid"
                )));
            }
            let grid_trajs: Vec<Trajectory> = grid
                .iter()
                .map(|c| integrate_from_deg(&params, c, a.t_end, a.dt))
                .collect::<Result<_>>()?;
            let holdout_traj = vec![integrate_from_deg(&params, &holdout_cond, a.t_end, a.dt)?];
            let ds = make_timestep_dataset(&grid_trajs, &holdout_traj, a.samples)?;
            let split = ds.split_holdout(&holdout_cond)?;

            let out = resolve_out(&a.out);
            std::fs::create_dir_all(&out)?;
            split.train.write_csv(&out.join("train.csv"))?;
            split.test.write_csv(&out.join("holdout.csv"))?;
            split.normalizer.write_json(&out.join("normalizer.json"))?;
            println!(
                "wrote {} train rows and {} hold-out rows under {}",
                split.train.total_rows(),
                split.test.total_rows(),
                out.display()
            );
        }
        DatasetCommand::Window(a) => {
            if a.theta.len() != a.system.joint_count() {
                return Err(ChaosError::Config(format!(
                    "{} system needs {} angles, got {}",
                    a.system,
                    a.system.joint_count(),
                    a.theta.len()
                )));
            }
            let params = params_for(a.system, a.damping.as_deref(), a.friction)?;
            let traj = integrate_from_deg(&params, &a.theta, a.t_end, a.dt)?;
            // windows are rebuilt at train time; the manifest carries window=W
            let ds = make_windows_with_fraction(&traj, a.window, a.train_fraction)?;
            let out = resolve_out(&a.out);
            std::fs::create_dir_all(&out)?;
            traj.write_csv(&out.join("trajectory.csv"))?;
            ds.normalizer.write_json(&out.join("normalizer.json"))?;
            println!(
                "wrote {} rows ({} window pairs) under {}",
                traj.states.len(),
                ds.n_pairs,
                out.display()
            );
        }
    }
    Ok(())
}

/// What `train`/`eval` need to know about a dataset directory.
struct DatasetInfo {
    command: DatasetCommand,
}

impl DatasetInfo {
    fn load(dir: &Path) -> Result<Self> {
        let path = dir.join("manifest.json");
        let text = std::fs::read_to_string(&path).map_err(|e| {
            ChaosError::Config(format!("cannot read dataset manifest {}: {e}", path.display()))
        })?;
        let command: Command = serde_json::from_str(&text)?;
        match command {
            Command::Dataset(inner) => Ok(Self { command: inner }),
            _ => Err(ChaosError::Config(format!(
                "{} is not a dataset manifest",
                path.display()
            ))),
        }
    }

    fn system(&self) -> System {
        match &self.command {
            DatasetCommand::Timestep(a) => a.system,
            DatasetCommand::Window(a) => a.system,
        }
    }

    fn friction(&self) -> bool {
        let (damping, friction) = match &self.command {
            DatasetCommand::Timestep(a) => (&a.damping, a.friction),
            DatasetCommand::Window(a) => (&a.damping, a.friction),
        };
        match damping {
            Some(c) => c.iter().any(|v| *v > 0.0),
            None => friction,
        }
    }

    fn holdout_condition(&self) -> Option<Vec<f64>> {
        match &self.command {
            DatasetCommand::Timestep(a) => Some(match a.system {
                System::Double => vec![a.theta1, a.holdout],
                System::Triple => vec![a.theta1, 0.0, a.holdout],
            }),
            DatasetCommand::Window(_) => None,
        }
    }
}

fn load_windowed(dir: &Path, info: &DatasetInfo) -> Result<crate::dataset::WindowedDataset> {
    let DatasetCommand::Window(a) = &info.command else {
        return Err(ChaosError::Config("dataset directory is not window mode".into()));
    };
    let params = params_for(a.system, a.damping.as_deref(), a.friction)?;
    let traj = Trajectory::read_csv(&dir.join("trajectory.csv"), params)?;
    make_windows_with_fraction(&traj, a.window, a.train_fraction)
}

fn train(args: &TrainArgs) -> Result<()> {
    let dir = resolve_out(&args.data);
    let info = DatasetInfo::load(&dir)?;
    let mut config = ModelConfig::new(args.model).with_seed(args.seed);
    if let Some(e) = args.epochs {
        config.epochs = e;
    }
    if let Some(h) = args.hidden {
        config.hidden = h;
    }
    if let Some(p) = args.ar_order {
        config.ar_order = p;
    }

    let model = match &info.command {
        DatasetCommand::Timestep(a) => {
            let train_ds = read_timestep_csv(&dir.join("train.csv"), a.system, false)?;
            let holdout_ds = read_timestep_csv(&dir.join("holdout.csv"), a.system, true)?;
            let mut all = train_ds;
            all.groups.extend(holdout_ds.groups);
            let split = all.split_holdout(&info.holdout_condition().expect("timestep has holdout"))?;
            train_timestep(&config, &split)?
        }
        DatasetCommand::Window(a) => {
            config.window = a.window;
            config.ar_order = a.window;
            let ds = load_windowed(&dir, &info)?;
            train_sliding(&config, &ds)?
        }
    };
    let out = resolve_out(&args.out);
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    model.save(&out)?;
    println!(
        "trained {} ({} epochs recorded), checkpoint at {}",
        args.model,
        model.loss_curve.len(),
        out.display()
    );
    Ok(())
}

fn condition_label(cond: &[f64]) -> String {
    let joined: Vec<String> = cond.iter().map(|v| format!("{v}")).collect();
    format!("[{}]", joined.join(";"))
}

fn eval_cmd(args: &EvalArgs) -> Result<()> {
    let ckpt_path = resolve_out(&args.ckpt);
    let model = TrainedModel::load(&ckpt_path)?;
    let test_path = resolve_out(&args.test);

    let (set, scenario) = match model.protocol {
        Protocol::TimeStep => {
            let dir = test_path.parent().unwrap_or(Path::new(".")).to_path_buf();
            let info = DatasetInfo::load(&dir)?;
            let system = info.system();
            let test = read_timestep_csv(&test_path, system, true)?;
            let set = evaluate_timestep(&model, &test)?;
            let condition = test
                .groups
                .first()
                .map(|g| condition_label(&g.initial_deg))
                .unwrap_or_else(|| "unknown".into());
            (
                set,
                Scenario {
                    system,
                    friction: info.friction(),
                    protocol: Protocol::TimeStep,
                    test_condition: format!("holdout{condition}"),
                },
            )
        }
        Protocol::SlidingWindow => {
            let dir = if test_path.is_dir() {
                test_path.clone()
            } else {
                test_path.parent().unwrap_or(Path::new(".")).to_path_buf()
            };
            let info = DatasetInfo::load(&dir)?;
            let ds = load_windowed(&dir, &info)?;
            let set = evaluate_sliding(&model, &ds)?;
            let DatasetCommand::Window(a) = &info.command else {
                unreachable!("load_windowed checked the mode");
            };
            (
                set,
                Scenario {
                    system: info.system(),
                    friction: info.friction(),
                    protocol: Protocol::SlidingWindow,
                    test_condition: format!("trained{}", condition_label(&a.theta)),
                },
            )
        }
    };

    let rmse_val = rmse(&set.predicted, &set.actual)?;
    let r2_val = r2(&set.predicted, &set.actual)?;
    println!("rmse {rmse_val:.6} rad, r2 {r2_val:.6}");

    if let Some(pred_out) = &args.pred_out {
        let path = resolve_out(pred_out);
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        set.write_csv(&path)?;
    }
    if let Some(plot) = &args.plot {
        let title = format!(
            "{} {} {}",
            model.config.kind, scenario.label(), scenario.test_condition
        );
        trajectory_plot(&set.times, &set.actual, &set.predicted, &title, &resolve_out(plot))?;
    }
    if let Some(metrics) = &args.metrics {
        let path = resolve_out(metrics);
        let mut records = if path.exists() {
            read_metrics_csv(&path)?
        } else {
            Vec::new()
        };
        records.push(MetricsRecord {
            model: model.config.kind,
            scenario,
            seed: model.config.seed,
            rmse: rmse_val,
            r2: r2_val,
        });
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        write_metrics_csv(&records, &path)?;
    }
    Ok(())
}

/// Experiment-matrix manifest entry (one trained cell).
#[derive(Debug, Serialize, Deserialize)]
struct MatrixEntry {
    model: ModelKind,
    scenario: String,
    seed: u64,
    dataset_path: String,
    checkpoint_path: String,
    prediction_path: String,
    metrics_path: String,
}

fn reproduce(args: &ReproduceArgs) -> Result<()> {
    let (system, friction) = match args.suite.as_str() {
        "double-friction" => (System::Double, true),
        "double-frictionless" => (System::Double, false),
        "triple-friction" => (System::Triple, true),
        "triple-frictionless" => (System::Triple, false),
        other => {
            return Err(ChaosError::Config(format!(
                "unknown suite '{other}' (expected double-friction, double-frictionless, triple-friction, or triple-frictionless)"
            )))
        }
    };
    let out = resolve_out(&args.out);
    std::fs::create_dir_all(&out)?;

    // the paper's grid: theta2 swept 0..3 for the double pendulum, theta3
    // swept 0.1..3.0 (theta2 = 0) for the triple
    let vary = match system {
        System::Double => "0:3:0.1",
        System::Triple => "0.1:3:0.1",
    };
    let data_dir = out.join("dataset");
    dataset(&DatasetCommand::Timestep(TimestepDatasetArgs {
        system,
        theta1: 120.0,
        vary: vary.into(),
        holdout: 2.05,
        samples: args.samples,
        friction,
        damping: None,
        t_end: 10.0,
        dt: 1e-3,
        out: data_dir.clone(),
    }))?;
    // the dataset dir needs its own manifest for train/eval to read
    let ds_command = Command::Dataset(DatasetCommand::Timestep(TimestepDatasetArgs {
        system,
        theta1: 120.0,
        vary: vary.into(),
        holdout: 2.05,
        samples: args.samples,
        friction,
        damping: None,
        t_end: 10.0,
        dt: 1e-3,
        out: data_dir.clone(),
    }));
    write_manifest(&ds_command, &data_dir, "")?;

    let metrics_path = out.join("metrics.csv");
    if metrics_path.exists() {
        std::fs::remove_file(&metrics_path)?;
    }
    // the default AR order is 50; cap it when a desk-scale sample count
    // cannot support that many lags
    let ar_order = 50.min(args.samples.saturating_sub(1)).max(1);
    let mut entries = Vec::new();
    for kind in ALL_KINDS {
        for seed in 0..args.seeds {
            let ckpt = out.join(format!("{}_seed{seed}.ckpt.json", kind.name().to_lowercase()));
            train(&TrainArgs {
                model: kind,
                data: data_dir.clone(),
                seed,
                epochs: args.epochs,
                hidden: None,
                ar_order: Some(ar_order),
                out: ckpt.clone(),
            })?;
            let pred = out.join(format!("{}_seed{seed}.pred.csv", kind.name().to_lowercase()));
            eval_cmd(&EvalArgs {
                ckpt: ckpt.clone(),
                test: data_dir.join("holdout.csv"),
                metrics: Some(metrics_path.clone()),
                plot: None,
                pred_out: Some(pred.clone()),
            })?;
            entries.push(MatrixEntry {
                model: kind,
                scenario: args.suite.clone(),
                seed,
                dataset_path: data_dir.display().to_string(),
                checkpoint_path: ckpt.display().to_string(),
                prediction_path: pred.display().to_string(),
                metrics_path: metrics_path.display().to_string(),
            });
        }
    }
    std::fs::write(
        out.join("matrix.json"),
        serde_json::to_string_pretty(&entries)?,
    )?;

    // the heatmap is derived data: recompute each cell from the persisted
    // prediction dumps rather than trusting the metrics rows
    let mut records = read_metrics_csv(&metrics_path)?;
    for record in &mut records {
        let entry = entries
            .iter()
            .find(|e| e.model == record.model && e.seed == record.seed)
            .expect("every metrics row has a matrix entry");
        let (_, actual, predicted) = PredictionSet::read_csv(Path::new(&entry.prediction_path))?;
        record.rmse = rmse(&predicted, &actual)?;
    }
    let table = rmse_heatmap(&records)?;
    table.write_csv(&out.join("heatmap.csv"))?;
    table.write_svg(&out.join("heatmap.svg"))?;
    println!(
        "suite {} complete: {} metrics rows, heatmap under {}",
        args.suite,
        records.len(),
        out.display()
    );
    Ok(())
}
