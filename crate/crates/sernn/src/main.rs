//! Command-line entry point: dataset generation, single-run training,
//! sweeps, checkpoint analysis, figure extracts, SVG plotting, and the
//! oracle self-test.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime failure, 3 self-test
//! failure. Failures additionally emit one machine-readable JSON line on
//! standard error: `{"error": "...", "exit_code": N}`.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use sernn::constraints::RegularizerKind;
use sernn::embedding::build_lattice;
use sernn::harness::{
    self, accuracy_floor, analyze_runs, figure_data, load_task_data, run_sweep, train_cell,
    FigureKind, SweepConfig,
};
use sernn::metrics::MetricsTable;
use sernn::spiking::{
    gen_synthetic_spike_task, write_spike_dataset, SYNTHETIC_CHANNELS, SYNTHETIC_CLASSES,
    SYNTHETIC_DURATION_MS,
};
use sernn::svg::render_svg;
use sernn::training::{lattice_dims_for, run_dir_name, TaskKind, TrainConfig};
use sernn::numerics::RandomSource;
use sernn::{selftest, Error};

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 1;
const EXIT_RUNTIME: i32 = 2;
const EXIT_SELFTEST: i32 = 3;

#[derive(Parser)]
#[command(
    name = "sernn",
    version,
    about = "Train, sweep, and analyze spatially embedded recurrent networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TrainOverrides {
    /// Training epochs (default: 10 for the rate task, 50 for spiking).
    #[arg(long)]
    epochs: Option<usize>,
    /// Adam learning rate (default 1e-3).
    #[arg(long)]
    lr: Option<f64>,
    /// Minibatch size (default: 64 rate, 32 spiking).
    #[arg(long)]
    batch_size: Option<usize>,
    /// Hidden neurons (default 100 = a 5x5x4 lattice).
    #[arg(long)]
    hidden: Option<usize>,
    /// Fresh rate-task trials per epoch (default 600).
    #[arg(long)]
    trials_per_epoch: Option<usize>,
    /// Held-out rate-task trials for accuracy (default 256).
    #[arg(long)]
    eval_trials: Option<usize>,
    /// Seed of the shared spiking dataset (default 0xda7a).
    #[arg(long)]
    dataset_seed: Option<u64>,
    /// Spiking training samples per class (default 24).
    #[arg(long)]
    train_per_class: Option<usize>,
    /// Spiking held-out samples per class (default 20).
    #[arg(long)]
    eval_per_class: Option<usize>,
    /// Event file (.jsonl / .jsonl.gz) with training data, for --task shd.
    #[arg(long)]
    events_train: Option<PathBuf>,
    /// Event file with held-out data, for --task shd.
    #[arg(long)]
    events_eval: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled spike dataset file (JSON lines).
    GenTask {
        /// Task to generate (currently: synthetic-spikes).
        #[arg(long)]
        task: String,
        /// Output path; `.gz` suffix gzips the stream.
        #[arg(long)]
        out: PathBuf,
        /// Dataset seed.
        #[arg(long)]
        seed: u64,
        /// Samples per class.
        #[arg(long, default_value_t = 44)]
        per_class: usize,
        /// Overwrite an existing output file.
        #[arg(long)]
        force: bool,
    },
    /// Train one network and write its checkpoint tree.
    Train {
        /// Penalty kind: l1, sernn, space, or comm.
        #[arg(long)]
        kind: String,
        /// Penalty strength (>= 0).
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        /// Run seed.
        #[arg(long)]
        seed: u64,
        /// Task: inference, synthetic-spikes, or shd.
        #[arg(long)]
        task: String,
        /// Run directory (one epoch_<k> checkpoint per epoch, plus epoch 0).
        #[arg(long)]
        out: PathBuf,
        /// Retrain even if the run directory is already complete.
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        overrides: TrainOverrides,
    },
    /// Run a (kind x gamma x seed) sweep from a JSON config.
    Sweep {
        /// Sweep config (JSON; see `SweepConfig`).
        #[arg(long)]
        config: PathBuf,
        /// Sweep output directory (checkpoints, metrics.csv, failures.json).
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute the metrics table from an existing checkpoint tree.
    Analyze {
        /// Directory holding run_* checkpoint trees.
        #[arg(long)]
        runs: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Overwrite an existing output file.
        #[arg(long)]
        force: bool,
    },
    /// Extract figure-ready CSV from a metrics table.
    Figures {
        /// Metrics CSV written by `sweep` or `analyze`.
        #[arg(long)]
        metrics: PathBuf,
        /// Panel: fig2a, fig2b, fig2c, fig3a, fig3c, fig4a, fig5a, fig5b, fig5c.
        #[arg(long)]
        which: String,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Runs directory (needed by the checkpoint-backed panels fig3c/fig5c).
        #[arg(long)]
        runs: Option<PathBuf>,
        /// Accuracy floor for the trained-network filter (default: the
        /// task's threshold; inference = 0.90).
        #[arg(long)]
        floor: Option<f64>,
        /// Task whose filter threshold applies (default inference).
        #[arg(long)]
        task: Option<String>,
        /// Overwrite an existing output file.
        #[arg(long)]
        force: bool,
    },
    /// Render a figure extract as a standalone SVG.
    Plot {
        /// Figure extract CSV (from `figures`).
        #[arg(long = "in")]
        input: PathBuf,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
        /// Overwrite an existing output file.
        #[arg(long)]
        force: bool,
    },
    /// Compare production kernels against independent slow oracles.
    Selftest,
}

/// A failure routed to an exit code; the message becomes the JSON error line.
struct Failure {
    exit_code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure { exit_code: EXIT_USAGE, message: message.into() }
    }

    fn runtime(message: impl Into<String>) -> Failure {
        Failure { exit_code: EXIT_RUNTIME, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::InvalidArg(_) => Failure::usage(e.to_string()),
            _ => Failure::runtime(e.to_string()),
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                std::process::exit(EXIT_OK);
            }
            emit_error(EXIT_USAGE, &e.to_string());
            std::process::exit(EXIT_USAGE);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(f) => {
            emit_error(f.exit_code, &f.message);
            std::process::exit(f.exit_code);
        }
    }
}

fn emit_error(exit_code: i32, message: &str) {
    let line = serde_json::json!({ "error": message, "exit_code": exit_code });
    eprintln!("{line}");
}

/// Refuse to silently overwrite an existing output file.
fn guard_overwrite(path: &Path, force: bool) -> Result<(), Failure> {
    if path.exists() && !force {
        return Err(Failure::usage(format!(
            "{} already exists; pass --force to overwrite",
            path.display()
        )));
    }
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::GenTask { task, out, seed, per_class, force } => {
            gen_task(&task, &out, seed, per_class, force)
        }
        Command::Train { kind, gamma, seed, task, out, force, overrides } => {
            train(&kind, gamma, seed, &task, &out, force, &overrides)
        }
        Command::Sweep { config, out } => sweep(&config, &out),
        Command::Analyze { runs, out, force } => analyze(&runs, &out, force),
        Command::Figures { metrics, which, out, runs, floor, task, force } => {
            figures(&metrics, &which, &out, runs.as_deref(), floor, task.as_deref(), force)
        }
        Command::Plot { input, out, force } => plot(&input, &out, force),
        Command::Selftest => run_selftest(),
    }
}

fn gen_task(
    task: &str,
    out: &Path,
    seed: u64,
    per_class: usize,
    force: bool,
) -> Result<i32, Failure> {
    let kind = TaskKind::from_str(task)?;
    if kind != TaskKind::SyntheticSpikes {
        return Err(Failure::usage(format!(
            "--task {task} is not generatable; only synthetic-spikes is"
        )));
    }
    guard_overwrite(out, force)?;
    let mut rng = RandomSource::new(seed);
    let dataset = gen_synthetic_spike_task(
        &mut rng,
        SYNTHETIC_CLASSES,
        SYNTHETIC_CHANNELS,
        per_class,
        SYNTHETIC_DURATION_MS,
    )?;
    write_spike_dataset(out, &dataset)?;
    println!(
        "wrote {} samples ({} classes x {}) to {}",
        dataset.samples.len(),
        dataset.classes,
        per_class,
        out.display()
    );
    Ok(EXIT_OK)
}

fn train(
    kind: &str,
    gamma: f64,
    seed: u64,
    task: &str,
    out: &Path,
    force: bool,
    over: &TrainOverrides,
) -> Result<i32, Failure> {
    if !(gamma >= 0.0) {
        return Err(Failure::usage(format!(
            "--gamma must be a finite value >= 0, got {gamma}"
        )));
    }
    let kind = RegularizerKind::from_str(kind)?;
    let task = TaskKind::from_str(task)?;

    // Reuse the sweep plumbing for a single cell so train/sweep runs are
    // byte-identical for the same coordinates.
    let mut sweep_cfg = SweepConfig::desk_rate();
    sweep_cfg.kinds = vec![kind];
    sweep_cfg.task = task;
    sweep_cfg.seeds = 1;
    sweep_cfg.base_seed = seed;
    sweep_cfg.epochs = over.epochs;
    sweep_cfg.learning_rate = over.lr;
    sweep_cfg.batch_size = over.batch_size;
    sweep_cfg.hidden = over.hidden;
    sweep_cfg.trials_per_epoch = over.trials_per_epoch;
    sweep_cfg.eval_trials = over.eval_trials;
    if let Some(s) = over.dataset_seed {
        sweep_cfg.dataset_seed = s;
    }
    if let Some(n) = over.train_per_class {
        sweep_cfg.train_per_class = n;
    }
    if let Some(n) = over.eval_per_class {
        sweep_cfg.eval_per_class = n;
    }
    sweep_cfg.event_train_path = over.events_train.clone();
    sweep_cfg.event_eval_path = over.events_eval.clone();
    if task == TaskKind::Shd {
        sweep_cfg.validate()?;
    }

    let cfg: TrainConfig = sweep_cfg.train_config(kind, gamma, seed);
    cfg.validate()?;
    let run_dir = out.join(run_dir_name(kind, gamma, seed));
    if force && run_dir.exists() {
        std::fs::remove_dir_all(&run_dir)
            .map_err(|e| Failure::runtime(format!("{}: {e}", run_dir.display())))?;
    }
    if !force && harness::run_is_complete(&run_dir, cfg.epochs) {
        println!("{} is already complete; --force retrains", run_dir.display());
        return Ok(EXIT_OK);
    }
    let data = load_task_data(&sweep_cfg)?;
    let manifests = train_cell(&cfg, &data, &run_dir)?;
    let last = manifests.last().expect("training writes >= 1 checkpoint");
    println!(
        "trained {} gamma={gamma:e} seed={seed}: accuracy {:.4}, task loss {:.4} -> {}",
        kind,
        last.accuracy,
        last.task_loss,
        run_dir.display()
    );
    Ok(EXIT_OK)
}

fn sweep(config_path: &Path, out: &Path) -> Result<i32, Failure> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| Failure::usage(format!("{}: {e}", config_path.display())))?;
    let config: SweepConfig = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("{}: {e}", config_path.display())))?;
    let outcome = run_sweep(&config, out)?;
    println!(
        "sweep complete: {} records; {} failed runs; table at {}",
        outcome.table.len(),
        outcome.failures.len(),
        out.join("metrics.csv").display()
    );
    for (kind, grid) in &outcome.grids {
        println!("  {kind} gammas: {grid:?}");
    }
    for f in &outcome.failures {
        println!("  failed: {} gamma={:e} seed={}: {}", f.kind, f.gamma, f.seed, f.message);
    }
    Ok(EXIT_OK)
}

fn analyze(runs: &Path, out: &Path, force: bool) -> Result<i32, Failure> {
    guard_overwrite(out, force)?;
    let table = analyze_runs(runs)?;
    table.write_csv(out)?;
    println!("analyzed {} checkpoints -> {}", table.len(), out.display());
    Ok(EXIT_OK)
}

fn figures(
    metrics: &Path,
    which: &str,
    out: &Path,
    runs: Option<&Path>,
    floor: Option<f64>,
    task: Option<&str>,
    force: bool,
) -> Result<i32, Failure> {
    guard_overwrite(out, force)?;
    let which = FigureKind::from_str(which)?;
    let table = MetricsTable::read_csv(metrics)?;
    let floor = match (floor, task) {
        (Some(f), _) => f,
        (None, Some(t)) => accuracy_floor(TaskKind::from_str(t)?),
        (None, None) => accuracy_floor(TaskKind::Inference),
    };
    // The checkpoint-backed panels need the lattice of the stored networks;
    // infer it from any checkpoint once the runs directory is known.
    let lattice = match runs {
        Some(dir) => {
            let hidden = first_hidden_size(&table, dir)?;
            Some(build_lattice(lattice_dims_for(hidden))?)
        }
        None => None,
    };
    let csv = figure_data(&table, which, runs, lattice.as_ref(), floor)?;
    write_text(out, &csv)?;
    println!("{} -> {} ({} rows)", which.as_str(), out.display(), csv.lines().count() - 1);
    Ok(EXIT_OK)
}

fn first_hidden_size(table: &MetricsTable, runs: &Path) -> Result<usize, Failure> {
    let first = table
        .records
        .first()
        .ok_or_else(|| Failure::usage("metrics table is empty".to_string()))?;
    let dir = sernn::training::epoch_dir(
        &runs.join(run_dir_name(first.kind, first.gamma, first.seed)),
        first.epoch,
    );
    let cp = sernn::training::read_checkpoint(&dir)?;
    Ok(cp.array_as_matrix("w_rec")?.rows())
}

fn plot(input: &Path, out: &Path, force: bool) -> Result<i32, Failure> {
    guard_overwrite(out, force)?;
    let csv = std::fs::read_to_string(input)
        .map_err(|e| Failure::usage(format!("{}: {e}", input.display())))?;
    let title = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "figure".to_string());
    let svg = render_svg(&csv, None, &title)?;
    write_text(out, &svg)?;
    println!("{} -> {}", input.display(), out.display());
    Ok(EXIT_OK)
}

fn run_selftest() -> Result<i32, Failure> {
    let checks = selftest::run_all();
    let mut failed = 0;
    for c in &checks {
        let status = if c.passed { "ok  " } else { "FAIL" };
        println!("{status} {} — {}", c.name, c.detail);
        if !c.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(Failure {
            exit_code: EXIT_SELFTEST,
            message: format!("{failed} of {} oracle checks failed", checks.len()),
        });
    }
    println!("all {} oracle checks passed", checks.len());
    Ok(EXIT_OK)
}
