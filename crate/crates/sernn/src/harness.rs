//! Sweep orchestration: gamma grids, parallel training over (kind, gamma,
//! seed) cells, checkpoint analysis into a metrics table, group statistics,
//! and figure-ready CSV extracts.
//!
//! Runs are independent and individually deterministic, so parallelism
//! width never changes results; the table is sorted canonically before it
//! is written.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::constraints::RegularizerKind;
use crate::embedding::{build_lattice, DistanceLattice};
use crate::error::{Error, Result};
use crate::metrics::{analyze_checkpoint, MetricRecord, MetricsTable};
use crate::numerics::{eigenvalues, mann_whitney, mean, median, standard_error};
use crate::spiking::{self, BinnedDataset};
use crate::training::{
    self, epoch_dir, read_checkpoint, run_dir_name, synthetic_dataset_pair, CheckpointManifest,
    TaskKind, TrainConfig,
};

/// Bin width and horizon for event files recorded in real time (the
/// long-running digit benchmark).
pub const EVENT_FILE_DT_MS: f64 = 2.0;
pub const EVENT_FILE_MAX_STEPS: usize = 500;

/// First geometric calibration probe, doubled until the filter breaks.
pub const CALIBRATION_BASE_GAMMA: f64 = 1e-6;
pub const CALIBRATION_MAX_DOUBLINGS: u32 = 30;

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn default_gamma_count() -> usize {
    10
}

fn default_dataset_seed() -> u64 {
    0xda7a
}

fn default_train_per_class() -> usize {
    24
}

fn default_eval_per_class() -> usize {
    20
}

/// One sweep: which regularizers, which gamma grid, how many seeds, and the
/// per-run training knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub kinds: Vec<RegularizerKind>,
    pub task: TaskKind,
    /// Seeds per (kind, gamma) cell; run seeds are `base_seed..base_seed+seeds`.
    pub seeds: u64,
    #[serde(default)]
    pub base_seed: u64,
    /// Explicit grid shared by every kind; wins over the linear grid
    /// parameters.
    #[serde(default)]
    pub gamma_list: Option<Vec<f64>>,
    /// Linear grid point count, 0 to the kind's ceiling inclusive.
    #[serde(default = "default_gamma_count")]
    pub gamma_count: usize,
    /// Per-kind linear grid ceiling. The penalties differ by orders of
    /// magnitude in effective strength, so each kind sweeps its own range;
    /// cross-kind statistics pair grid *positions*, not absolute gammas.
    /// Kinds missing from the map are calibrated before the sweep.
    #[serde(default)]
    pub gamma_max: BTreeMap<RegularizerKind, f64>,
    /// Worker threads; the `SERNN_THREADS` environment variable caps it.
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub epochs: Option<usize>,
    #[serde(default)]
    pub learning_rate: Option<f64>,
    #[serde(default)]
    pub batch_size: Option<usize>,
    #[serde(default)]
    pub hidden: Option<usize>,
    #[serde(default)]
    pub trials_per_epoch: Option<usize>,
    #[serde(default)]
    pub eval_trials: Option<usize>,
    /// Shared dataset stream for spiking sweeps (one dataset per sweep; only
    /// network seeds vary across runs).
    #[serde(default = "default_dataset_seed")]
    pub dataset_seed: u64,
    #[serde(default = "default_train_per_class")]
    pub train_per_class: usize,
    #[serde(default = "default_eval_per_class")]
    pub eval_per_class: usize,
    /// Event files for the long-running digit task (train, eval).
    #[serde(default)]
    pub event_train_path: Option<PathBuf>,
    #[serde(default)]
    pub event_eval_path: Option<PathBuf>,
}

impl SweepConfig {
    /// Desk-scale rate sweep: L1 vs the space+communicability penalty,
    /// 10 gammas x 10 seeds.
    pub fn desk_rate() -> SweepConfig {
        SweepConfig {
            kinds: vec![RegularizerKind::L1, RegularizerKind::SpaceComm],
            task: TaskKind::Inference,
            seeds: 10,
            base_seed: 0,
            gamma_list: None,
            gamma_count: 10,
            gamma_max: BTreeMap::new(),
            workers: default_workers(),
            epochs: None,
            learning_rate: None,
            batch_size: None,
            hidden: None,
            trials_per_epoch: None,
            eval_trials: None,
            dataset_seed: default_dataset_seed(),
            train_per_class: default_train_per_class(),
            eval_per_class: default_eval_per_class(),
            event_train_path: None,
            event_eval_path: None,
        }
    }

    /// Desk-scale spiking sweep on the synthetic task: 5 gammas x 4 seeds.
    pub fn desk_spiking() -> SweepConfig {
        let mut c = SweepConfig::desk_rate();
        c.task = TaskKind::SyntheticSpikes;
        c.seeds = 4;
        c.gamma_count = 5;
        c
    }

    pub fn validate(&self) -> Result<()> {
        if self.kinds.is_empty() {
            return Err(Error::InvalidArg("sweep needs at least one regularizer kind".into()));
        }
        if self.seeds == 0 {
            return Err(Error::InvalidArg("sweep needs at least one seed per cell".into()));
        }
        match &self.gamma_list {
            Some(list) if list.is_empty() => {
                return Err(Error::InvalidArg("explicit gamma list is empty".into()))
            }
            Some(list) if list.iter().any(|g| !(*g >= 0.0)) => {
                return Err(Error::InvalidArg("gammas must be finite and >= 0".into()))
            }
            None if self.gamma_count == 0 => {
                return Err(Error::InvalidArg("gamma grid needs at least one point".into()))
            }
            _ => {}
        }
        if self.task == TaskKind::Shd
            && (self.event_train_path.is_none() || self.event_eval_path.is_none())
        {
            return Err(Error::InvalidArg(
                "the event-file task needs event_train_path and event_eval_path".into(),
            ));
        }
        Ok(())
    }

    /// Training config for one sweep cell.
    pub fn train_config(&self, kind: RegularizerKind, gamma: f64, seed: u64) -> TrainConfig {
        let mut cfg = TrainConfig::new(kind, gamma, seed, self.task);
        if let Some(e) = self.epochs {
            cfg.epochs = e;
        }
        if let Some(lr) = self.learning_rate {
            cfg.learning_rate = lr;
        }
        if let Some(b) = self.batch_size {
            cfg.batch_size = b;
        }
        if let Some(h) = self.hidden {
            cfg.hidden = h;
        }
        if let Some(t) = self.trials_per_epoch {
            cfg.trials_per_epoch = t;
        }
        if let Some(e) = self.eval_trials {
            cfg.eval_trials = e;
        }
        cfg
    }

    fn epochs_per_run(&self) -> usize {
        self.epochs
            .unwrap_or(if self.task.is_spiking() { 50 } else { 10 })
    }

    /// The worker count after applying the `SERNN_THREADS` cap.
    pub fn effective_workers(&self) -> usize {
        let cap = std::env::var("SERNN_THREADS")
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|&n| n > 0)
            .unwrap_or(usize::MAX);
        self.workers.max(1).min(cap)
    }

    /// Linear grid `0..=gamma_max`, or the explicit list (sorted, deduped).
    pub fn grid_from_max(&self, gamma_max: f64) -> Vec<f64> {
        if let Some(list) = &self.gamma_list {
            let mut g = list.clone();
            g.sort_by(|a, b| a.total_cmp(b));
            g.dedup();
            return g;
        }
        if self.gamma_count == 1 {
            return vec![0.0];
        }
        (0..self.gamma_count)
            .map(|i| gamma_max * i as f64 / (self.gamma_count - 1) as f64)
            .collect()
    }

    /// One grid per kind, calibrating ceilings that the config leaves open.
    pub fn resolve_grids(
        &self,
        data: &TaskData,
        calibration_dir: &Path,
    ) -> Result<Vec<(RegularizerKind, Vec<f64>)>> {
        let mut grids = Vec::with_capacity(self.kinds.len());
        for &kind in &self.kinds {
            let gamma_max = if self.gamma_list.is_some() {
                0.0 // explicit list; ceiling unused
            } else {
                match self.gamma_max.get(&kind) {
                    Some(&g) => g,
                    None => calibrate_gamma_max(self, kind, data, calibration_dir, None)?,
                }
            };
            grids.push((kind, self.grid_from_max(gamma_max)));
        }
        Ok(grids)
    }
}

/// Train/eval data for spiking cells, shared across the whole sweep.
pub enum TaskData {
    Rate,
    Spiking {
        train: BinnedDataset,
        eval: BinnedDataset,
    },
}

/// Build the shared dataset for a sweep (rate sweeps carry none).
pub fn load_task_data(config: &SweepConfig) -> Result<TaskData> {
    match config.task {
        TaskKind::Inference => Ok(TaskData::Rate),
        TaskKind::SyntheticSpikes => {
            let (train, eval) = synthetic_dataset_pair(
                config.dataset_seed,
                config.train_per_class,
                config.eval_per_class,
            )?;
            Ok(TaskData::Spiking { train, eval })
        }
        TaskKind::Shd => {
            let load = |path: &Path| -> Result<BinnedDataset> {
                let ds = spiking::read_spike_dataset(path)?;
                spiking::bin_events(&ds, EVENT_FILE_DT_MS, EVENT_FILE_MAX_STEPS)
            };
            let train = load(config.event_train_path.as_ref().expect("validated"))?;
            let eval = load(config.event_eval_path.as_ref().expect("validated"))?;
            Ok(TaskData::Spiking { train, eval })
        }
    }
}

/// Train one cell into `run_dir` (epoch 0 plus every training epoch).
pub fn train_cell(
    config: &TrainConfig,
    data: &TaskData,
    run_dir: &Path,
) -> Result<Vec<CheckpointManifest>> {
    match data {
        TaskData::Rate => training::train_rate(config, run_dir),
        TaskData::Spiking { train, eval } => training::train_spiking(config, train, eval, run_dir),
    }
}

/// True when every epoch manifest of a run is present on disk.
pub fn run_is_complete(run_dir: &Path, epochs: usize) -> bool {
    (0..=epochs).all(|e| epoch_dir(run_dir, e).join("manifest.json").is_file())
}

// ---------------------------------------------------------------------------
// Gamma calibration.

/// Grow gamma geometrically (1e-6 * 2^k) until fewer than half of the probe
/// seeds pass the accuracy filter; returns the last gamma where at least
/// half passed.
///
/// `threshold` overrides the task's filter threshold (used by tests; `None`
/// keeps the real filter). If even the first probe fails, the probe is
/// retried at gamma = 0 to distinguish "penalty too strong" (returns the
/// base gamma as a floor) from "task never trains" (error).
pub fn calibrate_gamma_max(
    config: &SweepConfig,
    kind: RegularizerKind,
    data: &TaskData,
    scratch: &Path,
    threshold: Option<f64>,
) -> Result<f64> {
    let probe_seeds: Vec<u64> = (config.base_seed..config.base_seed + config.seeds.min(3)).collect();
    if probe_seeds.len() < 3 {
        return Err(Error::InvalidArg(format!(
            "calibration needs >= 3 probe seeds, sweep has {}",
            probe_seeds.len()
        )));
    }
    let passes = |manifest: &CheckpointManifest| -> bool {
        match threshold {
            Some(t) => manifest.accuracy > t,
            None => training::passes_filter(manifest),
        }
    };
    let probe = |gamma: f64, k: u32| -> Result<usize> {
        let mut passed = 0;
        for &seed in &probe_seeds {
            let cfg = config.train_config(kind, gamma, seed);
            let run_dir = scratch.join(format!("probe_{}_{k}_{seed}", kind.as_str()));
            let manifests = if run_is_complete(&run_dir, cfg.epochs) {
                (0..=cfg.epochs)
                    .map(|e| read_checkpoint(&epoch_dir(&run_dir, e)).map(|c| c.manifest))
                    .collect::<Result<Vec<_>>>()?
            } else {
                train_cell(&cfg, data, &run_dir)?
            };
            if manifests.last().map(|m| passes(m)).unwrap_or(false) {
                passed += 1;
            }
        }
        Ok(passed)
    };

    let need = probe_seeds.len().div_ceil(2);
    let mut last_good: Option<f64> = None;
    for k in 0..=CALIBRATION_MAX_DOUBLINGS {
        let gamma = CALIBRATION_BASE_GAMMA * f64::powi(2.0, k as i32);
        let passed = probe(gamma, k)?;
        if passed >= need {
            last_good = Some(gamma);
        } else {
            break;
        }
    }
    match last_good {
        Some(g) => Ok(g),
        None => {
            // First probe already failed; check whether the task trains at all.
            if probe(0.0, u32::MAX)? >= need {
                Ok(CALIBRATION_BASE_GAMMA)
            } else {
                Err(Error::Diverged(format!(
                    "calibration: fewer than half of probe seeds pass the accuracy \
                     filter even at gamma = 0 for kind {kind}"
                )))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// The sweep.

/// One failed run, kept for the attrition report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunFailure {
    pub kind: RegularizerKind,
    pub gamma: f64,
    pub seed: u64,
    pub message: String,
}

/// Everything a sweep produced.
pub struct SweepOutcome {
    pub table: MetricsTable,
    /// The gamma grid actually swept, per kind.
    pub grids: Vec<(RegularizerKind, Vec<f64>)>,
    pub failures: Vec<RunFailure>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Cell {
    kind: RegularizerKind,
    gamma: f64,
    seed: u64,
}

/// Run (or resume) a sweep under `out_dir`: train every missing cell,
/// analyze every epoch checkpoint of every completed cell, and write
/// `metrics.csv` plus `failures.json`.
///
/// Individual run failures are recorded and the sweep continues. Completed
/// runs are detected by manifest presence and skipped; partially written
/// runs are retrained from scratch (deterministic, so existing files are
/// rewritten byte-identically).
pub fn run_sweep(config: &SweepConfig, out_dir: &Path) -> Result<SweepOutcome> {
    config.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    check_config_snapshot(config, out_dir)?;

    let data = load_task_data(config)?;
    let grids = config.resolve_grids(&data, &out_dir.join("calibration"))?;
    let epochs = config.epochs_per_run();

    let mut cells = Vec::new();
    for (kind, grid) in &grids {
        for &gamma in grid {
            for seed_off in 0..config.seeds {
                cells.push(Cell {
                    kind: *kind,
                    gamma,
                    seed: config.base_seed + seed_off,
                });
            }
        }
    }
    let runs_root = out_dir.join("runs");

    // Fast path: a finished sweep leaves a metrics table covering every cell
    // and an empty failure report. Reuse it instead of re-analyzing several
    // hundred checkpoints on every invocation.
    if let Some(table) = reuse_finished_sweep(out_dir, &runs_root, &cells, epochs)? {
        return Ok(SweepOutcome {
            table,
            grids,
            failures: Vec::new(),
        });
    }

    // Phase 1: train whatever is missing.
    let next = AtomicUsize::new(0);
    let failures: Mutex<Vec<RunFailure>> = Mutex::new(Vec::new());
    let worker = || {
        loop {
            let i = next.fetch_add(1, Ordering::Relaxed);
            let Some(cell) = cells.get(i) else { break };
            let run_dir = runs_root.join(run_dir_name(cell.kind, cell.gamma, cell.seed));
            if run_is_complete(&run_dir, epochs) {
                continue;
            }
            let cfg = config.train_config(cell.kind, cell.gamma, cell.seed);
            if let Err(e) = train_cell(&cfg, &data, &run_dir) {
                failures.lock().expect("no poisoned locks").push(RunFailure {
                    kind: cell.kind,
                    gamma: cell.gamma,
                    seed: cell.seed,
                    message: e.to_string(),
                });
            }
        }
    };
    let workers = config.effective_workers().min(cells.len().max(1));
    if workers <= 1 {
        worker();
    } else {
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(&worker);
            }
        });
    }
    let failures = failures.into_inner().expect("no poisoned locks");

    // Phase 2: analyze every epoch of every completed run.
    let lattice = build_lattice(
        config
            .train_config(config.kinds[0], 0.0, config.base_seed)
            .lattice_dims(),
    )?;
    let mut jobs = Vec::new();
    for cell in &cells {
        let run_dir = runs_root.join(run_dir_name(cell.kind, cell.gamma, cell.seed));
        if run_is_complete(&run_dir, epochs) {
            for epoch in 0..=epochs {
                jobs.push(epoch_dir(&run_dir, epoch));
            }
        }
    }
    let next = AtomicUsize::new(0);
    let records: Mutex<Vec<MetricRecord>> = Mutex::new(Vec::with_capacity(jobs.len()));
    let analysis_errors: Mutex<Vec<String>> = Mutex::new(Vec::new());
    let analyzer = || {
        loop {
            let i = next.fetch_add(1, Ordering::Relaxed);
            let Some(dir) = jobs.get(i) else { break };
            match read_checkpoint(dir).and_then(|cp| analyze_checkpoint(&cp, &lattice)) {
                Ok(record) => records.lock().expect("no poisoned locks").push(record),
                Err(e) => analysis_errors
                    .lock()
                    .expect("no poisoned locks")
                    .push(format!("{}: {e}", dir.display())),
            }
        }
    };
    if workers <= 1 {
        analyzer();
    } else {
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(&analyzer);
            }
        });
    }
    let errors = analysis_errors.into_inner().expect("no poisoned locks");
    if let Some(first) = errors.first() {
        return Err(Error::InvalidArg(format!(
            "{} checkpoint(s) failed analysis; first: {first}",
            errors.len()
        )));
    }
    let table = MetricsTable::new(records.into_inner().expect("no poisoned locks"));
    assert_no_duplicate_keys(&table)?;

    table.write_csv(&out_dir.join("metrics.csv"))?;
    let failures_path = out_dir.join("failures.json");
    let json = serde_json::to_string_pretty(&failures)?;
    std::fs::write(&failures_path, json).map_err(|e| Error::io(&failures_path, e))?;

    Ok(SweepOutcome {
        table,
        grids,
        failures,
    })
}

/// Load `metrics.csv` from a previous invocation if it provably covers the
/// whole sweep: every cell's run complete, `failures.json` present and
/// empty, and the table holding exactly one record per (cell, epoch).
fn reuse_finished_sweep(
    out_dir: &Path,
    runs_root: &Path,
    cells: &[Cell],
    epochs: usize,
) -> Result<Option<MetricsTable>> {
    let metrics_path = out_dir.join("metrics.csv");
    let failures_path = out_dir.join("failures.json");
    if !metrics_path.is_file() || !failures_path.is_file() {
        return Ok(None);
    }
    let json = std::fs::read_to_string(&failures_path).map_err(|e| Error::io(&failures_path, e))?;
    let past: Vec<RunFailure> = match serde_json::from_str(&json) {
        Ok(past) => past,
        Err(_) => return Ok(None),
    };
    if !past.is_empty() {
        return Ok(None);
    }
    let all_complete = cells.iter().all(|cell| {
        run_is_complete(
            &runs_root.join(run_dir_name(cell.kind, cell.gamma, cell.seed)),
            epochs,
        )
    });
    if !all_complete {
        return Ok(None);
    }
    let table = MetricsTable::read_csv(&metrics_path)?;
    if table.len() != cells.len() * (epochs + 1) {
        return Ok(None);
    }
    assert_no_duplicate_keys(&table)?;
    Ok(Some(table))
}

/// Backfill a metrics table from an existing checkpoint tree: every
/// `*/epoch_*/manifest.json` under `runs_dir` is read and analyzed. The
/// lattice is inferred from each checkpoint's hidden size.
pub fn analyze_runs(runs_dir: &Path) -> Result<MetricsTable> {
    let mut manifest_dirs = Vec::new();
    let entries = std::fs::read_dir(runs_dir).map_err(|e| Error::io(runs_dir, e))?;
    for entry in entries {
        let run = entry.map_err(|e| Error::io(runs_dir, e))?.path();
        if !run.is_dir() {
            continue;
        }
        let epochs = std::fs::read_dir(&run).map_err(|e| Error::io(&run, e))?;
        for epoch in epochs {
            let dir = epoch.map_err(|e| Error::io(&run, e))?.path();
            if dir.is_dir() && dir.join("manifest.json").is_file() {
                manifest_dirs.push(dir);
            }
        }
    }
    manifest_dirs.sort();
    if manifest_dirs.is_empty() {
        return Err(Error::EmptyInput("no epoch checkpoints under the runs directory"));
    }
    let mut lattices: Vec<(usize, DistanceLattice)> = Vec::new();
    let mut records = Vec::with_capacity(manifest_dirs.len());
    for dir in &manifest_dirs {
        let cp = read_checkpoint(dir)?;
        let hidden = cp.array_as_matrix("w_rec")?.rows();
        if !lattices.iter().any(|(n, _)| *n == hidden) {
            lattices.push((hidden, build_lattice(training::lattice_dims_for(hidden))?));
        }
        let lattice = &lattices.iter().find(|(n, _)| *n == hidden).expect("just inserted").1;
        records.push(analyze_checkpoint(&cp, lattice)?);
    }
    let table = MetricsTable::new(records);
    assert_no_duplicate_keys(&table)?;
    Ok(table)
}

/// Refuse to resume into a directory created with a different config.
fn check_config_snapshot(config: &SweepConfig, out_dir: &Path) -> Result<()> {
    let path = out_dir.join("sweep_config.json");
    let current = serde_json::to_string_pretty(config)?;
    if path.is_file() {
        let existing = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        if existing != current {
            return Err(Error::InvalidArg(format!(
                "{} holds a different sweep config; use a fresh output directory",
                path.display()
            )));
        }
        return Ok(());
    }
    std::fs::write(&path, current).map_err(|e| Error::io(&path, e))
}

fn assert_no_duplicate_keys(table: &MetricsTable) -> Result<()> {
    let mut seen = BTreeSet::new();
    for r in &table.records {
        let key = (r.kind.as_str(), r.gamma.to_bits(), r.seed, r.epoch);
        if !seen.insert(key) {
            return Err(Error::InvalidArg(format!(
                "duplicate record key ({}, {}, {}, {})",
                r.kind, r.gamma, r.seed, r.epoch
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Group statistics.

/// Scalar columns a comparison or figure extract can select.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Accuracy,
    Q,
    HW,
    HC,
    HLambda,
    LambdaMax,
    TotalWeight,
    SymIndex,
    ImagFraction,
    DistCorrR,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::Q => "q",
            Metric::HW => "h_w",
            Metric::HC => "h_c",
            Metric::HLambda => "h_lambda",
            Metric::LambdaMax => "lambda_max",
            Metric::TotalWeight => "total_weight",
            Metric::SymIndex => "sym_index",
            Metric::ImagFraction => "imag_fraction",
            Metric::DistCorrR => "dist_corr_r",
        }
    }

    pub fn of(self, r: &MetricRecord) -> Option<f64> {
        match self {
            Metric::Accuracy => Some(r.accuracy),
            Metric::Q => Some(r.q),
            Metric::HW => Some(r.h_w),
            Metric::HC => Some(r.h_c),
            Metric::HLambda => Some(r.h_lambda),
            Metric::LambdaMax => Some(r.lambda_max),
            Metric::TotalWeight => Some(r.total_weight),
            Metric::SymIndex => Some(r.sym_index),
            Metric::ImagFraction => Some(r.imag_fraction),
            Metric::DistCorrR => r.dist_corr_r,
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Metric> {
        Ok(match s {
            "accuracy" => Metric::Accuracy,
            "q" => Metric::Q,
            "h_w" => Metric::HW,
            "h_c" => Metric::HC,
            "h_lambda" => Metric::HLambda,
            "lambda_max" => Metric::LambdaMax,
            "total_weight" => Metric::TotalWeight,
            "sym_index" => Metric::SymIndex,
            "imag_fraction" => Metric::ImagFraction,
            "dist_corr_r" => Metric::DistCorrR,
            other => {
                return Err(Error::InvalidArg(format!("unknown metric {other:?}")))
            }
        })
    }
}

/// A one-sided two-group contrast.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupComparison {
    pub metric: String,
    pub kind_a: RegularizerKind,
    pub kind_b: RegularizerKind,
    pub median_a: f64,
    pub median_b: f64,
    pub u: f64,
    /// One-sided p for the alternative "A runs smaller than B".
    pub p: f64,
    pub n_a: usize,
    pub n_b: usize,
}

/// The largest epoch in the table.
pub fn final_epoch(table: &MetricsTable) -> Option<usize> {
    table.records.iter().map(|r| r.epoch).max()
}

/// Distinct gammas of one kind, ascending — the kind's grid as swept.
pub fn gamma_grid_of(table: &MetricsTable, kind: RegularizerKind) -> Vec<f64> {
    let mut gs: Vec<f64> = table
        .records
        .iter()
        .filter(|r| r.kind == kind)
        .map(|r| r.gamma)
        .collect();
    gs.sort_by(|a, b| a.total_cmp(b));
    gs.dedup();
    gs
}

/// The top half of a grid by position (for a 10-point grid, indices 5..10).
/// Cross-kind statistics pair positions, not absolute gammas, because each
/// kind sweeps its own range.
pub fn upper_half_positions(grid_len: usize) -> Vec<usize> {
    (grid_len / 2..grid_len).collect()
}

/// Records of one kind at one epoch passing the accuracy filter, restricted
/// to the given positions of that kind's own gamma grid (empty slice = the
/// whole grid).
pub fn select<'t>(
    table: &'t MetricsTable,
    kind: RegularizerKind,
    epoch: usize,
    positions: &[usize],
    accuracy_floor: f64,
) -> Vec<&'t MetricRecord> {
    let grid = gamma_grid_of(table, kind);
    let gammas: Vec<f64> = if positions.is_empty() {
        grid
    } else {
        positions.iter().filter_map(|&i| grid.get(i).copied()).collect()
    };
    table
        .records
        .iter()
        .filter(|r| {
            r.kind == kind
                && r.epoch == epoch
                && r.accuracy > accuracy_floor
                && gammas.iter().any(|&g| g == r.gamma)
        })
        .collect()
}

/// Mann-Whitney contrast of one metric between two kinds at one epoch and
/// matched grid positions, filter-passing records only. `p` tests "A
/// smaller than B".
pub fn compare_groups(
    table: &MetricsTable,
    metric: Metric,
    kind_a: RegularizerKind,
    kind_b: RegularizerKind,
    epoch: usize,
    positions: &[usize],
    accuracy_floor: f64,
) -> Result<GroupComparison> {
    let a: Vec<f64> = select(table, kind_a, epoch, positions, accuracy_floor)
        .iter()
        .filter_map(|r| metric.of(r))
        .collect();
    let b: Vec<f64> = select(table, kind_b, epoch, positions, accuracy_floor)
        .iter()
        .filter_map(|r| metric.of(r))
        .collect();
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("a comparison group is empty after filtering"));
    }
    let (u, p) = mann_whitney(&a, &b)?;
    Ok(GroupComparison {
        metric: metric.as_str().to_string(),
        kind_a,
        kind_b,
        median_a: median(&a)?,
        median_b: median(&b)?,
        u,
        p,
        n_a: a.len(),
        n_b: b.len(),
    })
}

// ---------------------------------------------------------------------------
// Figure extracts.

/// The figure panels the extractor knows how to prepare.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureKind {
    /// Modularity trajectory per kind: epoch curves with 2-SE bands.
    Fig2a,
    /// Weight-entropy trajectory per kind.
    Fig2b,
    /// (Q, H_W) scatter at the final epoch.
    Fig2c,
    /// (total weight, H_W) scatter at the final epoch.
    Fig3a,
    /// Per-connection (distance, probability) pairs of one representative run.
    Fig3c,
    /// Communicability-entropy trajectory per kind.
    Fig4a,
    /// Median spectral radius per gamma (rendered on a ln scale).
    Fig5a,
    /// Median spectral entropy per gamma.
    Fig5b,
    /// Complex spectra at 10..50% of the maximum gamma.
    Fig5c,
}

impl FigureKind {
    pub const ALL: [FigureKind; 9] = [
        FigureKind::Fig2a,
        FigureKind::Fig2b,
        FigureKind::Fig2c,
        FigureKind::Fig3a,
        FigureKind::Fig3c,
        FigureKind::Fig4a,
        FigureKind::Fig5a,
        FigureKind::Fig5b,
        FigureKind::Fig5c,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FigureKind::Fig2a => "fig2a",
            FigureKind::Fig2b => "fig2b",
            FigureKind::Fig2c => "fig2c",
            FigureKind::Fig3a => "fig3a",
            FigureKind::Fig3c => "fig3c",
            FigureKind::Fig4a => "fig4a",
            FigureKind::Fig5a => "fig5a",
            FigureKind::Fig5b => "fig5b",
            FigureKind::Fig5c => "fig5c",
        }
    }
}

impl FromStr for FigureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<FigureKind> {
        FigureKind::ALL
            .iter()
            .copied()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidArg(format!("unknown figure {s:?}")))
    }
}

fn fmt_float(x: f64) -> String {
    format!("{x:.8e}")
}

/// Per-epoch mean and 2-SE band of one metric, per kind.
fn trajectory_csv(
    table: &MetricsTable,
    metric: Metric,
    accuracy_floor: f64,
) -> Result<String> {
    let mut kinds: Vec<RegularizerKind> = Vec::new();
    for r in &table.records {
        if !kinds.contains(&r.kind) {
            kinds.push(r.kind);
        }
    }
    let mut epochs: Vec<usize> = table.records.iter().map(|r| r.epoch).collect();
    epochs.sort_unstable();
    epochs.dedup();

    let mut out = format!("kind,epoch,mean_{},two_se,n\n", metric.as_str());
    let mut any = false;
    for kind in kinds {
        for &epoch in &epochs {
            let values: Vec<f64> = select(table, kind, epoch, &[], accuracy_floor)
                .iter()
                .filter_map(|r| metric.of(r))
                .collect();
            if values.is_empty() {
                continue;
            }
            any = true;
            let se = standard_error(&values).map(|s| 2.0 * s);
            writeln!(
                out,
                "{},{},{},{},{}",
                kind.as_str(),
                epoch,
                fmt_float(mean(&values)),
                se.map(fmt_float).unwrap_or_default(),
                values.len()
            )
            .expect("writing to a String cannot fail");
        }
    }
    if !any {
        return Err(Error::EmptyInput("no records pass the filter for this trajectory"));
    }
    Ok(out)
}

/// Final-epoch scatter of two metrics, per kind.
fn scatter_csv(
    table: &MetricsTable,
    x: Metric,
    y: Metric,
    accuracy_floor: f64,
) -> Result<String> {
    let epoch = final_epoch(table).ok_or(Error::EmptyInput("empty metrics table"))?;
    let mut out = format!("kind,gamma,seed,{},{}\n", x.as_str(), y.as_str());
    let mut any = false;
    for r in &table.records {
        if r.epoch != epoch || r.accuracy <= accuracy_floor {
            continue;
        }
        let (Some(xv), Some(yv)) = (x.of(r), y.of(r)) else { continue };
        any = true;
        writeln!(
            out,
            "{},{},{},{},{}",
            r.kind.as_str(),
            fmt_float(r.gamma),
            r.seed,
            fmt_float(xv),
            fmt_float(yv)
        )
        .expect("writing to a String cannot fail");
    }
    if !any {
        return Err(Error::EmptyInput("no records pass the filter for this scatter"));
    }
    Ok(out)
}

/// Median of one metric per (kind, gamma) at the final epoch, each kind
/// walking its own grid.
fn grid_median_csv(table: &MetricsTable, metric: Metric, accuracy_floor: f64) -> Result<String> {
    let epoch = final_epoch(table).ok_or(Error::EmptyInput("empty metrics table"))?;
    let mut kinds: Vec<RegularizerKind> = Vec::new();
    for r in &table.records {
        if !kinds.contains(&r.kind) {
            kinds.push(r.kind);
        }
    }
    let mut out = format!("kind,gamma,median_{},n\n", metric.as_str());
    let mut any = false;
    for kind in kinds {
        let grid = gamma_grid_of(table, kind);
        for pos in 0..grid.len() {
            let values: Vec<f64> = select(table, kind, epoch, &[pos], accuracy_floor)
                .iter()
                .filter_map(|r| metric.of(r))
                .collect();
            if values.is_empty() {
                continue;
            }
            any = true;
            writeln!(
                out,
                "{},{},{},{}",
                kind.as_str(),
                fmt_float(grid[pos]),
                fmt_float(median(&values)?),
                values.len()
            )
            .expect("writing to a String cannot fail");
        }
    }
    if !any {
        return Err(Error::EmptyInput("no records pass the filter for this grid"));
    }
    Ok(out)
}

/// Distance/probability pairs of one representative run: the space+comm
/// network at the gamma nearest 50% of that kind's grid maximum, smallest
/// filter-passing seed, final epoch.
fn connection_pairs_csv(
    table: &MetricsTable,
    runs_dir: &Path,
    lattice: &DistanceLattice,
    accuracy_floor: f64,
) -> Result<String> {
    let epoch = final_epoch(table).ok_or(Error::EmptyInput("empty metrics table"))?;
    let grid = gamma_grid_of(table, RegularizerKind::SpaceComm);
    let target = grid.last().copied().unwrap_or(0.0) * 0.5;
    let mut candidates: Vec<&MetricRecord> = table
        .records
        .iter()
        .filter(|r| {
            r.kind == RegularizerKind::SpaceComm && r.epoch == epoch && r.accuracy > accuracy_floor
        })
        .collect();
    if candidates.is_empty() {
        return Err(Error::EmptyInput(
            "no filter-passing space+comm run for the connection-pair extract",
        ));
    }
    candidates.sort_by(|a, b| {
        ((a.gamma - target).abs(), a.gamma, a.seed)
            .partial_cmp(&((b.gamma - target).abs(), b.gamma, b.seed))
            .expect("finite gammas")
    });
    let chosen = candidates[0];
    let dir = epoch_dir(
        &runs_dir.join(run_dir_name(chosen.kind, chosen.gamma, chosen.seed)),
        chosen.epoch,
    );
    let cp = read_checkpoint(&dir)?;
    let w = cp.array_as_matrix("w_rec")?;
    let total: f64 = w.data().iter().map(|v| v.abs()).sum();
    if total <= 0.0 {
        return Err(Error::ZeroWeight("representative checkpoint has no weight"));
    }
    let d = lattice.distances();
    let mut out = String::from("kind,gamma,seed,distance,probability\n");
    for i in 0..w.rows() {
        for j in 0..w.cols() {
            if i == j {
                continue;
            }
            let p = w.get(i, j).abs() / total;
            if p > 0.0 {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    chosen.kind.as_str(),
                    fmt_float(chosen.gamma),
                    chosen.seed,
                    fmt_float(d.get(i, j)),
                    fmt_float(p)
                )
                .expect("writing to a String cannot fail");
            }
        }
    }
    Ok(out)
}

/// Complex spectra at gammas nearest {10,20,30,40,50}% of each kind's own
/// grid maximum: one representative run per kind and percentage (smallest
/// filter-passing seed, else smallest seed), final epoch.
fn spectra_csv(
    table: &MetricsTable,
    runs_dir: &Path,
    accuracy_floor: f64,
) -> Result<String> {
    let epoch = final_epoch(table).ok_or(Error::EmptyInput("empty metrics table"))?;
    let mut kinds: Vec<RegularizerKind> = Vec::new();
    for r in &table.records {
        if !kinds.contains(&r.kind) {
            kinds.push(r.kind);
        }
    }
    let mut out = String::from("kind,percent,gamma,seed,re,im\n");
    let mut any = false;
    for kind in kinds {
        let grid = gamma_grid_of(table, kind);
        let gamma_top = grid.last().copied().unwrap_or(0.0);
        for pct in [10usize, 20, 30, 40, 50] {
            let target = gamma_top * pct as f64 / 100.0;
            let Some(gamma) = grid
                .iter()
                .copied()
                .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
            else {
                continue;
            };
            let mut rows: Vec<&MetricRecord> = table
                .records
                .iter()
                .filter(|r| r.kind == kind && r.epoch == epoch && r.gamma == gamma)
                .collect();
            if rows.is_empty() {
                continue;
            }
            rows.sort_by_key(|r| (r.accuracy <= accuracy_floor, r.seed));
            let chosen = rows[0];
            let dir = epoch_dir(
                &runs_dir.join(run_dir_name(kind, chosen.gamma, chosen.seed)),
                epoch,
            );
            let cp = read_checkpoint(&dir)?;
            let w = cp.array_as_matrix("w_rec")?;
            let spec = eigenvalues(&w)?;
            for (re, im) in spec.iter() {
                any = true;
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    kind.as_str(),
                    pct,
                    fmt_float(chosen.gamma),
                    chosen.seed,
                    fmt_float(re),
                    fmt_float(im)
                )
                .expect("writing to a String cannot fail");
            }
        }
    }
    if !any {
        return Err(Error::EmptyInput("no spectra available for this extract"));
    }
    Ok(out)
}

/// Figure-ready CSV for one panel. `runs_dir` (the sweep's `runs/`
/// directory) and `lattice` are needed only by the checkpoint-backed panels.
pub fn figure_data(
    table: &MetricsTable,
    which: FigureKind,
    runs_dir: Option<&Path>,
    lattice: Option<&DistanceLattice>,
    accuracy_floor: f64,
) -> Result<String> {
    let need_runs = || {
        runs_dir.ok_or(Error::EmptyInput(
            "this panel reads checkpoints; pass the sweep's runs directory",
        ))
    };
    match which {
        FigureKind::Fig2a => trajectory_csv(table, Metric::Q, accuracy_floor),
        FigureKind::Fig2b => trajectory_csv(table, Metric::HW, accuracy_floor),
        FigureKind::Fig2c => scatter_csv(table, Metric::Q, Metric::HW, accuracy_floor),
        FigureKind::Fig3a => scatter_csv(table, Metric::TotalWeight, Metric::HW, accuracy_floor),
        FigureKind::Fig3c => {
            let lattice = lattice.ok_or(Error::EmptyInput(
                "the connection-pair panel needs the lattice",
            ))?;
            connection_pairs_csv(table, need_runs()?, lattice, accuracy_floor)
        }
        FigureKind::Fig4a => trajectory_csv(table, Metric::HC, accuracy_floor),
        FigureKind::Fig5a => grid_median_csv(table, Metric::LambdaMax, accuracy_floor),
        FigureKind::Fig5b => grid_median_csv(table, Metric::HLambda, accuracy_floor),
        FigureKind::Fig5c => spectra_csv(table, need_runs()?, accuracy_floor),
    }
}

/// The filter floor for a task (strict inequality applied at use sites).
pub fn accuracy_floor(task: TaskKind) -> f64 {
    match task {
        TaskKind::Inference => 0.90,
        TaskKind::Shd => 0.45,
        TaskKind::SyntheticSpikes => 0.60,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::METRICS_CSV_HEADER;
    use crate::numerics::RandomSource;

    fn tiny_sweep_config() -> SweepConfig {
        let mut c = SweepConfig::desk_rate();
        c.seeds = 1;
        c.gamma_list = Some(vec![0.0]);
        c.kinds = vec![RegularizerKind::L1];
        c.epochs = Some(2);
        c.hidden = Some(20);
        c.trials_per_epoch = Some(60);
        c.batch_size = Some(30);
        c.eval_trials = Some(40);
        c
    }

    #[test]
    fn one_cell_two_epochs_yields_three_records() {
        let tmp = tempfile::tempdir().unwrap();
        let outcome = run_sweep(&tiny_sweep_config(), tmp.path()).unwrap();
        assert_eq!(outcome.table.len(), 3);
        let epochs: Vec<usize> = outcome.table.records.iter().map(|r| r.epoch).collect();
        assert_eq!(epochs, vec![0, 1, 2]);
        assert!(outcome.failures.is_empty());
        assert!(tmp.path().join("metrics.csv").is_file());
        assert!(tmp.path().join("failures.json").is_file());
    }

    #[test]
    fn analyze_runs_backfills_the_same_table() {
        let tmp = tempfile::tempdir().unwrap();
        let outcome = run_sweep(&tiny_sweep_config(), tmp.path()).unwrap();
        let rebuilt = analyze_runs(&tmp.path().join("runs")).unwrap();
        assert_eq!(rebuilt.records, outcome.table.records);
        assert!(matches!(
            analyze_runs(&tmp.path().join("nowhere")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn rerun_resumes_without_duplicates_or_retraining() {
        let tmp = tempfile::tempdir().unwrap();
        let config = tiny_sweep_config();
        let first = run_sweep(&config, tmp.path()).unwrap();
        let run_dir = tmp.path().join("runs").join(run_dir_name(
            RegularizerKind::L1,
            0.0,
            0,
        ));
        let manifest = epoch_dir(&run_dir, 2).join("manifest.json");
        let metrics = tmp.path().join("metrics.csv");
        let mtime_before = std::fs::metadata(&manifest).unwrap().modified().unwrap();
        let csv_before = std::fs::metadata(&metrics).unwrap().modified().unwrap();
        let second = run_sweep(&config, tmp.path()).unwrap();
        assert_eq!(first.table.len(), second.table.len());
        assert_eq!(first.table.records, second.table.records);
        let mtime_after = std::fs::metadata(&manifest).unwrap().modified().unwrap();
        assert_eq!(mtime_before, mtime_after, "completed run was retrained");
        let csv_after = std::fs::metadata(&metrics).unwrap().modified().unwrap();
        assert_eq!(csv_before, csv_after, "finished sweep was re-analyzed");
    }

    #[test]
    fn stale_metrics_table_is_rebuilt_not_reused() {
        let tmp = tempfile::tempdir().unwrap();
        let config = tiny_sweep_config();
        let first = run_sweep(&config, tmp.path()).unwrap();
        let metrics = tmp.path().join("metrics.csv");
        std::fs::write(&metrics, format!("{METRICS_CSV_HEADER}\n")).unwrap();
        let second = run_sweep(&config, tmp.path()).unwrap();
        assert_eq!(first.table.records, second.table.records);
        let reread = MetricsTable::read_csv(&metrics).unwrap();
        assert_eq!(reread.records, first.table.records);
    }

    #[test]
    fn interrupted_run_is_retrained_identically() {
        let tmp = tempfile::tempdir().unwrap();
        let config = tiny_sweep_config();
        run_sweep(&config, tmp.path()).unwrap();
        // Drop the final manifest to simulate an interrupt mid-write.
        let run_dir = tmp.path().join("runs").join(run_dir_name(
            RegularizerKind::L1,
            0.0,
            0,
        ));
        let manifest = epoch_dir(&run_dir, 2).join("manifest.json");
        let original = std::fs::read(&manifest).unwrap();
        std::fs::remove_file(&manifest).unwrap();
        run_sweep(&config, tmp.path()).unwrap();
        assert_eq!(std::fs::read(&manifest).unwrap(), original);
    }

    #[test]
    fn sweep_rejects_config_drift_in_out_dir() {
        let tmp = tempfile::tempdir().unwrap();
        let config = tiny_sweep_config();
        run_sweep(&config, tmp.path()).unwrap();
        let mut other = config.clone();
        other.seeds = 2;
        assert!(matches!(
            run_sweep(&other, tmp.path()),
            Err(Error::InvalidArg(_))
        ));
    }

    #[test]
    fn worker_count_does_not_change_the_table() {
        let base = {
            let mut c = tiny_sweep_config();
            c.seeds = 2;
            c.gamma_list = Some(vec![0.0, 1e-4]);
            c
        };
        let tmp1 = tempfile::tempdir().unwrap();
        let tmp2 = tempfile::tempdir().unwrap();
        let serial = run_sweep(&base, tmp1.path()).unwrap();
        let mut parallel_cfg = base.clone();
        parallel_cfg.workers = 4;
        let parallel = run_sweep(&parallel_cfg, tmp2.path()).unwrap();
        assert_eq!(serial.table.records, parallel.table.records);
    }

    #[test]
    fn sernn_threads_caps_workers() {
        let mut c = tiny_sweep_config();
        c.workers = 8;
        std::env::set_var("SERNN_THREADS", "2");
        assert_eq!(c.effective_workers(), 2);
        std::env::remove_var("SERNN_THREADS");
        assert_eq!(c.effective_workers(), 8);
    }

    #[test]
    fn linear_grid_spans_zero_to_max() {
        let mut c = SweepConfig::desk_rate();
        c.gamma_count = 5;
        let grid = c.grid_from_max(2.0);
        assert_eq!(grid, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        c.gamma_list = Some(vec![0.3, 0.1, 0.3]);
        assert_eq!(c.grid_from_max(9.9), vec![0.1, 0.3]);
    }

    #[test]
    fn config_json_round_trip() {
        let c = SweepConfig::desk_spiking();
        let json = serde_json::to_string_pretty(&c).unwrap();
        let back: SweepConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.kinds, c.kinds);
        assert_eq!(back.task, TaskKind::SyntheticSpikes);
        assert_eq!(back.gamma_count, 5);
        // A minimal hand-written config file relies on defaults.
        let sparse: SweepConfig = serde_json::from_str(
            "{\"kinds\":[\"sernn\"],\"task\":\"inference\",\"seeds\":2}",
        )
        .unwrap();
        assert_eq!(sparse.gamma_count, 10);
        assert_eq!(sparse.workers, default_workers());
        assert!(sparse.gamma_max.is_empty());
        // Per-kind ceilings survive the round trip.
        let mut with_max = SweepConfig::desk_rate();
        with_max.gamma_max.insert(RegularizerKind::L1, 0.01);
        with_max.gamma_max.insert(RegularizerKind::SpaceComm, 0.5);
        let json = serde_json::to_string(&with_max).unwrap();
        let back: SweepConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.gamma_max.get(&RegularizerKind::L1), Some(&0.01));
        assert_eq!(back.gamma_max.get(&RegularizerKind::SpaceComm), Some(&0.5));
    }

    fn fake_record(
        kind: RegularizerKind,
        gamma: f64,
        seed: u64,
        epoch: usize,
        accuracy: f64,
        value: f64,
    ) -> MetricRecord {
        MetricRecord {
            kind,
            gamma,
            seed,
            epoch,
            accuracy,
            q: value,
            h_w: value,
            h_c: value,
            h_lambda: value,
            lambda_max: value.abs(),
            total_weight: value.abs(),
            sym_index: 0.5,
            imag_fraction: 0.5,
            dist_corr_r: Some(-value),
            dist_corr_p: Some(0.01),
        }
    }

    #[test]
    fn compare_groups_identical_and_disjoint() {
        let mut records = Vec::new();
        for seed in 0..6u64 {
            records.push(fake_record(RegularizerKind::L1, 0.0, seed, 1, 0.95, 1.0 + seed as f64));
            records.push(fake_record(
                RegularizerKind::SpaceComm,
                0.0,
                seed,
                1,
                0.95,
                1.0 + seed as f64,
            ));
        }
        let table = MetricsTable::new(records);
        let cmp = compare_groups(
            &table,
            Metric::HW,
            RegularizerKind::SpaceComm,
            RegularizerKind::L1,
            1,
            &[],
            0.90,
        )
        .unwrap();
        assert_eq!(cmp.p, 0.5);
        assert_eq!(cmp.n_a, 6);

        let mut records = Vec::new();
        for seed in 0..5u64 {
            records.push(fake_record(RegularizerKind::L1, 0.0, seed, 1, 0.95, 10.0 + seed as f64));
            records.push(fake_record(
                RegularizerKind::SpaceComm,
                0.0,
                seed,
                1,
                0.95,
                seed as f64,
            ));
        }
        let table = MetricsTable::new(records);
        let cmp = compare_groups(
            &table,
            Metric::HW,
            RegularizerKind::SpaceComm,
            RegularizerKind::L1,
            1,
            &[],
            0.90,
        )
        .unwrap();
        assert_eq!(cmp.u, 0.0);
        assert!(cmp.p < 0.05);
    }

    #[test]
    fn compare_groups_detects_a_shifted_normal() {
        let mut rng = RandomSource::new(64);
        let mut records = Vec::new();
        for seed in 0..30u64 {
            records.push(fake_record(
                RegularizerKind::SpaceComm,
                0.0,
                seed,
                1,
                0.95,
                rng.next_normal::<f64>(),
            ));
        }
        for seed in 0..30u64 {
            records.push(fake_record(
                RegularizerKind::L1,
                0.0,
                seed,
                1,
                0.95,
                1.0 + rng.next_normal::<f64>(),
            ));
        }
        let table = MetricsTable::new(records);
        let cmp = compare_groups(
            &table,
            Metric::HW,
            RegularizerKind::SpaceComm,
            RegularizerKind::L1,
            1,
            &[],
            0.90,
        )
        .unwrap();
        assert!(cmp.p < 0.01, "p = {}", cmp.p);
        assert!(cmp.median_a < cmp.median_b);
    }

    #[test]
    fn compare_groups_requires_nonempty_groups() {
        let table = MetricsTable::new(vec![fake_record(
            RegularizerKind::L1,
            0.0,
            0,
            1,
            0.5, // below the floor
            1.0,
        )]);
        assert!(matches!(
            compare_groups(
                &table,
                Metric::HW,
                RegularizerKind::SpaceComm,
                RegularizerKind::L1,
                1,
                &[],
                0.90,
            ),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn records_never_duplicate_keys() {
        let r = fake_record(RegularizerKind::L1, 0.0, 0, 1, 0.95, 1.0);
        let table = MetricsTable::new(vec![r.clone(), r]);
        assert!(assert_no_duplicate_keys(&table).is_err());
    }

    #[test]
    fn upper_half_takes_top_positions() {
        assert_eq!(upper_half_positions(4), vec![2, 3]);
        assert_eq!(upper_half_positions(3), vec![1, 2]);
        assert_eq!(upper_half_positions(10), vec![5, 6, 7, 8, 9]);
    }

    #[test]
    fn selection_pairs_grid_positions_across_unequal_gamma_ranges() {
        // Two kinds sweep different absolute gammas; position 1 must pick
        // each kind's own second grid point.
        let mut records = Vec::new();
        for (kind, gammas) in [
            (RegularizerKind::L1, [0.0, 0.001]),
            (RegularizerKind::SpaceComm, [0.0, 0.5]),
        ] {
            for (pos, &g) in gammas.iter().enumerate() {
                for seed in 0..3u64 {
                    records.push(fake_record(kind, g, seed, 1, 0.95, pos as f64));
                }
            }
        }
        let table = MetricsTable::new(records);
        assert_eq!(gamma_grid_of(&table, RegularizerKind::L1), vec![0.0, 0.001]);
        assert_eq!(gamma_grid_of(&table, RegularizerKind::SpaceComm), vec![0.0, 0.5]);
        let l1 = select(&table, RegularizerKind::L1, 1, &[1], 0.90);
        let sc = select(&table, RegularizerKind::SpaceComm, 1, &[1], 0.90);
        assert_eq!(l1.len(), 3);
        assert_eq!(sc.len(), 3);
        assert!(l1.iter().all(|r| r.gamma == 0.001));
        assert!(sc.iter().all(|r| r.gamma == 0.5));
        // An out-of-range position selects nothing and errors downstream.
        assert!(select(&table, RegularizerKind::L1, 1, &[7], 0.90).is_empty());
    }

    #[test]
    fn trajectory_extract_single_record_blank_se() {
        let table = MetricsTable::new(vec![fake_record(RegularizerKind::L1, 0.0, 0, 0, 0.95, 0.7)]);
        let csv = figure_data(&table, FigureKind::Fig2a, None, None, 0.90).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("kind,epoch,mean_q,two_se,n"));
        let row = lines.next().unwrap();
        assert!(row.starts_with("l1,0,"), "{row}");
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[3], "", "SE must be blank for n = 1");
        assert_eq!(cells[4], "1");
        assert!(lines.next().is_none());
    }

    #[test]
    fn scatter_extract_counts_filtered_final_epoch_rows() {
        let mut records = Vec::new();
        for seed in 0..4u64 {
            // Final epoch is 2; seed 3 fails the filter.
            let acc = if seed == 3 { 0.5 } else { 0.95 };
            records.push(fake_record(RegularizerKind::L1, 0.0, seed, 2, acc, 1.0));
            records.push(fake_record(RegularizerKind::L1, 0.0, seed, 1, 0.95, 1.0));
        }
        let table = MetricsTable::new(records);
        let csv = figure_data(&table, FigureKind::Fig2c, None, None, 0.90).unwrap();
        assert_eq!(csv.lines().count(), 1 + 3);
    }

    #[test]
    fn figure_extracts_from_a_real_tiny_sweep() {
        let tmp = tempfile::tempdir().unwrap();
        let mut config = tiny_sweep_config();
        config.gamma_list = Some(vec![0.0, 1e-5, 2e-5, 3e-5]);
        config.kinds = vec![RegularizerKind::L1, RegularizerKind::SpaceComm];
        let outcome = run_sweep(&config, tmp.path()).unwrap();
        let lattice = build_lattice((20, 1, 1)).unwrap();
        let runs = tmp.path().join("runs");
        // Floor 0 so even untrained tiny nets appear.
        for which in FigureKind::ALL {
            let csv = figure_data(&outcome.table, which, Some(&runs), Some(&lattice), 0.0).unwrap();
            assert!(csv.lines().count() >= 2, "{}: {csv}", which.as_str());
        }
        // Spectrum extract carries conjugate-symmetric rows.
        let spectra = figure_data(&outcome.table, FigureKind::Fig5c, Some(&runs), None, 0.0).unwrap();
        let mut ims: Vec<f64> = spectra
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(5).unwrap().parse::<f64>().unwrap())
            .collect();
        ims.sort_by(|a, b| a.total_cmp(b));
        let sum: f64 = ims.iter().sum();
        assert!(sum.abs() < 1e-6, "conjugate pairs should cancel, sum = {sum}");
    }

    #[test]
    fn calibration_returns_floor_probe_and_respects_threshold_zero() {
        let tmp = tempfile::tempdir().unwrap();
        let mut config = tiny_sweep_config();
        config.seeds = 3;
        config.epochs = Some(1);
        config.trials_per_epoch = Some(30);
        config.eval_trials = Some(20);
        let data = load_task_data(&config).unwrap();
        // Threshold 1.0 is unreachable: even gamma = 0 fails, so calibration
        // reports that nothing trains.
        let err = calibrate_gamma_max(
            &config,
            RegularizerKind::L1,
            &data,
            &tmp.path().join("cal_hi"),
            Some(1.0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Diverged(_)));
        // Threshold 0 always passes: calibration walks to the probe cap.
        let g = calibrate_gamma_max(
            &config,
            RegularizerKind::L1,
            &data,
            &tmp.path().join("cal_lo"),
            Some(0.0),
        )
        .unwrap();
        let expected = CALIBRATION_BASE_GAMMA * f64::powi(2.0, CALIBRATION_MAX_DOUBLINGS as i32);
        assert_eq!(g, expected);
        // Deterministic on rerun (probe runs are reused from disk).
        let g2 = calibrate_gamma_max(
            &config,
            RegularizerKind::L1,
            &data,
            &tmp.path().join("cal_lo"),
            Some(0.0),
        )
        .unwrap();
        assert_eq!(g, g2);
    }
}
