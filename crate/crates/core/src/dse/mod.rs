//! Grid enumeration, per-configuration runs, the parallel sweep and its JSONL results file.

mod aggregate;

pub use aggregate::{
    box_stats, compact_label, curve_csv, factor_distribution, factor_distribution_csv, factor_means, factor_means_csv,
    failure_report, overlap_csv, scatter_csv, top5_overlap, BoxStats, Factor, LevelMean,
    OverlapCell, OverlapRow, DEFAULT_MIN_COUNT, TOP_K,
};

use crate::ansatz::{ArchitectureKind, DEFAULT_LAYERS};
use crate::dataprep::DesignMatrix;
use crate::encode::EncodingKind;
use crate::error::{Error, Result};
use crate::kv::KvFile;
use crate::metrics::{threshold_curve, CurveKind, MetricsReport, ThresholdCurve, CURVE_POINTS};
use crate::model::{Hqnn, HqnnConfig, Measurement};
use crate::optim::{cross_validate, fold_seed, train_fixed, TrainConfig};
use crate::scalar::Scalar;
use crate::seed::{self, tag};
use crate::simcore::Shots;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::mpsc;
use std::time::Instant;

pub const SCHEMA_VERSION: u32 = 1;

/// Axes, training recipe and base seed of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub encodings: Vec<EncodingKind>,
    pub architectures: Vec<ArchitectureKind>,
    pub measurements: Vec<Measurement>,
    pub shot_levels: Vec<Shots>,
    pub n_layers: usize,
    pub train: TrainConfig,
    pub base_seed: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            encodings: EncodingKind::ALL.to_vec(),
            architectures: ArchitectureKind::ALL.to_vec(),
            measurements: Measurement::ALL.to_vec(),
            shot_levels: Shots::GRID.iter().map(|&n| Shots::finite(n).expect("grid levels are positive")).collect(),
            n_layers: DEFAULT_LAYERS,
            train: TrainConfig::default(),
            base_seed: 42,
        }
    }
}

const SPEC_KEYS: [&str; 16] = [
    "encodings",
    "architectures",
    "measurements",
    "shots",
    "layers",
    "base_seed",
    "epochs",
    "batch_size",
    "learning_rate",
    "adam_beta1",
    "adam_beta2",
    "adam_epsilon",
    "patience",
    "min_delta",
    "folds",
    "split_seed",
];

fn parse_list<V: FromStr<Err = Error>>(kv: &KvFile, key: &str) -> Result<Option<Vec<V>>> {
    kv.list(key)
        .map(|items| {
            items
                .iter()
                .map(|s| s.parse::<V>().map_err(|e| Error::Spec(format!("{key}: {e}"))))
                .collect()
        })
        .transpose()
}

fn parse_scalar<V: FromStr>(kv: &KvFile, key: &str, slot: &mut V) -> Result<()> {
    if let Some(raw) = kv.get(key) {
        *slot = raw
            .parse()
            .map_err(|_| Error::Spec(format!("invalid value for `{key}`: `{raw}`")))?;
    }
    Ok(())
}

impl GridSpec {
    /// Starts from the defaults and applies every key present in the file.
    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        if let Some(k) = kv.keys().find(|k| !SPEC_KEYS.contains(k)) {
            return Err(Error::Spec(format!("unknown grid key `{k}` (valid: {})", SPEC_KEYS.join(", "))));
        }
        let mut spec = GridSpec::default();
        if let Some(v) = parse_list(kv, "encodings")? {
            spec.encodings = v;
        }
        if let Some(v) = parse_list(kv, "architectures")? {
            spec.architectures = v;
        }
        if let Some(v) = parse_list(kv, "measurements")? {
            spec.measurements = v;
        }
        if let Some(v) = parse_list(kv, "shots")? {
            spec.shot_levels = v;
        }
        parse_scalar(kv, "layers", &mut spec.n_layers)?;
        parse_scalar(kv, "base_seed", &mut spec.base_seed)?;
        let t = &mut spec.train;
        parse_scalar(kv, "epochs", &mut t.epochs)?;
        parse_scalar(kv, "batch_size", &mut t.batch_size)?;
        parse_scalar(kv, "learning_rate", &mut t.learning_rate)?;
        parse_scalar(kv, "adam_beta1", &mut t.adam_beta1)?;
        parse_scalar(kv, "adam_beta2", &mut t.adam_beta2)?;
        parse_scalar(kv, "adam_epsilon", &mut t.adam_epsilon)?;
        parse_scalar(kv, "patience", &mut t.patience)?;
        parse_scalar(kv, "min_delta", &mut t.min_delta)?;
        parse_scalar(kv, "folds", &mut t.folds)?;
        parse_scalar(kv, "split_seed", &mut t.split_seed)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_kv(&KvFile::read(path)?)
    }

    pub fn to_kv(&self) -> KvFile {
        fn join<V: ToString>(v: &[V]) -> String {
            v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
        }
        let mut kv = KvFile::new();
        kv.push("encodings", join(&self.encodings));
        kv.push("architectures", join(&self.architectures));
        kv.push("measurements", join(&self.measurements));
        kv.push("shots", join(&self.shot_levels));
        kv.push("layers", self.n_layers);
        kv.push("base_seed", self.base_seed);
        let t = &self.train;
        kv.push("epochs", t.epochs);
        kv.push("batch_size", t.batch_size);
        kv.push("learning_rate", t.learning_rate);
        kv.push("adam_beta1", t.adam_beta1);
        kv.push("adam_beta2", t.adam_beta2);
        kv.push("adam_epsilon", t.adam_epsilon);
        kv.push("patience", t.patience);
        kv.push("min_delta", t.min_delta);
        kv.push("folds", t.folds);
        kv.push("split_seed", t.split_seed);
        kv
    }

    pub fn validate(&self) -> Result<()> {
        for (name, len) in [
            ("encodings", self.encodings.len()),
            ("architectures", self.architectures.len()),
            ("measurements", self.measurements.len()),
            ("shots", self.shot_levels.len()),
        ] {
            if len == 0 {
                return Err(Error::Spec(format!("axis `{name}` is empty")));
            }
        }
        if self.n_layers == 0 {
            return Err(Error::Spec("layers must be at least 1".into()));
        }
        self.train.validate().map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn size(&self) -> usize {
        self.encodings.len() * self.architectures.len() * self.measurements.len() * self.shot_levels.len()
    }
}

/// One enumerated configuration with its identity and seed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridPoint {
    pub config: HqnnConfig,
    pub run_id: String,
    pub seed: u64,
}

/// Run seed from the base seed and the run identifier, independent of schedule.
pub fn run_seed(base_seed: u64, run_id: &str) -> u64 {
    seed::derive(base_seed, &[seed::hash_str(run_id)])
}

/// Cartesian product with encoding outermost and shots innermost.
pub fn enumerate_grid(spec: &GridSpec) -> Result<Vec<GridPoint>> {
    spec.validate()?;
    let mut points = Vec::with_capacity(spec.size());
    let mut seen = HashSet::new();
    for &encoding in &spec.encodings {
        for &architecture in &spec.architectures {
            for &measurement in &spec.measurements {
                for &shots in &spec.shot_levels {
                    let mut config = HqnnConfig::new(encoding, architecture, measurement, shots);
                    config.n_layers = spec.n_layers;
                    let run_id = config.run_id();
                    if !seen.insert(run_id.clone()) {
                        return Err(Error::Spec(format!("duplicate grid point `{run_id}`")));
                    }
                    points.push(GridPoint {
                        seed: run_seed(spec.base_seed, &run_id),
                        config,
                        run_id,
                    });
                }
            }
        }
    }
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F32,
    #[default]
    F64,
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precision::F32 => "f32",
            Precision::F64 => "f64",
        })
    }
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "f32" => Ok(Precision::F32),
            "f64" => Ok(Precision::F64),
            _ => Err(Error::Config(format!("unknown precision `{s}` (valid: f32, f64)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldSummary {
    pub fold_index: usize,
    pub val_accuracy: f64,
    pub val_loss: f64,
    pub epochs_ran: usize,
    pub best_epoch: usize,
    /// Accuracy of this fold's best model on the held-out test split.
    pub test_accuracy: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub base_seed: u64,
    pub run_seed: u64,
    pub split_seed: u64,
    pub fold_seeds: Vec<u64>,
    pub refit_seed: u64,
    pub test_seed: u64,
}

impl SeedRecord {
    pub fn derive(base_seed: u64, run_id: &str, cfg: &TrainConfig) -> Self {
        let run = run_seed(base_seed, run_id);
        Self {
            base_seed,
            run_seed: run,
            split_seed: cfg.split_seed,
            fold_seeds: (0..cfg.folds).map(|k| fold_seed(run, k)).collect(),
            refit_seed: seed::derive(run, &[tag::REFIT]),
            test_seed: seed::derive(run, &[tag::TEST]),
        }
    }

    fn fold_test_seed(&self, k: usize) -> u64 {
        seed::derive(self.test_seed, &[1 + k as u64])
    }
}

/// Evaluation rules baked into every record, with a short fingerprint.
pub const DECISION_RULES: [&str; 7] = [
    "test-model=refit on full training split for median per-fold best epoch (rounded up)",
    "test_accuracy_mean=mean test accuracy of per-fold best models",
    "threshold=0.5; curves=101 evenly spaced thresholds",
    "mcc_f1=harmonic mean of MCC and F1 at 0.5, 0 when MCC<=0",
    "sens_spec=balanced accuracy at 0.5",
    "early-stop=strict val-loss decrease >= min_delta, best-epoch params",
    "rotations=RY per qubit per layer; Strong uses Rot(a,b,c) with 3 parameters per qubit per layer",
];

pub fn decisions_fingerprint() -> String {
    format!("{:016x}", seed::hash_str(&DECISION_RULES.join("\n")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub fingerprint: String,
    pub rules: Vec<String>,
}

impl Default for DecisionRecord {
    fn default() -> Self {
        Self {
            fingerprint: decisions_fingerprint(),
            rules: DECISION_RULES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// One configuration's outcome, as persisted one per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub run_id: String,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub config: HqnnConfig,
    pub precision: Precision,
    pub param_count: usize,
    pub fold_results: Vec<FoldSummary>,
    pub refit_epochs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsReport>,
    pub curves: Vec<ThresholdCurve>,
    pub test_labels: Vec<u8>,
    pub test_probabilities: Vec<f64>,
    pub wall_time_s: f64,
    pub seeds: SeedRecord,
    pub decisions: DecisionRecord,
}

impl RunRecord {
    pub fn is_ok(&self) -> bool {
        self.status == RunStatus::Ok && self.metrics.is_some()
    }

    /// A successful record carrying only the given metrics; used for fixtures and imports.
    pub fn from_metrics(config: HqnnConfig, metrics: MetricsReport) -> Self {
        let run_id = config.run_id();
        let train = TrainConfig::default();
        Self {
            schema_version: SCHEMA_VERSION,
            seeds: SeedRecord::derive(0, &run_id, &train),
            run_id,
            status: RunStatus::Ok,
            error: None,
            param_count: config.circuit_param_count() + config.readout_len() + 1,
            config,
            precision: Precision::F64,
            fold_results: Vec::new(),
            refit_epochs: 0,
            metrics: Some(metrics),
            curves: Vec::new(),
            test_labels: Vec::new(),
            test_probabilities: Vec::new(),
            wall_time_s: 0.0,
            decisions: DecisionRecord::default(),
        }
    }

    fn failed(point: &GridPoint, cfg: &TrainConfig, base_seed: u64, precision: Precision, err: &Error, wall: f64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            run_id: point.run_id.clone(),
            status: RunStatus::Failed,
            error: Some(err.to_string()),
            config: point.config,
            precision,
            param_count: point.config.circuit_param_count() + point.config.readout_len() + 1,
            fold_results: Vec::new(),
            refit_epochs: 0,
            metrics: None,
            curves: Vec::new(),
            test_labels: Vec::new(),
            test_probabilities: Vec::new(),
            wall_time_s: wall,
            seeds: SeedRecord::derive(base_seed, &point.run_id, cfg),
            decisions: DecisionRecord::default(),
        }
    }

    pub fn to_json_line(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Integrity(format!("serializing {}: {e}", self.run_id)))
    }
}

fn accuracy(labels: &[u8], probs: &[f64]) -> f64 {
    let correct = labels.iter().zip(probs).filter(|(&y, &p)| u8::from(p >= 0.5) == y).count();
    correct as f64 / labels.len() as f64
}

/// Cross-validates, refits, and evaluates one configuration at scalar type `T`.
pub fn run_config<T: Scalar>(
    config: &HqnnConfig,
    cfg: &TrainConfig,
    base_seed: u64,
    train: &DesignMatrix,
    test: &DesignMatrix,
) -> Result<RunRecord> {
    let start = Instant::now();
    let run_id = config.run_id();
    let seeds = SeedRecord::derive(base_seed, &run_id, cfg);
    if test.is_empty() {
        return Err(Error::Data("test split is empty".into()));
    }
    let model = Hqnn::<T>::new(*config)?;
    let cv = cross_validate(&model, cfg, train, seeds.run_seed)?;
    let test_set = model.prepare_rows(&test.features, &test.labels)?;
    let to_f64 = |v: Vec<T>| v.into_iter().map(|p| p.to_f64_lossy()).collect::<Vec<f64>>();

    let fold_results = cv
        .folds
        .iter()
        .map(|f| {
            let probs = to_f64(model.predict(&f.final_params, &test_set, seeds.fold_test_seed(f.fold_index))?);
            Ok(FoldSummary {
                fold_index: f.fold_index,
                val_accuracy: f.val_accuracy,
                val_loss: f.val_loss,
                epochs_ran: f.epochs_ran,
                best_epoch: f.best_epoch,
                test_accuracy: accuracy(&test.labels, &probs),
                seed: seeds.fold_seeds[f.fold_index],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let test_accuracy_mean = fold_results.iter().map(|f| f.test_accuracy).sum::<f64>() / fold_results.len() as f64;

    let refit_epochs = cv.median_best_epoch();
    let full = model.prepare_rows(&train.features, &train.labels)?;
    let params = train_fixed(&model, cfg, &full, refit_epochs, seeds.refit_seed)?;
    let probs = to_f64(model.predict(&params, &test_set, seeds.test_seed)?);
    let metrics = MetricsReport::compute(&test.labels, &probs, cv.cv_accuracy_mean, test_accuracy_mean)?;
    metrics.check_ranges()?;
    let curves = CurveKind::ALL
        .iter()
        .map(|&k| threshold_curve(&test.labels, &probs, k, CURVE_POINTS))
        .collect::<Result<Vec<_>>>()?;

    Ok(RunRecord {
        schema_version: SCHEMA_VERSION,
        run_id,
        status: RunStatus::Ok,
        error: None,
        config: *config,
        precision: if T::NAME == "f32" { Precision::F32 } else { Precision::F64 },
        param_count: params.len(),
        fold_results,
        refit_epochs,
        metrics: Some(metrics),
        curves,
        test_labels: test.labels.clone(),
        test_probabilities: probs,
        wall_time_s: start.elapsed().as_secs_f64(),
        seeds,
        decisions: DecisionRecord::default(),
    })
}

/// Runs one grid point at the requested precision; failures become failed records.
pub fn run_point(
    point: &GridPoint,
    spec: &GridSpec,
    precision: Precision,
    train: &DesignMatrix,
    test: &DesignMatrix,
) -> RunRecord {
    let start = Instant::now();
    let result = match precision {
        Precision::F32 => run_config::<f32>(&point.config, &spec.train, spec.base_seed, train, test),
        Precision::F64 => run_config::<f64>(&point.config, &spec.train, spec.base_seed, train, test),
    };
    result.unwrap_or_else(|e| {
        log::warn!("run {} failed: {e}", point.run_id);
        RunRecord::failed(point, &spec.train, spec.base_seed, precision, &e, start.elapsed().as_secs_f64())
    })
}

/// Reads a results file; a line that does not parse is an integrity error naming it.
pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: RunRecord = serde_json::from_str(&line).map_err(|e| {
            Error::Integrity(format!("{}:{}: corrupt results line: {e}", path.display(), i + 1))
        })?;
        if rec.schema_version != SCHEMA_VERSION {
            return Err(Error::Integrity(format!(
                "{}:{}: schema version {} (expected {SCHEMA_VERSION})",
                path.display(),
                i + 1,
                rec.schema_version
            )));
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn write_records(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut text = String::new();
    for r in records {
        text.push_str(&r.to_json_line()?);
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepOptions {
    pub workers: usize,
    pub precision: Precision,
    /// Keep records already in the output file and run only missing run_ids.
    pub resume: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            workers: 1,
            precision: Precision::F64,
            resume: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    /// In grid order.
    pub records: Vec<RunRecord>,
    pub executed: Vec<String>,
    pub reused: usize,
}

/// Runs every grid point on a pool of `workers` threads. With `output`, records are
/// appended to the JSONL file by a single writer thread as runs finish.
pub fn run_sweep(
    spec: &GridSpec,
    train: &DesignMatrix,
    test: &DesignMatrix,
    opts: &SweepOptions,
    output: Option<&Path>,
) -> Result<SweepOutcome> {
    let points = enumerate_grid(spec)?;
    let grid_ids: HashSet<&str> = points.iter().map(|p| p.run_id.as_str()).collect();
    let mut existing: Vec<RunRecord> = Vec::new();
    if let Some(path) = output {
        if opts.resume && path.exists() {
            existing = read_records(path)?
                .into_iter()
                .filter(|r| grid_ids.contains(r.run_id.as_str()))
                .collect();
        } else {
            std::fs::write(path, "").map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
        }
    }
    let done: HashSet<String> = existing.iter().map(|r| r.run_id.clone()).collect();
    let pending: Vec<&GridPoint> = points.iter().filter(|p| !done.contains(&p.run_id)).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let (tx, rx) = mpsc::channel::<RunRecord>();
    let writer = output.map(|path| {
        let path = path.to_path_buf();
        std::thread::spawn(move || -> Result<()> {
            let mut file = std::fs::OpenOptions::new()
                .append(true)
                .open(&path)
                .map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
            for rec in rx {
                let line = rec.to_json_line()?;
                writeln!(file, "{line}")
                    .and_then(|_| file.flush())
                    .map_err(|e| Error::io(format!("appending to {}", path.display()), e))?;
            }
            Ok(())
        })
    });

    let fresh: Vec<RunRecord> = pool.install(|| {
        pending
            .par_iter()
            .map_with(tx, |tx, p| {
                let rec = run_point(p, spec, opts.precision, train, test);
                log::info!("{} {:?} in {:.1}s", rec.run_id, rec.status, rec.wall_time_s);
                if output.is_some() {
                    // A closed channel means the writer already failed; its error is reported below.
                    let _ = tx.send(rec.clone());
                }
                rec
            })
            .collect()
    });
    if let Some(handle) = writer {
        handle
            .join()
            .map_err(|_| Error::Integrity("results writer panicked".into()))??;
    }

    let executed = fresh.iter().map(|r| r.run_id.clone()).collect();
    let reused = existing.len();
    let mut by_id: std::collections::HashMap<String, RunRecord> =
        existing.into_iter().chain(fresh).map(|r| (r.run_id.clone(), r)).collect();
    let records = points.iter().filter_map(|p| by_id.remove(&p.run_id)).collect();
    Ok(SweepOutcome {
        records,
        executed,
        reused,
    })
}
