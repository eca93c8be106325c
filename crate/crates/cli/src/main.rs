//! `hqnn-dse`: data preparation, single runs, grid sweeps and aggregation tables.
//!
//! Exit codes: 0 success, 1 usage, 2 data, 3 integrity.

mod manifest;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hqnn::ansatz::ArchitectureKind;
use hqnn::dataprep::{
    ingest_csv, prepare, synth_dataset, tsne_compare, DesignMatrix, ImputePolicy, PrepOptions, RawTable, Schema,
    SynthSpec, TsneConfig,
};
use hqnn::dse::{
    curve_csv, factor_distribution, factor_distribution_csv, factor_means, factor_means_csv,
    enumerate_grid, failure_report, overlap_csv, read_records, run_sweep, scatter_csv, top5_overlap, write_records, Factor,
    GridSpec, Precision, SweepOptions, DEFAULT_MIN_COUNT,
};
use hqnn::encode::EncodingKind;
use hqnn::metrics::{CurveKind, MetricName};
use hqnn::simcore::Shots;
use hqnn::{Error, ErrorClass, Measurement, Result};
use manifest::Manifest;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

/// Environment variable overriding the base seed of `run` and `grid`.
const SEED_ENV: &str = "HQNN_DSE_SEED";

#[derive(Parser, Debug)]
#[command(name = "hqnn-dse", version, about = "Design-space exploration for hybrid quantum neural networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Split, impute, project to 8 components and scale a raw CSV.
    Prep(PrepArgs),
    /// Write a seeded two-class Gaussian dataset as CSV.
    Synth(SynthArgs),
    /// Embed several datasets jointly with t-SNE and compare their centroids.
    Tsne(TsneArgs),
    /// Cross-validate, refit and evaluate one configuration.
    Run(RunArgs),
    /// Run every configuration of a grid spec.
    Grid(GridArgs),
    /// Build plot-ready tables from a results file.
    Aggregate(AggregateArgs),
}

#[derive(Args, Debug)]
struct PrepArgs {
    #[arg(long)]
    input: PathBuf,
    /// `key = value` schema file (label, positive, missing, drop, map.<token>).
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Label column; overrides the schema file.
    #[arg(long)]
    label: Option<String>,
    #[arg(long, default_value = "mean-median", value_parser = parse_via::<ImputePolicy>)]
    policy: ImputePolicy,
    #[arg(long)]
    split_seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, default_value_t = 400)]
    rows: usize,
    #[arg(long, default_value_t = 24)]
    features: usize,
    #[arg(long, default_value_t = 0.625)]
    positive_fraction: f64,
    /// Distance between the class means in units of the per-feature deviation.
    #[arg(long, default_value_t = 1.0)]
    separation: f64,
    /// Added to every feature; used to build shifted datasets.
    #[arg(long, default_value_t = 0.0)]
    shift: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TsneArgs {
    /// Two or more raw CSV files.
    #[arg(long = "input", required = true, num_args = 1)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long)]
    label: Option<String>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    iterations: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Clone)]
struct DataArgs {
    /// Scaled training matrix written by `prep`.
    #[arg(long)]
    train: PathBuf,
    /// Scaled test matrix written by `prep`.
    #[arg(long)]
    test: PathBuf,
}

#[derive(Args, Debug, Clone)]
struct CommonRunArgs {
    /// Base seed; beats HQNN_DSE_SEED, which beats the config file.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "f64", value_parser = parse_via::<Precision>)]
    precision: Precision,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_parser = parse_via::<EncodingKind>)]
    encoding: EncodingKind,
    #[arg(long, value_parser = parse_via::<ArchitectureKind>)]
    arch: ArchitectureKind,
    #[arg(long, value_parser = parse_via::<Measurement>)]
    measure: Measurement,
    /// `analytic` or a positive shot count.
    #[arg(long, value_parser = parse_via::<Shots>)]
    shots: Shots,
    /// Grid-spec style file supplying layers, base_seed and training keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    layers: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[command(flatten)]
    common: CommonRunArgs,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Grid spec file; omitted keys keep their defaults.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Keep finished runs in the results file and execute only the missing ones.
    #[arg(long)]
    resume: bool,
    #[command(flatten)]
    common: CommonRunArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum View {
    FactorMeans,
    FactorDist,
    Overlap,
    Curves,
}

#[derive(Args, Debug)]
struct AggregateArgs {
    #[arg(long)]
    results: PathBuf,
    #[arg(long, value_enum)]
    view: View,
    /// Comma-separated metric names; each view has its own default.
    #[arg(long, value_delimiter = ',', value_parser = parse_via::<MetricName>)]
    metrics: Vec<MetricName>,
    /// Restrict factor views to one factor.
    #[arg(long, value_parser = parse_via::<Factor>)]
    factor: Option<Factor>,
    /// Minimum number of Top-5 appearances for the overlap view.
    #[arg(long, default_value_t = DEFAULT_MIN_COUNT)]
    min_count: usize,
    #[arg(long)]
    out: PathBuf,
}

fn parse_via<V: FromStr<Err = Error>>(s: &str) -> std::result::Result<V, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

fn load_schema(file: Option<&Path>, label: Option<&str>) -> Result<Schema> {
    let mut schema = match file {
        Some(p) => Schema::read(p)?,
        None => Schema::new(label.ok_or_else(|| Error::Config("give --schema or --label".into()))?),
    };
    if let Some(l) = label {
        schema.label = l.to_string();
    }
    Ok(schema)
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Config(format!("{SEED_ENV} = `{v}` is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

/// Flag, then environment, then whatever the spec already holds.
fn resolve_seed(spec: &mut GridSpec, flag: Option<u64>) -> Result<&'static str> {
    if let Some(s) = flag {
        spec.base_seed = s;
        return Ok("flag");
    }
    if let Some(s) = env_seed()? {
        spec.base_seed = s;
        return Ok("env");
    }
    Ok("config")
}

fn cmd_prep(a: &PrepArgs) -> Result<()> {
    let schema = load_schema(a.schema.as_deref(), a.label.as_deref())?;
    let table = ingest_csv(&a.input, &schema)?;
    let mut opts = PrepOptions {
        policy: a.policy,
        ..PrepOptions::default()
    };
    if let Some(s) = a.split_seed {
        opts.split_seed = s;
    }
    let prepared = prepare(&table, &opts)?;
    prepared.provenance.assert_no_leakage()?;
    create_dir(&a.out)?;
    prepared.train.write_csv(&a.out.join("train.csv"))?;
    prepared.test.write_csv(&a.out.join("test.csv"))?;
    let provenance = serde_json::to_string_pretty(&prepared.provenance)
        .map_err(|e| Error::Integrity(format!("serializing provenance: {e}")))?;
    write_text(&a.out.join("provenance.json"), &provenance)?;
    for w in &prepared.provenance.warnings {
        log::warn!("{w}");
    }
    let mut m = Manifest::new("prep");
    m.set("input", a.input.display())
        .set("label", &schema.label)
        .set("policy", opts.policy)
        .set("split_seed", opts.split_seed)
        .set("source_rows", table.n_rows())
        .set("train_rows", prepared.train.len())
        .set("test_rows", prepared.test.len())
        .set("outputs", "train.csv, test.csv, provenance.json");
    m.write(&a.out)?;
    println!(
        "prepared {} rows: {} train, {} test, {} features",
        table.n_rows(),
        prepared.train.len(),
        prepared.test.len(),
        hqnn::encode::N_FEATURES
    );
    Ok(())
}

fn raw_table_csv(t: &RawTable) -> String {
    let mut out = t.columns.join(",");
    let _ = writeln!(out, ",{}", t.label_column);
    for (row, y) in t.cells.iter().zip(&t.labels) {
        for c in row {
            match c {
                Some(v) => {
                    let _ = write!(out, "{v},");
                }
                None => out.push(','),
            }
        }
        let _ = writeln!(out, "{y}");
    }
    out
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let mut spec = SynthSpec::separable(a.features, a.separation, a.rows, a.positive_fraction, a.seed);
    for mean in spec.means.iter_mut() {
        for v in mean.iter_mut() {
            *v += a.shift;
        }
    }
    let table = synth_dataset(&spec)?;
    if let Some(dir) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    write_text(&a.out, &raw_table_csv(&table))?;
    let [neg, pos] = table.class_counts();
    println!("wrote {} rows ({pos} positive, {neg} negative) to {}", table.n_rows(), a.out.display());
    Ok(())
}

fn cmd_tsne(a: &TsneArgs) -> Result<()> {
    if a.inputs.len() < 2 {
        return Err(Error::Config("tsne needs at least two --input files".into()));
    }
    let schema = load_schema(a.schema.as_deref(), a.label.as_deref())?;
    let tables = a
        .inputs
        .iter()
        .map(|p| ingest_csv(p, &schema))
        .collect::<Result<Vec<_>>>()?;
    let names: Vec<String> = a.inputs.iter().map(|p| p.display().to_string()).collect();
    let pairs: Vec<(&str, &RawTable)> = names.iter().map(String::as_str).zip(&tables).collect();
    let cfg = TsneConfig {
        seed: a.seed,
        iterations: a.iterations,
        ..TsneConfig::default()
    };
    let report = tsne_compare(&pairs, &cfg)?;
    create_dir(&a.out)?;

    let mut emb = String::from("dataset,x,y\n");
    for (row, &d) in report.embedding.iter().zip(&report.dataset_of_row) {
        let _ = writeln!(emb, "{},{},{}", report.datasets[d], row[0], row[1]);
    }
    write_text(&a.out.join("embedding.csv"), &emb)?;
    let mut dist = String::from("dataset");
    for n in &report.datasets {
        let _ = write!(dist, ",{n}");
    }
    dist.push('\n');
    for (n, row) in report.datasets.iter().zip(&report.distances) {
        dist.push_str(n);
        for v in row {
            let _ = write!(dist, ",{v}");
        }
        dist.push('\n');
    }
    write_text(&a.out.join("distances.csv"), &dist)?;

    let mut m = Manifest::new("tsne");
    m.set("inputs", names.join(", "))
        .set("label", &schema.label)
        .set("shared_columns", report.shared_columns.join(", "))
        .set("perplexity", report.perplexity)
        .set("distinct_points", report.distinct_points)
        .set("iterations", cfg.iterations)
        .set("learning_rate", cfg.learning_rate)
        .set("seed", cfg.seed)
        .set("spread", report.spread)
        .set("kl_divergence", report.kl_divergence)
        .set("outputs", "embedding.csv, distances.csv");
    m.write(&a.out)?;
    println!("perplexity {}, spread {:.4}", report.perplexity, report.spread);
    for (i, row) in report.distances.iter().enumerate() {
        for (j, d) in row.iter().enumerate().skip(i + 1) {
            println!("{} <-> {}: {d:.4}", report.datasets[i], report.datasets[j]);
        }
    }
    Ok(())
}

fn load_data(d: &DataArgs) -> Result<(DesignMatrix, DesignMatrix)> {
    Ok((DesignMatrix::read_csv(&d.train)?, DesignMatrix::read_csv(&d.test)?))
}

fn sweep_manifest(command: &str, spec: &GridSpec, seed_source: &str, data: &DataArgs, precision: Precision) -> Manifest {
    let mut m = Manifest::new(command);
    m.set("train", data.train.display())
        .set("test", data.test.display())
        .set("precision", precision)
        .set("base_seed_source", seed_source)
        .extend("spec", &spec.to_kv());
    m
}

fn cmd_run(a: &RunArgs) -> Result<()> {
    let mut spec = match &a.config {
        Some(p) => GridSpec::read(p)?,
        None => GridSpec::default(),
    };
    if let Some(v) = a.layers {
        spec.n_layers = v;
    }
    let t = &mut spec.train;
    if let Some(v) = a.epochs {
        t.epochs = v;
    }
    if let Some(v) = a.folds {
        t.folds = v;
    }
    if let Some(v) = a.batch_size {
        t.batch_size = v;
    }
    if let Some(v) = a.learning_rate {
        t.learning_rate = v;
    }
    let seed_source = resolve_seed(&mut spec, a.common.seed)?;
    spec.encodings = vec![a.encoding];
    spec.architectures = vec![a.arch];
    spec.measurements = vec![a.measure];
    spec.shot_levels = vec![a.shots];
    spec.validate()?;
    if !a.shots.is_grid_level() {
        eprintln!("note: shots `{}` is not one of the grid levels {:?}", a.shots, Shots::GRID);
    }
    let (train, test) = load_data(&a.data)?;
    let point = enumerate_grid(&spec)?.remove(0);
    let config = point.config;
    let record = hqnn::dse::run_point(&point, &spec, a.common.precision, &train, &test);
    create_dir(&a.common.out)?;
    write_records(&a.common.out.join("record.jsonl"), std::slice::from_ref(&record))?;
    let mut m = sweep_manifest("run", &spec, seed_source, &a.data, a.common.precision);
    m.set("run_id", &record.run_id)
        .set("run_seed", record.seeds.run_seed)
        .set("refit_seed", record.seeds.refit_seed)
        .set("test_seed", record.seeds.test_seed)
        .set("outputs", "record.jsonl");
    m.write(&a.common.out)?;

    let Some(metrics) = &record.metrics else {
        return Err(Error::Data(format!(
            "run {} failed: {}",
            record.run_id,
            record.error.clone().unwrap_or_default()
        )));
    };
    println!("{}", config.label());
    println!("  refit epochs        {}", record.refit_epochs);
    for name in [
        MetricName::Accuracy,
        MetricName::Precision,
        MetricName::Recall,
        MetricName::Specificity,
        MetricName::F1,
        MetricName::Mcc,
        MetricName::Auc,
        MetricName::CvAccuracyMean,
        MetricName::TestAccuracyMean,
        MetricName::Gps1,
        MetricName::Gps2,
        MetricName::Gps3,
        MetricName::Gps4,
        MetricName::MccF1,
        MetricName::SensSpec,
    ] {
        println!("  {:<20}{:.4}", name.as_str(), metrics.get(name));
    }
    if !metrics.degenerate.is_empty() {
        println!("  degenerate          {}", metrics.degenerate.join(", "));
    }
    Ok(())
}

fn cmd_grid(a: &GridArgs) -> Result<()> {
    let mut spec = match &a.spec {
        Some(p) => GridSpec::read(p)?,
        None => GridSpec::default(),
    };
    let seed_source = resolve_seed(&mut spec, a.common.seed)?;
    let (train, test) = load_data(&a.data)?;
    create_dir(&a.common.out)?;
    let results = a.common.out.join("results.jsonl");
    let opts = SweepOptions {
        workers: a.workers,
        precision: a.common.precision,
        resume: a.resume,
    };
    let outcome = run_sweep(&spec, &train, &test, &opts, Some(&results))?;
    let failures = failure_report(&outcome.records);
    let mut m = sweep_manifest("grid", &spec, seed_source, &a.data, a.common.precision);
    m.set("workers", a.workers)
        .set("resume", a.resume)
        .set("grid_size", spec.size())
        .set("executed", outcome.executed.len())
        .set("reused", outcome.reused)
        .set("failed", failures.len())
        .set("outputs", "results.jsonl");
    m.write(&a.common.out)?;
    println!(
        "{} configurations: {} executed, {} reused, {} failed",
        spec.size(),
        outcome.executed.len(),
        outcome.reused,
        failures.len()
    );
    for (id, err) in &failures {
        eprintln!("failed {id}: {err}");
    }
    Ok(())
}

fn file_slug(run_id: &str) -> String {
    run_id.replace('/', "_")
}

fn cmd_aggregate(a: &AggregateArgs) -> Result<()> {
    let records = read_records(&a.results)?;
    create_dir(&a.out)?;
    let factors: Vec<Factor> = match a.factor {
        Some(f) => vec![f],
        None => Factor::ALL.to_vec(),
    };
    let metrics = |default: &[MetricName]| {
        if a.metrics.is_empty() {
            default.to_vec()
        } else {
            a.metrics.clone()
        }
    };
    let mut outputs = Vec::new();
    let used: Vec<MetricName>;
    match a.view {
        View::FactorMeans => {
            used = metrics(&[MetricName::Gps1, MetricName::Gps2, MetricName::Gps3, MetricName::Gps4]);
            for &f in &factors {
                let tables = used
                    .iter()
                    .map(|&m| factor_means(&records, f, m).map(|t| (m, t)))
                    .collect::<Result<Vec<_>>>()?;
                let name = format!("factor_means_{f}.csv");
                write_text(&a.out.join(&name), &factor_means_csv(f, &tables))?;
                outputs.push(name);
            }
        }
        View::FactorDist => {
            used = metrics(&[MetricName::Accuracy]);
            for &f in &factors {
                for &m in &used {
                    let rows = factor_distribution(&records, f, m)?;
                    let name = format!("factor_dist_{f}_{m}.csv");
                    write_text(&a.out.join(&name), &factor_distribution_csv(f, m, &rows))?;
                    outputs.push(name);
                }
            }
        }
        View::Overlap => {
            used = metrics(&MetricName::OVERLAP_DEFAULT);
            let rows = top5_overlap(&records, &used, a.min_count)?;
            let text = overlap_csv(&used, &rows);
            write_text(&a.out.join("overlap.csv"), &text)?;
            outputs.push("overlap.csv".to_string());
            print!("{text}");
        }
        View::Curves => {
            used = Vec::new();
            let dir = a.out.join("curves");
            create_dir(&dir)?;
            for r in records.iter().filter(|r| r.is_ok()) {
                for c in &r.curves {
                    let name = format!("curves/{}_{}.csv", file_slug(&r.run_id), c.kind.slug());
                    write_text(&a.out.join(&name), &curve_csv(c))?;
                    outputs.push(name);
                }
            }
            for kind in CurveKind::ALL {
                let name = format!("scatter_{}.csv", kind.slug());
                write_text(&a.out.join(&name), &scatter_csv(&records, kind))?;
                outputs.push(name);
            }
        }
    }
    let failures = failure_report(&records);
    let mut m = Manifest::new("aggregate");
    m.set("results", a.results.display())
        .set("view", format!("{:?}", a.view).to_lowercase())
        .set("records", records.len())
        .set("failed_records", failures.len())
        .set("metrics", used.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(", "))
        .set("factors", factors.iter().map(|f| f.slug()).collect::<Vec<_>>().join(", "))
        .set("min_count", a.min_count)
        .set("outputs", outputs.join(", "));
    m.write(&a.out)?;
    for (id, err) in &failures {
        eprintln!("skipped failed run {id}: {err}");
    }
    if a.view != View::Overlap {
        println!("wrote {} files to {}", outputs.len(), a.out.display());
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Prep(a) => cmd_prep(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Tsne(a) => cmd_tsne(a),
        Command::Run(a) => cmd_run(a),
        Command::Grid(a) => cmd_grid(a),
        Command::Aggregate(a) => cmd_aggregate(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Usage => 1,
                ErrorClass::Data => 2,
                ErrorClass::Integrity => 3,
            })
        }
    }
}
