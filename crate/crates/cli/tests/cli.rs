#[path = "../../core/tests/common/overlap_tables.rs"]
mod overlap_tables;

use hqnn::dse::{read_records, write_records, RunRecord};
use hqnn::metrics::MetricsReport;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hqnn_dse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hqnn-dse"))
        .args(args)
        .env_remove("HQNN_DSE_SEED")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn ok(o: Output) -> Output {
    assert_eq!(code(&o), 0, "stderr: {}", stderr(&o));
    o
}

/// Synthetic raw CSV, prepared into `<dir>/prep`.
fn prepared(dir: &Path, rows: &str, features: &str) -> PathBuf {
    let raw = dir.join("raw.csv");
    ok(hqnn_dse(&["synth", "--rows", rows, "--features", features, "--out", p(&raw)]));
    let out = dir.join("prep");
    ok(hqnn_dse(&["prep", "--input", p(&raw), "--label", "label", "--out", p(&out)]));
    out
}

fn comparable(path: &Path) -> Vec<RunRecord> {
    let mut records = read_records(path).unwrap();
    for r in &mut records {
        r.wall_time_s = 0.0;
    }
    records.sort_by(|a, b| a.run_id.cmp(&b.run_id));
    records
}

const SMALL_SPEC: &str = "\
# four cheap configurations
encodings = amplitude
architectures = basic, ring
measurements = pauli-z, hadamard
shots = 50
folds = 2
epochs = 2
";

#[test]
fn prep_writes_split_matrices_and_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.csv");
    ok(hqnn_dse(&["synth", "--rows", "400", "--out", p(&raw)]));
    let schema = dir.path().join("schema.txt");
    std::fs::write(&schema, "label = label\n").unwrap();
    for out in ["a", "b"] {
        let out = dir.path().join(out);
        ok(hqnn_dse(&["prep", "--input", p(&raw), "--schema", p(&schema), "--out", p(&out)]));
    }
    for file in ["train.csv", "test.csv", "provenance.json", "manifest.txt"] {
        let a = std::fs::read(dir.path().join("a").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs");
    }
    let train = std::fs::read_to_string(dir.path().join("a/train.csv")).unwrap();
    let test = std::fs::read_to_string(dir.path().join("a/test.csv")).unwrap();
    assert_eq!(train.lines().count(), 281);
    assert_eq!(test.lines().count(), 121);
    assert_eq!(train.lines().next().unwrap().split(',').count(), 9);
    let manifest = std::fs::read_to_string(dir.path().join("a/manifest.txt")).unwrap();
    assert!(manifest.contains("split_seed = 42") && manifest.contains("code_version"));
}

#[test]
fn prep_without_the_label_column_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("raw.csv");
    ok(hqnn_dse(&["synth", "--rows", "50", "--out", p(&raw)]));
    let o = hqnn_dse(&["prep", "--input", p(&raw), "--label", "class", "--out", p(&dir.path().join("o"))]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("raw.csv"), "{}", stderr(&o));
}

#[test]
fn tsne_distances_are_symmetric_and_duplicates_coincide() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let c = dir.path().join("c.csv");
    ok(hqnn_dse(&["synth", "--rows", "40", "--features", "6", "--seed", "1", "--out", p(&a)]));
    ok(hqnn_dse(&["synth", "--rows", "40", "--features", "6", "--seed", "3", "--shift", "3", "--out", p(&c)]));
    let out = dir.path().join("t");
    ok(hqnn_dse(&["tsne", "--input", p(&a), "--input", p(&a), "--input", p(&c), "--label", "label", "--out", p(&out)]));
    let text = std::fs::read_to_string(out.join("distances.csv")).unwrap();
    let d: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(1).map(|v| v.parse().unwrap()).collect())
        .collect();
    for i in 0..3 {
        assert_eq!(d[i][i], 0.0);
        for j in 0..3 {
            assert_eq!(d[i][j], d[j][i]);
        }
    }
    assert!(d[0][1] < 1e-6 * d[0][2], "{d:?}");
    let emb = std::fs::read_to_string(out.join("embedding.csv")).unwrap();
    assert_eq!(emb.lines().count(), 121);
    assert!(out.join("manifest.txt").exists());

    let tiny = dir.path().join("tiny.csv");
    std::fs::write(&tiny, "x0,label\n1,0\n2,1\n3,0\n").unwrap();
    let o = hqnn_dse(&["tsne", "--input", p(&a), "--input", p(&tiny), "--label", "label", "--out", p(&out)]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn run_rejects_unknown_enums_with_the_valid_list() {
    let o = hqnn_dse(&[
        "run", "--train", "x.csv", "--test", "y.csv", "--encoding", "angle", "--arch", "hexagon", "--measure",
        "pauli-z", "--shots", "50", "--out", "o",
    ]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("basic, ring, star, strong, alternating"), "{}", stderr(&o));
    let o = hqnn_dse(&[
        "run", "--train", "x.csv", "--test", "y.csv", "--encoding", "angle", "--arch", "ring", "--measure",
        "pauli-z", "--shots", "0", "--out", "o",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn run_accepts_off_grid_shots_and_records_seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let prep = prepared(dir.path(), "80", "8");
    let (train, test) = (prep.join("train.csv"), prep.join("test.csv"));
    let config = dir.path().join("run.txt");
    std::fs::write(&config, "base_seed = 5\nfolds = 2\nepochs = 1\n").unwrap();
    let args = |out: &Path, seed: Option<&str>| {
        let mut v: Vec<String> = [
            "run", "--train", p(&train), "--test", p(&test), "--encoding", "amplitude", "--arch", "basic",
            "--measure", "pauli-z", "--shots", "75", "--config", p(&config), "--out", p(out),
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        if let Some(s) = seed {
            v.extend(["--seed".to_string(), s.to_string()]);
        }
        v
    };
    let run = |out: &Path, seed: Option<&str>, env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_hqnn-dse"));
        cmd.args(args(out, seed)).env_remove("HQNN_DSE_SEED");
        if let Some(e) = env {
            cmd.env("HQNN_DSE_SEED", e);
        }
        let o = ok(cmd.output().unwrap());
        let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
        (o, manifest)
    };

    let (o, m) = run(&dir.path().join("cfg"), None, None);
    assert!(stderr(&o).contains("not one of the grid levels"));
    assert!(stdout(&o).contains("Amplitude / Basic / Pauli-Z / 75"));
    assert!(m.contains("spec.base_seed = 5") && m.contains("base_seed_source = config"), "{m}");
    assert_eq!(read_records(&dir.path().join("cfg/record.jsonl")).unwrap().len(), 1);

    let (_, m) = run(&dir.path().join("env"), None, Some("9"));
    assert!(m.contains("spec.base_seed = 9") && m.contains("base_seed_source = env"), "{m}");
    let (_, m) = run(&dir.path().join("flag"), Some("11"), Some("9"));
    assert!(m.contains("spec.base_seed = 11") && m.contains("base_seed_source = flag"), "{m}");
}

#[test]
fn run_learns_separable_data() {
    let dir = tempfile::tempdir().unwrap();
    let prep = prepared(dir.path(), "200", "24");
    let out = dir.path().join("run");
    let o = ok(hqnn_dse(&[
        "run", "--train", p(&prep.join("train.csv")), "--test", p(&prep.join("test.csv")), "--encoding", "angle",
        "--arch", "ring", "--measure", "pauli-z", "--shots", "analytic", "--folds", "2", "--epochs", "50",
        "--out", p(&out),
    ]));
    let rec = &read_records(&out.join("record.jsonl")).unwrap()[0];
    let acc = rec.metrics.as_ref().unwrap().accuracy;
    assert!(acc >= 0.9, "accuracy {acc}\n{}", stdout(&o));
}

#[test]
fn grid_is_worker_independent_and_resumable() {
    let dir = tempfile::tempdir().unwrap();
    let prep = prepared(dir.path(), "60", "8");
    let spec = dir.path().join("spec.txt");
    std::fs::write(&spec, SMALL_SPEC).unwrap();
    let grid = |out: &str, workers: &str, resume: bool| {
        let out = dir.path().join(out);
        let mut args = vec![
            "grid", "--train", p(&prep.join("train.csv")), "--test", p(&prep.join("test.csv")), "--spec", p(&spec),
            "--workers", workers, "--out", p(&out),
        ]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>();
        if resume {
            args.push("--resume".into());
        }
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        (hqnn_dse(&refs), out)
    };
    let (o1, w1) = grid("w1", "1", false);
    ok(o1);
    let (o8, w8) = grid("w8", "8", false);
    ok(o8);
    assert_eq!(comparable(&w1.join("results.jsonl")), comparable(&w8.join("results.jsonl")));

    let results = w1.join("results.jsonl");
    let full = comparable(&results);
    let text = std::fs::read_to_string(&results).unwrap();
    std::fs::write(&results, text.lines().take(1).map(|l| format!("{l}\n")).collect::<String>()).unwrap();
    let (o, _) = grid("w1", "2", true);
    let o = ok(o);
    assert!(stdout(&o).contains("3 executed, 1 reused"), "{}", stdout(&o));
    assert_eq!(comparable(&results), full);
    let manifest = std::fs::read_to_string(w1.join("manifest.txt")).unwrap();
    assert!(manifest.contains("executed = 3"));

    let mut lines: Vec<String> = std::fs::read_to_string(&results).unwrap().lines().map(String::from).collect();
    lines[1] = "{\"schema_version\": 1, \"run_id\"".into();
    std::fs::write(&results, lines.join("\n")).unwrap();
    let (o, _) = grid("w1", "1", true);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("results.jsonl:2"), "{}", stderr(&o));
}

#[test]
fn grid_rejects_unknown_spec_keys() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.txt");
    std::fs::write(&spec, "encodings = angle\nlearning_rat = 0.1\n").unwrap();
    let o = hqnn_dse(&["grid", "--train", "a", "--test", "b", "--spec", p(&spec), "--out", p(dir.path())]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("learning_rat"));
}

fn fixture_results(dir: &Path, records: &[RunRecord]) -> PathBuf {
    let path = dir.join("results.jsonl");
    write_records(&path, records).unwrap();
    path
}

#[test]
fn aggregate_overlap_reproduces_the_dataset_1_table() {
    let dir = tempfile::tempdir().unwrap();
    let rows = overlap_tables::parse_table(overlap_tables::DATASET_1);
    let results = fixture_results(dir.path(), &overlap_tables::records_for(&rows, 100));
    let out = dir.path().join("agg");
    let o = ok(hqnn_dse(&["aggregate", "--results", p(&results), "--view", "overlap", "--out", p(&out)]));
    let csv = std::fs::read_to_string(out.join("overlap.csv")).unwrap();
    assert_eq!(stdout(&o), csv);
    let body: Vec<(String, usize)> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].parse().unwrap())
        })
        .collect();
    let expected: Vec<(String, usize)> = rows.iter().map(|r| (r.label.clone(), r.count)).collect();
    assert_eq!(body, expected);
    assert!(csv.contains("Angle/Ring/Pauli-X/200,6,2(0.7500),5(0.6503),2(0.7341),3(0.7644),2(0.7679),--,5(0.6922)"));
}

#[test]
fn aggregate_factor_means_are_constant_on_uniform_records() {
    let dir = tempfile::tempdir().unwrap();
    let records: Vec<RunRecord> = hqnn::dse::enumerate_grid(&hqnn::dse::GridSpec::default())
        .unwrap()
        .into_iter()
        .map(|pt| RunRecord::from_metrics(pt.config, MetricsReport::uniform(0.625)))
        .collect();
    let results = fixture_results(dir.path(), &records);
    let out = dir.path().join("agg");
    ok(hqnn_dse(&["aggregate", "--results", p(&results), "--view", "factor-means", "--out", p(&out)]));
    for factor in ["encoding", "architecture", "measurement", "shots"] {
        let csv = std::fs::read_to_string(out.join(format!("factor_means_{factor}.csv"))).unwrap();
        let lines: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(lines.len(), 5 * 4);
        for l in lines {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!((f[3], f[4], f[5]), ("0.625", "0", "125"), "{l}");
        }
    }
    ok(hqnn_dse(&["aggregate", "--results", p(&results), "--view", "factor-dist", "--factor", "shots", "--out", p(&out)]));
    assert!(out.join("factor_dist_shots_accuracy.csv").exists());
}

#[test]
fn aggregate_curves_writes_one_file_per_configuration_and_kind() {
    let dir = tempfile::tempdir().unwrap();
    let prep = prepared(dir.path(), "60", "8");
    let spec = dir.path().join("spec.txt");
    std::fs::write(&spec, SMALL_SPEC).unwrap();
    let grid = dir.path().join("grid");
    ok(hqnn_dse(&[
        "grid", "--train", p(&prep.join("train.csv")), "--test", p(&prep.join("test.csv")), "--spec", p(&spec),
        "--out", p(&grid),
    ]));
    let out = dir.path().join("agg");
    ok(hqnn_dse(&["aggregate", "--results", p(&grid.join("results.jsonl")), "--view", "curves", "--out", p(&out)]));
    let curves: Vec<_> = std::fs::read_dir(out.join("curves")).unwrap().collect();
    assert_eq!(curves.len(), 4 * 3);
    let one = std::fs::read_to_string(out.join("curves/amplitude_basic_pauli-z_50_roc.csv")).unwrap();
    assert_eq!(one.lines().next(), Some("threshold,fpr,tpr"));
    assert_eq!(one.lines().count(), 102);
    for kind in ["mcc-f1", "sens-spec", "roc"] {
        let scatter = std::fs::read_to_string(out.join(format!("scatter_{kind}.csv"))).unwrap();
        assert_eq!(scatter.lines().count(), 5);
    }
}

#[test]
fn aggregate_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let results = dir.path().join("results.jsonl");
    std::fs::write(&results, "not json\n").unwrap();
    let out = dir.path().join("agg");
    let o = hqnn_dse(&["aggregate", "--results", p(&results), "--view", "heatmap", "--out", p(&out)]);
    assert_eq!(code(&o), 1);
    let o = hqnn_dse(&["aggregate", "--results", p(&results), "--view", "overlap", "--out", p(&out)]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("results.jsonl:1"));
    let o = hqnn_dse(&["aggregate", "--results", p(&results), "--view", "overlap", "--metrics", "acc,nope", "--out", p(&out)]);
    assert_eq!(code(&o), 1);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&hqnn_dse(&["--help"])), 0);
    assert_eq!(code(&hqnn_dse(&["--version"])), 0);
    assert_eq!(code(&hqnn_dse(&[])), 1);
}
