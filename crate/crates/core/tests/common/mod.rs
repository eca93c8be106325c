#![allow(dead_code)]

pub mod oracle;
pub mod overlap_tables;

use hqnn::dataprep::{prepare, synth_dataset, DesignMatrix, PrepOptions, SynthSpec};

/// Synthetic two-class data pushed through the full preparation pipeline.
pub fn prepared_synthetic(n_rows: usize, n_features: usize, separation: f64, seed: u64) -> (DesignMatrix, DesignMatrix) {
    let table = synth_dataset(&SynthSpec::separable(n_features, separation, n_rows, 0.625, seed)).unwrap();
    let p = prepare(&table, &PrepOptions::default()).unwrap();
    (p.train, p.test)
}

use hqnn::model::Hqnn;
use hqnn::HqnnConfig;
use rand::Rng;

/// Random feature rows strictly inside (0, 1).
pub fn random_rows(n: usize, seed: u64) -> Vec<[f64; 8]> {
    let mut rng = hqnn::seed::rng(seed);
    (0..n)
        .map(|_| std::array::from_fn(|_| rng.random_range(0.05..0.95)))
        .collect()
}

/// Largest gap between the parameter-shift gradient of the mean batch loss and a
/// central finite difference with step `h`, over every trainable parameter.
pub fn gradient_gap(config: HqnnConfig, seed: u64, h: f64) -> f64 {
    let model = Hqnn::<f64>::new(config).unwrap();
    let rows = random_rows(3, seed);
    let labels = [0u8, 1, 1];
    let set = model.prepare_rows(&rows, &labels).unwrap();
    let params = model.init_params(seed);
    let batch: Vec<usize> = (0..rows.len()).collect();
    let grad = model.batch_gradient(&params, &set, &batch, seed).unwrap().grad.to_flat();
    let flat = params.to_flat();
    let loss_at = |j: usize, delta: f64| {
        let mut v = flat.clone();
        v[j] += delta;
        let mut p = params.clone();
        p.set_flat(&v).unwrap();
        model.mean_loss(&p, &set, seed).unwrap()
    };
    (0..flat.len())
        .map(|j| (grad[j] - (loss_at(j, h) - loss_at(j, -h)) / (2.0 * h)).abs())
        .fold(0.0, f64::max)
}

/// A 24-feature clinical-style CSV: 22 numeric columns, two yes/no columns, `?` for
/// missing cells and a `ckd`/`notckd` class column.
pub fn ckd_style_csv(n_rows: usize, seed: u64) -> String {
    use std::fmt::Write as _;
    let table = synth_dataset(&SynthSpec::separable(24, 1.0, n_rows, 0.625, seed)).unwrap();
    let mut rng = hqnn::seed::rng(seed ^ 0xC5D);
    let mut out = (0..22).map(|i| format!("n{i}")).collect::<Vec<_>>().join(",");
    out.push_str(",htn,dm,class\n");
    for (row, &y) in table.cells.iter().zip(&table.labels) {
        for (c, v) in row.iter().enumerate() {
            let v = v.unwrap();
            if rng.random_bool(0.05) {
                out.push_str("?,");
            } else if c >= 22 {
                out.push_str(if v > 0.5 { "yes," } else { "no," });
            } else {
                let _ = write!(out, "{:.3},", 40.0 + 10.0 * v);
            }
        }
        out.push_str(if y == 1 { "ckd\n" } else { "notckd\n" });
    }
    out
}

pub fn ckd_schema() -> hqnn::dataprep::Schema {
    let kv = hqnn::kv::KvFile::parse("label = class\npositive = ckd\nmissing = ?\nmap.yes = 1\nmap.no = 0\n", "schema").unwrap();
    hqnn::dataprep::Schema::from_kv(&kv).unwrap()
}

/// Two same-distribution datasets and one whose means are moved by `shift`.
pub fn shifted_triple(n_rows: usize, shift: f64) -> [hqnn::dataprep::RawTable; 3] {
    let make = |seed: u64, offset: f64| {
        let mut spec = SynthSpec::separable(6, 1.0, n_rows, 0.625, seed);
        for m in spec.means.iter_mut() {
            m.iter_mut().for_each(|v| *v += offset);
        }
        synth_dataset(&spec).unwrap()
    };
    [make(1, 0.0), make(2, 0.0), make(3, shift)]
}
