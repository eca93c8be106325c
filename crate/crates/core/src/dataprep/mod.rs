//! From raw CSV to eight scaled features: ingest, split, impute, PCA, min-max.
//!
//! Every fitted statistic comes from the training split only; the [`Provenance`]
//! record lists the rows each fit saw so that this can be checked afterwards.

mod ingest;
pub mod linalg;
mod split;
mod synth;
mod transform;
pub mod tsne;

pub use ingest::{ingest_csv, ingest_str, RawTable, Schema, DEFAULT_MISSING};
pub use split::{split_70_30, stratified_kfold, Folds, Split};
pub use synth::{synth_dataset, SynthSpec};
pub use transform::{impute, ImputePolicy, Imputer, MinMaxScaler, Pca};
pub use tsne::{effective_perplexity, tsne_compare, TsneConfig, TsneReport};

use crate::encode::N_FEATURES;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Scaled feature rows with binary labels.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DesignMatrix {
    pub features: Vec<[f64; N_FEATURES]>,
    pub labels: Vec<u8>,
}

impl DesignMatrix {
    pub fn new(features: Vec<[f64; N_FEATURES]>, labels: Vec<u8>) -> Result<Self> {
        let m = Self { features, labels };
        m.validate()?;
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.len() != self.labels.len() {
            return Err(Error::Data(format!(
                "{} feature rows but {} labels",
                self.features.len(),
                self.labels.len()
            )));
        }
        for (r, (row, &y)) in self.features.iter().zip(&self.labels).enumerate() {
            if let Some(c) = row.iter().position(|x| !(0.0..=1.0).contains(x)) {
                return Err(Error::Data(format!("row {r}, f{c} = {} outside [0, 1]", row[c])));
            }
            if y > 1 {
                return Err(Error::Data(format!("row {r}: label {y} is not 0/1")));
            }
        }
        Ok(())
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let pos = self.labels.iter().filter(|&&y| y == 1).count();
        [self.len() - pos, pos]
    }

    /// CSV with header `f0,…,f7,label`.
    pub fn to_csv(&self) -> String {
        let mut out = (0..N_FEATURES).map(|i| format!("f{i}")).collect::<Vec<_>>().join(",");
        out.push_str(",label\n");
        for (row, y) in self.features.iter().zip(&self.labels) {
            for x in row {
                out.push_str(&format!("{x},"));
            }
            out.push_str(&format!("{y}\n"));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(format!("writing {}", path.display()), e))
    }

    pub fn from_csv(text: &str, origin: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| Error::ingestion(origin, e.to_string()))?
            .clone();
        let expected: Vec<String> = (0..N_FEATURES)
            .map(|i| format!("f{i}"))
            .chain(std::iter::once("label".to_string()))
            .collect();
        if header.iter().collect::<Vec<_>>() != expected.iter().map(String::as_str).collect::<Vec<_>>() {
            return Err(Error::ingestion(origin, format!("header must be {}", expected.join(","))));
        }
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (r, rec) in reader.records().enumerate() {
            let loc = format!("{origin}:{}", r + 2);
            let rec = rec.map_err(|e| Error::ingestion(loc.clone(), e.to_string()))?;
            let mut row = [0.0; N_FEATURES];
            for (c, slot) in row.iter_mut().enumerate() {
                *slot = rec[c].parse().map_err(|_| {
                    Error::ingestion(format!("{loc}, column f{c}"), format!("`{}` is not a number", &rec[c]))
                })?;
                if !(0.0..=1.0).contains(slot) {
                    return Err(Error::ingestion(format!("{loc}, column f{c}"), "value outside [0, 1]"));
                }
            }
            let y = match &rec[N_FEATURES] {
                "0" => 0,
                "1" => 1,
                other => {
                    return Err(Error::ingestion(format!("{loc}, column label"), format!("`{other}` is not 0/1")));
                }
            };
            features.push(row);
            labels.push(y);
        }
        if labels.is_empty() {
            return Err(Error::ingestion(origin, "no data rows"));
        }
        Ok(Self { features, labels })
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        Self::from_csv(&text, &path.display().to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrepOptions {
    pub policy: ImputePolicy,
    pub split_seed: u64,
}

impl Default for PrepOptions {
    fn default() -> Self {
        Self {
            policy: ImputePolicy::MeanMedian,
            split_seed: 42,
        }
    }
}

/// What was fitted, on which rows, with which parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source_rows: usize,
    pub source_columns: Vec<String>,
    pub missing_cells: usize,
    pub split_seed: u64,
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    /// Rows seen by the imputer, PCA and scaler fits.
    pub fit_rows: Vec<usize>,
    pub steps: Vec<String>,
    pub imputer: Imputer,
    pub pca: Pca,
    pub explained_variance_ratio: Vec<f64>,
    pub scaler: MinMaxScaler,
    pub warnings: Vec<String>,
}

impl Provenance {
    /// Fails if any fitted statistic saw a test row.
    pub fn assert_no_leakage(&self) -> Result<()> {
        let mut test = self.test_rows.clone();
        test.sort_unstable();
        if let Some(r) = self.fit_rows.iter().find(|r| test.binary_search(r).is_ok()) {
            return Err(Error::Integrity(format!("test row {r} was used in a fit")));
        }
        if self.fit_rows != self.train_rows {
            return Err(Error::Integrity("fit rows differ from the training split".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreparedData {
    pub train: DesignMatrix,
    pub test: DesignMatrix,
    pub provenance: Provenance,
}

/// Split first, then fit impute → PCA(8) → min-max on the training rows and apply to both sides.
pub fn prepare(table: &RawTable, opts: &PrepOptions) -> Result<PreparedData> {
    if table.n_rows() == 0 {
        return Err(Error::Data("table has no rows".into()));
    }
    let split = split_70_30(&table.labels, opts.split_seed)?;
    let imputer = Imputer::fit(table, &split.train, opts.policy)?;
    let filled: Vec<Vec<f64>> = table.cells.iter().map(|r| imputer.apply(r)).collect();
    let fit_rows: Vec<Vec<f64>> = split.train.iter().map(|&i| filled[i].clone()).collect();
    let pca = Pca::fit(&fit_rows, N_FEATURES)?;
    let mut warnings = Vec::new();
    if pca.rank < N_FEATURES {
        warnings.push(format!("PCA rank {} < {N_FEATURES}; zero components padded", pca.rank));
    }
    if opts.policy == ImputePolicy::LeaveEmpty && table.missing_count() > 0 {
        warnings.push("missing cells filled with the training column minimum".into());
    }
    let projected: Vec<Vec<f64>> = filled.iter().map(|r| pca.transform(r)).collect();
    let scaler = MinMaxScaler::fit(&split.train.iter().map(|&i| projected[i].clone()).collect::<Vec<_>>())?;
    let scaled: Vec<[f64; N_FEATURES]> = projected
        .iter()
        .map(|r| {
            let mut out = [0.0; N_FEATURES];
            out.copy_from_slice(&scaler.transform(r));
            out
        })
        .collect();
    let take = |idx: &[usize]| DesignMatrix {
        features: idx.iter().map(|&i| scaled[i]).collect(),
        labels: idx.iter().map(|&i| table.labels[i]).collect(),
    };
    let total_var: f64 = {
        let n = fit_rows.len() as f64;
        (0..table.n_cols())
            .map(|c| {
                let m = fit_rows.iter().map(|r| r[c]).sum::<f64>() / n;
                fit_rows.iter().map(|r| (r[c] - m).powi(2)).sum::<f64>() / (n - 1.0)
            })
            .sum()
    };
    let explained_variance_ratio = pca
        .eigenvalues
        .iter()
        .map(|&v| if total_var > 0.0 { v / total_var } else { 0.0 })
        .collect();
    let provenance = Provenance {
        source_rows: table.n_rows(),
        source_columns: table.columns.clone(),
        missing_cells: table.missing_count(),
        split_seed: opts.split_seed,
        train_rows: split.train.clone(),
        test_rows: split.test.clone(),
        fit_rows: split.train.clone(),
        steps: vec![
            "split-70-30".into(),
            format!("impute:{}", opts.policy),
            format!("pca:{N_FEATURES}"),
            "minmax".into(),
        ],
        imputer,
        pca,
        explained_variance_ratio,
        scaler,
        warnings,
    };
    Ok(PreparedData {
        train: take(&split.train),
        test: take(&split.test),
        provenance,
    })
}
