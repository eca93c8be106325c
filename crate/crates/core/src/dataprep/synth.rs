//! Reproducible two-class Gaussian-mixture tables for tests and desk runs.

use super::linalg::cholesky;
use super::RawTable;
use crate::error::{Error, Result};
use crate::seed;
use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    /// Class 0 then class 1.
    pub means: [Vec<f64>; 2],
    pub covariances: [Vec<Vec<f64>>; 2],
    pub n_rows: usize,
    /// Share of class-1 rows, rounded to the nearest row.
    pub positive_fraction: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// Identity-covariance clusters whose means differ by `separation` along every axis.
    pub fn separable(n_features: usize, separation: f64, n_rows: usize, positive_fraction: f64, seed: u64) -> Self {
        let eye: Vec<Vec<f64>> = (0..n_features)
            .map(|i| (0..n_features).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self {
            means: [vec![0.0; n_features], vec![separation; n_features]],
            covariances: [eye.clone(), eye],
            n_rows,
            positive_fraction,
            seed,
        }
    }

    pub fn n_positive(&self) -> usize {
        (self.n_rows as f64 * self.positive_fraction).round() as usize
    }
}

pub fn synth_dataset(spec: &SynthSpec) -> Result<RawTable> {
    let d = spec.means[0].len();
    if d == 0 || spec.means[1].len() != d {
        return Err(Error::Config("cluster means must share a non-zero width".into()));
    }
    if !(0.0..=1.0).contains(&spec.positive_fraction) {
        return Err(Error::Config("positive_fraction must lie in [0, 1]".into()));
    }
    let chol = [cholesky(&spec.covariances[0])?, cholesky(&spec.covariances[1])?];
    if chol.iter().any(|l| l.len() != d) {
        return Err(Error::Config("covariance size does not match the means".into()));
    }
    let n_pos = spec.n_positive();
    let mut labels: Vec<u8> = (0..spec.n_rows).map(|i| u8::from(i < n_pos)).collect();
    let mut rng = seed::rng(spec.seed);
    labels.shuffle(&mut rng);
    let cells = labels
        .iter()
        .map(|&y| {
            let z: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            let (mean, l) = (&spec.means[y as usize], &chol[y as usize]);
            (0..d)
                .map(|i| Some(mean[i] + (0..=i).map(|k| l[i][k] * z[k]).sum::<f64>()))
                .collect()
        })
        .collect();
    Ok(RawTable {
        columns: (0..d).map(|i| format!("x{i}")).collect(),
        cells,
        labels,
        label_column: "label".into(),
    })
}
