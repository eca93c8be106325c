//! Fitted transforms: imputation, PCA projection, min-max scaling.
//!
//! Each transform is fitted on one set of rows and applied to any other.

use super::linalg::symmetric_eigen;
use super::RawTable;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImputePolicy {
    /// Column mean for continuous columns, median for 0/1 columns.
    MeanMedian,
    /// Missing cells take the training minimum of their column (the raw value a
    /// per-column min-max scaling sends to 0).
    LeaveEmpty,
}

impl ImputePolicy {
    pub fn slug(self) -> &'static str {
        match self {
            ImputePolicy::MeanMedian => "mean-median",
            ImputePolicy::LeaveEmpty => "leave-empty",
        }
    }
}

impl fmt::Display for ImputePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for ImputePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "mean-median" | "meanmedian" => Ok(ImputePolicy::MeanMedian),
            "leave-empty" | "leaveempty" => Ok(ImputePolicy::LeaveEmpty),
            _ => Err(Error::Config(format!(
                "unknown imputation policy `{s}` (valid: mean-median, leave-empty)"
            ))),
        }
    }
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Per-column fill values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Imputer {
    pub policy: ImputePolicy,
    pub fill: Vec<f64>,
}

impl Imputer {
    pub fn fit(table: &RawTable, rows: &[usize], policy: ImputePolicy) -> Result<Self> {
        let fill = (0..table.n_cols())
            .map(|c| {
                let mut present: Vec<f64> = rows.iter().filter_map(|&r| table.cells[r][c]).collect();
                if present.is_empty() {
                    return Err(Error::Imputation(format!(
                        "column `{}` has no observed values",
                        table.columns[c]
                    )));
                }
                present.sort_by(f64::total_cmp);
                Ok(match policy {
                    ImputePolicy::LeaveEmpty => present[0],
                    ImputePolicy::MeanMedian => {
                        if present.iter().all(|&v| v == 0.0 || v == 1.0) {
                            median(&present)
                        } else {
                            present.iter().sum::<f64>() / present.len() as f64
                        }
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { policy, fill })
    }

    pub fn apply(&self, row: &[Option<f64>]) -> Vec<f64> {
        row.iter()
            .zip(&self.fill)
            .map(|(c, &f)| c.unwrap_or(f))
            .collect()
    }
}

/// Imputes a whole table with statistics fitted on all of its rows.
pub fn impute(table: &RawTable, policy: ImputePolicy) -> Result<RawTable> {
    let rows: Vec<usize> = (0..table.n_rows()).collect();
    let imp = Imputer::fit(table, &rows, policy)?;
    Ok(RawTable {
        cells: table
            .cells
            .iter()
            .map(|r| imp.apply(r).into_iter().map(Some).collect())
            .collect(),
        ..table.clone()
    })
}

/// Principal-component projection fitted by eigen-decomposing the sample covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pca {
    pub mean: Vec<f64>,
    /// `k` rows of length `d`; zero rows pad a rank-deficient fit.
    pub components: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    /// Number of real (non-padded) components.
    pub rank: usize,
}

impl Pca {
    pub fn fit(rows: &[Vec<f64>], k: usize) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::Data("PCA needs at least 2 rows".into()));
        }
        let d = rows[0].len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::Data("PCA rows have inconsistent width".into()));
        }
        let mean: Vec<f64> = (0..d)
            .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
            .collect();
        let mut cov = vec![vec![0.0; d]; d];
        for r in rows {
            for i in 0..d {
                let di = r[i] - mean[i];
                for j in i..d {
                    cov[i][j] += di * (r[j] - mean[j]);
                }
            }
        }
        for i in 0..d {
            for j in i..d {
                cov[i][j] /= (n - 1) as f64;
                cov[j][i] = cov[i][j];
            }
        }
        let eig = symmetric_eigen(&cov)?;
        let top = eig.values.first().copied().unwrap_or(0.0).max(0.0);
        let tol = 1e-12 * top.max(f64::MIN_POSITIVE);
        let rank = eig.values.iter().take(k).filter(|&&v| v > tol).count();
        if rank < k {
            log::warn!("PCA rank {rank} < {k}; padding with zero components");
        }
        let components = (0..k)
            .map(|c| {
                if c < rank {
                    eig.vectors[c].clone()
                } else {
                    vec![0.0; d]
                }
            })
            .collect();
        let eigenvalues = (0..k)
            .map(|c| if c < rank { eig.values[c] } else { 0.0 })
            .collect();
        Ok(Self {
            mean,
            components,
            eigenvalues,
            rank,
        })
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        self.components
            .iter()
            .map(|comp| {
                comp.iter()
                    .zip(row.iter().zip(&self.mean))
                    .map(|(w, (x, m))| w * (x - m))
                    .sum()
            })
            .collect()
    }

    /// Maps projected coordinates back to the input space.
    pub fn inverse_transform(&self, projected: &[f64]) -> Vec<f64> {
        let mut out = self.mean.clone();
        for (comp, &z) in self.components.iter().zip(projected) {
            for (o, w) in out.iter_mut().zip(comp) {
                *o += w * z;
            }
        }
        out
    }
}

/// Per-column `(x − min) / (max − min)` fitted on training rows; transform clamps to [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::Data("cannot fit a scaler on zero rows".into()));
        };
        let mut min = first.clone();
        let mut max = first.clone();
        for r in rows {
            for (j, &x) in r.iter().enumerate() {
                min[j] = min[j].min(x);
                max[j] = max[j].max(x);
            }
        }
        Ok(Self { min, max })
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, &x)| {
                let range = self.max[j] - self.min[j];
                if range > 0.0 {
                    ((x - self.min[j]) / range).clamp(0.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn inverse_transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, &u)| self.min[j] + u * (self.max[j] - self.min[j]))
            .collect()
    }
}
