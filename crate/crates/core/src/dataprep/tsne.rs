//! Exact t-SNE for comparing datasets in a shared 2-D embedding.

use super::RawTable;
use crate::error::{Error, Result};
use crate::seed;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Fewest distinct points the perplexity rule accepts.
pub const MIN_POINTS: usize = 4;
const SEARCH_TOL: f64 = 1e-5;
const SEARCH_MAX_ITER: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsneConfig {
    pub components: usize,
    pub seed: u64,
    /// `None` applies `min(30, n/4)`.
    pub perplexity: Option<f64>,
    pub iterations: usize,
    pub learning_rate: f64,
    pub early_exaggeration: f64,
    /// Iteration at which exaggeration ends and momentum rises.
    pub switch_iteration: usize,
    pub initial_momentum: f64,
    pub final_momentum: f64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        Self {
            components: 2,
            seed: 42,
            perplexity: None,
            iterations: 500,
            learning_rate: 200.0,
            early_exaggeration: 12.0,
            switch_iteration: 250,
            initial_momentum: 0.5,
            final_momentum: 0.8,
        }
    }
}

pub fn effective_perplexity(n_samples: usize) -> f64 {
    (n_samples as f64 / 4.0).min(30.0)
}

/// Conditional affinities `p_{j|i}` with per-point precision found by bisection on the entropy.
#[derive(Debug, Clone)]
pub struct Affinities {
    pub conditional: Vec<Vec<f64>>,
    pub betas: Vec<f64>,
    /// Shannon entropy (nats) of each row.
    pub entropies: Vec<f64>,
}

fn row_distribution(d2: &[f64], i: usize, beta: f64, out: &mut [f64]) -> f64 {
    // Shift by the nearest neighbour for numerical stability.
    let dmin = d2
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &d)| d)
        .fold(f64::INFINITY, f64::min);
    let mut sum = 0.0;
    for (j, (o, &d)) in out.iter_mut().zip(d2).enumerate() {
        *o = if j == i { 0.0 } else { (-(d - dmin) * beta).exp() };
        sum += *o;
    }
    let mut h = 0.0;
    for o in out.iter_mut() {
        *o /= sum;
        if *o > 0.0 {
            h -= *o * o.ln();
        }
    }
    h
}

pub fn calibrate(sq_dist: &[Vec<f64>], perplexity: f64) -> Affinities {
    let n = sq_dist.len();
    let target = perplexity.ln();
    let mut conditional = vec![vec![0.0; n]; n];
    let mut betas = vec![1.0; n];
    let mut entropies = vec![0.0; n];
    for i in 0..n {
        let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
        let mut beta = 1.0;
        let mut h = row_distribution(&sq_dist[i], i, beta, &mut conditional[i]);
        for _ in 0..SEARCH_MAX_ITER {
            if (h - target).abs() < SEARCH_TOL {
                break;
            }
            if h > target {
                lo = beta;
                beta = if hi.is_finite() { (beta + hi) / 2.0 } else { beta * 2.0 };
            } else {
                hi = beta;
                beta = (beta + lo) / 2.0;
            }
            h = row_distribution(&sq_dist[i], i, beta, &mut conditional[i]);
        }
        betas[i] = beta;
        entropies[i] = h;
    }
    Affinities {
        conditional,
        betas,
        entropies,
    }
}

fn squared_distances(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|a| {
            points
                .iter()
                .map(|b| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
                .collect()
        })
        .collect()
}

/// Embeds `points` and returns coordinates plus the final KL divergence.
pub fn tsne(points: &[Vec<f64>], cfg: &TsneConfig) -> Result<(Vec<Vec<f64>>, f64)> {
    let n = points.len();
    if n < MIN_POINTS {
        return Err(Error::Comparability(format!(
            "t-SNE needs at least {MIN_POINTS} distinct samples, got {n}"
        )));
    }
    let perplexity = cfg.perplexity.unwrap_or_else(|| effective_perplexity(n));
    if !(perplexity > 0.0 && perplexity < n as f64) {
        return Err(Error::Comparability(format!(
            "perplexity {perplexity} invalid for {n} samples"
        )));
    }
    let dims = cfg.components.max(1);
    let aff = calibrate(&squared_distances(points), perplexity);
    let mut p = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            p[i][j] = ((aff.conditional[i][j] + aff.conditional[j][i]) / (2.0 * n as f64)).max(1e-12);
        }
    }

    let mut rng = seed::rng(cfg.seed);
    let init = Normal::new(0.0, 1e-4).map_err(|e| Error::Numeric(e.to_string()))?;
    let mut y: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dims).map(|_| init.sample(&mut rng)).collect())
        .collect();
    let mut update = vec![vec![0.0; dims]; n];
    let mut gains = vec![vec![1.0f64; dims]; n];
    let mut num = vec![vec![0.0; n]; n];
    let mut grad = vec![vec![0.0; dims]; n];
    let mut kl = 0.0;

    for iter in 0..cfg.iterations {
        let early = iter < cfg.switch_iteration;
        let exaggeration = if early { cfg.early_exaggeration } else { 1.0 };
        let momentum = if early { cfg.initial_momentum } else { cfg.final_momentum };
        let mut z = 0.0;
        for i in 0..n {
            for j in 0..n {
                num[i][j] = if i == j {
                    0.0
                } else {
                    let d2: f64 = y[i].iter().zip(&y[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                    1.0 / (1.0 + d2)
                };
                z += num[i][j];
            }
        }
        for i in 0..n {
            grad[i].iter_mut().for_each(|g| *g = 0.0);
            for j in 0..n {
                if i == j {
                    continue;
                }
                let q = (num[i][j] / z).max(1e-12);
                let coeff = 4.0 * (exaggeration * p[i][j] - q) * num[i][j];
                for k in 0..dims {
                    grad[i][k] += coeff * (y[i][k] - y[j][k]);
                }
            }
        }
        for i in 0..n {
            for k in 0..dims {
                let g = grad[i][k];
                gains[i][k] = if g * update[i][k] < 0.0 {
                    gains[i][k] + 0.2
                } else {
                    (gains[i][k] * 0.8).max(0.01)
                };
                update[i][k] = momentum * update[i][k] - cfg.learning_rate * gains[i][k] * g;
                y[i][k] += update[i][k];
            }
        }
        for k in 0..dims {
            let m = y.iter().map(|r| r[k]).sum::<f64>() / n as f64;
            y.iter_mut().for_each(|r| r[k] -= m);
        }
        if iter + 1 == cfg.iterations {
            kl = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let q = (num[i][j] / z).max(1e-12);
                        kl += p[i][j] * (p[i][j] / q).ln();
                    }
                }
            }
        }
    }
    if y.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("t-SNE diverged".into()));
    }
    Ok((y, kl))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TsneReport {
    pub datasets: Vec<String>,
    pub shared_columns: Vec<String>,
    pub perplexity: f64,
    pub distinct_points: usize,
    /// One row per input row, datasets concatenated in order.
    pub embedding: Vec<Vec<f64>>,
    pub dataset_of_row: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Symmetric, zero diagonal.
    pub distances: Vec<Vec<f64>>,
    /// Root-mean-square distance of all embedded rows from their overall mean.
    pub spread: f64,
    pub kl_divergence: f64,
}

/// Pools the shared columns of every dataset, mean-imputes and z-scores them jointly,
/// embeds the distinct rows once, and measures distances between dataset centroids.
pub fn tsne_compare(datasets: &[(&str, &RawTable)], cfg: &TsneConfig) -> Result<TsneReport> {
    if datasets.len() < 2 {
        return Err(Error::Comparability("need at least 2 datasets".into()));
    }
    for (name, t) in datasets {
        if t.n_rows() < MIN_POINTS {
            return Err(Error::Comparability(format!(
                "dataset `{name}` has {} rows, fewer than {MIN_POINTS}",
                t.n_rows()
            )));
        }
    }
    let shared: Vec<String> = datasets[0]
        .1
        .columns
        .iter()
        .filter(|c| datasets[1..].iter().all(|(_, t)| t.columns.contains(c)))
        .cloned()
        .collect();
    if shared.is_empty() {
        return Err(Error::Comparability("datasets share no feature columns".into()));
    }

    let mut rows: Vec<Vec<Option<f64>>> = Vec::new();
    let mut dataset_of_row = Vec::new();
    for (d, (_, t)) in datasets.iter().enumerate() {
        let idx: Vec<usize> = shared.iter().map(|c| t.column_index(c).unwrap_or(0)).collect();
        for r in &t.cells {
            rows.push(idx.iter().map(|&c| r[c]).collect());
            dataset_of_row.push(d);
        }
    }
    let width = shared.len();
    let mut dense = vec![vec![0.0; width]; rows.len()];
    for c in 0..width {
        let present: Vec<f64> = rows.iter().filter_map(|r| r[c]).collect();
        let mean = if present.is_empty() {
            0.0
        } else {
            present.iter().sum::<f64>() / present.len() as f64
        };
        let filled: Vec<f64> = rows.iter().map(|r| r[c].unwrap_or(mean)).collect();
        let mu = filled.iter().sum::<f64>() / filled.len() as f64;
        let sd = (filled.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / filled.len() as f64).sqrt();
        for (row, x) in dense.iter_mut().zip(filled) {
            row[c] = if sd > 0.0 { (x - mu) / sd } else { 0.0 };
        }
    }

    // Identical rows share one embedded point.
    let mut unique: Vec<Vec<f64>> = Vec::new();
    let mut key_to_unique: HashMap<Vec<u64>, usize> = HashMap::new();
    let row_to_unique: Vec<usize> = dense
        .iter()
        .map(|r| {
            let key: Vec<u64> = r.iter().map(|x| (x + 0.0).to_bits()).collect();
            *key_to_unique.entry(key).or_insert_with(|| {
                unique.push(r.clone());
                unique.len() - 1
            })
        })
        .collect();
    let perplexity = cfg.perplexity.unwrap_or_else(|| effective_perplexity(unique.len()));
    let (coords, kl_divergence) = tsne(&unique, &TsneConfig { perplexity: Some(perplexity), ..*cfg })?;
    let embedding: Vec<Vec<f64>> = row_to_unique.iter().map(|&u| coords[u].clone()).collect();

    let dims = coords[0].len();
    let k = datasets.len();
    let mut centroids = vec![vec![0.0; dims]; k];
    let mut counts = vec![0usize; k];
    for (e, &d) in embedding.iter().zip(&dataset_of_row) {
        counts[d] += 1;
        for (c, v) in centroids[d].iter_mut().zip(e) {
            *c += v;
        }
    }
    for (c, &n) in centroids.iter_mut().zip(&counts) {
        c.iter_mut().for_each(|v| *v /= n as f64);
    }
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let distances = (0..k)
        .map(|a| (0..k).map(|b| if a == b { 0.0 } else { dist(&centroids[a], &centroids[b]) }).collect())
        .collect();
    let overall: Vec<f64> = (0..dims)
        .map(|j| embedding.iter().map(|e| e[j]).sum::<f64>() / embedding.len() as f64)
        .collect();
    let spread = (embedding.iter().map(|e| dist(e, &overall).powi(2)).sum::<f64>() / embedding.len() as f64).sqrt();

    Ok(TsneReport {
        datasets: datasets.iter().map(|(n, _)| n.to_string()).collect(),
        shared_columns: shared,
        perplexity,
        distinct_points: unique.len(),
        embedding,
        dataset_of_row,
        centroids,
        distances,
        spread,
        kl_divergence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataprep::synth::{synth_dataset, SynthSpec};

    #[test]
    fn perplexity_rule() {
        assert_eq!(effective_perplexity(16), 4.0);
        assert_eq!(effective_perplexity(400), 30.0);
    }

    #[test]
    fn calibrated_entropy_matches_target() {
        let t = synth_dataset(&SynthSpec::separable(4, 2.0, 60, 0.5, 9)).unwrap();
        let pts: Vec<Vec<f64>> = t.cells.iter().map(|r| r.iter().map(|c| c.unwrap()).collect()).collect();
        let aff = calibrate(&squared_distances(&pts), 15.0);
        for h in aff.entropies {
            assert!((h - 15f64.ln()).abs() < 1e-3, "entropy {h}");
        }
    }

    #[test]
    fn too_few_points() {
        let t = synth_dataset(&SynthSpec::separable(3, 1.0, 3, 0.5, 1)).unwrap();
        assert!(matches!(tsne_compare(&[("a", &t), ("b", &t)], &TsneConfig::default()), Err(Error::Comparability(_))));
    }
}
