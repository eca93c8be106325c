//! Adam, the epoch loop with early stopping, and stratified cross-validation.

use crate::dataprep::{stratified_kfold, DesignMatrix};
use crate::error::{Error, Result};
use crate::model::{Hqnn, ModelParams, PreparedSet};
use crate::scalar::Scalar;
use crate::seed::{self, tag};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub patience: usize,
    /// Minimum decrease of the validation loss that counts as an improvement.
    pub min_delta: f64,
    pub folds: usize,
    pub split_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 50,
            batch_size: 16,
            learning_rate: 0.001,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            patience: 5,
            min_delta: 1e-6,
            folds: 10,
            split_seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 || self.patience == 0 {
            return Err(Error::Config("epochs, batch_size and patience must be positive".into()));
        }
        if self.folds < 2 {
            return Err(Error::Config("cross-validation needs at least 2 folds".into()));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("learning rate must be a finite non-negative number".into()));
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return Err(Error::Config("Adam betas must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

/// Adam with bias-corrected moment estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam<T> {
    pub lr: T,
    pub beta1: T,
    pub beta2: T,
    pub epsilon: T,
    pub m: Vec<T>,
    pub v: Vec<T>,
    pub t: u32,
}

impl<T: Scalar> Adam<T> {
    pub fn new(n_params: usize, cfg: &TrainConfig) -> Self {
        Self {
            lr: T::lit(cfg.learning_rate),
            beta1: T::lit(cfg.adam_beta1),
            beta2: T::lit(cfg.adam_beta2),
            epsilon: T::lit(cfg.adam_epsilon),
            m: vec![T::zero(); n_params],
            v: vec![T::zero(); n_params],
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut [T], grads: &[T]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::Parameter(format!(
                "Adam state has {} slots, got {} params and {} gradients",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        self.t += 1;
        let one = T::one();
        let bc1 = one - self.beta1.powi(self.t as i32);
        let bc2 = one - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (one - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (one - self.beta2) * g * g;
            let m_hat = self.m[i] / bc1;
            let v_hat = self.v[i] / bc2;
            params[i] -= self.lr * m_hat / (v_hat.sqrt() + self.epsilon);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopDecision {
    Improved,
    Continue,
    Stop,
}

/// Patience-based early stopping on the validation loss. Epochs are 1-based.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    min_delta: f64,
    best: f64,
    best_epoch: usize,
    epoch: usize,
    stale: usize,
}

impl EarlyStopping {
    pub fn new(patience: usize, min_delta: f64) -> Self {
        Self {
            patience,
            min_delta,
            best: f64::INFINITY,
            best_epoch: 0,
            epoch: 0,
            stale: 0,
        }
    }

    pub fn observe(&mut self, val_loss: f64) -> StopDecision {
        self.epoch += 1;
        if val_loss < self.best - self.min_delta {
            self.best = val_loss;
            self.best_epoch = self.epoch;
            self.stale = 0;
            return StopDecision::Improved;
        }
        self.stale += 1;
        if self.stale >= self.patience {
            StopDecision::Stop
        } else {
            StopDecision::Continue
        }
    }

    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }

    pub fn best_loss(&self) -> f64 {
        self.best
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult<T> {
    pub fold_index: usize,
    pub val_accuracy: f64,
    pub val_loss: f64,
    pub epochs_ran: usize,
    pub best_epoch: usize,
    pub val_loss_history: Vec<f64>,
    pub final_params: ModelParams<T>,
}

fn accuracy_at_half<T: Scalar>(probs: &[T], labels: &[u8]) -> f64 {
    let half = T::lit(0.5);
    let correct = probs
        .iter()
        .zip(labels)
        .filter(|(&p, &y)| u8::from(p >= half) == y)
        .count();
    correct as f64 / labels.len() as f64
}

/// Runs one epoch of shuffled mini-batch Adam updates.
fn run_epoch<T: Scalar>(
    model: &Hqnn<T>,
    cfg: &TrainConfig,
    params: &mut ModelParams<T>,
    adam: &mut Adam<T>,
    train: &PreparedSet<T>,
    seed: u64,
    epoch: usize,
) -> Result<()> {
    let mut order: Vec<usize> = (0..train.len()).collect();
    order.shuffle(&mut seed::rng(seed::derive(seed, &[tag::SHUFFLE, epoch as u64])));
    let mut flat = params.to_flat();
    for (b, batch) in order.chunks(cfg.batch_size).enumerate() {
        let batch_seed = seed::derive(seed, &[tag::BATCH, epoch as u64, b as u64]);
        let g = model.batch_gradient(params, train, batch, batch_seed)?;
        adam.step(&mut flat, &g.grad.to_flat())?;
        params.set_flat(&flat)?;
    }
    Ok(())
}

/// Trains on `train`, early-stopping on `val`, and returns the best-validation parameters.
pub fn train_one<T: Scalar>(
    model: &Hqnn<T>,
    cfg: &TrainConfig,
    train: &PreparedSet<T>,
    val: &PreparedSet<T>,
    seed: u64,
    fold_index: usize,
) -> Result<FoldResult<T>> {
    cfg.validate()?;
    if train.is_empty() || val.is_empty() {
        return Err(Error::Data("training and validation sets must be non-empty".into()));
    }
    let mut params = model.init_params(seed);
    let mut adam = Adam::new(params.len(), cfg);
    let mut stopper = EarlyStopping::new(cfg.patience, cfg.min_delta);
    let mut best = (params.clone(), f64::INFINITY, 0.0);
    let mut history = Vec::new();
    for epoch in 0..cfg.epochs {
        run_epoch(model, cfg, &mut params, &mut adam, train, seed, epoch)?;
        let val_seed = seed::derive(seed, &[tag::VALIDATION, epoch as u64]);
        let probs = model.predict(&params, val, val_seed)?;
        let val_loss = probs
            .iter()
            .zip(&val.labels)
            .map(|(&p, &y)| crate::model::loss(p, y).to_f64_lossy())
            .sum::<f64>()
            / val.len() as f64;
        history.push(val_loss);
        match stopper.observe(val_loss) {
            StopDecision::Improved => {
                best = (params.clone(), val_loss, accuracy_at_half(&probs, &val.labels));
            }
            StopDecision::Continue => {}
            StopDecision::Stop => break,
        }
    }
    let (final_params, val_loss, val_accuracy) = best;
    Ok(FoldResult {
        fold_index,
        val_accuracy,
        val_loss,
        epochs_ran: history.len(),
        best_epoch: stopper.best_epoch(),
        val_loss_history: history,
        final_params,
    })
}

/// Trains for exactly `epochs` epochs without validation.
pub fn train_fixed<T: Scalar>(
    model: &Hqnn<T>,
    cfg: &TrainConfig,
    train: &PreparedSet<T>,
    epochs: usize,
    seed: u64,
) -> Result<ModelParams<T>> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::Data("training set must be non-empty".into()));
    }
    let mut params = model.init_params(seed);
    let mut adam = Adam::new(params.len(), cfg);
    for epoch in 0..epochs {
        run_epoch(model, cfg, &mut params, &mut adam, train, seed, epoch)?;
    }
    Ok(params)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvOutcome<T> {
    pub folds: Vec<FoldResult<T>>,
    pub cv_accuracy_mean: f64,
}

impl<T> CvOutcome<T> {
    /// Median of the per-fold best epochs, rounded up; at least 1.
    pub fn median_best_epoch(&self) -> usize {
        let mut e: Vec<usize> = self.folds.iter().map(|f| f.best_epoch.max(1)).collect();
        e.sort_unstable();
        let n = e.len();
        if n == 0 {
            return 1;
        }
        if n % 2 == 1 {
            e[n / 2]
        } else {
            (e[n / 2 - 1] + e[n / 2]).div_ceil(2)
        }
    }
}

/// Seed used for fold `k` of a run.
pub fn fold_seed(run_seed: u64, k: usize) -> u64 {
    seed::derive(run_seed, &[tag::FOLD, k as u64])
}

/// Stratified k-fold cross-validation over the training split only.
pub fn cross_validate<T: Scalar>(
    model: &Hqnn<T>,
    cfg: &TrainConfig,
    training_split: &DesignMatrix,
    run_seed: u64,
) -> Result<CvOutcome<T>> {
    cfg.validate()?;
    let folds = stratified_kfold(&training_split.labels, cfg.folds, cfg.split_seed)?;
    let all = model.prepare_rows(&training_split.features, &training_split.labels)?;
    let results = (0..cfg.folds)
        .into_par_iter()
        .map(|k| {
            let (train_idx, val_idx) = folds.split(k);
            let train = all.subset(&train_idx);
            let val = all.subset(&val_idx);
            train_one(model, cfg, &train, &val, fold_seed(run_seed, k), k)
        })
        .collect::<Result<Vec<_>>>()?;
    let cv_accuracy_mean = results.iter().map(|f| f.val_accuracy).sum::<f64>() / results.len() as f64;
    Ok(CvOutcome {
        folds: results,
        cv_accuracy_mean,
    })
}
