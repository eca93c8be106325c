//! Hybrid model: encoder → ansatz → per-qubit readout → linear head → sigmoid.
//!
//! Circuit gradients use the parameter-shift rule, `(E(θ+π/2) − E(θ−π/2))/2`,
//! for every measured expectation; the head is differentiated analytically.

use crate::ansatz::{AnsatzTemplate, ArchitectureKind, DEFAULT_LAYERS};
use crate::encode::{encode, EncodingKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed;
use crate::simcore::{split_shots, PauliKind, QuantumState, ShotPlan, Shots};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Probabilities are clamped to `[PROB_CLAMP, 1 − PROB_CLAMP]` before taking logs.
pub const PROB_CLAMP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measurement {
    PauliX,
    PauliY,
    PauliZ,
    PauliXyz,
    Hadamard,
}

impl Measurement {
    pub const ALL: [Measurement; 5] = [
        Measurement::PauliX,
        Measurement::PauliY,
        Measurement::PauliZ,
        Measurement::PauliXyz,
        Measurement::Hadamard,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            Measurement::PauliX => "pauli-x",
            Measurement::PauliY => "pauli-y",
            Measurement::PauliZ => "pauli-z",
            Measurement::PauliXyz => "pauli-xyz",
            Measurement::Hadamard => "hadamard",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Measurement::PauliX => "Pauli-X",
            Measurement::PauliY => "Pauli-Y",
            Measurement::PauliZ => "Pauli-Z",
            Measurement::PauliXyz => "Pauli-XYZ",
            Measurement::Hadamard => "Hadamard",
        }
    }

    /// Length of the readout vector for an `n_qubits` register.
    pub fn feature_count(self, n_qubits: usize) -> usize {
        match self {
            Measurement::PauliXyz => 3 * n_qubits,
            _ => n_qubits,
        }
    }
}

impl fmt::Display for Measurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for Measurement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        let norm = match norm.as_str() {
            "x" => "pauli-x",
            "y" => "pauli-y",
            "z" => "pauli-z",
            "xyz" => "pauli-xyz",
            other => other,
        };
        Measurement::ALL
            .into_iter()
            .find(|m| m.slug() == norm)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown measurement `{s}` (valid: pauli-x, pauli-y, pauli-z, pauli-xyz, hadamard)"
                ))
            })
    }
}

/// Per-qubit expectations of the chosen observable(s), honoring the shot plan.
///
/// `PauliXyz` returns `[⟨X₀⟩…, ⟨Y₀⟩…, ⟨Z₀⟩…]`; with finite shots each basis gets
/// `⌈shots/3⌉` executions.
pub fn measure_features<T: Scalar>(
    state: &QuantumState<T>,
    measurement: Measurement,
    plan: &ShotPlan,
) -> Vec<T> {
    let single = |kind| state.expectations_all(kind, plan);
    match measurement {
        Measurement::PauliX => single(PauliKind::PauliX),
        Measurement::PauliY => single(PauliKind::PauliY),
        Measurement::PauliZ => single(PauliKind::PauliZ),
        Measurement::Hadamard => single(PauliKind::Hadamard),
        Measurement::PauliXyz => {
            let per_basis = match plan.shots {
                Shots::Analytic => Shots::Analytic,
                Shots::Finite(n) => Shots::finite(split_shots(n.get(), 3)).expect("positive"),
            };
            [PauliKind::PauliX, PauliKind::PauliY, PauliKind::PauliZ]
                .into_iter()
                .enumerate()
                .flat_map(|(k, kind)| {
                    let sub = ShotPlan {
                        shots: per_basis,
                        seed: seed::derive(plan.seed, &[k as u64]),
                    };
                    state.expectations_all(kind, &sub)
                })
                .collect()
        }
    }
}

/// One point of the design grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HqnnConfig {
    pub encoding: EncodingKind,
    pub architecture: ArchitectureKind,
    pub measurement: Measurement,
    pub shots: Shots,
    #[serde(default = "default_layers")]
    pub n_layers: usize,
}

fn default_layers() -> usize {
    DEFAULT_LAYERS
}

impl HqnnConfig {
    pub fn new(
        encoding: EncodingKind,
        architecture: ArchitectureKind,
        measurement: Measurement,
        shots: Shots,
    ) -> Self {
        Self {
            encoding,
            architecture,
            measurement,
            shots,
            n_layers: DEFAULT_LAYERS,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.encoding.qubit_count()
    }

    pub fn readout_len(&self) -> usize {
        self.measurement.feature_count(self.n_qubits())
    }

    pub fn circuit_param_count(&self) -> usize {
        crate::ansatz::param_count(self.architecture, self.n_qubits(), self.n_layers)
    }

    /// Stable identifier, e.g. `angle/strong/pauli-y/400`.
    pub fn run_id(&self) -> String {
        format!(
            "{}/{}/{}/{}",
            self.encoding.slug(),
            self.architecture.slug(),
            self.measurement.slug(),
            self.shots
        )
    }

    /// Display form, e.g. `Angle / Strong / Pauli-Y / 400`.
    pub fn label(&self) -> String {
        format!(
            "{} / {} / {} / {}",
            self.encoding.label(),
            self.architecture.label(),
            self.measurement.label(),
            self.shots
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    pub circuit: Vec<T>,
    pub head_weights: Vec<T>,
    pub head_bias: T,
}

impl<T: Scalar> ModelParams<T> {
    pub fn zeros(n_circuit: usize, n_head: usize) -> Self {
        Self {
            circuit: vec![T::zero(); n_circuit],
            head_weights: vec![T::zero(); n_head],
            head_bias: T::zero(),
        }
    }

    pub fn len(&self) -> usize {
        self.circuit.len() + self.head_weights.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `[circuit…, head_weights…, head_bias]`.
    pub fn to_flat(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(self.len());
        v.extend_from_slice(&self.circuit);
        v.extend_from_slice(&self.head_weights);
        v.push(self.head_bias);
        v
    }

    pub fn set_flat(&mut self, flat: &[T]) -> Result<()> {
        if flat.len() != self.len() {
            return Err(Error::Parameter(format!(
                "flat parameter vector has length {}, expected {}",
                flat.len(),
                self.len()
            )));
        }
        let (c, rest) = flat.split_at(self.circuit.len());
        let (w, b) = rest.split_at(self.head_weights.len());
        self.circuit.copy_from_slice(c);
        self.head_weights.copy_from_slice(w);
        self.head_bias = b[0];
        Ok(())
    }

    pub fn to_f64(&self) -> ModelParams<f64> {
        ModelParams {
            circuit: self.circuit.iter().map(|v| v.to_f64_lossy()).collect(),
            head_weights: self.head_weights.iter().map(|v| v.to_f64_lossy()).collect(),
            head_bias: self.head_bias.to_f64_lossy(),
        }
    }
}

pub fn sigmoid<T: Scalar>(z: T) -> T {
    // Keep the output strictly inside (0, 1) at the scalar's precision.
    let bound = -T::epsilon().ln() - T::one();
    let z = z.max(-bound).min(bound);
    T::one() / (T::one() + (-z).exp())
}

/// Binary cross-entropy with clamped probabilities.
pub fn loss<T: Scalar>(p: T, label: u8) -> T {
    let eps = T::lit(PROB_CLAMP);
    let p = p.max(eps).min(T::one() - eps);
    if label == 1 {
        -p.ln()
    } else {
        -(T::one() - p).ln()
    }
}

/// Encoded inputs with their labels; encoding happens once per row.
#[derive(Debug, Clone)]
pub struct PreparedSet<T> {
    pub states: Vec<QuantumState<T>>,
    pub labels: Vec<u8>,
}

impl<T> PreparedSet<T> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn subset(&self, indices: &[usize]) -> Self
    where
        T: Clone,
    {
        Self {
            states: indices.iter().map(|&i| self.states[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Gradient of the mean batch loss, shaped like [`ModelParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct BatchGradient<T> {
    pub grad: ModelParams<T>,
    pub mean_loss: T,
}

/// A configured model: the structural part that does not change during training.
#[derive(Debug, Clone)]
pub struct Hqnn<T> {
    config: HqnnConfig,
    template: AnsatzTemplate,
    _scalar: std::marker::PhantomData<T>,
}

struct SampleTerms<T> {
    readout: Vec<T>,
    /// `Σ_k w_k ∂E_k/∂θ_j` for every circuit slot `j`.
    circuit_sensitivity: Vec<T>,
}

impl<T: Scalar> Hqnn<T> {
    pub fn new(config: HqnnConfig) -> Result<Self> {
        if config.n_layers == 0 {
            return Err(Error::Config("ansatz needs at least one layer".into()));
        }
        let template = AnsatzTemplate::new(config.architecture, config.n_qubits(), config.n_layers);
        Ok(Self {
            config,
            template,
            _scalar: std::marker::PhantomData,
        })
    }

    pub fn config(&self) -> &HqnnConfig {
        &self.config
    }

    pub fn template(&self) -> &AnsatzTemplate {
        &self.template
    }

    /// Circuit angles uniform on `[0, π)`; head weights and bias uniform on `±1/√m`.
    pub fn init_params(&self, seed: u64) -> ModelParams<T> {
        let circuit = self.template.init_params(seed::derive(seed, &[seed::tag::INIT, 0]));
        let m = self.config.readout_len();
        let bound = 1.0 / (m as f64).sqrt();
        let mut rng = seed::rng(seed::derive(seed, &[seed::tag::INIT, 1]));
        let mut draw = || T::lit(rng.random_range(-bound..bound));
        let head_weights = (0..m).map(|_| draw()).collect();
        let head_bias = draw();
        ModelParams {
            circuit,
            head_weights,
            head_bias,
        }
    }

    pub fn check_params(&self, params: &ModelParams<T>) -> Result<()> {
        self.template.check_params(&params.circuit)?;
        if params.head_weights.len() != self.config.readout_len() {
            return Err(Error::Parameter(format!(
                "head has {} weights, readout has {} features",
                params.head_weights.len(),
                self.config.readout_len()
            )));
        }
        Ok(())
    }

    pub fn prepare(&self, features: &[T]) -> Result<QuantumState<T>> {
        encode(self.config.encoding, features)
    }

    pub fn prepare_rows(&self, rows: &[[f64; crate::encode::N_FEATURES]], labels: &[u8]) -> Result<PreparedSet<T>> {
        let states = rows
            .iter()
            .map(|r| {
                let x: Vec<T> = r.iter().map(|&v| T::lit(v)).collect();
                self.prepare(&x)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PreparedSet {
            states,
            labels: labels.to_vec(),
        })
    }

    fn plan(&self, seed: u64) -> ShotPlan {
        ShotPlan {
            shots: self.config.shots,
            seed,
        }
    }

    /// Readout vector for an encoded state.
    pub fn readout(&self, prepared: &QuantumState<T>, circuit: &[T], seed: u64) -> Result<Vec<T>> {
        let mut s = prepared.clone();
        self.template.apply(&mut s, circuit)?;
        Ok(measure_features(&s, self.config.measurement, &self.plan(seed)))
    }

    fn head(&self, params: &ModelParams<T>, readout: &[T]) -> T {
        let z = params
            .head_weights
            .iter()
            .zip(readout)
            .map(|(&w, &e)| w * e)
            .sum::<T>()
            + params.head_bias;
        sigmoid(z)
    }

    pub fn forward_prepared(&self, params: &ModelParams<T>, prepared: &QuantumState<T>, seed: u64) -> Result<T> {
        self.check_params(params)?;
        let e = self.readout(prepared, &params.circuit, seed)?;
        Ok(self.head(params, &e))
    }

    pub fn forward(&self, params: &ModelParams<T>, features: &[T], seed: u64) -> Result<T> {
        let prepared = self.prepare(features)?;
        self.forward_prepared(params, &prepared, seed)
    }

    /// Probabilities for a prepared set; sample `i` is measured with seed `derive(seed, [i])`.
    pub fn predict(&self, params: &ModelParams<T>, set: &PreparedSet<T>, seed: u64) -> Result<Vec<T>> {
        self.check_params(params)?;
        set.states
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                let e = self.readout(s, &params.circuit, seed::derive(seed, &[i as u64]))?;
                Ok(self.head(params, &e))
            })
            .collect()
    }

    /// Mean loss over a batch, with the same seeding as [`Hqnn::predict`].
    pub fn mean_loss(&self, params: &ModelParams<T>, set: &PreparedSet<T>, seed: u64) -> Result<T> {
        let probs = self.predict(params, set, seed)?;
        let total: T = probs.iter().zip(&set.labels).map(|(&p, &y)| loss(p, y)).sum();
        Ok(total / T::lit(set.len() as f64))
    }

    /// Unshifted readout plus parameter-shift sensitivities for one sample.
    ///
    /// Shifted branches start from the state just before the shifted gate, so the
    /// gates ahead of it are simulated once per sample rather than once per shift.
    fn sample_terms(&self, params: &ModelParams<T>, prepared: &QuantumState<T>, sample_seed: u64) -> Result<SampleTerms<T>> {
        let shift = T::FRAC_PI_2();
        let half = T::lit(0.5);
        let circuit = &params.circuit;
        let mut sensitivity = vec![T::zero(); circuit.len()];
        let mut running = prepared.clone();
        for (k, op) in self.template.ops().iter().enumerate() {
            for &slot in op.params() {
                let mut branch = [T::zero(), T::zero()];
                for (sign_idx, delta) in [shift, -shift].into_iter().enumerate() {
                    let mut s = running.clone();
                    op.apply(&mut s, circuit, Some((slot, delta)))?;
                    self.template.apply_ops(&mut s, k + 1, circuit, None)?;
                    let plan = self.plan(seed::derive(sample_seed, &[1 + 2 * slot as u64 + sign_idx as u64]));
                    let e = measure_features(&s, self.config.measurement, &plan);
                    branch[sign_idx] = params
                        .head_weights
                        .iter()
                        .zip(&e)
                        .map(|(&w, &v)| w * v)
                        .sum();
                }
                sensitivity[slot] = (branch[0] - branch[1]) * half;
            }
            op.apply(&mut running, circuit, None)?;
        }
        let readout = measure_features(&running, self.config.measurement, &self.plan(seed::derive(sample_seed, &[0])));
        Ok(SampleTerms {
            readout,
            circuit_sensitivity: sensitivity,
        })
    }

    /// Gradient of the mean binary cross-entropy over `batch` (indices into `set`).
    ///
    /// Sample `i` of the batch draws its shot noise from `derive(seed, [i])`.
    pub fn batch_gradient(
        &self,
        params: &ModelParams<T>,
        set: &PreparedSet<T>,
        batch: &[usize],
        seed: u64,
    ) -> Result<BatchGradient<T>> {
        self.check_params(params)?;
        if batch.is_empty() {
            return Err(Error::Data("empty batch".into()));
        }
        let per_sample: Vec<(SampleTerms<T>, u8)> = batch
            .par_iter()
            .enumerate()
            .map(|(i, &idx)| {
                let terms = self.sample_terms(params, &set.states[idx], seed::derive(seed, &[i as u64]))?;
                Ok((terms, set.labels[idx]))
            })
            .collect::<Result<_>>()?;

        let mut grad = ModelParams::zeros(params.circuit.len(), params.head_weights.len());
        let mut total_loss = T::zero();
        for (terms, label) in &per_sample {
            let p = self.head(params, &terms.readout);
            total_loss += loss(p, *label);
            let dz = p - T::lit(f64::from(*label));
            for (g, &e) in grad.head_weights.iter_mut().zip(&terms.readout) {
                *g += dz * e;
            }
            grad.head_bias += dz;
            for (g, &s) in grad.circuit.iter_mut().zip(&terms.circuit_sensitivity) {
                *g += dz * s;
            }
        }
        let n = T::lit(batch.len() as f64);
        grad.circuit.iter_mut().for_each(|g| *g /= n);
        grad.head_weights.iter_mut().for_each(|g| *g /= n);
        grad.head_bias /= n;
        Ok(BatchGradient {
            grad,
            mean_loss: total_loss / n,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use crate::simcore::Gate;

    fn analytic(enc: EncodingKind, arch: ArchitectureKind, meas: Measurement) -> HqnnConfig {
        HqnnConfig::new(enc, arch, meas, Shots::Analytic)
    }

    #[test]
    fn readout_examples() {
        let s = QuantumState::<f64>::zero(3).unwrap();
        let plan = ShotPlan::analytic();
        assert_eq!(measure_features(&s, Measurement::PauliZ, &plan), vec![1.0; 3]);
        let s = QuantumState::<f64>::zero(2).unwrap();
        assert_eq!(
            measure_features(&s, Measurement::PauliXyz, &plan),
            vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0]
        );
        let mut s = QuantumState::<f64>::zero(2).unwrap();
        s.apply_gate(Gate::H, 0).unwrap();
        s.apply_gate(Gate::H, 1).unwrap();
        let h = measure_features(&s, Measurement::Hadamard, &plan);
        for v in h {
            assert_abs_diff_eq!(v, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-12);
        }
    }

    #[test]
    fn xyz_readout_with_shots_has_full_length() {
        let s = QuantumState::<f64>::zero(3).unwrap();
        let plan = ShotPlan::finite(50, 11).unwrap();
        let v = measure_features(&s, Measurement::PauliXyz, &plan);
        assert_eq!(v.len(), 9);
        assert_eq!(&v[6..], &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn forward_examples() {
        let cfg = analytic(EncodingKind::Angle, ArchitectureKind::Ring, Measurement::PauliZ);
        let model = Hqnn::<f64>::new(cfg).unwrap();
        let mut params = ModelParams::zeros(cfg.circuit_param_count(), 8);
        let x = [0.3; 8];
        assert_eq!(model.forward(&params, &x, 0).unwrap(), 0.5);

        params.head_weights[0] = 1.0;
        let p = model.forward(&params, &[0.0; 8], 0).unwrap();
        assert_abs_diff_eq!(p, 1.0 / (1.0 + (-1.0f64).exp()), epsilon = 1e-12);
        assert_abs_diff_eq!(p, 0.7311, epsilon = 1e-4);

        let before = model.forward(&params, &x, 0).unwrap();
        params.head_bias += 0.1;
        assert!(model.forward(&params, &x, 0).unwrap() > before);
    }

    #[test]
    fn loss_examples() {
        assert_abs_diff_eq!(loss(0.5f64, 1), std::f64::consts::LN_2, epsilon = 1e-15);
        assert!(loss(1.0f64, 1) < 1e-6);
        assert_abs_diff_eq!(loss(0.8f64, 0), -(0.2f64).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(loss(0.8f64, 0), 1.6094, epsilon = 1e-4);
        assert!(loss(0.0f64, 1).is_finite());
    }

    #[test]
    fn sigmoid_stays_open() {
        assert!(sigmoid(1e6f64) < 1.0);
        assert!(sigmoid(-1e6f64) > 0.0);
        assert!(sigmoid(1e6f32) < 1.0);
        assert!(sigmoid(-1e6f32) > 0.0);
    }

    #[test]
    fn single_qubit_shift_rule() {
        // One-qubit RY(θ)|0⟩: ∂⟨Z⟩/∂θ = −sin θ.
        let template = AnsatzTemplate::new(ArchitectureKind::Basic, 1, 1);
        for (theta, expected) in [(0.0f64, 0.0), (std::f64::consts::FRAC_PI_2, -1.0)] {
            let e = |t: f64| {
                let mut s = QuantumState::<f64>::zero(1).unwrap();
                template.apply(&mut s, &[t]).unwrap();
                s.expectations_all(PauliKind::PauliZ, &ShotPlan::analytic())[0]
            };
            let shift = std::f64::consts::FRAC_PI_2;
            let g = (e(theta + shift) - e(theta - shift)) / 2.0;
            assert_abs_diff_eq!(g, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let cfg = analytic(EncodingKind::Amplitude, ArchitectureKind::Strong, Measurement::Hadamard);
        let model = Hqnn::<f64>::new(cfg).unwrap();
        let params = model.init_params(3);
        let rows = [[0.1, 0.9, 0.3, 0.4, 0.5, 0.2, 0.8, 0.6], [0.7, 0.2, 0.5, 0.5, 0.1, 0.9, 0.3, 0.0]];
        let set = model.prepare_rows(&rows, &[1, 0]).unwrap();
        let g = model.batch_gradient(&params, &set, &[0, 1], 0).unwrap();
        let flat = params.to_flat();
        let h = 1e-5;
        let g_flat = g.grad.to_flat();
        for j in 0..flat.len() {
            let mut plus = params.clone();
            let mut minus = params.clone();
            let mut fp = flat.clone();
            fp[j] += h;
            plus.set_flat(&fp).unwrap();
            fp[j] -= 2.0 * h;
            minus.set_flat(&fp).unwrap();
            let fd = (model.mean_loss(&plus, &set, 0).unwrap() - model.mean_loss(&minus, &set, 0).unwrap()) / (2.0 * h);
            assert_abs_diff_eq!(g_flat[j], fd, epsilon = 1e-6);
        }
        assert_abs_diff_eq!(g.mean_loss, model.mean_loss(&params, &set, 0).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn forward_is_deterministic_with_shots() {
        let cfg = HqnnConfig::new(EncodingKind::Iqp, ArchitectureKind::Star, Measurement::PauliXyz, Shots::finite(100).unwrap());
        let model = Hqnn::<f64>::new(cfg).unwrap();
        let params = model.init_params(1);
        let x = [0.2, 0.4, 0.6, 0.8, 0.1, 0.3, 0.5, 0.7];
        let a = model.forward(&params, &x, 77).unwrap();
        let b = model.forward(&params, &x, 77).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert!(a > 0.0 && a < 1.0);
    }

    #[test]
    fn param_shape_errors() {
        let cfg = analytic(EncodingKind::Angle, ArchitectureKind::Basic, Measurement::PauliXyz);
        let model = Hqnn::<f64>::new(cfg).unwrap();
        let mut params = model.init_params(0);
        assert_eq!(params.head_weights.len(), 24);
        params.head_weights.pop();
        assert!(matches!(model.forward(&params, &[0.5; 8], 0), Err(Error::Parameter(_))));
        let mut p = model.init_params(0);
        assert!(p.set_flat(&[0.0; 3]).is_err());
    }

    #[test]
    fn ids_and_labels() {
        let cfg = HqnnConfig::new(EncodingKind::Angle, ArchitectureKind::Strong, Measurement::PauliY, Shots::finite(400).unwrap());
        assert_eq!(cfg.run_id(), "angle/strong/pauli-y/400");
        assert_eq!(cfg.label(), "Angle / Strong / Pauli-Y / 400");
        assert_eq!("Pauli_XYZ".parse::<Measurement>().unwrap(), Measurement::PauliXyz);
        assert!("pauli-w".parse::<Measurement>().is_err());
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<HqnnConfig>(&json).unwrap(), cfg);
    }
}
