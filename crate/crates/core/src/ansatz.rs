//! Layered variational circuits with five entanglement topologies.
//!
//! Each layer is a rotation sub-layer (one `RY` per qubit, or a full `Rot` per
//! qubit for [`ArchitectureKind::Strong`]) followed by the topology's CNOTs.
//! Parameters are laid out layer by layer, then qubit by qubit; a `Rot` owns
//! three consecutive slots in `(α, β, γ)` order.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::simcore::{Gate, QuantumState, TwoQubitGate};
use crate::seed;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Circuit depth used throughout the design grid.
pub const DEFAULT_LAYERS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArchitectureKind {
    Basic,
    Ring,
    Star,
    Strong,
    Alternating,
}

impl ArchitectureKind {
    pub const ALL: [ArchitectureKind; 5] = [
        ArchitectureKind::Basic,
        ArchitectureKind::Ring,
        ArchitectureKind::Star,
        ArchitectureKind::Strong,
        ArchitectureKind::Alternating,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            ArchitectureKind::Basic => "basic",
            ArchitectureKind::Ring => "ring",
            ArchitectureKind::Star => "star",
            ArchitectureKind::Strong => "strong",
            ArchitectureKind::Alternating => "alternating",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ArchitectureKind::Basic => "Basic",
            ArchitectureKind::Ring => "Ring",
            ArchitectureKind::Star => "Star",
            ArchitectureKind::Strong => "Strong",
            ArchitectureKind::Alternating => "Alternating",
        }
    }

    fn params_per_qubit(self) -> usize {
        match self {
            ArchitectureKind::Strong => 3,
            _ => 1,
        }
    }

    /// CNOT stride of a strongly entangling layer.
    pub fn strong_stride(layer: usize, n_qubits: usize) -> usize {
        if n_qubits < 2 {
            return 0;
        }
        1 + layer % (n_qubits - 1)
    }

    /// `(control, target)` pairs of the entangling sub-layer `layer`.
    pub fn entanglers(self, layer: usize, n_qubits: usize) -> Vec<(usize, usize)> {
        let n = n_qubits;
        if n < 2 {
            return Vec::new();
        }
        match self {
            ArchitectureKind::Basic => (0..n - 1).map(|i| (i, i + 1)).collect(),
            ArchitectureKind::Ring => {
                let mut pairs: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
                pairs.push((n - 1, 0));
                pairs
            }
            ArchitectureKind::Star => (1..n).map(|j| (0, j)).collect(),
            ArchitectureKind::Strong => {
                let r = Self::strong_stride(layer, n);
                (0..n).map(|i| (i, (i + r) % n)).collect()
            }
            ArchitectureKind::Alternating => {
                let start = layer % 2;
                (start..n - 1).step_by(2).map(|i| (i, i + 1)).collect()
            }
        }
    }
}

impl fmt::Display for ArchitectureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for ArchitectureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase();
        ArchitectureKind::ALL
            .into_iter()
            .find(|k| k.slug() == norm)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown architecture `{s}` (valid: basic, ring, star, strong, alternating)"
                ))
            })
    }
}

pub fn param_count(kind: ArchitectureKind, n_qubits: usize, n_layers: usize) -> usize {
    n_layers * n_qubits * kind.params_per_qubit()
}

/// One gate of the ansatz with its parameter slots resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateOp {
    Ry { qubit: usize, param: usize },
    Rot { qubit: usize, params: [usize; 3] },
    Cnot { control: usize, target: usize },
}

impl TemplateOp {
    pub fn params(&self) -> &[usize] {
        match self {
            TemplateOp::Ry { param, .. } => std::slice::from_ref(param),
            TemplateOp::Rot { params, .. } => params,
            TemplateOp::Cnot { .. } => &[],
        }
    }

    /// Applies the gate with `values` as parameters; `shift` is added to slot `shifted`, if any.
    pub(crate) fn apply<T: Scalar>(
        &self,
        state: &mut QuantumState<T>,
        values: &[T],
        shifted: Option<(usize, T)>,
    ) -> Result<()> {
        let angle = |slot: usize| match shifted {
            Some((s, delta)) if s == slot => values[slot] + delta,
            _ => values[slot],
        };
        match *self {
            TemplateOp::Ry { qubit, param } => state.apply_gate(Gate::Ry(angle(param)), qubit),
            TemplateOp::Rot { qubit, params } => state.apply_gate(
                Gate::Rot(angle(params[0]), angle(params[1]), angle(params[2])),
                qubit,
            ),
            TemplateOp::Cnot { control, target } => {
                state.apply_two_qubit(TwoQubitGate::Cnot, control, target)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layer {
    pub rotations: Vec<TemplateOp>,
    pub entanglers: Vec<TemplateOp>,
}

/// The fixed gate structure of one `(kind, n_qubits, n_layers)` ansatz.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnsatzTemplate {
    pub kind: ArchitectureKind,
    pub n_qubits: usize,
    pub n_layers: usize,
    layers: Vec<Layer>,
    ops: Vec<TemplateOp>,
}

impl AnsatzTemplate {
    pub fn new(kind: ArchitectureKind, n_qubits: usize, n_layers: usize) -> Self {
        let ppq = kind.params_per_qubit();
        let layers: Vec<Layer> = (0..n_layers)
            .map(|layer| {
                let rotations = (0..n_qubits)
                    .map(|q| {
                        let base = (layer * n_qubits + q) * ppq;
                        match kind {
                            ArchitectureKind::Strong => TemplateOp::Rot {
                                qubit: q,
                                params: [base, base + 1, base + 2],
                            },
                            _ => TemplateOp::Ry { qubit: q, param: base },
                        }
                    })
                    .collect();
                let entanglers = kind
                    .entanglers(layer, n_qubits)
                    .into_iter()
                    .map(|(control, target)| TemplateOp::Cnot { control, target })
                    .collect();
                Layer { rotations, entanglers }
            })
            .collect();
        let ops = layers
            .iter()
            .flat_map(|l| l.rotations.iter().chain(&l.entanglers).copied())
            .collect();
        Self {
            kind,
            n_qubits,
            n_layers,
            layers,
            ops,
        }
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn ops(&self) -> &[TemplateOp] {
        &self.ops
    }

    pub fn param_count(&self) -> usize {
        param_count(self.kind, self.n_qubits, self.n_layers)
    }

    pub fn entangler_counts(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.entanglers.len()).collect()
    }

    pub fn check_params<T: Scalar>(&self, params: &[T]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::Parameter(format!(
                "{} ansatz on {} qubits × {} layers needs {} parameters, got {}",
                self.kind,
                self.n_qubits,
                self.n_layers,
                self.param_count(),
                params.len()
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Parameter("non-finite circuit parameter".into()));
        }
        Ok(())
    }

    pub fn apply<T: Scalar>(&self, state: &mut QuantumState<T>, params: &[T]) -> Result<()> {
        self.check_params(params)?;
        if state.n_qubits() != self.n_qubits {
            return Err(Error::Config(format!(
                "{}-qubit ansatz applied to a {}-qubit state",
                self.n_qubits,
                state.n_qubits()
            )));
        }
        self.apply_ops(state, 0, params, None)
    }

    /// Applies `ops()[from..]`; parameters must already be validated.
    pub(crate) fn apply_ops<T: Scalar>(
        &self,
        state: &mut QuantumState<T>,
        from: usize,
        params: &[T],
        shifted: Option<(usize, T)>,
    ) -> Result<()> {
        for op in &self.ops[from..] {
            op.apply(state, params, shifted)?;
        }
        Ok(())
    }

    /// Initial parameters, uniform on `[0, π)`.
    pub fn init_params<T: Scalar>(&self, seed: u64) -> Vec<T> {
        let mut rng = seed::rng(seed);
        (0..self.param_count())
            .map(|_| T::lit(rng.random::<f64>() * std::f64::consts::PI))
            .collect()
    }
}

/// Convenience wrapper: builds the template and applies it in one go.
pub fn apply_ansatz<T: Scalar>(
    state: &mut QuantumState<T>,
    kind: ArchitectureKind,
    n_layers: usize,
    params: &[T],
) -> Result<()> {
    AnsatzTemplate::new(kind, state.n_qubits(), n_layers).apply(state, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simcore::{Observable, PauliKind};
    use approx::assert_abs_diff_eq;

    #[test]
    fn parameter_counts() {
        assert_eq!(param_count(ArchitectureKind::Basic, 3, 5), 15);
        assert_eq!(param_count(ArchitectureKind::Ring, 8, 5), 40);
        assert_eq!(param_count(ArchitectureKind::Strong, 3, 5), 45);
        assert_eq!(param_count(ArchitectureKind::Strong, 8, 5), 120);
    }

    #[test]
    fn strong_strides() {
        let strides: Vec<_> = (0..5).map(|l| ArchitectureKind::strong_stride(l, 8)).collect();
        assert_eq!(strides, vec![1, 2, 3, 4, 5]);
        let strides: Vec<_> = (0..5).map(|l| ArchitectureKind::strong_stride(l, 3)).collect();
        assert_eq!(strides, vec![1, 2, 1, 2, 1]);
    }

    #[test]
    fn entangler_counts_per_layer() {
        for n in [3usize, 8] {
            let count = |k| AnsatzTemplate::new(k, n, 5).entangler_counts();
            assert_eq!(count(ArchitectureKind::Basic), vec![n - 1; 5]);
            assert_eq!(count(ArchitectureKind::Ring), vec![n; 5]);
            assert_eq!(count(ArchitectureKind::Star), vec![n - 1; 5]);
            assert_eq!(count(ArchitectureKind::Strong), vec![n; 5]);
            let alt = count(ArchitectureKind::Alternating);
            for (layer, c) in alt.into_iter().enumerate() {
                let expected = if layer % 2 == 0 { n / 2 } else { (n - 1) / 2 };
                assert_eq!(c, expected, "n={n} layer={layer}");
            }
        }
    }

    #[test]
    fn alternating_pairs() {
        let k = ArchitectureKind::Alternating;
        assert_eq!(k.entanglers(0, 8), vec![(0, 1), (2, 3), (4, 5), (6, 7)]);
        assert_eq!(k.entanglers(1, 8), vec![(1, 2), (3, 4), (5, 6)]);
    }

    #[test]
    fn zero_params_leave_zero_state() {
        for kind in ArchitectureKind::ALL {
            for n in [3, 8] {
                let t = AnsatzTemplate::new(kind, n, 5);
                let mut s = QuantumState::<f64>::zero(n).unwrap();
                t.apply(&mut s, &vec![0.0; t.param_count()]).unwrap();
                for q in 0..n {
                    let z = s.expectation(Observable::new(PauliKind::PauliZ, q)).unwrap();
                    assert_abs_diff_eq!(z, 1.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn ring_is_basic_plus_closing_cnot() {
        let params = [0.3, 1.7];
        let mut basic = QuantumState::<f64>::zero(2).unwrap();
        let mut ring = basic.clone();
        apply_ansatz(&mut basic, ArchitectureKind::Basic, 1, &params).unwrap();
        apply_ansatz(&mut ring, ArchitectureKind::Ring, 1, &params).unwrap();
        assert_ne!(basic, ring);
        basic.apply_two_qubit(TwoQubitGate::Cnot, 1, 0).unwrap();
        for (a, b) in basic.amplitudes().iter().zip(ring.amplitudes()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn structure_is_deterministic_and_params_are_checked() {
        let a = AnsatzTemplate::new(ArchitectureKind::Strong, 8, 5);
        let b = AnsatzTemplate::new(ArchitectureKind::Strong, 8, 5);
        assert_eq!(a, b);
        let mut s = QuantumState::<f64>::zero(8).unwrap();
        assert!(matches!(a.apply(&mut s, &[0.0; 3]), Err(Error::Parameter(_))));
        let mut p = vec![0.0; a.param_count()];
        p[7] = f64::INFINITY;
        assert!(matches!(a.apply(&mut s, &p), Err(Error::Parameter(_))));
    }

    #[test]
    fn every_slot_used_exactly_once() {
        for kind in ArchitectureKind::ALL {
            let t = AnsatzTemplate::new(kind, 8, 5);
            let mut seen = vec![0; t.param_count()];
            for op in t.ops() {
                for &p in op.params() {
                    seen[p] += 1;
                }
            }
            assert!(seen.iter().all(|&c| c == 1), "{kind}");
        }
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let t = AnsatzTemplate::new(ArchitectureKind::Ring, 8, 5);
        let a: Vec<f64> = t.init_params(5);
        assert_eq!(a, t.init_params::<f64>(5));
        assert_ne!(a, t.init_params::<f64>(6));
        assert!(a.iter().all(|&v| (0.0..std::f64::consts::PI).contains(&v)));
    }
}
