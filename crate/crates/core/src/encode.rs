//! Classical-to-quantum feature maps for eight-feature rows in `[0, 1]`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::simcore::{Gate, QuantumState};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Width of every preprocessed feature row.
pub const N_FEATURES: usize = 8;

/// Features at or above this value switch their qubit to `|1⟩` under basis encoding.
pub const BASIS_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncodingKind {
    Amplitude,
    Angle,
    Basis,
    Iqp,
    QSample,
}

impl EncodingKind {
    pub const ALL: [EncodingKind; 5] = [
        EncodingKind::Amplitude,
        EncodingKind::Angle,
        EncodingKind::Basis,
        EncodingKind::Iqp,
        EncodingKind::QSample,
    ];

    /// Amplitude encoding packs eight features into three qubits; the rest use one qubit per feature.
    pub fn qubit_count(self) -> usize {
        match self {
            EncodingKind::Amplitude => 3,
            _ => N_FEATURES,
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            EncodingKind::Amplitude => "amplitude",
            EncodingKind::Angle => "angle",
            EncodingKind::Basis => "basis",
            EncodingKind::Iqp => "iqp",
            EncodingKind::QSample => "qsample",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EncodingKind::Amplitude => "Amplitude",
            EncodingKind::Angle => "Angle",
            EncodingKind::Basis => "Basis",
            EncodingKind::Iqp => "IQP",
            EncodingKind::QSample => "QSample",
        }
    }
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for EncodingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase();
        EncodingKind::ALL
            .into_iter()
            .find(|k| k.slug() == norm)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown encoding `{s}` (valid: amplitude, angle, basis, iqp, qsample)"
                ))
            })
    }
}

fn validate<T: Scalar>(features: &[T]) -> Result<()> {
    if features.len() != N_FEATURES {
        return Err(Error::Validation(format!(
            "expected {N_FEATURES} features, got {}",
            features.len()
        )));
    }
    for (i, &x) in features.iter().enumerate() {
        if !x.is_finite() || x < T::zero() || x > T::one() {
            return Err(Error::Validation(format!(
                "feature {i} = {x} is outside [0, 1]"
            )));
        }
    }
    Ok(())
}

/// Prepares the encoded state for one feature row.
pub fn encode<T: Scalar>(kind: EncodingKind, features: &[T]) -> Result<QuantumState<T>> {
    validate(features)?;
    match kind {
        EncodingKind::Amplitude => amplitude(features),
        EncodingKind::Angle => {
            let mut s = QuantumState::zero(N_FEATURES)?;
            for (q, &x) in features.iter().enumerate() {
                s.apply_gate(Gate::Ry(T::PI() * x), q)?;
            }
            Ok(s)
        }
        EncodingKind::Basis => {
            let mut s = QuantumState::zero(N_FEATURES)?;
            for (q, &x) in features.iter().enumerate() {
                if x >= T::lit(BASIS_THRESHOLD) {
                    s.apply_gate(Gate::X, q)?;
                }
            }
            Ok(s)
        }
        EncodingKind::Iqp => {
            let mut s = QuantumState::zero(N_FEATURES)?;
            for q in 0..N_FEATURES {
                s.apply_gate(Gate::H, q)?;
            }
            for (q, &x) in features.iter().enumerate() {
                s.apply_gate(Gate::Rz(T::PI() * x), q)?;
            }
            for q in 0..N_FEATURES {
                let next = (q + 1) % N_FEATURES;
                s.apply_zz_phase(T::PI() * features[q] * features[next], q, next)?;
            }
            Ok(s)
        }
        EncodingKind::QSample => {
            let mut s = QuantumState::zero(N_FEATURES)?;
            let two = T::lit(2.0);
            for (q, &x) in features.iter().enumerate() {
                s.apply_gate(Gate::Ry(two * x.sqrt().asin()), q)?;
            }
            Ok(s)
        }
    }
}

fn amplitude<T: Scalar>(features: &[T]) -> Result<QuantumState<T>> {
    let norm = features.iter().map(|&x| x * x).sum::<T>().sqrt();
    if norm <= T::zero() {
        return Err(Error::Encoding(
            "amplitude encoding of an all-zero feature vector".into(),
        ));
    }
    let amps = features
        .iter()
        .map(|&x| Complex::new(x / norm, T::zero()))
        .collect();
    QuantumState::from_amplitudes(3, amps)
}
