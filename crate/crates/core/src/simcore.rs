//! Dense state-vector simulator.
//!
//! Qubit 0 is the most significant bit of the basis-state index, so the amplitude
//! at index `0b10` of a two-qubit register belongs to `|10⟩` (qubit 0 set).
//!
//! Rotation conventions: `RX(θ) = exp(-iθX/2)`, `RY(θ) = exp(-iθY/2)`,
//! `RZ(θ) = exp(-iθZ/2)` and `Rot(α, β, γ) = RZ(γ)·RY(β)·RZ(α)`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seed;
use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::num::NonZeroU32;
use std::str::FromStr;

pub const MAX_QUBITS: usize = 12;

/// Tolerance on the squared norm accepted by [`QuantumState::from_amplitudes`].
const NORM_TOLERANCE: f64 = 1e-9;

type Matrix2<T> = [[Complex<T>; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate<T> {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    Rx(T),
    Ry(T),
    Rz(T),
    Rot(T, T, T),
}

impl<T: Scalar> Gate<T> {
    fn angles_finite(&self) -> bool {
        match *self {
            Gate::Rx(a) | Gate::Ry(a) | Gate::Rz(a) => a.is_finite(),
            Gate::Rot(a, b, c) => a.is_finite() && b.is_finite() && c.is_finite(),
            _ => true,
        }
    }

    pub fn matrix(&self) -> Matrix2<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        let i = Complex::new(T::zero(), T::one());
        let half = T::lit(0.5);
        match *self {
            Gate::H => {
                let r = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
                [[r, r], [r, -r]]
            }
            Gate::X => [[zero, one], [one, zero]],
            Gate::Y => [[zero, -i], [i, zero]],
            Gate::Z => [[one, zero], [zero, -one]],
            Gate::S => [[one, zero], [zero, i]],
            Gate::Sdg => [[one, zero], [zero, -i]],
            Gate::Rx(theta) => {
                let (s, c) = (theta * half).sin_cos();
                let c = Complex::new(c, T::zero());
                let ms = Complex::new(T::zero(), -s);
                [[c, ms], [ms, c]]
            }
            Gate::Ry(theta) => {
                let (s, c) = (theta * half).sin_cos();
                [
                    [Complex::new(c, T::zero()), Complex::new(-s, T::zero())],
                    [Complex::new(s, T::zero()), Complex::new(c, T::zero())],
                ]
            }
            Gate::Rz(theta) => {
                let (s, c) = (theta * half).sin_cos();
                [[Complex::new(c, -s), zero], [zero, Complex::new(c, s)]]
            }
            Gate::Rot(alpha, beta, gamma) => {
                let first = Gate::Rz(alpha).matrix();
                let second = Gate::Ry(beta).matrix();
                let third = Gate::Rz(gamma).matrix();
                matmul2(&third, &matmul2(&second, &first))
            }
        }
    }
}

fn matmul2<T: Scalar>(a: &Matrix2<T>, b: &Matrix2<T>) -> Matrix2<T> {
    let mut out = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwoQubitGate {
    Cnot,
    Cz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliKind {
    PauliX,
    PauliY,
    PauliZ,
    /// The single-qubit operator `(X + Z)/√2`.
    Hadamard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Observable {
    pub kind: PauliKind,
    pub qubit: usize,
}

impl Observable {
    pub fn new(kind: PauliKind, qubit: usize) -> Self {
        Self { kind, qubit }
    }
}

/// Number of circuit executions used to estimate an expectation value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shots {
    Analytic,
    Finite(NonZeroU32),
}

impl Shots {
    /// The shot levels swept by the default grid.
    pub const GRID: [u32; 5] = [50, 100, 150, 200, 400];

    pub fn finite(count: u32) -> Result<Self> {
        NonZeroU32::new(count)
            .map(Shots::Finite)
            .ok_or_else(|| Error::Config("shot count must be positive".into()))
    }

    pub fn count(&self) -> Option<u32> {
        match self {
            Shots::Analytic => None,
            Shots::Finite(n) => Some(n.get()),
        }
    }

    pub fn is_grid_level(&self) -> bool {
        self.count().is_some_and(|n| Self::GRID.contains(&n))
    }
}

impl fmt::Display for Shots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shots::Analytic => f.write_str("analytic"),
            Shots::Finite(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for Shots {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("analytic") || t.eq_ignore_ascii_case("exact") {
            return Ok(Shots::Analytic);
        }
        let n: u32 = t
            .parse()
            .map_err(|_| Error::Config(format!("invalid shot count `{s}` (expected `analytic` or a positive integer)")))?;
        Shots::finite(n)
    }
}

impl Serialize for Shots {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Shots {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotPlan {
    pub shots: Shots,
    pub seed: u64,
}

impl ShotPlan {
    pub fn analytic() -> Self {
        Self {
            shots: Shots::Analytic,
            seed: 0,
        }
    }

    pub fn finite(count: u32, seed: u64) -> Result<Self> {
        Ok(Self {
            shots: Shots::finite(count)?,
            seed,
        })
    }
}

/// Shots per basis when `total` shots are split evenly over `parts` bases (rounding up).
pub fn split_shots(total: u32, parts: u32) -> u32 {
    total.div_ceil(parts)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState<T> {
    n_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Scalar> QuantumState<T> {
    /// The all-zero computational basis state.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n_qubits];
        amps[0] = Complex::new(T::one(), T::zero());
        Ok(Self { n_qubits, amps })
    }

    /// Wraps an amplitude vector that must already be normalized.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex<T>>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::Config(format!(
                "{} amplitudes given for {n_qubits} qubits",
                amps.len()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::Numeric("non-finite amplitude".into()));
        }
        let state = Self { n_qubits, amps };
        let norm = state.norm_sqr().to_f64_lossy();
        let tol = NORM_TOLERANCE.max(64.0 * T::epsilon().to_f64_lossy());
        if (norm - 1.0).abs() > tol {
            return Err(Error::Numeric(format!("state is not normalized (norm² = {norm})")));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    #[inline]
    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::Index(format!(
                "qubit {qubit} out of range for a {}-qubit state",
                self.n_qubits
            )));
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: Gate<T>, target: usize) -> Result<()> {
        self.check_qubit(target)?;
        if !gate.angles_finite() {
            return Err(Error::Numeric(format!("non-finite rotation angle in {gate:?}")));
        }
        self.apply_matrix(&gate.matrix(), target);
        Ok(())
    }

    /// Applies an arbitrary 2×2 matrix; callers guarantee it is unitary and `target` is valid.
    pub(crate) fn apply_matrix(&mut self, m: &Matrix2<T>, target: usize) {
        let mask = self.mask(target);
        let dim = self.amps.len();
        let mut block = 0;
        while block < dim {
            for i in block..block + mask {
                let j = i | mask;
                let a0 = self.amps[i];
                let a1 = self.amps[j];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
            }
            block += mask << 1;
        }
    }

    pub fn apply_two_qubit(&mut self, gate: TwoQubitGate, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::Index(format!("control and target are both qubit {control}")));
        }
        let cm = self.mask(control);
        let tm = self.mask(target);
        match gate {
            TwoQubitGate::Cnot => {
                for i in 0..self.amps.len() {
                    if i & cm != 0 && i & tm == 0 {
                        self.amps.swap(i, i | tm);
                    }
                }
            }
            TwoQubitGate::Cz => {
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & cm != 0 && i & tm != 0 {
                        *a = -*a;
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies `exp(-i·θ/2·Z⊗Z)` on qubits `a` and `b`.
    pub fn apply_zz_phase(&mut self, theta: T, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::Index(format!("ZZ phase needs two distinct qubits, got {a} twice")));
        }
        if !theta.is_finite() {
            return Err(Error::Numeric("non-finite ZZ phase angle".into()));
        }
        let (s, c) = (theta * T::lit(0.5)).sin_cos();
        let same = Complex::new(c, -s);
        let diff = Complex::new(c, s);
        let (ma, mb) = (self.mask(a), self.mask(b));
        for (i, amp) in self.amps.iter_mut().enumerate() {
            let parity_differs = ((i & ma) != 0) != ((i & mb) != 0);
            *amp *= if parity_differs { diff } else { same };
        }
        Ok(())
    }

    /// Exact `⟨ψ|O|ψ⟩`.
    pub fn expectation(&self, obs: Observable) -> Result<T> {
        self.check_qubit(obs.qubit)?;
        let q = obs.qubit;
        Ok(match obs.kind {
            PauliKind::PauliX => self.pauli_x(q),
            PauliKind::PauliY => self.pauli_y(q),
            PauliKind::PauliZ => self.pauli_z(q),
            PauliKind::Hadamard => (self.pauli_x(q) + self.pauli_z(q)) * T::FRAC_1_SQRT_2(),
        })
    }

    fn pauli_z(&self, q: usize) -> T {
        let mask = self.mask(q);
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| if i & mask == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum()
    }

    fn pauli_x(&self, q: usize) -> T {
        let mask = self.mask(q);
        let two = T::lit(2.0);
        (0..self.amps.len())
            .filter(|i| i & mask == 0)
            .map(|i| two * (self.amps[i].conj() * self.amps[i | mask]).re)
            .sum()
    }

    fn pauli_y(&self, q: usize) -> T {
        let mask = self.mask(q);
        let two = T::lit(2.0);
        (0..self.amps.len())
            .filter(|i| i & mask == 0)
            .map(|i| two * (self.amps[i].conj() * self.amps[i | mask]).im)
            .sum()
    }

    /// Returns a copy rotated so that a Z-basis readout of `qubit` measures `basis`.
    fn rotated_into(&self, basis: PauliKind, qubits: impl Iterator<Item = usize>) -> Self {
        let mut rotated = self.clone();
        for q in qubits {
            rotated.rotate_to_z_basis(basis, q);
        }
        rotated
    }

    fn rotate_to_z_basis(&mut self, basis: PauliKind, q: usize) {
        match basis {
            PauliKind::PauliZ => {}
            PauliKind::PauliX => self.apply_matrix(&Gate::H.matrix(), q),
            PauliKind::PauliY => {
                self.apply_matrix(&Gate::Sdg.matrix(), q);
                self.apply_matrix(&Gate::H.matrix(), q);
            }
            PauliKind::Hadamard => unreachable!("Hadamard readout is composed from X and Z"),
        }
    }

    /// Draws `shots` computational-basis outcomes from `|amplitude|²`.
    pub fn sample_bitstrings<R: Rng + ?Sized>(&self, shots: u32, rng: &mut R) -> Vec<usize> {
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0f64;
        for a in &self.amps {
            acc += a.norm_sqr().to_f64_lossy();
            cdf.push(acc);
        }
        let last = self.amps.len() - 1;
        (0..shots)
            .map(|_| {
                let u: f64 = rng.random::<f64>() * acc;
                cdf.partition_point(|&c| c <= u).min(last)
            })
            .collect()
    }

    /// Per-qubit mean of ±1 eigenvalues over `shots` joint readouts in one basis.
    fn sampled_basis_means<R: Rng + ?Sized>(&self, basis: PauliKind, shots: u32, rng: &mut R) -> Vec<T> {
        let rotated = self.rotated_into(basis, 0..self.n_qubits);
        let samples = rotated.sample_bitstrings(shots, rng);
        (0..self.n_qubits)
            .map(|q| {
                let mask = self.mask(q);
                let ones = samples.iter().filter(|&&s| s & mask != 0).count() as f64;
                T::lit((shots as f64 - 2.0 * ones) / shots as f64)
            })
            .collect()
    }

    fn sampled_single<R: Rng + ?Sized>(&self, basis: PauliKind, q: usize, shots: u32, rng: &mut R) -> T {
        let rotated = self.rotated_into(basis, std::iter::once(q));
        let mask = self.mask(q);
        let ones = rotated
            .sample_bitstrings(shots, rng)
            .iter()
            .filter(|&&s| s & mask != 0)
            .count() as f64;
        T::lit((shots as f64 - 2.0 * ones) / shots as f64)
    }

    /// Shot-based estimate of `⟨O⟩`, deterministic for a fixed plan seed.
    ///
    /// The Hadamard observable spends `⌈shots/2⌉` executions on each of `X` and `Z`.
    pub fn sampled_expectation(&self, obs: Observable, plan: &ShotPlan) -> Result<T> {
        self.check_qubit(obs.qubit)?;
        let Shots::Finite(n) = plan.shots else {
            return Err(Error::Contract(
                "sampled_expectation needs a finite shot plan; use expectation for analytic values".into(),
            ));
        };
        let mut rng = seed::rng(plan.seed);
        let n = n.get();
        Ok(match obs.kind {
            PauliKind::Hadamard => {
                let half = split_shots(n, 2);
                let x = self.sampled_single(PauliKind::PauliX, obs.qubit, half, &mut rng);
                let z = self.sampled_single(PauliKind::PauliZ, obs.qubit, half, &mut rng);
                (x + z) * T::FRAC_1_SQRT_2()
            }
            basis => self.sampled_single(basis, obs.qubit, n, &mut rng),
        })
    }

    /// Expectation of `kind` on every qubit, exact or estimated according to `plan`.
    ///
    /// With finite shots all qubits are read out jointly from the same samples.
    pub fn expectations_all(&self, kind: PauliKind, plan: &ShotPlan) -> Vec<T> {
        match plan.shots {
            Shots::Analytic => (0..self.n_qubits)
                .map(|q| {
                    self.expectation(Observable::new(kind, q))
                        .expect("qubit index in range")
                })
                .collect(),
            Shots::Finite(n) => {
                let mut rng = seed::rng(plan.seed);
                let n = n.get();
                match kind {
                    PauliKind::Hadamard => {
                        let half = split_shots(n, 2);
                        let xs = self.sampled_basis_means(PauliKind::PauliX, half, &mut rng);
                        let zs = self.sampled_basis_means(PauliKind::PauliZ, half, &mut rng);
                        xs.into_iter()
                            .zip(zs)
                            .map(|(x, z)| (x + z) * T::FRAC_1_SQRT_2())
                            .collect()
                    }
                    basis => self.sampled_basis_means(basis, n, &mut rng),
                }
            }
        }
    }
}

fn check_qubit_count(n: usize) -> Result<()> {
    if !(1..=MAX_QUBITS).contains(&n) {
        return Err(Error::Config(format!(
            "qubit count {n} outside supported range 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Op<T> {
    Single { gate: Gate<T>, target: usize },
    Controlled { gate: TwoQubitGate, control: usize, target: usize },
    ZzPhase { theta: T, a: usize, b: usize },
}

/// A fixed gate sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit<T> {
    pub n_qubits: usize,
    pub ops: Vec<Op<T>>,
}

impl<T: Scalar> Circuit<T> {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            ops: Vec::new(),
        }
    }

    pub fn push(&mut self, op: Op<T>) -> &mut Self {
        self.ops.push(op);
        self
    }

    pub fn apply(&self, state: &mut QuantumState<T>) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::Config(format!(
                "circuit on {} qubits applied to a {}-qubit state",
                self.n_qubits,
                state.n_qubits()
            )));
        }
        for op in &self.ops {
            match *op {
                Op::Single { gate, target } => state.apply_gate(gate, target)?,
                Op::Controlled { gate, control, target } => state.apply_two_qubit(gate, control, target)?,
                Op::ZzPhase { theta, a, b } => state.apply_zz_phase(theta, a, b)?,
            }
        }
        Ok(())
    }
}
