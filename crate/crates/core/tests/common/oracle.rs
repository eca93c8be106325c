//! Dense-matrix reference simulator: every gate is expanded to a full 2^n × 2^n
//! unitary with Kronecker products and multiplied onto the state vector.

use hqnn::simcore::{Gate, Op, PauliKind, TwoQubitGate};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

type M = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> M {
    M::identity(dim, dim)
}

pub fn pauli(kind: PauliKind) -> M {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match kind {
        PauliKind::PauliX => M::from_row_slice(2, 2, &[z, o, o, z]),
        PauliKind::PauliY => M::from_row_slice(2, 2, &[z, -i, i, z]),
        PauliKind::PauliZ => M::from_row_slice(2, 2, &[o, z, z, -o]),
        PauliKind::Hadamard => (pauli(PauliKind::PauliX) + pauli(PauliKind::PauliZ)) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0),
    }
}

/// `exp(-iθP/2) = cos(θ/2)·I − i·sin(θ/2)·P`.
fn rotation(kind: PauliKind, theta: f64) -> M {
    identity(2) * c((theta / 2.0).cos(), 0.0) - pauli(kind) * c(0.0, (theta / 2.0).sin())
}

pub fn gate_matrix(gate: Gate<f64>) -> M {
    match gate {
        Gate::H => pauli(PauliKind::Hadamard),
        Gate::X => pauli(PauliKind::PauliX),
        Gate::Y => pauli(PauliKind::PauliY),
        Gate::Z => pauli(PauliKind::PauliZ),
        Gate::S => M::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]),
        Gate::Sdg => M::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)]),
        Gate::Rx(t) => rotation(PauliKind::PauliX, t),
        Gate::Ry(t) => rotation(PauliKind::PauliY, t),
        Gate::Rz(t) => rotation(PauliKind::PauliZ, t),
        Gate::Rot(a, b, g) => rotation(PauliKind::PauliZ, g) * rotation(PauliKind::PauliY, b) * rotation(PauliKind::PauliZ, a),
    }
}

/// `m` acting on `target` of an `n`-qubit register; qubit 0 is the leftmost factor.
pub fn embed(m: &M, target: usize, n: usize) -> M {
    let mut out = M::identity(1, 1);
    for q in 0..n {
        out = if q == target { out.kronecker(m) } else { out.kronecker(&identity(2)) };
    }
    out
}

fn projector(bit: usize) -> M {
    let mut p = M::zeros(2, 2);
    p[(bit, bit)] = c(1.0, 0.0);
    p
}

/// `|0⟩⟨0|_c ⊗ I + |1⟩⟨1|_c ⊗ U_t`.
pub fn controlled(u: &M, control: usize, target: usize, n: usize) -> M {
    let mut off = M::identity(1, 1);
    let mut on = M::identity(1, 1);
    for q in 0..n {
        let (a, b) = if q == control {
            (projector(0), projector(1))
        } else if q == target {
            (identity(2), u.clone())
        } else {
            (identity(2), identity(2))
        };
        off = off.kronecker(&a);
        on = on.kronecker(&b);
    }
    off + on
}

/// `exp(-iθ/2 · Z_a Z_b)`, from the diagonal of `Z_a Z_b`.
pub fn zz_phase(theta: f64, a: usize, b: usize, n: usize) -> M {
    let zz = embed(&pauli(PauliKind::PauliZ), a, n) * embed(&pauli(PauliKind::PauliZ), b, n);
    let dim = 1 << n;
    let mut out = M::zeros(dim, dim);
    for i in 0..dim {
        let s = zz[(i, i)].re;
        out[(i, i)] = Complex64::from_polar(1.0, -theta / 2.0 * s);
    }
    out
}

pub fn op_matrix(op: &Op<f64>, n: usize) -> M {
    match *op {
        Op::Single { gate, target } => embed(&gate_matrix(gate), target, n),
        Op::Controlled { gate, control, target } => {
            let u = match gate {
                TwoQubitGate::Cnot => pauli(PauliKind::PauliX),
                TwoQubitGate::Cz => pauli(PauliKind::PauliZ),
            };
            controlled(&u, control, target, n)
        }
        Op::ZzPhase { theta, a, b } => zz_phase(theta, a, b, n),
    }
}

pub fn zero_state(n: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(1 << n);
    v[0] = c(1.0, 0.0);
    v
}

pub fn run(ops: &[Op<f64>], n: usize, start: DVector<Complex64>) -> DVector<Complex64> {
    ops.iter().fold(start, |state, op| op_matrix(op, n) * state)
}

/// `⟨ψ|O_q|ψ⟩` for a single-qubit observable.
pub fn expectation(state: &DVector<Complex64>, kind: PauliKind, qubit: usize, n: usize) -> f64 {
    let o = embed(&pauli(kind), qubit, n);
    (state.adjoint() * (o * state))[(0, 0)].re
}

/// A random circuit drawing from every single-qubit gate, CNOT, CZ and ZZ phases.
pub fn random_circuit(n: usize, len: usize, seed: u64) -> Vec<Op<f64>> {
    use rand::Rng;
    let mut rng = hqnn::seed::rng(seed);
    let angle = |rng: &mut hqnn::seed::ChaCha8Rng| rng.random_range(-std::f64::consts::TAU..std::f64::consts::TAU);
    (0..len)
        .map(|_| {
            let pick = if n > 1 { rng.random_range(0..13) } else { rng.random_range(0..10) };
            let target = rng.random_range(0..n);
            let other = |rng: &mut hqnn::seed::ChaCha8Rng| (target + rng.random_range(1..n)) % n;
            let gate = match pick {
                0 => Gate::H,
                1 => Gate::X,
                2 => Gate::Y,
                3 => Gate::Z,
                4 => Gate::S,
                5 => Gate::Sdg,
                6 => Gate::Rx(angle(&mut rng)),
                7 => Gate::Ry(angle(&mut rng)),
                8 => Gate::Rz(angle(&mut rng)),
                9 => Gate::Rot(angle(&mut rng), angle(&mut rng), angle(&mut rng)),
                10 => {
                    return Op::Controlled { gate: TwoQubitGate::Cnot, control: other(&mut rng), target };
                }
                11 => {
                    return Op::Controlled { gate: TwoQubitGate::Cz, control: other(&mut rng), target };
                }
                _ => {
                    let b = other(&mut rng);
                    return Op::ZzPhase { theta: angle(&mut rng), a: target, b };
                }
            };
            Op::Single { gate, target }
        })
        .collect()
}

/// Largest absolute amplitude difference between the simulator and the oracle.
pub fn max_amplitude_error(sim: &[Complex64], reference: &DVector<Complex64>) -> f64 {
    sim.iter()
        .zip(reference.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}
