//! Dense density-matrix oracle.
//!
//! Everything here is explicit linear algebra on `2^n × 2^n` matrices: gates are
//! unitaries built from Kronecker products and permutations, channels are applied in
//! Kraus form from their error probabilities, and mitigation maps are the signed
//! mixture of (optionally noisy) Pauli conjugations. It shares no propagation code with
//! the Heisenberg engine, which it exists to check.

use std::collections::HashMap;

use nalgebra::{Complex, DMatrix};

use crate::channels::PauliDiagonalChannel;
use crate::circuits::Circuit;
use crate::error::EngineError;
use crate::pauli::{GateKind, GateOp, Letter, PauliString};
use crate::quasiprob::{Method, RecoveryNoiseModel};

use super::{check_observable, resolve_models};

pub const MAX_DENSE_QUBITS: usize = 6;

type C64 = Complex<f64>;
type Matrix = DMatrix<C64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DenseMode {
    Noisy,
    Mitigated(Method, RecoveryNoiseModel),
}

fn letter_matrix(l: Letter) -> Matrix {
    let (o, z, i) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    match l {
        Letter::I => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Letter::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Letter::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Letter::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// Full-register matrix of `letters[j]` acting on `qubits[j]`; qubit 0 is the leftmost factor.
fn embed(n: usize, letters: &[Letter], qubits: &[usize]) -> Matrix {
    let mut full = vec![Letter::I; n];
    for (&l, &q) in letters.iter().zip(qubits) {
        full[q] = l;
    }
    full.iter()
        .skip(1)
        .fold(letter_matrix(full[0]), |acc, &l| acc.kronecker(&letter_matrix(l)))
}

fn cnot_matrix(n: usize, control: usize, target: usize) -> Matrix {
    let dim = 1usize << n;
    let bit = |q: usize| 1usize << (n - 1 - q);
    let mut m = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        let image = if b & bit(control) != 0 { b ^ bit(target) } else { b };
        m[(image, b)] = C64::new(1.0, 0.0);
    }
    m
}

fn gate_matrix(n: usize, op: &GateOp) -> Matrix {
    match op.kind() {
        GateKind::Pauli(letters) => embed(n, &letters.letters(), op.qubits()),
        GateKind::Cnot => cnot_matrix(n, op.qubits()[0], op.qubits()[1]),
    }
}

/// Embedded matrices of all `4^k` Paulis on a qubit tuple, cached per tuple.
struct PauliCache {
    n: usize,
    cache: HashMap<Vec<usize>, Vec<Matrix>>,
}

impl PauliCache {
    fn get(&mut self, qubits: &[usize]) -> &[Matrix] {
        let n = self.n;
        self.cache.entry(qubits.to_vec()).or_insert_with(|| {
            let k = qubits.len();
            (0..1usize << (2 * k))
                .map(|i| embed(n, &PauliString::from_index(k, i).letters(), qubits))
                .collect()
        })
    }
}

fn conj(p: &Matrix, rho: &Matrix) -> Matrix {
    p * rho * p.adjoint()
}

fn apply_channel(paulis: &[Matrix], ch: &PauliDiagonalChannel, rho: &Matrix) -> Matrix {
    let mut out = DMatrix::zeros(rho.nrows(), rho.ncols());
    for (p, &w) in paulis.iter().zip(ch.error_probs()) {
        if w != 0.0 {
            out += conj(p, rho) * C64::new(w, 0.0);
        }
    }
    out
}

/// Evolves `|0…0⟩⟨0…0|` through the circuit and returns `Tr(O ρ)`.
pub fn dense_expectation(
    circuit: &Circuit,
    mode: DenseMode,
    observable: &PauliString,
) -> Result<f64, EngineError> {
    check_observable(circuit, observable)?;
    let n = circuit.num_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(EngineError::TooManyQubits {
            n,
            max: MAX_DENSE_QUBITS,
        });
    }
    let method = match mode {
        DenseMode::Noisy => None,
        DenseMode::Mitigated(m, _) => Some(m),
    };
    let models = resolve_models(circuit, method)?;
    let dim = 1usize << n;
    let mut rho = DMatrix::zeros(dim, dim);
    rho[(0, 0)] = C64::new(1.0, 0.0);
    let mut paulis = PauliCache {
        n,
        cache: HashMap::new(),
    };

    for op in circuit.ops() {
        rho = conj(&gate_matrix(n, op), &rho);
        let model = &models[&op.arity()];
        let local = paulis.get(op.qubits());
        rho = apply_channel(local, &model.noise, &rho);
        if let DenseMode::Mitigated(_, branch_model) = mode {
            let dec = model.decomposition.as_ref().expect("resolved with a method");
            let mut noisy_part = DMatrix::zeros(dim, dim);
            let mut clean_part = DMatrix::zeros(dim, dim);
            for (idx, (&q, p)) in dec.coefficients().iter().zip(local).enumerate() {
                let term = conj(p, &rho) * C64::new(q, 0.0);
                if branch_model.is_noisy(idx) {
                    noisy_part += term;
                } else {
                    clean_part += term;
                }
            }
            rho = clean_part + apply_channel(local, &model.noise, &noisy_part);
        }
    }

    let obs = embed(n, &observable.letters(), &(0..n).collect::<Vec<_>>())
        * C64::new(observable.sign() as f64, 0.0);
    Ok((obs * rho).trace().re)
}
