//! Exact expectation values by Heisenberg propagation of a Pauli observable.
//!
//! Walking the circuit backwards, each gate's Pauli-diagonal maps scale the running
//! observable by their eigenvalue on its restriction to the gate's qubits, and the gate
//! itself conjugates it. The final Pauli is evaluated on `|0…0⟩`.

use std::collections::BTreeMap;

use crate::circuits::Circuit;
use crate::error::EngineError;
use crate::pauli::PauliString;
use crate::quasiprob::{Method, RecoveryNoiseModel};

use super::{check_observable, resolve_models};

/// `⟨0…0| P |0…0⟩` for a signed Pauli: its sign when diagonal, otherwise 0.
pub(crate) fn vacuum_value(p: &PauliString) -> f64 {
    if p.is_diagonal() {
        p.sign() as f64
    } else {
        0.0
    }
}

/// Propagates `observable` backwards, multiplying `factor(arity, restricted_index)` per gate.
fn propagate<F>(circuit: &Circuit, observable: &PauliString, mut factor: F) -> Result<f64, EngineError>
where
    F: FnMut(usize, usize) -> f64,
{
    check_observable(circuit, observable)?;
    let mut running = observable.clone();
    let mut scale = 1.0;
    for op in circuit.ops().iter().rev() {
        scale *= factor(op.arity(), running.restricted_index(op.qubits()));
        running = running.conjugate(op)?;
    }
    Ok(scale * vacuum_value(&running))
}

/// Noiseless expectation value.
pub fn ideal_expectation(circuit: &Circuit, observable: &PauliString) -> Result<f64, EngineError> {
    propagate(circuit, observable, |_, _| 1.0)
}

/// Expectation value with every gate followed by its bound noise channel, no mitigation.
pub fn exact_noisy_expectation(
    circuit: &Circuit,
    observable: &PauliString,
) -> Result<f64, EngineError> {
    let models = resolve_models(circuit, None)?;
    propagate(circuit, observable, |arity, q| {
        models[&arity].noise.damping_factors()[q]
    })
}

/// Infinite-shot value of the mitigated estimator, identity branches noiseless.
pub fn exact_mitigated_expectation(
    circuit: &Circuit,
    method: Method,
    observable: &PauliString,
) -> Result<f64, EngineError> {
    exact_mitigated_expectation_with(circuit, method, RecoveryNoiseModel::NonIdentityOnly, observable)
}

/// Infinite-shot value of the mitigated estimator.
///
/// Per gate the running Pauli `Q` picks up `λ_Q · f(Q)` where `λ` is the gate noise and
/// `f(Q) = Σ_P q_P s(P, Q) μ_Q` over branches that carry recovery noise `μ` (the gate's
/// own channel), `μ_Q` omitted on a noiseless identity branch.
pub fn exact_mitigated_expectation_with(
    circuit: &Circuit,
    method: Method,
    model: RecoveryNoiseModel,
    observable: &PauliString,
) -> Result<f64, EngineError> {
    let models = resolve_models(circuit, Some(method))?;
    let factors: BTreeMap<usize, Vec<f64>> = models
        .iter()
        .map(|(&arity, m)| {
            let dec = m.decomposition.as_ref().expect("resolved with a method");
            let mitigation = dec.transfer_factors(Some(&m.noise), model);
            let combined = mitigation
                .iter()
                .zip(m.noise.damping_factors())
                .map(|(f, l)| f * l)
                .collect();
            (arity, combined)
        })
        .collect();
    propagate(circuit, observable, |arity, q| factors[&arity][q])
}

/// Number of gates, per arity, whose noise acts on a non-identity restriction of the
/// back-propagated observable. Each such gate contributes one damping factor.
pub fn noise_event_counts(
    circuit: &Circuit,
    observable: &PauliString,
) -> Result<BTreeMap<usize, usize>, EngineError> {
    let mut counts = BTreeMap::new();
    propagate(circuit, observable, |arity, q| {
        let entry = counts.entry(arity).or_insert(0);
        if q != 0 {
            *entry += 1;
        }
        1.0
    })?;
    Ok(counts)
}
