//! Evaluation engines sharing circuit, channel and decomposition inputs.
//!
//! * [`heisenberg`]: exact expectation values by propagating the observable backwards.
//! * [`dense`]: brute-force density-matrix oracle for small registers.
//! * [`sampler`]: Monte Carlo quasi-probability shot sampler.
//!
//! Every engine executes the same physical model per gate: the ideal gate, then the
//! gate's noise channel, then (when mitigating) a recovery Pauli drawn from the
//! decomposition, which is itself followed by the same noise channel whenever a
//! physical gate is inserted.

use std::collections::BTreeMap;

use crate::channels::PauliDiagonalChannel;
use crate::circuits::Circuit;
use crate::error::{EngineError, PauliError, QuasiProbError};
use crate::pauli::PauliString;
use crate::quasiprob::{decomposition_for, Method, QuasiProbDecomposition};

pub mod dense;
pub mod heisenberg;
pub mod sampler;

pub use dense::{dense_expectation, DenseMode, MAX_DENSE_QUBITS};
pub use heisenberg::{
    exact_mitigated_expectation, exact_mitigated_expectation_with, exact_noisy_expectation,
    ideal_expectation, noise_event_counts,
};
pub use sampler::{sample_mitigated, theoretical_std, Backend, EstimatorResult, SampleConfig};

/// Noise channel and optional decomposition for one gate arity.
#[derive(Debug, Clone)]
pub(crate) struct ArityModel {
    pub noise: PauliDiagonalChannel,
    pub decomposition: Option<QuasiProbDecomposition>,
}

/// Resolves the noise (and decomposition, when mitigating) for every arity in the circuit.
pub(crate) fn resolve_models(
    circuit: &Circuit,
    method: Option<Method>,
) -> Result<BTreeMap<usize, ArityModel>, EngineError> {
    let mut models = BTreeMap::new();
    for (&arity, &count) in circuit.gate_census().iter() {
        if count == 0 {
            continue;
        }
        let noise = circuit
            .noise()
            .channel(arity)
            .ok_or(QuasiProbError::UnboundNoise(arity))?
            .clone();
        let decomposition = method.map(|m| decomposition_for(&noise, m)).transpose()?;
        models.insert(
            arity,
            ArityModel {
                noise,
                decomposition,
            },
        );
    }
    Ok(models)
}

pub(crate) fn check_observable(circuit: &Circuit, observable: &PauliString) -> Result<(), EngineError> {
    if observable.num_qubits() != circuit.num_qubits() {
        return Err(PauliError::SizeMismatch {
            left: circuit.num_qubits(),
            right: observable.num_qubits(),
        }
        .into());
    }
    Ok(())
}
