//! Monte Carlo quasi-probability shot sampler.
//!
//! Each shot is one trajectory: after every gate a noise Pauli is drawn, and when
//! mitigating a recovery term is drawn from `σ`; a non-identity recovery multiplies the
//! shot sign by `sgn(q)` and is followed by its own noise draw. All gates are Clifford and
//! all errors are Paulis, so the trajectory is a Pauli frame on top of the noiseless
//! basis-state evolution and the measured eigenvalue is deterministic given the frame.
//! A shot contributes `γ_tot · sign · m`.
//!
//! Two backends implement the same trajectory distribution:
//!
//! * [`Backend::Compiled`] back-propagates the observable once, so each gate only needs
//!   to know whether the Pauli that lands on it flips the outcome. Per gate, the joint
//!   law of (noise, recovery, recovery noise) reduces to a table over
//!   (combined Pauli, sign); gates where nothing happens are skipped geometrically, so a
//!   shot costs time proportional to its number of events rather than to circuit depth.
//! * [`Backend::Frame`] walks every gate forward with an explicit frame. It is the
//!   reference used to check the compiled tables.
//!
//! Shot `s` of batch `b` draws from a ChaCha8 stream keyed by the master seed with
//! stream id `b · shots_per_batch + s`, so results do not depend on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuits::Circuit;
use crate::error::EngineError;
use crate::pauli::{indices_anticommute, multiply_indices, GateKind, PauliString};
use crate::quasiprob::{gamma_total, Method, RecoveryNoiseModel};

use super::heisenberg::vacuum_value;
use super::{check_observable, resolve_models, ArityModel};

const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Compiled,
    Frame,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleConfig {
    /// `None` runs the unmitigated circuit.
    pub method: Option<Method>,
    pub shots_per_batch: u64,
    pub batches: usize,
    pub seed: u64,
    /// Clamp each batch mean to `[-1, 1]`.
    pub clamp: bool,
    pub model: RecoveryNoiseModel,
    pub backend: Backend,
    /// Worker threads; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            method: None,
            shots_per_batch: 1000,
            batches: 1,
            seed: 0,
            clamp: false,
            model: RecoveryNoiseModel::NonIdentityOnly,
            backend: Backend::Compiled,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorResult {
    pub mean: f64,
    pub batch_means: Vec<f64>,
    pub std_of_batch_means: f64,
    pub shots_per_batch: u64,
    pub batches: usize,
    pub gamma_tot: f64,
    pub seed: u64,
    pub clamped: bool,
}

/// Standard deviation of the mean of `shots` draws of a `±γ_tot` variable with the given mean.
pub fn theoretical_std(gamma_tot: f64, mean: f64, shots: u64) -> Result<f64, EngineError> {
    if shots == 0 {
        return Err(EngineError::EmptyRun);
    }
    if mean.abs() > gamma_tot * (1.0 + 1e-12) {
        return Err(EngineError::Domain {
            mean,
            gamma: gamma_tot,
        });
    }
    Ok((gamma_tot * gamma_tot - mean * mean).max(0.0).sqrt() / (shots as f64).sqrt())
}

/// Runs `batches × shots_per_batch` trajectories and reduces them per batch.
pub fn sample_mitigated(
    circuit: &Circuit,
    observable: &PauliString,
    config: &SampleConfig,
) -> Result<EstimatorResult, EngineError> {
    check_observable(circuit, observable)?;
    if config.shots_per_batch == 0 || config.batches == 0 {
        return Err(EngineError::EmptyRun);
    }
    let models = resolve_models(circuit, config.method)?;
    let gamma_tot = match config.method {
        Some(m) => gamma_total(circuit, m)?,
        None => 1.0,
    };
    let kernel: Box<dyn ShotKernel> = match config.backend {
        Backend::Compiled => Box::new(CompiledKernel::new(circuit, observable, &models, config)?),
        Backend::Frame => Box::new(FrameKernel::new(circuit, observable, &models, config)),
    };

    let shots = config.shots_per_batch;
    let chunks_per_batch = shots.div_ceil(CHUNK);
    let units = config.batches as u64 * chunks_per_batch;
    let base = ChaCha8Rng::seed_from_u64(config.seed);
    let run_unit = |unit: u64| -> i64 {
        let batch = unit / chunks_per_batch;
        let start = (unit % chunks_per_batch) * CHUNK;
        let end = (start + CHUNK).min(shots);
        (start..end)
            .map(|s| {
                let mut rng = base.clone();
                rng.set_stream(batch * shots + s);
                kernel.shot(&mut rng) as i64
            })
            .sum()
    };
    let sums: Vec<i64> = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| EngineError::ThreadPool(e.to_string()))?
            .install(|| (0..units).into_par_iter().map(run_unit).collect()),
        None => (0..units).into_par_iter().map(run_unit).collect(),
    };

    let batch_means: Vec<f64> = sums
        .chunks(chunks_per_batch as usize)
        .map(|c| {
            let m = gamma_tot * c.iter().sum::<i64>() as f64 / shots as f64;
            if config.clamp {
                m.clamp(-1.0, 1.0)
            } else {
                m
            }
        })
        .collect();
    let mean = neumaier_sum(batch_means.iter().copied()) / batch_means.len() as f64;
    let std_of_batch_means = if batch_means.len() > 1 {
        let ss = neumaier_sum(batch_means.iter().map(|m| (m - mean) * (m - mean)));
        (ss / (batch_means.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(EstimatorResult {
        mean,
        batch_means,
        std_of_batch_means,
        shots_per_batch: shots,
        batches: config.batches,
        gamma_tot,
        seed: config.seed,
        clamped: config.clamp,
    })
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

trait ShotKernel: Sync {
    /// Signed measurement outcome of one trajectory, in `{-1, 0, 1}`.
    fn shot(&self, rng: &mut ChaCha8Rng) -> i8;
}

fn cumulative(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = weights
        .map(|w| {
            acc += w;
            acc
        })
        .collect();
    if let Some(last) = out.last_mut() {
        *last = f64::INFINITY;
    }
    out
}

#[inline]
fn draw(cumulative: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    cumulative.partition_point(|&c| c <= u)
}

/// Joint per-gate law of (combined Pauli, negative sign) for one arity.
fn outcome_law(model: &ArityModel, method: Option<Method>, branches: RecoveryNoiseModel) -> Vec<f64> {
    let dim = model.noise.dim();
    let k = model.noise.arity();
    let noise = model.noise.error_probs();
    // index = 2 * pauli + negative
    let mut law = vec![0.0; 2 * dim];
    let Some(dec) = method.and(model.decomposition.as_ref()) else {
        for (e, &w) in noise.iter().enumerate() {
            law[2 * e] += w;
        }
        return law;
    };
    let sigmas = dec.sigmas();
    let coeffs = dec.coefficients();
    for (e, &we) in noise.iter().enumerate().filter(|(_, &w)| w > 0.0) {
        for (r, &sr) in sigmas.iter().enumerate().filter(|(_, &s)| s > 0.0) {
            let neg = (coeffs[r] < 0.0) as usize;
            let er = multiply_indices(e, r, k);
            if branches.is_noisy(r) {
                for (e2, &w2) in noise.iter().enumerate().filter(|(_, &w)| w > 0.0) {
                    law[2 * multiply_indices(er, e2, k) + neg] += we * sr * w2;
                }
            } else {
                law[2 * er + neg] += we * sr;
            }
        }
    }
    law
}

struct ArityTable {
    arity: usize,
    /// `ln(1 - event probability)`; `-inf` when every gate has an event, 0 when none do.
    log_quiet: f64,
    outcomes: Vec<(u16, bool)>,
    cumulative: Vec<f64>,
    /// Restricted back-propagated observable for each gate of this arity, in circuit order.
    observed: Vec<u16>,
}

impl ArityTable {
    #[inline]
    fn skip(&self, rng: &mut ChaCha8Rng) -> usize {
        if self.log_quiet == 0.0 {
            return usize::MAX;
        }
        if self.log_quiet == f64::NEG_INFINITY {
            return 0;
        }
        let u: f64 = 1.0 - rng.random::<f64>();
        (u.ln() / self.log_quiet) as usize
    }
}

struct CompiledKernel {
    tables: Vec<ArityTable>,
    ideal: i8,
}

impl CompiledKernel {
    fn new(
        circuit: &Circuit,
        observable: &PauliString,
        models: &std::collections::BTreeMap<usize, ArityModel>,
        config: &SampleConfig,
    ) -> Result<Self, EngineError> {
        let mut observed: std::collections::BTreeMap<usize, Vec<u16>> = Default::default();
        let mut running = observable.clone();
        for op in circuit.ops().iter().rev() {
            observed
                .entry(op.arity())
                .or_default()
                .push(running.restricted_index(op.qubits()) as u16);
            running = running.conjugate(op)?;
        }
        let ideal = vacuum_value(&running) as i8;
        let tables = models
            .iter()
            .map(|(&arity, model)| {
                let law = outcome_law(model, config.method, config.model);
                let mut outcomes = Vec::new();
                let mut weights = Vec::new();
                for (i, &w) in law.iter().enumerate().skip(1).filter(|(_, &w)| w > 0.0) {
                    outcomes.push(((i / 2) as u16, i % 2 == 1));
                    weights.push(w);
                }
                let rate: f64 = weights.iter().sum();
                let log_quiet = if rate <= 0.0 {
                    0.0
                } else if rate >= 1.0 {
                    f64::NEG_INFINITY
                } else {
                    (-rate).ln_1p()
                };
                let mut obs = observed.remove(&arity).unwrap_or_default();
                obs.reverse();
                ArityTable {
                    arity,
                    log_quiet,
                    cumulative: cumulative(weights.iter().map(|w| w / rate)),
                    outcomes,
                    observed: obs,
                }
            })
            .collect();
        Ok(Self { tables, ideal })
    }
}

impl ShotKernel for CompiledKernel {
    fn shot(&self, rng: &mut ChaCha8Rng) -> i8 {
        if self.ideal == 0 {
            return 0;
        }
        let mut flip = false;
        for t in &self.tables {
            let mut pos = t.skip(rng);
            while pos < t.observed.len() {
                let (pauli, negative) = t.outcomes[draw(&t.cumulative, rng)];
                flip ^= negative
                    ^ indices_anticommute(pauli as usize, t.observed[pos] as usize, t.arity);
                pos = pos.saturating_add(1).saturating_add(t.skip(rng));
            }
        }
        if flip {
            -self.ideal
        } else {
            self.ideal
        }
    }
}

/// Per-gate data for the forward frame walk.
struct FrameGate {
    qubits: Vec<usize>,
    cnot: bool,
    noise: Vec<f64>,
    recovery: Option<(Vec<f64>, Vec<bool>)>,
}

struct FrameKernel {
    n: usize,
    gates: Vec<FrameGate>,
    branches: RecoveryNoiseModel,
    /// Noiseless output bitstring.
    output: Vec<bool>,
    observable: PauliString,
}

impl FrameKernel {
    fn new(
        circuit: &Circuit,
        observable: &PauliString,
        models: &std::collections::BTreeMap<usize, ArityModel>,
        config: &SampleConfig,
    ) -> Self {
        let n = circuit.num_qubits();
        let mut output = vec![false; n];
        let gates = circuit
            .ops()
            .iter()
            .map(|op| {
                match op.kind() {
                    GateKind::Cnot => {
                        let (c, t) = (op.qubits()[0], op.qubits()[1]);
                        output[t] ^= output[c];
                    }
                    GateKind::Pauli(letters) => {
                        for (j, &q) in op.qubits().iter().enumerate() {
                            output[q] ^= letters.x_bit(j);
                        }
                    }
                }
                let model = &models[&op.arity()];
                let recovery = config.method.and(model.decomposition.as_ref()).map(|d| {
                    (
                        cumulative(d.sigmas().iter().copied()),
                        d.coefficients().iter().map(|&q| q < 0.0).collect(),
                    )
                });
                FrameGate {
                    qubits: op.qubits().to_vec(),
                    cnot: matches!(op.kind(), GateKind::Cnot),
                    noise: cumulative(model.noise.error_probs().iter().copied()),
                    recovery,
                }
            })
            .collect();
        Self {
            n,
            gates,
            branches: config.model,
            output,
            observable: observable.clone(),
        }
    }
}

/// XORs the k-qubit Pauli `index` into the frame on `qubits`.
fn apply_pauli(x: &mut [bool], z: &mut [bool], qubits: &[usize], index: usize) {
    let k = qubits.len();
    for (j, &q) in qubits.iter().enumerate() {
        let code = (index >> (2 * (k - 1 - j))) & 3;
        x[q] ^= code == 1 || code == 2;
        z[q] ^= code == 2 || code == 3;
    }
}

impl ShotKernel for FrameKernel {
    fn shot(&self, rng: &mut ChaCha8Rng) -> i8 {
        let (mut x, mut z) = (vec![false; self.n], vec![false; self.n]);
        let mut negative = false;
        for g in &self.gates {
            if g.cnot {
                let (c, t) = (g.qubits[0], g.qubits[1]);
                x[t] ^= x[c];
                z[c] ^= z[t];
            }
            apply_pauli(&mut x, &mut z, &g.qubits, draw(&g.noise, rng));
            if let Some((sigma, signs)) = &g.recovery {
                let r = draw(sigma, rng);
                negative ^= signs[r];
                apply_pauli(&mut x, &mut z, &g.qubits, r);
                if self.branches.is_noisy(r) {
                    apply_pauli(&mut x, &mut z, &g.qubits, draw(&g.noise, rng));
                }
            }
        }
        let obs = &self.observable;
        if !obs.is_diagonal() {
            return 0;
        }
        let mut flip = negative ^ obs.is_negative();
        // Z-type observable: each Z sees the output bit, and X/Y frame letters anticommute with it.
        for (q, (&bit, &xq)) in self.output.iter().zip(&x).enumerate() {
            if obs.z_bit(q) {
                flip ^= bit ^ xq;
            }
        }
        if flip {
            -1
        } else {
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{build_benchmark, build_benchmark_with_depth, BenchmarkKind, NoiseBinding};
    use crate::pauli::Letter;
    use approx::assert_abs_diff_eq;

    fn zz(n: usize) -> PauliString {
        PauliString::uniform(n, Letter::Z)
    }

    #[test]
    fn theoretical_std_examples() {
        assert_abs_diff_eq!(theoretical_std(36.6477, 1.0, 1_000_000).unwrap(), 0.036634, epsilon = 1e-5);
        assert_eq!(theoretical_std(1.0, 1.0, 17).unwrap(), 0.0);
        assert_abs_diff_eq!(theoretical_std(121.803, 1.0, 1_000_000).unwrap(), 0.121799, epsilon = 1e-5);
        assert!(theoretical_std(1.0, 2.0, 10).is_err());
        assert!(theoretical_std(1.0, 0.0, 0).is_err());
    }

    #[test]
    fn noiseless_shots_are_exact() {
        let c = build_benchmark(BenchmarkKind::C, 8)
            .unwrap()
            .with_noise(NoiseBinding::depolarizing(0.0, 0.0).unwrap());
        for backend in [Backend::Compiled, Backend::Frame] {
            for method in [None, Some(Method::Pec), Some(Method::Ffpec)] {
                let cfg = SampleConfig {
                    method,
                    shots_per_batch: 50,
                    batches: 2,
                    backend,
                    ..Default::default()
                };
                let r = sample_mitigated(&c, &zz(8), &cfg).unwrap();
                assert_eq!(r.mean, 1.0);
                assert_eq!(r.batch_means, vec![1.0, 1.0]);
                assert_eq!(r.gamma_tot, 1.0);
            }
        }
    }

    #[test]
    fn outcome_law_is_normalized() {
        let c = build_benchmark(BenchmarkKind::C, 4)
            .unwrap()
            .with_noise(NoiseBinding::depolarizing(0.02, 0.05).unwrap());
        for method in [None, Some(Method::Pec), Some(Method::Ffpec)] {
            let models = resolve_models(&c, method).unwrap();
            for m in models.values() {
                for branches in [RecoveryNoiseModel::NonIdentityOnly, RecoveryNoiseModel::AllBranches] {
                    let total: f64 = outcome_law(m, method, branches).iter().sum();
                    assert_abs_diff_eq!(total, 1.0, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn rejects_empty_runs() {
        let c = build_benchmark(BenchmarkKind::A, 2)
            .unwrap()
            .with_noise(NoiseBinding::depolarizing(0.01, 0.0).unwrap());
        let cfg = SampleConfig {
            shots_per_batch: 0,
            ..Default::default()
        };
        assert_eq!(sample_mitigated(&c, &zz(2), &cfg), Err(EngineError::EmptyRun));
    }

    #[test]
    fn clamp_bounds_batch_means() {
        let c = build_benchmark_with_depth(BenchmarkKind::A, 8, 100)
            .unwrap()
            .with_noise(NoiseBinding::depolarizing(0.002, 0.0).unwrap());
        let mut cfg = SampleConfig {
            method: Some(Method::Pec),
            shots_per_batch: 20,
            batches: 30,
            seed: 5,
            ..Default::default()
        };
        let raw = sample_mitigated(&c, &zz(8), &cfg).unwrap();
        assert!(raw.batch_means.iter().any(|m| m.abs() > 1.0));
        cfg.clamp = true;
        let clamped = sample_mitigated(&c, &zz(8), &cfg).unwrap();
        assert!(clamped.clamped);
        assert!(clamped.batch_means.iter().all(|m| m.abs() <= 1.0));
        for (r, c) in raw.batch_means.iter().zip(&clamped.batch_means) {
            assert_eq!(r.clamp(-1.0, 1.0), *c);
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let c = build_benchmark(BenchmarkKind::C, 8)
            .unwrap()
            .with_noise(NoiseBinding::depolarizing(0.002, 0.02).unwrap());
        let mut cfg = SampleConfig {
            method: Some(Method::Ffpec),
            shots_per_batch: 40_000,
            batches: 3,
            seed: 99,
            threads: Some(1),
            ..Default::default()
        };
        let one = sample_mitigated(&c, &zz(8), &cfg).unwrap();
        cfg.threads = Some(4);
        let four = sample_mitigated(&c, &zz(8), &cfg).unwrap();
        assert_eq!(one, four);
    }
}
