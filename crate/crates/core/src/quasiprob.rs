//! Quasi-probability decompositions of inverse Pauli noise.
//!
//! A decomposition writes the inverse noise map as `Σ_P q_P · R_P` over Pauli recovery
//! maps `R_P`, one term per Pauli of the channel's arity (identity first). Sampling
//! term `P` with probability `σ_P = |q_P| / γ` and weighting the outcome by
//! `γ · sgn(q_P)` gives an unbiased estimate of the mitigated map.
//!
//! Two coefficient families are provided. The standard (PEC) inverse assumes recovery
//! gates are ideal. The feed-forward (FFPEC) inverse is solved under the assumption that
//! every inserted non-identity recovery is itself followed by the gate's noise channel,
//! so the noise it causes is cancelled in advance.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::channels::{PauliDiagonalChannel, NORMALIZATION_TOL};
use crate::circuits::Circuit;
use crate::error::QuasiProbError;
use crate::pauli::{commutation_sign, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pec,
    Ffpec,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Pec => "pec",
            Method::Ffpec => "ffpec",
        }
    }
}

/// Which recovery branches suffer recovery noise.
///
/// `NonIdentityOnly` is the physical reading: drawing the identity term inserts no gate, so
/// nothing can go wrong. `AllBranches` applies the recovery noise after every branch,
/// identity included, and exists to compare against that literal form of the analytic map.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryNoiseModel {
    #[default]
    NonIdentityOnly,
    AllBranches,
}

impl RecoveryNoiseModel {
    #[inline]
    pub fn is_noisy(self, recovery_index: usize) -> bool {
        recovery_index != 0 || self == RecoveryNoiseModel::AllBranches
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuasiProbDecomposition {
    arity: usize,
    coefficients: Vec<f64>,
    gamma: f64,
    sigmas: Vec<f64>,
    recovery_noise: Option<PauliDiagonalChannel>,
    method: Option<Method>,
    rate: Option<f64>,
}

impl QuasiProbDecomposition {
    fn from_coefficients(
        arity: usize,
        coefficients: Vec<f64>,
        recovery_noise: Option<PauliDiagonalChannel>,
    ) -> Self {
        let gamma: f64 = coefficients.iter().map(|q| q.abs()).sum();
        let sigmas = coefficients.iter().map(|q| q.abs() / gamma).collect();
        Self {
            arity,
            coefficients,
            gamma,
            sigmas,
            recovery_noise,
            method: None,
            rate: None,
        }
    }

    /// Identity term `1 - (d-1)q/d`, every other term `q/d`, with `d = 4^k`.
    fn depolarizing_family(
        arity: usize,
        q: f64,
        recovery_noise: Option<PauliDiagonalChannel>,
    ) -> Self {
        let dim = 1usize << (2 * arity);
        let d = dim as f64;
        let mut coefficients = vec![q / d; dim];
        coefficients[0] = 1.0 - (d - 1.0) * q / d;
        Self::from_coefficients(arity, coefficients, recovery_noise)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Coefficients `q_P` in Pauli index order.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn q_identity(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn signs(&self) -> Vec<i8> {
        self.coefficients
            .iter()
            .map(|&q| if q < 0.0 { -1 } else { 1 })
            .collect()
    }

    pub fn terms(&self) -> impl Iterator<Item = (PauliString, f64)> + '_ {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, &q)| (PauliString::from_index(self.arity, i), q))
    }

    /// Noise the coefficients were solved against; `None` for ideal recoveries.
    pub fn recovery_noise(&self) -> Option<&PauliDiagonalChannel> {
        self.recovery_noise.as_ref()
    }

    pub fn method(&self) -> Option<Method> {
        self.method
    }

    pub fn rate(&self) -> Option<f64> {
        self.rate
    }

    /// Probability that a physical (non-identity) recovery is inserted after one gate.
    pub fn total_insertion_probability(&self) -> f64 {
        self.sigmas[1..].iter().sum()
    }

    /// Eigenvalue of the executed mitigation map on each Pauli component `Q`:
    /// `Σ_P q_P · s(P, Q) · μ_Q` over noisy branches (`μ` the physical recovery noise),
    /// without the `μ_Q` factor on a noiseless identity branch.
    pub fn transfer_factors(
        &self,
        physical_recovery_noise: Option<&PauliDiagonalChannel>,
        model: RecoveryNoiseModel,
    ) -> Vec<f64> {
        let dim = self.coefficients.len();
        (0..dim)
            .map(|q| {
                let mu = physical_recovery_noise.map_or(1.0, |ch| ch.damping_factors()[q]);
                self.coefficients
                    .iter()
                    .enumerate()
                    .map(|(p, &c)| {
                        let noise = if model.is_noisy(p) { mu } else { 1.0 };
                        c * commutation_sign(p, q, self.arity) * noise
                    })
                    .sum()
            })
            .collect()
    }

    pub fn summary(&self) -> DecompositionSummary {
        let rest = &self.coefficients[1..];
        let uniform = rest
            .iter()
            .all(|&q| (q - rest[0]).abs() <= 1e-15 * q.abs().max(1e-300));
        let (q_pauli, sigma_pauli) = if uniform {
            (
                Coefficients::Uniform(rest[0]),
                Coefficients::Uniform(self.sigmas[1]),
            )
        } else {
            (
                Coefficients::PerPauli(rest.to_vec()),
                Coefficients::PerPauli(self.sigmas[1..].to_vec()),
            )
        };
        DecompositionSummary {
            method: self.method,
            arity: self.arity,
            p: self.rate,
            q_identity: self.q_identity(),
            q_pauli,
            gamma: self.gamma,
            sigma_identity: self.sigmas[0],
            sigma_pauli,
            total_insertion_prob: self.total_insertion_probability(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Coefficients {
    Uniform(f64),
    PerPauli(Vec<f64>),
}

/// JSON form of a decomposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionSummary {
    pub method: Option<Method>,
    pub arity: usize,
    pub p: Option<f64>,
    pub q_identity: f64,
    pub q_pauli: Coefficients,
    pub gamma: f64,
    pub sigma_identity: f64,
    pub sigma_pauli: Coefficients,
    pub total_insertion_prob: f64,
}

fn check_rate(p: f64) -> Result<(), QuasiProbError> {
    if !(0.0..1.0).contains(&p) {
        return Err(crate::error::ChannelError::InvalidRate(p).into());
    }
    Ok(())
}

/// Standard inverse of `k`-qubit depolarizing noise: `q = -p / (1 - p)`.
pub fn pec_decomposition(p: f64, arity: usize) -> Result<QuasiProbDecomposition, QuasiProbError> {
    check_rate(p)?;
    // validates arity
    PauliDiagonalChannel::noiseless(arity)?;
    let q = -p / (1.0 - p);
    let mut d = QuasiProbDecomposition::depolarizing_family(arity, q, None);
    d.method = Some(Method::Pec);
    d.rate = Some(p);
    Ok(d)
}

/// Feed-forward inverse of `k`-qubit depolarizing noise whose non-identity recoveries
/// are followed by the same channel: `q = -d p / ((1 - p)(d - p))`, `d = 4^k`.
pub fn ffpec_decomposition(
    p: f64,
    arity: usize,
) -> Result<QuasiProbDecomposition, QuasiProbError> {
    check_rate(p)?;
    let noise = PauliDiagonalChannel::depolarizing(p, arity)?;
    let d = (1usize << (2 * arity)) as f64;
    let q = -d * p / ((1.0 - p) * (d - p));
    let mut dec = QuasiProbDecomposition::depolarizing_family(arity, q, Some(noise));
    dec.method = Some(Method::Ffpec);
    dec.rate = Some(p);
    Ok(dec)
}

/// Decomposition for a bound noise channel: closed forms for depolarizing channels,
/// the general solver otherwise.
pub fn decomposition_for(
    noise: &PauliDiagonalChannel,
    method: Method,
) -> Result<QuasiProbDecomposition, QuasiProbError> {
    let mut dec = match (noise.depolarizing_rate(), method) {
        (Some(p), Method::Pec) => return pec_decomposition(p, noise.arity()),
        (Some(p), Method::Ffpec) => return ffpec_decomposition(p, noise.arity()),
        (None, Method::Pec) => {
            let ideal = PauliDiagonalChannel::noiseless(noise.arity())?;
            let mut d = solve_noisy_inverse(noise, &ideal)?;
            d.recovery_noise = None;
            d
        }
        (None, Method::Ffpec) => solve_noisy_inverse(noise, noise)?,
    };
    dec.method = Some(method);
    Ok(dec)
}

/// Solves `[q_I·id + Σ_{P≠I} q_P·(recovery_noise ∘ P)] ∘ noise = id` for the coefficients.
pub fn solve_noisy_inverse(
    noise: &PauliDiagonalChannel,
    recovery_noise: &PauliDiagonalChannel,
) -> Result<QuasiProbDecomposition, QuasiProbError> {
    solve_noisy_inverse_with(noise, recovery_noise, RecoveryNoiseModel::NonIdentityOnly)
}

/// As [`solve_noisy_inverse`], with an explicit choice of which branches carry recovery noise.
///
/// In the diagonal (damping factor) representation the condition is one linear equation
/// per Pauli component `Q`: `λ_Q · Σ_P q_P s(P,Q) w_P(Q) = 1`, with `λ` the gate noise
/// damping and `w_P(Q)` the recovery-noise damping on noisy branches, 1 otherwise.
pub fn solve_noisy_inverse_with(
    noise: &PauliDiagonalChannel,
    recovery_noise: &PauliDiagonalChannel,
    model: RecoveryNoiseModel,
) -> Result<QuasiProbDecomposition, QuasiProbError> {
    let arity = noise.arity();
    if recovery_noise.arity() != arity {
        return Err(crate::error::ChannelError::ArityMismatch {
            left: arity,
            right: recovery_noise.arity(),
        }
        .into());
    }
    let dim = noise.dim();
    let lambda = noise.damping_factors();
    let mu = recovery_noise.damping_factors();
    if lambda.iter().any(|&l| l.abs() < f64::EPSILON) {
        return Err(QuasiProbError::Singular);
    }
    let a = DMatrix::from_fn(dim, dim, |q, p| {
        let w = if model.is_noisy(p) { mu[q] } else { 1.0 };
        commutation_sign(p, q, arity) * w
    });
    let b = DVector::from_fn(dim, |q, _| 1.0 / lambda[q]);
    let x = a.clone().lu().solve(&b).ok_or(QuasiProbError::Singular)?;
    let residual = (&a * &x - &b).amax();
    if !x.iter().all(|v| v.is_finite()) || residual > 1e-9 * b.amax() {
        return Err(QuasiProbError::Singular);
    }
    let coefficients: Vec<f64> = x.iter().copied().collect();
    debug_assert!((coefficients.iter().sum::<f64>() - 1.0).abs() < 1e3 * NORMALIZATION_TOL);
    let mut dec = QuasiProbDecomposition::from_coefficients(
        arity,
        coefficients,
        Some(recovery_noise.clone()),
    );
    dec.rate = noise.depolarizing_rate();
    Ok(dec)
}

pub fn total_insertion_probability(d: &QuasiProbDecomposition) -> f64 {
    d.total_insertion_probability()
}

/// `(ffpec - pec) / pec`.
pub fn relative_difference(pec_prob: f64, ffpec_prob: f64) -> Result<f64, QuasiProbError> {
    if pec_prob == 0.0 {
        return Err(QuasiProbError::ZeroReference);
    }
    Ok((ffpec_prob - pec_prob) / pec_prob)
}

/// Product of the per-gate sampling overheads over the whole circuit.
pub fn gamma_total(circuit: &Circuit, method: Method) -> Result<f64, QuasiProbError> {
    let census = circuit.gate_census();
    let gamma = census
        .iter()
        .filter(|(_, &count)| count > 0)
        .try_fold(1.0, |acc, (&arity, &count)| {
            let channel = circuit
                .noise()
                .channel(arity)
                .ok_or(QuasiProbError::UnboundNoise(arity))?;
            let gamma = decomposition_for(channel, method)?.gamma();
            Ok(acc * gamma.powi(count as i32))
        });
    gamma
}
