//! Pauli-diagonal noise channels.
//!
//! A channel is stored by its error probabilities over the `4^k` Paulis of its arity,
//! in base-4 index order (identity first, qubit 0 most significant). The damping
//! factor of a Pauli `Q` is the channel's eigenvalue on that observable component:
//! `Σ_P prob[P] · s(P, Q)` where `s = ±1` records whether `P` and `Q` commute.

use rand::Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::ChannelError;
use crate::pauli::{commutation_sign, PauliString};

pub const MAX_ARITY: usize = 4;
pub(crate) const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PauliDiagonalChannel {
    arity: usize,
    error_probs: Vec<f64>,
    damping: Vec<f64>,
    cumulative: Vec<f64>,
    depolarizing_rate: Option<f64>,
}

impl PauliDiagonalChannel {
    pub fn new(arity: usize, error_probs: Vec<f64>) -> Result<Self, ChannelError> {
        Self::build(arity, error_probs, None)
    }

    fn build(
        arity: usize,
        mut error_probs: Vec<f64>,
        depolarizing_rate: Option<f64>,
    ) -> Result<Self, ChannelError> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(ChannelError::UnsupportedArity(arity));
        }
        let dim = 1usize << (2 * arity);
        if error_probs.len() != dim {
            return Err(ChannelError::WrongLength {
                expected: dim,
                got: error_probs.len(),
            });
        }
        let sum: f64 = error_probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL
            || error_probs.iter().any(|&w| w.is_nan() || w < -NORMALIZATION_TOL)
        {
            return Err(ChannelError::NotNormalized { sum });
        }
        for w in &mut error_probs {
            *w = w.max(0.0);
        }
        let mut damping: Vec<f64> = (0..dim)
            .map(|q| {
                error_probs
                    .iter()
                    .enumerate()
                    .map(|(p, &w)| w * commutation_sign(p, q, arity))
                    .sum()
            })
            .collect();
        damping[0] = 1.0;
        if let Some(p) = depolarizing_rate {
            damping[1..].fill(1.0 - p);
        }
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = error_probs
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        // Guard the last bucket against rounding so every draw lands somewhere.
        if let Some(last) = cumulative.last_mut() {
            *last = f64::INFINITY;
        }
        Ok(Self {
            arity,
            error_probs,
            damping,
            cumulative,
            depolarizing_rate,
        })
    }

    /// Depolarizing channel: identity weight `1 - (4^k - 1) p / 4^k`, every other Pauli `p / 4^k`.
    pub fn depolarizing(p: f64, arity: usize) -> Result<Self, ChannelError> {
        if !(0.0..1.0).contains(&p) {
            return Err(ChannelError::InvalidRate(p));
        }
        if arity == 0 || arity > MAX_ARITY {
            return Err(ChannelError::UnsupportedArity(arity));
        }
        let dim = 1usize << (2 * arity);
        let d = dim as f64;
        let mut probs = vec![p / d; dim];
        probs[0] = 1.0 - (d - 1.0) * p / d;
        Self::build(arity, probs, Some(p))
    }

    pub fn noiseless(arity: usize) -> Result<Self, ChannelError> {
        Self::depolarizing(0.0, arity)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.error_probs.len()
    }

    pub fn error_probs(&self) -> &[f64] {
        &self.error_probs
    }

    /// Damping factors indexed like `error_probs`.
    pub fn damping_factors(&self) -> &[f64] {
        &self.damping
    }

    /// `Some(p)` when the channel was built as depolarizing with rate `p`.
    pub fn depolarizing_rate(&self) -> Option<f64> {
        self.depolarizing_rate
    }

    pub fn damping_factor(&self, q: &PauliString) -> Result<f64, ChannelError> {
        if q.num_qubits() != self.arity {
            return Err(ChannelError::ArityMismatch {
                left: self.arity,
                right: q.num_qubits(),
            });
        }
        Ok(self.damping[q.index()])
    }

    /// Draws a Pauli index with probability `error_probs[index]`.
    #[inline]
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cumulative.partition_point(|&c| c <= u)
    }

    pub fn sample_error<R: Rng + ?Sized>(&self, rng: &mut R) -> PauliString {
        PauliString::from_index(self.arity, self.sample_index(rng))
    }

    /// Sequential application of both channels. Damping factors multiply; the error
    /// probabilities are recovered with the inverse character transform.
    pub fn compose(&self, other: &Self) -> Result<Self, ChannelError> {
        if self.arity != other.arity {
            return Err(ChannelError::ArityMismatch {
                left: self.arity,
                right: other.arity,
            });
        }
        let damping: Vec<f64> = self
            .damping
            .iter()
            .zip(&other.damping)
            .map(|(a, b)| a * b)
            .collect();
        let mut out = Self::from_damping(self.arity, &damping)?;
        out.depolarizing_rate = match (self.depolarizing_rate, other.depolarizing_rate) {
            (Some(a), Some(b)) => Some(1.0 - (1.0 - a) * (1.0 - b)),
            _ => None,
        };
        Ok(out)
    }

    /// Channel with the given damping factors (the first must be 1).
    pub fn from_damping(arity: usize, damping: &[f64]) -> Result<Self, ChannelError> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(ChannelError::UnsupportedArity(arity));
        }
        let dim = 1usize << (2 * arity);
        if damping.len() != dim {
            return Err(ChannelError::WrongLength {
                expected: dim,
                got: damping.len(),
            });
        }
        let probs = (0..dim)
            .map(|p| {
                damping
                    .iter()
                    .enumerate()
                    .map(|(q, &f)| f * commutation_sign(p, q, arity))
                    .sum::<f64>()
                    / dim as f64
            })
            .collect();
        Self::build(arity, probs, None)
    }
}

impl Serialize for PauliDiagonalChannel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("PauliDiagonalChannel", 2)?;
        st.serialize_field("arity", &self.arity)?;
        match self.depolarizing_rate {
            Some(p) => st.serialize_field("p", &p)?,
            None => st.serialize_field("error_probs", &self.error_probs)?,
        }
        st.end()
    }
}
