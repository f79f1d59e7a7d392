//! Circuit representation, noise binding and the three benchmark circuits.
//!
//! The text format is line based:
//!
//! ```text
//! n=8
//! # comment
//! X q3
//! CNOT q1 q2
//! ```
//!
//! Single-qubit `I`, `X`, `Y`, `Z` gates and `CNOT control target` are accepted.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channels::PauliDiagonalChannel;
use crate::error::{ChannelError, CircuitError};
use crate::pauli::{GateKind, GateOp, Letter, PauliString};

/// Noise channel applied after every gate of a given arity.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct NoiseBinding {
    channels: BTreeMap<usize, PauliDiagonalChannel>,
}

impl NoiseBinding {
    pub fn new() -> Self {
        Self::default()
    }

    /// Depolarizing noise with rate `p1` on one-qubit gates and `p2` on two-qubit gates.
    pub fn depolarizing(p1: f64, p2: f64) -> Result<Self, ChannelError> {
        Ok(Self::new()
            .bind(PauliDiagonalChannel::depolarizing(p1, 1)?)
            .bind(PauliDiagonalChannel::depolarizing(p2, 2)?))
    }

    pub fn bind(mut self, channel: PauliDiagonalChannel) -> Self {
        self.channels.insert(channel.arity(), channel);
        self
    }

    pub fn channel(&self, arity: usize) -> Option<&PauliDiagonalChannel> {
        self.channels.get(&arity)
    }

    /// Depolarizing rate bound to `arity`, if the channel is a built-in depolarizing one.
    pub fn rate(&self, arity: usize) -> Option<f64> {
        self.channel(arity).and_then(|c| c.depolarizing_rate())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n: usize,
    ops: Vec<GateOp>,
    noise: NoiseBinding,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            ops: Vec::new(),
            noise: NoiseBinding::new(),
        }
    }

    pub fn push(&mut self, op: GateOp) -> Result<(), CircuitError> {
        op.validate(self.n)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn with_noise(mut self, noise: NoiseBinding) -> Self {
        self.noise = noise;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn noise(&self) -> &NoiseBinding {
        &self.noise
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Gate counts keyed by arity. One- and two-qubit entries are always present.
    pub fn gate_census(&self) -> GateCensus {
        let mut counts = BTreeMap::from([(1, 0), (2, 0)]);
        for op in &self.ops {
            *counts.entry(op.arity()).or_insert(0) += 1;
        }
        GateCensus(counts)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n={}", self.n)?;
        for op in &self.ops {
            match op.kind() {
                GateKind::Cnot => {
                    writeln!(f, "CNOT q{} q{}", op.qubits()[0], op.qubits()[1])?;
                }
                GateKind::Pauli(letters) => {
                    let mut line = String::new();
                    for l in letters.letters() {
                        line.push(l.as_char());
                    }
                    for q in op.qubits() {
                        write!(line, " q{q}")?;
                    }
                    writeln!(f, "{line}")?;
                }
            }
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = CircuitError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut circuit: Option<Circuit> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |message: String| CircuitError::Parse {
                line: line_no,
                message,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some(c) = circuit.as_mut() else {
                let n = line
                    .strip_prefix("n=")
                    .and_then(|v| v.trim().parse::<usize>().ok())
                    .filter(|&n| n > 0)
                    .ok_or_else(|| err(format!("expected header `n=<qubits>`, found {line:?}")))?;
                circuit = Some(Circuit::new(n));
                continue;
            };
            let mut parts = line.split_whitespace();
            let name = parts.next().unwrap_or_default();
            let qubits = parts
                .map(|tok| {
                    tok.strip_prefix('q')
                        .and_then(|v| v.parse::<usize>().ok())
                        .ok_or_else(|| err(format!("bad qubit operand {tok:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let op = if name.eq_ignore_ascii_case("CNOT") {
                if qubits.len() != 2 {
                    return Err(err(format!("CNOT takes 2 qubits, got {}", qubits.len())));
                }
                GateOp::cnot(qubits[0], qubits[1]).map_err(|e| err(e.to_string()))?
            } else {
                let letters = name
                    .chars()
                    .map(Letter::from_char)
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| err(format!("unknown gate {name:?}")))?;
                GateOp::pauli(PauliString::from_letters(&letters), qubits)
                    .map_err(|e| err(e.to_string()))?
            };
            c.push(op).map_err(|e| err(e.to_string()))?;
        }
        circuit.ok_or(CircuitError::Parse {
            line: 0,
            message: "missing `n=<qubits>` header".into(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateCensus(BTreeMap<usize, usize>);

impl GateCensus {
    pub fn one_qubit(&self) -> usize {
        self.count(1)
    }

    pub fn two_qubit(&self) -> usize {
        self.count(2)
    }

    pub fn count(&self, arity: usize) -> usize {
        self.0.get(&arity).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&usize, &usize)> {
        self.0.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BenchmarkKind {
    A,
    B,
    C,
}

impl BenchmarkKind {
    pub const ALL: [BenchmarkKind; 3] = [BenchmarkKind::A, BenchmarkKind::B, BenchmarkKind::C];

    pub fn tag(self) -> &'static str {
        match self {
            BenchmarkKind::A => "a",
            BenchmarkKind::B => "b",
            BenchmarkKind::C => "c",
        }
    }

    /// Layer count used by the reference 8-qubit circuits (columns of X for A).
    pub fn default_depth(self) -> usize {
        match self {
            BenchmarkKind::A => 200,
            BenchmarkKind::B | BenchmarkKind::C => 8,
        }
    }
}

impl FromStr for BenchmarkKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(BenchmarkKind::A),
            "b" => Ok(BenchmarkKind::B),
            "c" => Ok(BenchmarkKind::C),
            other => Err(format!("unknown benchmark {other:?}")),
        }
    }
}

pub fn build_benchmark(kind: BenchmarkKind, n: usize) -> Result<Circuit, CircuitError> {
    build_benchmark_with_depth(kind, n, kind.default_depth())
}

/// Benchmark circuit on `n` qubits with `depth` layers.
///
/// * A: `depth` columns of X on every qubit.
/// * B: `depth` brickwork layers, CNOTs on pairs `(2i, 2i+1)` then `(2i+1, 2i+2 mod n)`.
/// * C: `depth` layers of X column, even CNOT sublayer, X column, odd CNOT sublayer.
///
/// The first qubit of each pair is the control, so the wrap-around pair of the odd
/// sublayer is `CNOT(n-1, 0)`.
pub fn build_benchmark_with_depth(
    kind: BenchmarkKind,
    n: usize,
    depth: usize,
) -> Result<Circuit, CircuitError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(CircuitError::InvalidQubitCount(n));
    }
    let mut c = Circuit::new(n);
    let x_column = |c: &mut Circuit| -> Result<(), CircuitError> {
        for q in 0..n {
            c.push(GateOp::x(q))?;
        }
        Ok(())
    };
    let even = |c: &mut Circuit| -> Result<(), CircuitError> {
        for i in (0..n).step_by(2) {
            c.push(GateOp::cnot(i, i + 1)?)?;
        }
        Ok(())
    };
    let odd = |c: &mut Circuit| -> Result<(), CircuitError> {
        for i in (1..n).step_by(2) {
            c.push(GateOp::cnot(i, (i + 1) % n)?)?;
        }
        Ok(())
    };
    for _ in 0..depth {
        match kind {
            BenchmarkKind::A => x_column(&mut c)?,
            BenchmarkKind::B => {
                even(&mut c)?;
                odd(&mut c)?;
            }
            BenchmarkKind::C => {
                x_column(&mut c)?;
                even(&mut c)?;
                x_column(&mut c)?;
                odd(&mut c)?;
            }
        }
    }
    if kind == BenchmarkKind::B {
        check_every_cnot_hit(&c)?;
    }
    Ok(c)
}

/// Back-propagates `Z^⊗n` and requires every CNOT to see a non-identity restriction,
/// so each of them contributes one damping factor to the noisy expectation.
fn check_every_cnot_hit(c: &Circuit) -> Result<(), CircuitError> {
    let mut running = PauliString::uniform(c.num_qubits(), Letter::Z);
    for (pos, op) in c.ops().iter().enumerate().rev() {
        if op.arity() == 2 && running.restricted_index(op.qubits()) == 0 {
            return Err(CircuitError::Layout(format!(
                "CNOT at position {pos} sees the identity"
            )));
        }
        running = running.conjugate(op)?;
    }
    Ok(())
}
