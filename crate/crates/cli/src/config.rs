//! Validated experiment settings, from flags or from a JSON file.
//!
//! A JSON config carries the same fields as the command-line flags plus a `command`
//! key. Unknown keys are rejected. Syntax and type errors carry the parser's line and
//! column; range errors found after parsing are reported at the line of the offending key.

use std::path::{Path, PathBuf};

use qemlab::circuits::build_benchmark_with_depth;
use qemlab::{BenchmarkKind, ChannelError, Circuit, Letter, PauliString};
use serde::{Deserialize, Serialize};

use crate::args::{BackendChoice, ExperimentArgs, MethodChoice, ModelChoice, TablesArgs};
use crate::CliError;

pub const DEFAULT_P1: [f64; 3] = [0.001, 0.0015, 0.002];
pub const DEFAULT_P2: [f64; 3] = [0.01, 0.015, 0.02];
pub const DEFAULT_SHOTS: u64 = 100_000;
pub const DEFAULT_BATCHES: usize = 10;

impl From<ChannelError> for CliError {
    fn from(e: ChannelError) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Tables,
    Noisy,
    Analytic,
    Sample,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum CircuitSpec {
    Benchmark(BenchmarkKind),
    File(PathBuf),
}

impl CircuitSpec {
    pub fn parse(s: &str, base: Option<&Path>) -> Self {
        match s.parse::<BenchmarkKind>() {
            Ok(kind) => CircuitSpec::Benchmark(kind),
            Err(_) => {
                let path = PathBuf::from(s);
                match base {
                    Some(dir) if path.is_relative() => CircuitSpec::File(dir.join(path)),
                    _ => CircuitSpec::File(path),
                }
            }
        }
    }
}

/// A validation failure tied to one setting, so callers can point at its source.
#[derive(Debug)]
struct FieldError {
    field: &'static str,
    message: String,
}

fn field_err(field: &'static str, message: impl Into<String>) -> FieldError {
    FieldError {
        field,
        message: message.into(),
    }
}

fn check_rates(field: &'static str, rates: &[f64]) -> Result<(), FieldError> {
    match rates.iter().find(|p| !(0.0..1.0).contains(*p)) {
        Some(p) => Err(field_err(field, format!("rate {p} outside [0, 1)"))),
        None => Ok(()),
    }
}

/// Pairs single- and two-qubit rates index by index; a single value is broadcast.
pub fn pair_rates(p1: &[f64], p2: &[f64]) -> Result<Vec<(f64, f64)>, CliError> {
    match (p1.len(), p2.len()) {
        (a, b) if a == b => Ok(p1.iter().copied().zip(p2.iter().copied()).collect()),
        (1, _) => Ok(p2.iter().map(|&b| (p1[0], b)).collect()),
        (_, 1) => Ok(p1.iter().map(|&a| (a, p2[0])).collect()),
        (a, b) => Err(CliError::Config(format!(
            "p1 has {a} values and p2 has {b}; they must match or one must be a single value"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TablesConfig {
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub out: PathBuf,
}

impl TablesConfig {
    pub fn from_args(a: &TablesArgs) -> Result<Self, CliError> {
        Self::build(a.p1.clone(), a.p2.clone(), a.out.clone()).map_err(flag_error)
    }

    fn build(p1: Vec<f64>, p2: Vec<f64>, out: PathBuf) -> Result<Self, FieldError> {
        let p1 = if p1.is_empty() { DEFAULT_P1.to_vec() } else { p1 };
        let p2 = if p2.is_empty() { DEFAULT_P2.to_vec() } else { p2 };
        check_rates("p1", &p1)?;
        check_rates("p2", &p2)?;
        Ok(Self { p1, p2, out })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub circuit: CircuitSpec,
    pub qubits: Option<usize>,
    pub depth: Option<usize>,
    /// Empty means the benchmark's default grid.
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub methods: Vec<MethodChoice>,
    pub observable: Option<String>,
    pub shots: u64,
    pub batches: usize,
    pub seed: u64,
    pub clamp: bool,
    pub recovery_noise: ModelChoice,
    pub backend: BackendChoice,
    pub out: PathBuf,
    pub gnuplot: bool,
}

fn flag_error(e: FieldError) -> CliError {
    CliError::Config(format!("--{}: {}", e.field.replace('_', "-"), e.message))
}

impl ExperimentConfig {
    pub fn from_args(a: &ExperimentArgs) -> Result<Self, CliError> {
        let cfg = Self {
            circuit: CircuitSpec::parse(&a.circuit, None),
            qubits: a.qubits,
            depth: a.depth,
            p1: a.p1.clone(),
            p2: a.p2.clone(),
            methods: a.method.clone(),
            observable: a.observable.clone(),
            shots: a.shots,
            batches: a.batches,
            seed: a.seed,
            clamp: a.clamp,
            recovery_noise: a.recovery_noise,
            backend: a.backend,
            out: a.out.clone(),
            gnuplot: a.gnuplot,
        };
        cfg.validate().map_err(flag_error)?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), FieldError> {
        check_rates("p1", &self.p1)?;
        check_rates("p2", &self.p2)?;
        if self.shots == 0 {
            return Err(field_err("shots", "must be at least 1"));
        }
        if self.batches == 0 {
            return Err(field_err("batches", "must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(field_err("method", "at least one method is required"));
        }
        if let Some(n) = self.qubits {
            if n < 2 || !n.is_multiple_of(2) {
                return Err(field_err("qubits", format!("must be even and >= 2, got {n}")));
            }
        }
        if self.depth == Some(0) {
            return Err(field_err("depth", "must be at least 1"));
        }
        if let CircuitSpec::File(_) = self.circuit {
            if self.qubits.is_some() || self.depth.is_some() {
                return Err(field_err("qubits", "only applies to built-in benchmarks"));
            }
        }
        if let Some(obs) = &self.observable {
            obs.parse::<PauliString>()
                .map_err(|e| field_err("observable", e.to_string()))?;
        }
        Ok(())
    }

    pub fn tables(&self) -> Result<TablesConfig, CliError> {
        TablesConfig::build(self.p1.clone(), self.p2.clone(), self.out.clone()).map_err(flag_error)
    }

    /// Short name used in output file names.
    pub fn tag(&self) -> String {
        match &self.circuit {
            CircuitSpec::Benchmark(kind) => kind.tag().to_string(),
            CircuitSpec::File(path) => path
                .file_stem()
                .map(|s| {
                    s.to_string_lossy()
                        .chars()
                        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
                        .collect()
                })
                .unwrap_or_else(|| "circuit".to_string()),
        }
    }

    /// The circuit without noise attached.
    pub fn build_circuit(&self) -> Result<Circuit, CliError> {
        match &self.circuit {
            CircuitSpec::Benchmark(kind) => Ok(build_benchmark_with_depth(
                *kind,
                self.qubits.unwrap_or(8),
                self.depth.unwrap_or(kind.default_depth()),
            )?),
            CircuitSpec::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                text.parse::<Circuit>()
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
            }
        }
    }

    pub fn observable_for(&self, n: usize) -> Result<PauliString, CliError> {
        match &self.observable {
            None => Ok(PauliString::uniform(n, Letter::Z)),
            Some(s) => {
                let p: PauliString = s
                    .parse()
                    .map_err(|e| CliError::Config(format!("observable: {e}")))?;
                if p.num_qubits() != n {
                    return Err(CliError::Config(format!(
                        "observable {s} has {} qubits, circuit has {n}",
                        p.num_qubits()
                    )));
                }
                Ok(p)
            }
        }
    }

    /// `(p1, p2)` pairs to evaluate. Benchmark A only has single-qubit gates and B only
    /// two-qubit gates, so their idle rate defaults to 0.
    pub fn rate_pairs(&self) -> Result<Vec<(f64, f64)>, CliError> {
        let (d1, d2): (&[f64], &[f64]) = match self.circuit {
            CircuitSpec::Benchmark(BenchmarkKind::A) => (&DEFAULT_P1, &[0.0]),
            CircuitSpec::Benchmark(BenchmarkKind::B) => (&[0.0], &DEFAULT_P2),
            _ => (&DEFAULT_P1, &DEFAULT_P2),
        };
        let p1 = if self.p1.is_empty() { d1 } else { &self.p1 };
        let p2 = if self.p2.is_empty() { d2 } else { &self.p2 };
        pair_rates(p1, p2)
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: CommandKind,
    circuit: Option<String>,
    qubits: Option<usize>,
    depth: Option<usize>,
    p1: Option<OneOrMany<f64>>,
    p2: Option<OneOrMany<f64>>,
    method: Option<OneOrMany<MethodChoice>>,
    observable: Option<String>,
    shots: Option<u64>,
    batches: Option<usize>,
    seed: Option<u64>,
    clamp: Option<bool>,
    recovery_noise: Option<ModelChoice>,
    backend: Option<BackendChoice>,
    out: Option<PathBuf>,
    gnuplot: Option<bool>,
}

/// 1-based line of the first `"key":` in `text`, if any.
fn line_of_key(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    let mut from = 0;
    while let Some(pos) = text[from..].find(&needle) {
        let at = from + pos;
        let rest = text[at + needle.len()..].trim_start();
        if rest.starts_with(':') {
            return Some(text[..at].matches('\n').count() + 1);
        }
        from = at + needle.len();
    }
    None
}

/// Loads a JSON config. Relative circuit paths resolve against the config's directory.
pub fn load(path: &Path) -> Result<(CommandKind, ExperimentConfig), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text, path)
}

pub fn parse(text: &str, path: &Path) -> Result<(CommandKind, ExperimentConfig), CliError> {
    let raw: RawConfig = serde_json::from_str(text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent();
    let cfg = ExperimentConfig {
        circuit: CircuitSpec::parse(raw.circuit.as_deref().unwrap_or("a"), base),
        qubits: raw.qubits,
        depth: raw.depth,
        p1: raw.p1.map(OneOrMany::into_vec).unwrap_or_default(),
        p2: raw.p2.map(OneOrMany::into_vec).unwrap_or_default(),
        methods: raw.method.map(OneOrMany::into_vec).unwrap_or_else(|| {
            vec![MethodChoice::None, MethodChoice::Pec, MethodChoice::Ffpec]
        }),
        observable: raw.observable,
        shots: raw.shots.unwrap_or(DEFAULT_SHOTS),
        batches: raw.batches.unwrap_or(DEFAULT_BATCHES),
        seed: raw.seed.unwrap_or(0),
        clamp: raw.clamp.unwrap_or(false),
        recovery_noise: raw.recovery_noise.unwrap_or(ModelChoice::NonIdentityOnly),
        backend: raw.backend.unwrap_or(BackendChoice::Compiled),
        out: raw.out.unwrap_or_else(|| PathBuf::from("out")),
        gnuplot: raw.gnuplot.unwrap_or(false),
    };
    cfg.validate().map_err(|e| {
        match line_of_key(text, e.field) {
            Some(line) => CliError::Config(format!(
                "{}: line {line}: {}: {}",
                path.display(),
                e.field,
                e.message
            )),
            None => CliError::Config(format!("{}: {}: {}", path.display(), e.field, e.message)),
        }
    })?;
    Ok((raw.command, cfg))
}
