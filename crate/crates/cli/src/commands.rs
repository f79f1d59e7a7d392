//! Subcommand implementations. Each returns the list of files it wrote.

use std::fs;
use std::path::{Path, PathBuf};

use qemlab::engines::{
    exact_mitigated_expectation_with, exact_noisy_expectation, ideal_expectation,
    noise_event_counts, sample_mitigated, theoretical_std,
};
use qemlab::quasiprob::{ffpec_decomposition, gamma_total, pec_decomposition, relative_difference};
use qemlab::{BenchmarkKind, Circuit, Method, NoiseBinding, PauliString, SampleConfig};
use serde::Serialize;

use crate::args::MethodChoice;
use crate::config::{pair_rates, CircuitSpec, ExperimentConfig, TablesConfig};
use crate::format::{rate, value};
use crate::CliError;

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(header).map_err(internal)?;
    for row in rows {
        w.write_record(row).map_err(internal)?;
    }
    w.into_inner().map_err(|e| CliError::Internal(e.to_string()))
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

fn with_rates(circuit: &Circuit, p1: f64, p2: f64) -> Result<Circuit, CliError> {
    Ok(circuit
        .clone()
        .with_noise(NoiseBinding::depolarizing(p1, p2)?))
}

/// Table of per-gate insertion probabilities, and table of per-gate and per-circuit overheads.
pub fn tables(cfg: &TablesConfig) -> Result<Vec<PathBuf>, CliError> {
    let mut insertion = Vec::new();
    for (label, arity, grid) in [("single", 1, &cfg.p1), ("two", 2, &cfg.p2)] {
        for &p in grid {
            let pec = pec_decomposition(p, arity)?.total_insertion_probability();
            let ff = ffpec_decomposition(p, arity)?.total_insertion_probability();
            let rel = relative_difference(pec, ff).map(value).unwrap_or_default();
            insertion.push(vec![label.into(), rate(p), value(pec), value(ff), rel]);
        }
    }

    let mut overheads = Vec::new();
    for (label, arity, grid) in [("gamma_single", 1, &cfg.p1), ("gamma_two", 2, &cfg.p2)] {
        for &p in grid {
            let pec = pec_decomposition(p, arity)?.gamma();
            let ff = ffpec_decomposition(p, arity)?.gamma();
            overheads.push(vec![label.into(), rate(p), value(pec), value(ff)]);
        }
    }
    let a_rates: Vec<(f64, f64)> = cfg.p1.iter().map(|&p| (p, 0.0)).collect();
    let b_rates: Vec<(f64, f64)> = cfg.p2.iter().map(|&p| (0.0, p)).collect();
    let c_rates = pair_rates(&cfg.p1, &cfg.p2)?;
    for (kind, rates) in [
        (BenchmarkKind::A, a_rates),
        (BenchmarkKind::B, b_rates),
        (BenchmarkKind::C, c_rates),
    ] {
        let base = qemlab::build_benchmark(kind, 8)?;
        for (p1, p2) in rates {
            let c = with_rates(&base, p1, p2)?;
            let shown = match kind {
                BenchmarkKind::A => rate(p1),
                BenchmarkKind::B => rate(p2),
                BenchmarkKind::C => format!("{}/{}", rate(p1), rate(p2)),
            };
            overheads.push(vec![
                format!("gamma_tot_{}", kind.tag()),
                shown,
                value(gamma_total(&c, Method::Pec)?),
                value(gamma_total(&c, Method::Ffpec)?),
            ]);
        }
    }

    Ok(vec![
        write_file(
            &cfg.out,
            "table1_insertion.csv",
            &csv_bytes(&["type", "p", "pec", "ffpec", "relative_difference"], &insertion)?,
        )?,
        write_file(
            &cfg.out,
            "table2_overheads.csv",
            &csv_bytes(&["type", "p", "pec", "ffpec"], &overheads)?,
        )?,
    ])
}

fn provenance(spec: &CircuitSpec) -> &'static str {
    match spec {
        CircuitSpec::Benchmark(BenchmarkKind::C) => "exact; value depends on the built-in layout",
        CircuitSpec::Benchmark(_) => "exact",
        CircuitSpec::File(_) => "exact; circuit file",
    }
}

/// Exact unmitigated expectation values over the rate grid.
pub fn noisy(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    let base = cfg.build_circuit()?;
    let obs = cfg.observable_for(base.num_qubits())?;
    let counts = noise_event_counts(&base, &obs)?;
    let events = |k: usize| counts.get(&k).copied().unwrap_or(0).to_string();
    let mut rows = Vec::new();
    let mut dat = String::from("# p1 p2 expectation\n");
    for (p1, p2) in cfg.rate_pairs()? {
        let v = exact_noisy_expectation(&with_rates(&base, p1, p2)?, &obs)?;
        rows.push(vec![
            rate(p1),
            rate(p2),
            value(v),
            events(1),
            events(2),
            provenance(&cfg.circuit).to_string(),
        ]);
        dat.push_str(&format!("{} {} {}\n", rate(p1), rate(p2), value(v)));
    }
    let tag = cfg.tag();
    let header = ["p1", "p2", "expectation", "events_1q", "events_2q", "note"];
    let mut written = vec![write_file(
        &cfg.out,
        &format!("noisy_{tag}.csv"),
        &csv_bytes(&header, &rows)?,
    )?];
    if cfg.gnuplot {
        written.push(write_file(&cfg.out, &format!("noisy_{tag}.dat"), dat.as_bytes())?);
    }
    Ok(written)
}

fn analytic_value(
    circuit: &Circuit,
    method: Option<Method>,
    cfg: &ExperimentConfig,
    obs: &PauliString,
) -> Result<f64, CliError> {
    Ok(match method {
        None => exact_noisy_expectation(circuit, obs)?,
        Some(m) => exact_mitigated_expectation_with(circuit, m, cfg.recovery_noise.into(), obs)?,
    })
}

fn column_name(m: MethodChoice) -> &'static str {
    match m {
        MethodChoice::None => "noisy",
        other => other.label(),
    }
}

/// Infinite-shot values of each selected estimator over the rate grid.
pub fn analytic(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>, CliError> {
    let base = cfg.build_circuit()?;
    let obs = cfg.observable_for(base.num_qubits())?;
    let ideal = ideal_expectation(&base, &obs)?;
    let mut header = vec!["p1", "p2", "ideal"];
    header.extend(cfg.methods.iter().map(|&m| column_name(m)));
    let mut rows = Vec::new();
    let mut dat = format!("# {}\n", header.join(" "));
    for (p1, p2) in cfg.rate_pairs()? {
        let c = with_rates(&base, p1, p2)?;
        let mut row = vec![rate(p1), rate(p2), value(ideal)];
        for &m in &cfg.methods {
            row.push(value(analytic_value(&c, m.method(), cfg, &obs)?));
        }
        dat.push_str(&row.join(" "));
        dat.push('\n');
        rows.push(row);
    }
    let tag = cfg.tag();
    let mut written = vec![write_file(
        &cfg.out,
        &format!("analytic_{tag}.csv"),
        &csv_bytes(&header, &rows)?,
    )?];
    if cfg.gnuplot {
        written.push(write_file(&cfg.out, &format!("analytic_{tag}.dat"), dat.as_bytes())?);
    }
    Ok(written)
}

#[derive(Serialize)]
struct RunRecord {
    method: &'static str,
    p1: f64,
    p2: f64,
    seed: u64,
    gamma_tot: f64,
}

#[derive(Serialize)]
struct SampleMetadata<'a> {
    tool: &'static str,
    version: &'static str,
    library_version: &'static str,
    qubits: usize,
    observable: String,
    config: &'a ExperimentConfig,
    runs: Vec<RunRecord>,
}

const SAMPLE_HEADER: [&str; 13] = [
    "record",
    "circuit",
    "method",
    "p1",
    "p2",
    "batch",
    "batch_mean",
    "gamma_tot",
    "mean",
    "std",
    "theoretical_std",
    "abs_error_vs_ideal",
    "abs_error_vs_analytic",
];

/// Monte Carlo runs for every (rate pair, method). Every run uses the configured seed.
///
/// `threads` caps the sampler's worker pool; it never changes the output.
pub fn sample(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<Vec<PathBuf>, CliError> {
    let base = cfg.build_circuit()?;
    let obs = cfg.observable_for(base.num_qubits())?;
    let ideal = ideal_expectation(&base, &obs)?;
    let tag = cfg.tag();
    let pairs = cfg.rate_pairs()?;

    let mut rows = Vec::new();
    let mut runs = Vec::new();
    let mut dat = String::new();
    for &choice in &cfg.methods {
        dat.push_str(&format!(
            "# method {}\n# p1 p2 mean std theoretical_std analytic ideal\n",
            choice.label()
        ));
        for &(p1, p2) in &pairs {
            let c = with_rates(&base, p1, p2)?;
            let analytic = analytic_value(&c, choice.method(), cfg, &obs)?;
            let config = SampleConfig {
                method: choice.method(),
                shots_per_batch: cfg.shots,
                batches: cfg.batches,
                seed: cfg.seed,
                clamp: cfg.clamp,
                model: cfg.recovery_noise.into(),
                backend: cfg.backend.into(),
                threads,
            };
            let r = sample_mitigated(&c, &obs, &config)?;
            let theory = theoretical_std(r.gamma_tot, analytic, cfg.shots)?;
            let std = if r.batches > 1 { r.std_of_batch_means } else { f64::NAN };
            for (i, m) in r.batch_means.iter().enumerate() {
                let mut row = vec![
                    "batch".to_string(),
                    tag.clone(),
                    choice.label().into(),
                    rate(p1),
                    rate(p2),
                    i.to_string(),
                    value(*m),
                ];
                row.resize(SAMPLE_HEADER.len(), String::new());
                rows.push(row);
            }
            rows.push(vec![
                "summary".into(),
                tag.clone(),
                choice.label().into(),
                rate(p1),
                rate(p2),
                String::new(),
                String::new(),
                value(r.gamma_tot),
                value(r.mean),
                value(std),
                value(theory),
                value((r.mean - ideal).abs()),
                value((r.mean - analytic).abs()),
            ]);
            dat.push_str(&format!(
                "{} {} {} {} {} {} {}\n",
                rate(p1),
                rate(p2),
                value(r.mean),
                value(std),
                value(theory),
                value(analytic),
                value(ideal)
            ));
            runs.push(RunRecord {
                method: choice.label(),
                p1,
                p2,
                seed: cfg.seed,
                gamma_tot: r.gamma_tot,
            });
        }
        dat.push_str("\n\n");
    }

    let meta = SampleMetadata {
        tool: "qemlab",
        version: env!("CARGO_PKG_VERSION"),
        library_version: qemlab::VERSION,
        qubits: base.num_qubits(),
        observable: obs.to_string(),
        config: cfg,
        runs,
    };
    let json = serde_json::to_string_pretty(&meta).map_err(|e| CliError::Internal(e.to_string()))?;

    let mut written = vec![
        write_file(&cfg.out, &format!("samples_{tag}.csv"), &csv_bytes(&SAMPLE_HEADER, &rows)?)?,
        write_file(&cfg.out, &format!("samples_{tag}.json"), format!("{json}\n").as_bytes())?,
    ];
    if cfg.gnuplot {
        written.push(write_file(&cfg.out, &format!("samples_{tag}.dat"), dat.as_bytes())?);
    }
    Ok(written)
}
