use std::fs;
use std::path::Path;
use std::process::Command as Process;

use clap::Parser;
use qemlab_cli::{execute, Cli};

fn run_in_process(args: &[&str]) -> Result<Vec<std::path::PathBuf>, qemlab_cli::CliError> {
    let cli = Cli::try_parse_from(std::iter::once("qemlab").chain(args.iter().copied())).unwrap();
    execute(cli.command, Some(1))
}

fn binary() -> Process {
    Process::new(env!("CARGO_BIN_EXE_qemlab"))
}

fn read_csv(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(|r| r.unwrap())
        .collect()
}

#[test]
fn tables_with_zero_rate_leave_relative_difference_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_in_process(&["tables", "--p1", "0,0.0015", "--p2", "0,0.015", "--out", out]).unwrap();
    let rows = read_csv(&dir.path().join("table1_insertion.csv"));
    assert_eq!(&rows[0][0], "single");
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), 0.0);
    assert_eq!(&rows[0][4], "");
    assert_eq!(&rows[1][1], "0.0015");
    assert!((rows[1][4].parse::<f64>().unwrap() - 0.0003743).abs() < 5e-8);
    let rows = read_csv(&dir.path().join("table2_overheads.csv"));
    assert!(rows.iter().any(|r| &r[0] == "gamma_tot_c" && &r[1] == "0.0015/0.015"));
}

#[test]
fn trivial_noiseless_run_is_exactly_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_in_process(&[
        "sample", "--circuit", "c", "--p1", "0", "--p2", "0", "--shots", "1", "--batches", "1",
        "--method", "none,pec,ffpec", "--out", out,
    ])
    .unwrap();
    let rows = read_csv(&dir.path().join("samples_c.csv"));
    let summaries: Vec<_> = rows.iter().filter(|r| &r[0] == "summary").collect();
    assert_eq!(summaries.len(), 3);
    for r in summaries {
        assert_eq!(&r[8], "1.000000000e0");
        assert_eq!(&r[9], "", "std is undefined for one batch");
        assert_eq!(&r[11], "0.000000000e0");
    }
}

#[test]
fn analytic_b_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_in_process(&["analytic", "--circuit", "b", "--p2", "0.02", "--method", "pec,ffpec", "--out", out])
        .unwrap();
    let rows = read_csv(&dir.path().join("analytic_b.csv"));
    assert_eq!(rows.len(), 1);
    let pec: f64 = rows[0][3].parse().unwrap();
    assert!((pec - (1.0 - 0.02f64.powi(2) / 16.0).powi(64)).abs() < 1e-9);
    assert_eq!(&rows[0][4], "1.000000000e0");
}

#[test]
fn circuit_file_and_gnuplot_output() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("pair.txt");
    fs::write(&circuit, "# two-qubit toy\nn=2\nX q0\nCNOT q0 q1\nX q1\n").unwrap();
    let out = dir.path().join("out");
    let written = run_in_process(&[
        "noisy",
        "--circuit",
        circuit.to_str().unwrap(),
        "--p1",
        "0.01",
        "--p2",
        "0.02",
        "--gnuplot",
        "--out",
        out.to_str().unwrap(),
    ])
    .unwrap();
    assert_eq!(written.len(), 2);
    let rows = read_csv(&out.join("noisy_pair.csv"));
    // The ideal output is |10⟩, so Z⊗Z is -1. Back-propagated, Z⊗Z meets X1 and the CNOT
    // as non-identity Paulis but reaches X0 as I⊗Z.
    let v: f64 = rows[0][2].parse().unwrap();
    assert!((v + 0.99 * 0.98).abs() < 1e-9);
    assert_eq!((&rows[0][3], &rows[0][4]), ("1", "1"));
    assert!(fs::read_to_string(out.join("noisy_pair.dat")).unwrap().starts_with("# p1 p2"));
}

#[test]
fn json_config_runs_and_reports_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let good = dir.path().join("good.json");
    fs::write(
        &good,
        format!(
            "{{\n  \"command\": \"noisy\",\n  \"circuit\": \"b\",\n  \"p2\": 0.015,\n  \"out\": {:?}\n}}\n",
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let status = binary().args(["run", "--config", good.to_str().unwrap()]).output().unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let rows = read_csv(&out.join("noisy_b.csv"));
    assert!((rows[0][2].parse::<f64>().unwrap() - 0.985f64.powi(64)).abs() < 1e-9);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\n  \"command\": \"sample\",\n  \"circuit\": \"a\",\n  \"batches\": 0\n}\n").unwrap();
    let o = binary().args(["run", "--config", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4") && err.contains("batches"), "{err}");
}

#[test]
fn exit_codes() {
    let o = binary().args(["noisy", "--p1", "1.5"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = binary().args(["noisy", "--circuit", "/nonexistent/circuit.txt"]).output().unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = binary().args(["run", "--config", "/nonexistent/config.json"]).output().unwrap();
    assert_eq!(o.status.code(), Some(3));
    let o = binary().args(["sample", "--method", "zne"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = binary()
        .args(["noisy", "--circuit", "a"])
        .env("QEMLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = binary()
        .args(["tables", "--out", blocker.join("sub").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn binary_output_is_byte_identical_across_thread_caps() {
    let dir = tempfile::tempdir().unwrap();
    // Same output directory for both runs, since the sidecar echoes it.
    let out = dir.path().join("out");
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let o = binary()
            .args([
                "sample", "--circuit", "c", "--p1", "0.002", "--p2", "0.02", "--method", "pec",
                "--shots", "40000", "--batches", "3", "--seed", "9", "--gnuplot", "--out",
            ])
            .arg(&out)
            .env("QEMLAB_THREADS", threads)
            .output()
            .unwrap();
        assert!(o.status.success());
        outputs.push(
            ["samples_c.csv", "samples_c.json", "samples_c.dat"]
                .map(|f| fs::read(out.join(f)).unwrap()),
        );
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn signed_observable_and_resized_benchmark() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_in_process(&[
        "noisy", "--circuit", "b", "--qubits", "4", "--observable", "-ZZZZ", "--p2", "0.01", "--out", out,
    ])
    .unwrap();
    let rows = read_csv(&dir.path().join("noisy_b.csv"));
    assert!((num_field(&rows[0][2]) + 0.99f64.powi(32)).abs() < 1e-9);
    assert_eq!(&rows[0][4], "32");
}

fn num_field(s: &str) -> f64 {
    s.parse().unwrap()
}
