//! The Heisenberg engine against the dense density-matrix oracle.

use proptest::prelude::*;
use qemlab::engines::{
    dense_expectation, exact_mitigated_expectation, exact_mitigated_expectation_with,
    exact_noisy_expectation, ideal_expectation, noise_event_counts, DenseMode,
};
use qemlab::{
    build_benchmark, BenchmarkKind, Circuit, GateOp, Letter, Method, NoiseBinding,
    PauliDiagonalChannel, PauliString, RecoveryNoiseModel,
};

const MODELS: [RecoveryNoiseModel; 2] =
    [RecoveryNoiseModel::NonIdentityOnly, RecoveryNoiseModel::AllBranches];

fn all_z(n: usize) -> PauliString {
    PauliString::uniform(n, Letter::Z)
}

fn assert_agree(circuit: &Circuit, obs: &PauliString, label: &str) {
    let dense = dense_expectation(circuit, DenseMode::Noisy, obs).unwrap();
    let exact = exact_noisy_expectation(circuit, obs).unwrap();
    assert!((dense - exact).abs() < 1e-10, "{label} noisy: {dense} vs {exact}");
    for method in [Method::Pec, Method::Ffpec] {
        for model in MODELS {
            let dense = dense_expectation(circuit, DenseMode::Mitigated(method, model), obs).unwrap();
            let exact = exact_mitigated_expectation_with(circuit, method, model, obs).unwrap();
            assert!(
                (dense - exact).abs() < 1e-10,
                "{label} {method:?} {model:?}: {dense} vs {exact}"
            );
        }
    }
}

#[test]
fn benchmarks_agree_on_four_qubits() {
    for kind in BenchmarkKind::ALL {
        for &(p1, p2) in &[(0.0, 0.0), (0.01, 0.01), (0.05, 0.05), (0.001, 0.05)] {
            let c = build_benchmark(kind, 4)
                .unwrap()
                .with_noise(NoiseBinding::depolarizing(p1, p2).unwrap());
            assert_agree(&c, &all_z(4), &format!("{kind:?} p1={p1} p2={p2}"));
        }
    }
}

#[test]
fn benchmark_b_on_two_qubits() {
    let c = build_benchmark(BenchmarkKind::B, 2)
        .unwrap()
        .with_noise(NoiseBinding::depolarizing(0.0, 0.03).unwrap());
    assert_agree(&c, &all_z(2), "B n=2");
}

#[test]
fn benchmark_c_event_counts_at_full_size() {
    let c = build_benchmark(BenchmarkKind::C, 8).unwrap();
    let counts = noise_event_counts(&c, &all_z(8)).unwrap();
    assert_eq!(counts[&1], 84);
    assert_eq!(counts[&2], 64);
    let noisy = exact_noisy_expectation(
        &c.with_noise(NoiseBinding::depolarizing(0.001, 0.01).unwrap()),
        &all_z(8),
    )
    .unwrap();
    assert!((noisy - 0.999f64.powi(84) * 0.99f64.powi(64)).abs() < 1e-12);
}

#[test]
fn ffpec_recovers_ideal_value_on_every_benchmark() {
    for kind in BenchmarkKind::ALL {
        let c = build_benchmark(kind, 8)
            .unwrap()
            .with_noise(NoiseBinding::depolarizing(0.002, 0.02).unwrap());
        let ideal = ideal_expectation(&c, &all_z(8)).unwrap();
        let mitigated = exact_mitigated_expectation(&c, Method::Ffpec, &all_z(8)).unwrap();
        assert!((mitigated - ideal).abs() < 1e-10, "{kind:?}");
    }
}

#[test]
fn pec_residual_on_b_matches_closed_form() {
    for &p in &[0.01, 0.015, 0.02] {
        let c = build_benchmark(BenchmarkKind::B, 8)
            .unwrap()
            .with_noise(NoiseBinding::depolarizing(0.0, p).unwrap());
        let v = exact_mitigated_expectation(&c, Method::Pec, &all_z(8)).unwrap();
        let expected = (1.0 - p * p / 16.0f64).powi(64);
        assert!((v - expected).abs() < 1e-12, "p={p}: {v}");
    }
}

fn arb_channel(k: usize) -> impl Strategy<Value = PauliDiagonalChannel> {
    (prop::collection::vec(0.0f64..1.0, 1 << (2 * k)), 0.0f64..0.1).prop_map(move |(w, s)| {
        let t: f64 = w[1..].iter().sum::<f64>() + 1e-12;
        let mut probs: Vec<f64> = w.iter().map(|x| s * x / t).collect();
        probs[0] = 1.0 - probs[1..].iter().sum::<f64>();
        PauliDiagonalChannel::new(k, probs).unwrap()
    })
}

fn arb_op(n: usize) -> impl Strategy<Value = GateOp> {
    prop_oneof![
        (0..n, 1usize..4).prop_map(|(q, l)| GateOp::single(Letter::from_code(l), q)),
        (0..n, 0..n)
            .prop_filter("distinct", |(a, b)| a != b)
            .prop_map(|(a, b)| GateOp::cnot(a, b).unwrap()),
    ]
}

fn arb_circuit() -> impl Strategy<Value = (Circuit, PauliString)> {
    (2usize..=3).prop_flat_map(|n| {
        (
            prop::collection::vec(arb_op(n), 1..12),
            arb_channel(1),
            arb_channel(2),
            prop::collection::vec(prop_oneof![Just(Letter::I), Just(Letter::Z)], n),
        )
            .prop_map(move |(ops, c1, c2, obs)| {
                let mut c = Circuit::new(n);
                for op in ops {
                    c.push(op).unwrap();
                }
                let c = c.with_noise(NoiseBinding::new().bind(c1).bind(c2));
                (c, PauliString::from_letters(&obs))
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_circuits_with_random_channels_agree((c, obs) in arb_circuit()) {
        assert_agree(&c, &obs, "random");
    }

    #[test]
    fn solved_decompositions_mitigate_random_channels((c, obs) in arb_circuit()) {
        let ideal = ideal_expectation(&c, &obs).unwrap();
        let ff = exact_mitigated_expectation(&c, Method::Ffpec, &obs).unwrap();
        prop_assert!((ff - ideal).abs() < 1e-9);
    }
}
