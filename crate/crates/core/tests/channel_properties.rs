use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;
use qemlab::pauli::{Letter, PauliString};
use qemlab::PauliDiagonalChannel;

type M = DMatrix<Complex<f64>>;

fn letter(l: Letter) -> M {
    let (o, z, i) = (Complex::new(1.0, 0.0), Complex::new(0.0, 0.0), Complex::new(0.0, 1.0));
    match l {
        Letter::I => M::from_row_slice(2, 2, &[o, z, z, o]),
        Letter::X => M::from_row_slice(2, 2, &[z, o, o, z]),
        Letter::Y => M::from_row_slice(2, 2, &[z, -i, i, z]),
        Letter::Z => M::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

fn pauli_matrix(k: usize, index: usize) -> M {
    let letters = PauliString::from_index(k, index).letters();
    letters[1..]
        .iter()
        .fold(letter(letters[0]), |acc, &l| acc.kronecker(&letter(l)))
}

/// Random density matrix `A A† / Tr(A A†)` from a seed-driven complex matrix.
fn density(k: usize, entries: &[f64]) -> M {
    let dim = 1 << k;
    let a = M::from_fn(dim, dim, |r, c| {
        let i = 2 * (r * dim + c);
        Complex::new(entries[i], entries[i + 1])
    });
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    rho / tr
}

fn arb_channel(k: usize) -> impl Strategy<Value = PauliDiagonalChannel> {
    prop::collection::vec(0.0f64..1.0, 1 << (2 * k)).prop_map(move |w| {
        let total: f64 = w.iter().sum::<f64>() + 1e-9;
        let mut probs: Vec<f64> = w.iter().map(|x| x / total).collect();
        let rest: f64 = probs[1..].iter().sum();
        probs[0] = 1.0 - rest;
        PauliDiagonalChannel::new(k, probs).unwrap()
    })
}

#[test]
fn depolarizing_damping_is_one_minus_p_on_every_pauli() {
    for k in [1, 2] {
        for &p in &[0.0, 0.001, 0.02, 0.3, 0.9] {
            let ch = PauliDiagonalChannel::depolarizing(p, k).unwrap();
            let sum: f64 = ch.error_probs().iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            for q in 0..ch.dim() {
                let expected = if q == 0 { 1.0 } else { 1.0 - p };
                let f = ch.damping_factor(&PauliString::from_index(k, q)).unwrap();
                assert_eq!(f, expected, "k={k} p={p} q={q}");
            }
        }
    }
}

#[test]
fn depolarizing_damping_matches_dense_channel_matrix() {
    // Pauli transfer diagonal: Tr(Q · D(Q)) / 2^k with D applied in Kraus form.
    for (k, p) in [(1, 0.01), (2, 0.02)] {
        let ch = PauliDiagonalChannel::depolarizing(p, k).unwrap();
        for q in 0..ch.dim() {
            let qm = pauli_matrix(k, q);
            let mut out = M::zeros(1 << k, 1 << k);
            for (e, &w) in ch.error_probs().iter().enumerate() {
                let em = pauli_matrix(k, e);
                out += &em * &qm * em.adjoint() * Complex::new(w, 0.0);
            }
            let factor = (&qm * out).trace().re / (1 << k) as f64;
            assert!((factor - ch.damping_factors()[q]).abs() < 1e-14);
        }
    }
}

proptest! {
    #[test]
    fn kraus_and_diagonal_forms_agree(
        ch in (1usize..=2).prop_flat_map(arb_channel),
        entries in prop::collection::vec(-1.0f64..1.0, 2 * 16),
    ) {
        let k = ch.arity();
        let rho = density(k, &entries);
        let dim = 1usize << k;
        let mut kraus = M::zeros(dim, dim);
        for (e, &w) in ch.error_probs().iter().enumerate() {
            let em = pauli_matrix(k, e);
            kraus += &em * &rho * em.adjoint() * Complex::new(w, 0.0);
        }
        // rho = Σ_Q c_Q Q / 2^k with c_Q = Tr(Q rho); the channel scales c_Q by its damping factor.
        let mut diagonal = M::zeros(dim, dim);
        for q in 0..ch.dim() {
            let qm = pauli_matrix(k, q);
            let coeff = (&qm * &rho).trace() / Complex::new(dim as f64, 0.0);
            diagonal += qm * coeff * Complex::new(ch.damping_factors()[q], 0.0);
        }
        prop_assert!((kraus - diagonal).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn damping_factors_bounded(ch in (1usize..=2).prop_flat_map(arb_channel)) {
        prop_assert_eq!(ch.damping_factors()[0], 1.0);
        prop_assert!(ch.damping_factors().iter().all(|f| (-1.0 - 1e-12..=1.0 + 1e-12).contains(f)));
    }

    #[test]
    fn composition_is_normalized_and_commutative(
        (a, b) in (1usize..=2).prop_flat_map(|k| (arb_channel(k), arb_channel(k)))
    ) {
        let ab = a.compose(&b).unwrap();
        let ba = b.compose(&a).unwrap();
        prop_assert!((ab.error_probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (x, y) in ab.error_probs().iter().zip(ba.error_probs()) {
            prop_assert!((x - y).abs() < 1e-14);
        }
        for q in 0..a.dim() {
            let expected = a.damping_factors()[q] * b.damping_factors()[q];
            prop_assert!((ab.damping_factors()[q] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn depolarizing_composes_multiplicatively(p in 0.0f64..0.5, k in 1usize..=2) {
        let d = PauliDiagonalChannel::depolarizing(p, k).unwrap();
        let dd = d.compose(&d).unwrap();
        for &f in &dd.damping_factors()[1..] {
            prop_assert!((f - (1.0 - p).powi(2)).abs() < 1e-14);
        }
    }
}
