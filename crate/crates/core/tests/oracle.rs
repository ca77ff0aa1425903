use lossy_mz::fisher::{qfi_blocks, qfi_from_weights, qfi_oracle};
use lossy_mz::loss::decompose;
use lossy_mz::strategies::noon_fisher_closed_form;
use lossy_mz::{LossChannel, TwoModeFockState};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ETAS: [f64; 4] = [0.6, 0.8, 0.9, 1.0];

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> TwoModeFockState {
    let amps = (0..=n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    TwoModeFockState::normalized(amps).unwrap()
}

#[test]
fn block_formula_matches_density_matrix_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..200 {
        let n = 1 + i % 6;
        let eta = ETAS[i % 4];
        let state = random_state(n, &mut rng);
        let channel = LossChannel::new(eta).unwrap();
        let phi = rng.random_range(0.0..std::f64::consts::TAU);
        let blocks = qfi_blocks(&decompose(&state, &channel));
        let oracle = qfi_oracle(&state, &channel, phi).unwrap();
        assert!((blocks - oracle).abs() < 1e-8, "N={n} eta={eta}: {blocks} vs {oracle}");
    }
}

#[test]
fn qfi_ignores_amplitude_phases() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 1..=6 {
        let state = random_state(n, &mut rng);
        let rephased = TwoModeFockState::new(
            state
                .amplitudes()
                .iter()
                .map(|a| a * Complex64::from_polar(1.0, rng.random_range(0.0..6.3)))
                .collect(),
        )
        .unwrap();
        for eta in ETAS {
            let channel = LossChannel::new(eta).unwrap();
            let a = qfi_oracle(&state, &channel, 0.3).unwrap();
            let b = qfi_oracle(&rephased, &channel, 0.3).unwrap();
            assert!((a - b).abs() < 1e-9, "N={n} eta={eta}");
            assert!((qfi_from_weights(&state.weights(), eta) - a).abs() < 1e-8);
        }
    }
}

#[test]
fn noon_closed_form() {
    for n in 1..=12 {
        for eta in ETAS {
            let blocks = qfi_blocks(&decompose(
                &TwoModeFockState::noon(n).unwrap(),
                &LossChannel::new(eta).unwrap(),
            ));
            let closed = noon_fisher_closed_form(n, eta);
            assert!((blocks - closed).abs() < 1e-10, "N={n} eta={eta}: {blocks} vs {closed}");
        }
    }
}

#[test]
fn more_loss_never_adds_information() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..300 {
        let n = rng.random_range(1..=12);
        let w = random_state(n, &mut rng).weights();
        let mut previous = f64::INFINITY;
        for eta in [1.0, 0.95, 0.9, 0.8, 0.6, 0.3, 0.1] {
            let f = qfi_from_weights(&w, eta);
            assert!(f <= previous + 1e-10, "N={n} eta={eta}");
            previous = f;
        }
    }
}

#[test]
fn blocks_are_complete_for_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..10_000 {
        let n = 1 + i % 20;
        let eta = rng.random_range(0.01..=1.0);
        let d = decompose(&random_state(n, &mut rng), &LossChannel::new(eta).unwrap());
        let total: f64 = d.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(d.blocks.iter().all(|b| b.weight >= 0.0));
    }
}
