use std::f64::consts::PI;

use lossy_mz::classical::{fringe_from_setting, poisson_cfi, InterferometerSetting};
use lossy_mz::fisher::qfi_from_weights;
use lossy_mz::simplex::AscentOptions;
use lossy_mz::strategies::{classical_precision, noon_precision, optimize_probe, Detail};

const ETAS: [f64; 4] = [0.6, 0.8, 0.9, 1.0];

#[test]
fn strategy_hierarchy() {
    let options = AscentOptions::default();
    for eta in ETAS {
        for n in 1..=10 {
            let optimal = optimize_probe(n, eta, &options).unwrap();
            assert!(optimal.converged);
            let classical = classical_precision(n, eta).unwrap();
            let noon = noon_precision(n, eta).unwrap();
            assert!(classical.fisher <= optimal.fisher + 1e-9, "classical N={n} eta={eta}");
            assert!(noon.fisher <= optimal.fisher + 1e-9, "noon N={n} eta={eta}");
            assert!(optimal.fisher <= (n * n) as f64 + 1e-9, "ceiling N={n} eta={eta}");
            assert!(optimal.delta_phi <= classical.delta_phi + 1e-12);
        }
    }
}

#[test]
fn lossless_optimum_is_reversal_symmetric() {
    let options = AscentOptions::default();
    for n in 1..=8 {
        let r = optimize_probe(n, 1.0, &options).unwrap();
        let Detail::Optimal { weights, .. } = r.detail else {
            panic!("wrong detail")
        };
        let reversed: Vec<f64> = weights.iter().rev().copied().collect();
        assert!((qfi_from_weights(&reversed, 1.0) - r.fisher).abs() < 1e-9);
    }
}

/// Exhaustive 1e-3 grid over the two-photon simplex.
#[test]
fn two_photon_optimum_matches_grid() {
    let steps = 1000;
    for eta in ETAS {
        let mut best = 0.0f64;
        for i in 0..=steps {
            for j in 0..=steps - i {
                let w = [
                    i as f64 / steps as f64,
                    j as f64 / steps as f64,
                    (steps - i - j) as f64 / steps as f64,
                ];
                best = best.max(qfi_from_weights(&w, eta));
            }
        }
        let r = optimize_probe(2, eta, &AscentOptions::default()).unwrap();
        assert!(r.fisher >= best - 1e-9, "eta={eta}");
        // the grid misses the optimum by O(step^2)
        assert!(r.fisher - best < 1e-4, "eta={eta}");
    }
}

/// Any measurement on one photon, here the coherent-light interferometer
/// read out with photon counters, is bounded by the QFI of the lossy photon.
#[test]
fn counting_information_is_bounded_by_qfi() {
    for eta in ETAS {
        for t in [0.1, 0.3, 0.5, 0.5278640450004206, 0.7, 0.9] {
            let setting = InterferometerSetting::new(1.0, t, eta, 0.0).unwrap();
            let fringe = fringe_from_setting(&setting);
            let qfi = qfi_from_weights(&[1.0 - t, t], eta);
            for i in 1..20 {
                let phi = PI * i as f64 / 20.0;
                let cfi = poisson_cfi(&fringe, phi).unwrap();
                assert!(cfi <= qfi + 1e-12, "eta={eta} t={t} phi={phi}: {cfi} > {qfi}");
            }
        }
    }
}
