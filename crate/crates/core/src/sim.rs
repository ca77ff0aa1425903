//! Monte Carlo photocounting and maximum-likelihood phase estimation.
//!
//! Random numbers come from ChaCha8 (`rand_chacha`). Repetition `i` of a run
//! seeded with `s` draws from stream `i` of the generator keyed by `s`, so the
//! estimates do not depend on how repetitions are spread over threads.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::classical::{golden_max, FringeModel};
use crate::error::{Error, Result};
use crate::exec::Exec;

pub fn repetition_rng(seed: u64, repetition: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(repetition);
    rng
}

/// Draws a Poisson variate with the given mean; a non-positive mean gives 0.
pub fn sample_poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    match Poisson::new(mean) {
        Ok(dist) => dist.sample(rng) as u64,
        Err(_) => 0,
    }
}

/// One pair of photocounts `(n1, n2)` for a fringe at the true phase.
pub fn simulate_counts<R: Rng + ?Sized>(model: &FringeModel, phi_true: f64, rng: &mut R) -> (u64, u64) {
    let (m1, m2) = model.means(phi_true);
    (sample_poisson(m1, rng), sample_poisson(m2, rng))
}

/// Maximum-likelihood phase from photocount pairs of a known fringe, searched
/// by golden section on `[lo, hi]` (a single monotonic branch of the fringe,
/// `(0, pi)` by default).
///
/// The Poisson log-likelihood only depends on the summed counts, and on one
/// branch it is unimodal in the phase.
pub fn mle_phase(counts: &[(u64, u64)], model: &FringeModel, interval: (f64, f64)) -> Result<f64> {
    if counts.is_empty() {
        return Err(Error::Undefined("no photocount pairs".into()));
    }
    let (s1, s2) = counts.iter().fold((0u64, 0u64), |(a, b), (n1, n2)| (a + n1, b + n2));
    if s1 + s2 == 0 {
        return Err(Error::Undefined("all photocounts are zero".into()));
    }
    let (s1, s2) = (s1 as f64, s2 as f64);
    let log_lik = |phi: f64| {
        let (m1, m2) = model.means(phi);
        term(s1, m1) + term(s2, m2)
    };
    Ok(golden_max(log_lik, interval.0, interval.1, 1e-10))
}

fn term(count: f64, mean: f64) -> f64 {
    if count == 0.0 {
        0.0
    } else if mean <= 0.0 {
        f64::NEG_INFINITY
    } else {
        count * mean.ln()
    }
}

pub const DEFAULT_INTERVAL: (f64, f64) = (0.0, PI);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationRun {
    pub model: FringeModel,
    pub true_phase: f64,
    pub repetitions: usize,
    pub seed: u64,
    /// One estimate per repetition, each from a single photocount pair.
    pub estimates: Vec<f64>,
}

impl SimulationRun {
    pub fn mean(&self) -> f64 {
        self.estimates.iter().sum::<f64>() / self.estimates.len() as f64
    }

    /// Sample standard deviation of the single-shot estimates.
    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        let n = self.estimates.len() as f64;
        (self.estimates.iter().map(|e| (e - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    }
}

/// Simulates `repetitions` independent experiments and estimates the phase in each.
pub fn run_simulation(
    model: &FringeModel,
    true_phase: f64,
    repetitions: usize,
    seed: u64,
    exec: Exec,
) -> Result<SimulationRun> {
    if repetitions == 0 {
        return Err(Error::Domain("repetitions must be at least 1".into()));
    }
    let estimates = exec.map_range(repetitions, |i| {
        let mut rng = repetition_rng(seed, i as u64);
        let pair = simulate_counts(model, true_phase, &mut rng);
        // a dark repetition carries no phase information; fall back to the branch centre
        mle_phase(&[pair], model, DEFAULT_INTERVAL).unwrap_or(FRAC_PI_2)
    });
    Ok(SimulationRun {
        model: *model,
        true_phase,
        repetitions,
        seed,
        estimates,
    })
}
