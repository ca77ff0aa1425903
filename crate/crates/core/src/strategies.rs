//! Probe strategies: classical light, N00N states, optimized N-photon states
//! and single-photon multipass schemes, all reported as [`StrategyResult`]s.

use serde::{Deserialize, Serialize};

use crate::classical::{optimize_classical, ClassicalOptimum};
use crate::error::{check_transmission, domain, Result};
use crate::fisher::{qfi_blocks, LossyQfi};
use crate::fock::TwoModeFockState;
use crate::loss::{decompose, LossChannel};
use crate::simplex::{maximize_on_simplex, AscentOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Classical,
    Noon,
    Optimal,
    Multipass,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Classical,
        Strategy::Noon,
        Strategy::Optimal,
        Strategy::Multipass,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Strategy::Classical => "classical",
            Strategy::Noon => "noon",
            Strategy::Optimal => "optimal",
            Strategy::Multipass => "multipass",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for Strategy {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.tag() == s.trim())
            .ok_or_else(|| crate::Error::Domain(format!("unknown strategy '{s}'")))
    }
}

/// Strategy-specific payload of a [`StrategyResult`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Detail {
    Classical {
        sensing_fraction: f64,
        visibility: f64,
    },
    Noon,
    Optimal {
        weights: Vec<f64>,
        iterations: usize,
        /// Upper bound on how far `fisher` can lie below the true maximum.
        duality_gap: f64,
    },
    Multipass {
        passes: usize,
        photons: f64,
        sensing_weight: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyResult {
    pub strategy: Strategy,
    pub resource_n: usize,
    pub transmission: f64,
    pub fisher: f64,
    pub delta_phi: f64,
    /// False when an optimizer stopped on its iteration cap.
    pub converged: bool,
    pub detail: Detail,
}

impl StrategyResult {
    fn new(strategy: Strategy, resource_n: usize, transmission: f64, fisher: f64, detail: Detail) -> Self {
        let delta_phi = if fisher > 0.0 {
            1.0 / fisher.sqrt()
        } else {
            f64::INFINITY
        };
        Self {
            strategy,
            resource_n,
            transmission,
            fisher,
            delta_phi,
            converged: true,
            detail,
        }
    }
}

fn check_photons(n: usize) -> Result<()> {
    if n == 0 {
        return domain("resource N must be at least 1");
    }
    Ok(())
}

/// Loss-optimized coherent-light interferometer fed with `n` mean input photons.
pub fn classical_precision(n: usize, eta: f64) -> Result<StrategyResult> {
    check_photons(n)?;
    let per_photon = optimize_classical(eta, 1.0)?;
    Ok(classical_from_optimum(n, eta, &per_photon))
}

/// Scales a one-photon classical optimum to `n` input photons (F is linear in N0).
pub fn classical_from_optimum(n: usize, eta: f64, per_photon: &ClassicalOptimum) -> StrategyResult {
    let fringe = per_photon.fringe(eta, n as f64);
    StrategyResult::new(
        Strategy::Classical,
        n,
        eta,
        n as f64 * per_photon.fisher_max,
        Detail::Classical {
            sensing_fraction: per_photon.tau_star,
            visibility: fringe.visibility,
        },
    )
}

/// QFI of a N00N state after sensing-arm loss.
pub fn noon_precision(n: usize, eta: f64) -> Result<StrategyResult> {
    check_photons(n)?;
    let channel = LossChannel::new(eta)?;
    let fisher = qfi_blocks(&decompose(&TwoModeFockState::noon(n)?, &channel));
    Ok(StrategyResult::new(Strategy::Noon, n, eta, fisher, Detail::Noon))
}

/// `2 N^2 eta^N / (1 + eta^N)`.
pub fn noon_fisher_closed_form(n: usize, eta: f64) -> f64 {
    let survive = eta.powi(n as i32);
    2.0 * (n * n) as f64 * survive / (1.0 + survive)
}

/// Best single-photon split under loss: `(t*, F)` with `t* = 1/(1+sqrt eta)`,
/// `F = 4 eta / (1+sqrt eta)^2`.
pub fn single_photon_optimum(eta: f64) -> (f64, f64) {
    let s = eta.sqrt();
    (1.0 / (1.0 + s), 4.0 * eta / (1.0 + s).powi(2))
}

/// Maximizes the lossy-probe QFI over `N`-photon states.
///
/// The QFI depends on the state only through `w_k = |x_k|^2` and is concave in
/// `w`, so the search runs over the simplex of weights with real non-negative
/// amplitudes. Starts: the N00N state, the product of optimally split single
/// photons, the uniform state, then `options.starts` seeded random points.
pub fn optimize_probe(n: usize, eta: f64, options: &AscentOptions) -> Result<StrategyResult> {
    check_photons(n)?;
    check_transmission(eta)?;
    let eval = LossyQfi::new(n, eta);
    let dim = n + 1;

    let mut noon = vec![0.0; dim];
    noon[0] = 0.5;
    noon[n] += 0.5;
    let (t, _) = single_photon_optimum(eta);
    let product: Vec<f64> = (0..=n)
        .map(|k| crate::loss::binomial_coefficient(n, k) * t.powi(k as i32) * (1.0 - t).powi((n - k) as i32))
        .collect();
    let uniform = vec![1.0 / dim as f64; dim];

    let best = maximize_on_simplex(&eval, dim, &[noon, product, uniform], options);
    let mut result = StrategyResult::new(
        Strategy::Optimal,
        n,
        eta,
        best.value,
        Detail::Optimal {
            weights: best.point,
            iterations: best.iterations,
            duality_gap: best.gap,
        },
    );
    result.converged = best.converged;
    Ok(result)
}

/// Fisher information of one photon making `passes` trips through the lossy
/// phase shifter with an optimized input split: `p^2 F_1(eta^p)`.
pub fn multipass_fisher(passes: usize, eta: f64) -> Result<f64> {
    if passes == 0 {
        return domain("number of passes must be at least 1");
    }
    check_transmission(eta)?;
    let (_, f) = single_photon_optimum(eta.powi(passes as i32));
    Ok((passes * passes) as f64 * f)
}

/// Splits a budget of `n` (photons x passes) into the pass count with the
/// highest total Fisher information. With `integer_photons` only whole
/// photons count; otherwise `n / p` photons are used for every `p`.
pub fn best_multipass(n: usize, eta: f64, integer_photons: bool) -> Result<StrategyResult> {
    check_photons(n)?;
    check_transmission(eta)?;
    let mut best: Option<(usize, f64, f64)> = None;
    for p in 1..=n {
        let photons = if integer_photons {
            (n / p) as f64
        } else {
            n as f64 / p as f64
        };
        let total = photons * multipass_fisher(p, eta)?;
        // strict comparison keeps the smallest p among ties
        if best.is_none_or(|(_, _, f)| total > f) {
            best = Some((p, photons, total));
        }
    }
    let (passes, photons, fisher) = best.expect("n >= 1");
    let (sensing_weight, _) = single_photon_optimum(eta.powi(passes as i32));
    Ok(StrategyResult::new(
        Strategy::Multipass,
        n,
        eta,
        fisher,
        Detail::Multipass {
            passes,
            photons,
            sensing_weight,
        },
    ))
}
