//! Photon loss in the sensing arm.
//!
//! Losing `l` photons maps `|k, N-k>` to `|k-l, N-k>` with binomial weight
//! `C(k, l) eta^(k-l) (1-eta)^l`. Outputs with different `l` carry different
//! total photon numbers, so the lossy state splits into mutually orthogonal
//! pure blocks. Phase and loss are both diagonal in `k`, so block weights do
//! not depend on the phase; block `l` only remembers which `k` (the phase
//! exponent) each of its components came from.

use crate::error::{check_transmission, domain, Result};
use crate::fock::TwoModeFockState;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossChannel {
    transmission: f64,
}

impl LossChannel {
    pub fn new(transmission: f64) -> Result<Self> {
        check_transmission(transmission)?;
        Ok(Self { transmission })
    }

    pub fn lossless() -> Self {
        Self { transmission: 1.0 }
    }

    pub fn transmission(&self) -> f64 {
        self.transmission
    }
}

/// Probability that exactly `lost` of `photons` photons are absorbed.
pub fn binomial_loss_weight(photons: usize, lost: usize, eta: f64) -> Result<f64> {
    check_transmission(eta)?;
    if lost > photons {
        return domain(format!("cannot lose {lost} of {photons} photons"));
    }
    Ok(binomial_weight(photons, lost, eta))
}

pub(crate) fn binomial_weight(photons: usize, lost: usize, eta: f64) -> f64 {
    // powi(0) == 1, so 0^0 = 1 at eta = 1
    binomial_coefficient(photons, lost) * eta.powi((photons - lost) as i32) * (1.0 - eta).powi(lost as i32)
}

pub(crate) fn binomial_coefficient(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Table `b[k][l]` of loss weights for `k = 0..=n`, `l = 0..=k`.
pub(crate) fn loss_table(n: usize, eta: f64) -> Vec<Vec<f64>> {
    (0..=n)
        .map(|k| (0..=k).map(|l| binomial_weight(k, l, eta)).collect())
        .collect()
}

/// One orthogonal component of the lossy state.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub lost_photons: usize,
    /// Probability `p_l` of this block.
    pub weight: f64,
    /// `q_{k|l}` for `k = l..=N`; all zero when the block is empty.
    pub cond_weights: Vec<f64>,
    /// Phase exponents `k` paired with `cond_weights`.
    pub phase_exponents: Vec<usize>,
    pub empty: bool,
}

impl Block {
    /// Mean and variance of the phase exponent under `q_{.|l}`.
    pub fn exponent_moments(&self) -> (f64, f64) {
        if self.empty {
            return (0.0, 0.0);
        }
        let mean: f64 = self
            .cond_weights
            .iter()
            .zip(&self.phase_exponents)
            .map(|(q, &k)| q * k as f64)
            .sum();
        let var = self
            .cond_weights
            .iter()
            .zip(&self.phase_exponents)
            .map(|(q, &k)| q * (k as f64 - mean).powi(2))
            .sum();
        (mean, var)
    }
}

/// The lossy output as blocks indexed by the number of lost photons, `l = 0..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDecomposition {
    pub total_photons: usize,
    pub blocks: Vec<Block>,
}

impl BlockDecomposition {
    pub fn weights(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.weight).collect()
    }
}

pub fn decompose(state: &TwoModeFockState, channel: &LossChannel) -> BlockDecomposition {
    decompose_weights(&state.weights(), channel.transmission())
}

pub(crate) fn decompose_weights(input: &[f64], eta: f64) -> BlockDecomposition {
    let n = input.len() - 1;
    let table = loss_table(n, eta);
    let blocks = (0..=n)
        .map(|l| {
            let joint: Vec<f64> = (l..=n).map(|k| input[k] * table[k][l]).collect();
            let weight: f64 = joint.iter().sum();
            let empty = weight <= 0.0;
            let cond_weights = if empty {
                vec![0.0; joint.len()]
            } else {
                joint.iter().map(|j| j / weight).collect()
            };
            Block {
                lost_photons: l,
                weight,
                cond_weights,
                phase_exponents: (l..=n).collect(),
                empty,
            }
        })
        .collect();
    BlockDecomposition {
        total_photons: n,
        blocks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn binomial_weight_examples() {
        for n in 0..12 {
            assert_abs_diff_eq!(
                binomial_loss_weight(n, 0, 0.7).unwrap(),
                0.7f64.powi(n as i32),
                epsilon = 1e-15
            );
            assert_eq!(binomial_loss_weight(n, 0, 1.0).unwrap(), 1.0);
            for l in 1..=n {
                assert_eq!(binomial_loss_weight(n, l, 1.0).unwrap(), 0.0);
            }
            let total: f64 = (0..=n).map(|l| binomial_loss_weight(n, l, 0.35).unwrap()).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(binomial_loss_weight(2, 1, 0.8).unwrap(), 0.32, epsilon = 1e-15);
        assert!(binomial_loss_weight(2, 3, 0.8).is_err());
        assert!(binomial_loss_weight(2, 1, 0.0).is_err());
        assert!(binomial_loss_weight(2, 1, 1.2).is_err());
        assert!(LossChannel::new(f64::NAN).is_err());
    }

    #[test]
    fn noon_blocks() {
        let n = 5;
        let eta: f64 = 0.8;
        let d = decompose(&TwoModeFockState::noon(n).unwrap(), &LossChannel::new(eta).unwrap());
        assert_eq!(d.blocks.len(), n + 1);
        assert_abs_diff_eq!(d.blocks[0].weight, (1.0 + eta.powi(n as i32)) / 2.0, epsilon = 1e-15);
        for l in 1..=n {
            assert_abs_diff_eq!(d.blocks[l].weight, binomial_weight(n, l, eta) / 2.0, epsilon = 1e-15);
            // only the |N,0> branch survives past the first block
            assert_abs_diff_eq!(*d.blocks[l].cond_weights.last().unwrap(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn balanced_single_photon_at_eta_08() {
        let d = decompose(&TwoModeFockState::noon(1).unwrap(), &LossChannel::new(0.8).unwrap());
        assert_abs_diff_eq!(d.blocks[0].weight, 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(d.blocks[0].cond_weights[0], 5.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.blocks[0].cond_weights[1], 4.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.blocks[1].weight, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn lossless_is_single_block() {
        let s = TwoModeFockState::from_weights(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        let d = decompose(&s, &LossChannel::lossless());
        assert_abs_diff_eq!(d.blocks[0].weight, 1.0, epsilon = 1e-15);
        for (q, w) in d.blocks[0].cond_weights.iter().zip(s.weights()) {
            assert_abs_diff_eq!(*q, w, epsilon = 1e-15);
        }
        assert!(d.blocks[1..].iter().all(|b| b.empty && b.weight == 0.0));
    }

    #[test]
    fn empty_blocks_are_kept() {
        // all photons in the reference arm: nothing can be lost
        let s = TwoModeFockState::from_weights(&[1.0, 0.0, 0.0]).unwrap();
        let d = decompose(&s, &LossChannel::new(0.5).unwrap());
        assert_eq!(d.blocks.len(), 3);
        assert!(!d.blocks[0].empty);
        assert!(d.blocks[1].empty && d.blocks[2].empty);
    }

    proptest! {
        #[test]
        fn completeness_and_monotone_survival(
            w in prop::collection::vec(0.0f64..1.0, 1..12),
            eta in 0.01f64..=1.0,
            bump in 0.0f64..0.5,
        ) {
            prop_assume!(w.iter().sum::<f64>() > 1e-6);
            let s = TwoModeFockState::from_weights(&w).unwrap();
            let d = decompose(&s, &LossChannel::new(eta).unwrap());
            let total: f64 = d.weights().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            for b in d.blocks.iter().filter(|b| !b.empty) {
                let q: f64 = b.cond_weights.iter().sum();
                prop_assert!((q - 1.0).abs() < 1e-12);
            }
            let eta2 = (eta + bump).min(1.0);
            let d2 = decompose(&s, &LossChannel::new(eta2).unwrap());
            prop_assert!(d2.blocks[0].weight >= d.blocks[0].weight - 1e-15);
        }
    }
}
