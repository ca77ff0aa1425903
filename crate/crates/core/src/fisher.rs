//! Classical and quantum Fisher information.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::fock::TwoModeFockState;
use crate::loss::{binomial_weight, decompose_weights, BlockDecomposition, LossChannel};

/// A finite outcome model whose probabilities depend on a phase.
pub trait ParametricDistribution {
    fn prob(&self, phi: f64) -> Vec<f64>;
    /// Derivative of [`prob`](Self::prob) with respect to the phase.
    fn dprob(&self, phi: f64) -> Vec<f64>;
}

/// Two outcomes with probabilities `cos^2(phi/2)` and `sin^2(phi/2)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct BinaryFringe;

impl ParametricDistribution for BinaryFringe {
    fn prob(&self, phi: f64) -> Vec<f64> {
        let c = (phi / 2.0).cos().powi(2);
        vec![c, 1.0 - c]
    }

    fn dprob(&self, phi: f64) -> Vec<f64> {
        let d = -0.5 * phi.sin();
        vec![d, -d]
    }
}

/// Joint distribution of `copies` independent draws from `inner`.
#[derive(Clone, Debug)]
pub struct IidProduct<D> {
    pub inner: D,
    pub copies: u32,
}

impl<D: ParametricDistribution> ParametricDistribution for IidProduct<D> {
    fn prob(&self, phi: f64) -> Vec<f64> {
        let p = self.inner.prob(phi);
        (0..self.copies).fold(vec![1.0], |acc, _| {
            acc.iter().flat_map(|a| p.iter().map(move |b| a * b)).collect()
        })
    }

    fn dprob(&self, phi: f64) -> Vec<f64> {
        // product rule over the joint outcome tuple
        let p = self.inner.prob(phi);
        let dp = self.inner.dprob(phi);
        let (probs, derivs) = (0..self.copies).fold((vec![1.0], vec![0.0]), |(acc, dacc), _| {
            let mut next = Vec::with_capacity(acc.len() * p.len());
            let mut dnext = Vec::with_capacity(acc.len() * p.len());
            for (a, da) in acc.iter().zip(&dacc) {
                for (b, db) in p.iter().zip(&dp) {
                    next.push(a * b);
                    dnext.push(da * b + a * db);
                }
            }
            (next, dnext)
        });
        debug_assert_eq!(probs.len(), derivs.len());
        derivs
    }
}

/// Classical Fisher information `sum_k p_k'^2 / p_k`.
///
/// Outcomes with `p_k = 0` and `p_k' = 0` contribute nothing. A vanishing
/// probability with nonzero slope yields `f64::INFINITY`, which callers treat
/// as a flagged (supersensitive) point rather than an error.
pub fn cfi<D: ParametricDistribution + ?Sized>(dist: &D, phi: f64) -> f64 {
    fisher_sum(&dist.prob(phi), &dist.dprob(phi))
}

pub(crate) fn fisher_sum(probs: &[f64], derivs: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&p, &d) in probs.iter().zip(derivs) {
        if p > 0.0 {
            total += d * d / p;
        } else if d != 0.0 {
            return f64::INFINITY;
        }
    }
    total
}

/// QFI of a lossy probe from its block decomposition: `4 sum_l p_l Var_l(k)`.
pub fn qfi_blocks(decomp: &BlockDecomposition) -> f64 {
    4.0 * decomp
        .blocks
        .iter()
        .filter(|b| !b.empty)
        .map(|b| b.weight * b.exponent_moments().1)
        .sum::<f64>()
}

/// Block-formula QFI evaluated directly on input weights `w_k = |x_k|^2`.
pub fn qfi_from_weights(weights: &[f64], eta: f64) -> f64 {
    qfi_blocks(&decompose_weights(weights, eta))
}

/// Precomputed loss table for repeated QFI and gradient evaluations at fixed `(N, eta)`.
#[derive(Clone, Debug)]
pub struct LossyQfi {
    n: usize,
    // table[k][l] = b_{k,l}
    table: Vec<Vec<f64>>,
}

impl LossyQfi {
    pub fn new(n: usize, eta: f64) -> Self {
        let table = (0..=n)
            .map(|k| (0..=k).map(|l| binomial_weight(k, l, eta)).collect())
            .collect();
        Self { n, table }
    }

    pub fn dimension(&self) -> usize {
        self.n + 1
    }

    /// Per-block `(p_l, mean_l)` of the phase exponent.
    fn block_means(&self, w: &[f64]) -> Vec<(f64, f64)> {
        (0..=self.n)
            .map(|l| {
                let (mut p, mut a) = (0.0, 0.0);
                for k in l..=self.n {
                    let j = w[k] * self.table[k][l];
                    p += j;
                    a += j * k as f64;
                }
                if p > 0.0 {
                    (p, a / p)
                } else {
                    (0.0, 0.0)
                }
            })
            .collect()
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        self.value_and_gradient(w).0
    }

    /// Value and gradient; `dF/dw_k = 4 sum_l b_{k,l} (k - m_l)^2`. The value
    /// is `F = sum_k w_k dF/dw_k` (F is homogeneous of degree one), a sum of
    /// non-negative terms free of cancellation.
    pub fn value_and_gradient(&self, w: &[f64]) -> (f64, Vec<f64>) {
        let means = self.block_means(w);
        let grad: Vec<f64> = (0..=self.n)
            .map(|k| {
                4.0 * (0..=k)
                    .map(|l| self.table[k][l] * (k as f64 - means[l].1).powi(2))
                    .sum::<f64>()
            })
            .collect();
        let value = grad.iter().zip(w).map(|(g, x)| g * x).sum();
        (value, grad)
    }

    /// Hessian `-8 sum_l u_l u_l^T / p_l` with `u_{l,k} = b_{k,l} (k - m_l)`;
    /// negative semidefinite, so the QFI is concave in the weights.
    pub fn hessian(&self, w: &[f64]) -> DMatrix<f64> {
        let dim = self.n + 1;
        let mut h = DMatrix::zeros(dim, dim);
        let mut u = vec![0.0; dim];
        for (l, (p, m)) in self.block_means(w).into_iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            for k in 0..dim {
                u[k] = if k >= l { self.table[k][l] * (k as f64 - m) } else { 0.0 };
            }
            let scale = -8.0 / p;
            for i in l..dim {
                if u[i] == 0.0 {
                    continue;
                }
                for j in l..dim {
                    h[(i, j)] += scale * u[i] * u[j];
                }
            }
        }
        h
    }
}

impl crate::simplex::SimplexObjective for LossyQfi {
    fn value_and_gradient(&self, w: &[f64]) -> (f64, Vec<f64>) {
        LossyQfi::value_and_gradient(self, w)
    }

    fn hessian(&self, w: &[f64]) -> Option<DMatrix<f64>> {
        Some(LossyQfi::hessian(self, w))
    }
}

/// Largest photon number accepted by [`qfi_oracle`].
pub const ORACLE_MAX_PHOTONS: usize = 30;
const EIGEN_CUTOFF: f64 = 1e-12;

/// Independent QFI check: builds the full two-mode density matrix after phase
/// and loss, diagonalizes it, and evaluates the symmetric-logarithmic-derivative
/// formula `sum_{ij} 2 |<i|d rho|j>|^2 / (lambda_i + lambda_j)`.
pub fn qfi_oracle(state: &TwoModeFockState, channel: &LossChannel, phi: f64) -> Result<f64> {
    let n = state.total_photons();
    if n > ORACLE_MAX_PHOTONS {
        return Err(Error::TooLarge {
            n,
            guard: ORACLE_MAX_PHOTONS,
        });
    }
    let eta = channel.transmission();

    // basis |a, b> with a + b <= n, a = photons in the sensing arm
    let mut index = vec![vec![usize::MAX; n + 1]; n + 1];
    let mut dim = 0;
    for a in 0..=n {
        for b in 0..=(n - a) {
            index[a][b] = dim;
            dim += 1;
        }
    }

    let shifted = state.apply_phase(phi);
    let psi = shifted.amplitudes();
    let zero = Complex64::new(0.0, 0.0);
    let mut rho = DMatrix::from_element(dim, dim, zero);
    let mut drho = DMatrix::from_element(dim, dim, zero);

    // Kraus operators K_l |k, n-k> = sqrt(b_{k,l}) |k-l, n-k>
    for l in 0..=n {
        let mut branch = vec![zero; dim];
        let mut dbranch = vec![zero; dim];
        let mut any = false;
        for (k, amp) in psi.iter().enumerate().skip(l) {
            let b = binomial_weight(k, l, eta);
            if b == 0.0 {
                continue;
            }
            let i = index[k - l][n - k];
            branch[i] = amp * b.sqrt();
            // d/dphi of exp(i k phi) x_k
            dbranch[i] = Complex64::new(0.0, k as f64) * branch[i];
            any = true;
        }
        if !any {
            continue;
        }
        for i in 0..dim {
            if branch[i] == zero {
                continue;
            }
            for j in 0..dim {
                if branch[j] == zero {
                    continue;
                }
                rho[(i, j)] += branch[i] * branch[j].conj();
                drho[(i, j)] += dbranch[i] * branch[j].conj() + branch[i] * dbranch[j].conj();
            }
        }
    }

    let eig = rho.symmetric_eigen();
    let vecs = &eig.eigenvectors;
    let transformed = vecs.adjoint() * &drho * vecs;
    let mut total = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let s = eig.eigenvalues[i] + eig.eigenvalues[j];
            if s >= EIGEN_CUTOFF {
                total += 2.0 * transformed[(i, j)].norm_sqr() / s;
            }
        }
    }
    Ok(total)
}

/// Cramér-Rao bound `1 / sqrt(repetitions * fisher)`.
pub fn cramer_rao(fisher: f64, repetitions: u64) -> Result<f64> {
    if !(fisher > 0.0) {
        return domain(format!("Fisher information must be positive, got {fisher}"));
    }
    if repetitions == 0 {
        return domain("repetitions must be at least 1");
    }
    Ok(1.0 / (repetitions as f64 * fisher).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loss::decompose;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    struct Constant;
    impl ParametricDistribution for Constant {
        fn prob(&self, _: f64) -> Vec<f64> {
            vec![0.2, 0.3, 0.5]
        }
        fn dprob(&self, _: f64) -> Vec<f64> {
            vec![0.0; 3]
        }
    }

    #[test]
    fn binary_fringe_has_unit_information() {
        for i in 1..50 {
            let phi = i as f64 * 0.12;
            if (phi / std::f64::consts::PI).fract().abs() < 1e-9 {
                continue;
            }
            assert_abs_diff_eq!(cfi(&BinaryFringe, phi), 1.0, epsilon = 1e-12);
        }
        assert_eq!(cfi(&Constant, 0.3), 0.0);
    }

    #[test]
    fn cfi_is_additive() {
        for copies in 1..=5 {
            let prod = IidProduct {
                inner: BinaryFringe,
                copies,
            };
            let p: f64 = prod.prob(0.7).iter().sum();
            assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(prod.dprob(0.7).iter().sum::<f64>(), 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(cfi(&prod, 0.7), copies as f64 * cfi(&BinaryFringe, 0.7), epsilon = 1e-9);
        }
    }

    #[test]
    fn supersensitive_point_is_flagged() {
        assert!(fisher_sum(&[0.0, 1.0], &[0.5, -0.5]).is_infinite());
        assert_eq!(fisher_sum(&[0.0, 1.0], &[0.0, 0.0]), 0.0);
    }

    #[test]
    fn qfi_examples() {
        for n in 1..=8 {
            let noon = TwoModeFockState::noon(n).unwrap();
            let f = qfi_blocks(&decompose(&noon, &LossChannel::lossless()));
            assert_abs_diff_eq!(f, (n * n) as f64, epsilon = 1e-12);
        }
        let fock = TwoModeFockState::from_weights(&[0.0, 0.0, 1.0, 0.0]).unwrap();
        for eta in [0.3, 0.8, 1.0] {
            assert_eq!(qfi_blocks(&decompose(&fock, &LossChannel::new(eta).unwrap())), 0.0);
        }
        let noon3 = TwoModeFockState::noon(3).unwrap();
        let ch = LossChannel::new(0.8).unwrap();
        assert_abs_diff_eq!(
            qfi_blocks(&decompose(&noon3, &ch)),
            6.095_238_095_238_096,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            qfi_oracle(&noon3, &ch, 0.4).unwrap(),
            6.095_238_095_238_096,
            epsilon = 1e-8
        );
        let single = TwoModeFockState::noon(1).unwrap();
        assert_abs_diff_eq!(
            qfi_oracle(&single, &LossChannel::lossless(), 1.1).unwrap(),
            1.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn weight_evaluator_matches_blocks() {
        let w = [0.1, 0.25, 0.05, 0.3, 0.3];
        let eval = LossyQfi::new(4, 0.7);
        let (v, g) = eval.value_and_gradient(&w);
        assert_relative_eq!(v, qfi_from_weights(&w, 0.7), max_relative = 1e-12);
        assert_relative_eq!(eval.value(&w), v, max_relative = 1e-14);
        // central differences along each coordinate (F is defined off the simplex too)
        let h = 1e-6;
        for k in 0..w.len() {
            let mut up = w;
            let mut down = w;
            up[k] += h;
            down[k] -= h;
            let fd = (eval.value(&up) - eval.value(&down)) / (2.0 * h);
            assert_abs_diff_eq!(g[k], fd, epsilon = 1e-6);
        }
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let w = [0.1, 0.25, 0.05, 0.3, 0.3];
        let eval = LossyQfi::new(4, 0.7);
        let h = eval.hessian(&w);
        let step = 1e-6;
        for k in 0..w.len() {
            let mut up = w;
            let mut down = w;
            up[k] += step;
            down[k] -= step;
            let (_, gu) = eval.value_and_gradient(&up);
            let (_, gd) = eval.value_and_gradient(&down);
            for j in 0..w.len() {
                assert_abs_diff_eq!(h[(j, k)], (gu[j] - gd[j]) / (2.0 * step), epsilon = 1e-5);
            }
        }
        let eig = h.symmetric_eigen();
        assert!(eig.eigenvalues.iter().all(|&e| e <= 1e-9));
    }

    #[test]
    fn oracle_refuses_large_states() {
        let big = TwoModeFockState::noon(31).unwrap();
        assert!(matches!(
            qfi_oracle(&big, &LossChannel::lossless(), 0.0),
            Err(Error::TooLarge { n: 31, guard: 30 })
        ));
    }

    #[test]
    fn cramer_rao_examples() {
        assert_abs_diff_eq!(cramer_rao(100.0, 1).unwrap(), 0.1);
        assert_abs_diff_eq!(cramer_rao(2.0, 8).unwrap(), 0.25);
        assert!(cramer_rao(0.0, 1).is_err());
        assert!(cramer_rao(-1.0, 1).is_err());
        assert!(cramer_rao(1.0, 0).is_err());
    }
}
