//! Two-mode pure states with a fixed total photon number.
//!
//! Amplitude `k` multiplies the basis ket `|k, N-k>`, where `k` counts photons
//! in the sensing arm (the arm holding the phase shifter and the attenuator).

use num_complex::Complex64;

use crate::error::{domain, Result};

const NORM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeFockState {
    amplitudes: Vec<Complex64>,
}

impl TwoModeFockState {
    /// Builds a state from amplitudes over `|k, N-k>`, `k = 0..=N`.
    ///
    /// The amplitudes must already be normalized to within 1e-12.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return domain("a two-mode state needs at least one amplitude");
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return domain("amplitudes must be finite");
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return domain(format!("state is not normalized: sum |x_k|^2 = {norm}"));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return domain("cannot normalize a zero or non-finite amplitude vector");
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// Real non-negative amplitudes `sqrt(w_k)` from a probability vector.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return domain("weights must be finite and non-negative");
        }
        Self::normalized(weights.iter().map(|w| Complex64::new(w.sqrt(), 0.0)).collect())
    }

    pub fn total_photons(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Photon-number distribution of the sensing arm, `|x_k|^2`.
    pub fn weights(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// A single photon with probability `sensing_weight` of taking the sensing arm.
    pub fn single_photon_split(sensing_weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&sensing_weight) {
            return domain(format!("sensing weight must lie in [0, 1], got {sensing_weight}"));
        }
        Self::new(vec![
            Complex64::new((1.0 - sensing_weight).sqrt(), 0.0),
            Complex64::new(sensing_weight.sqrt(), 0.0),
        ])
    }

    /// `(|N,0> + |0,N>)/sqrt(2)`.
    pub fn noon(n: usize) -> Result<Self> {
        if n == 0 {
            return domain("a N00N state needs at least one photon");
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); n + 1];
        amplitudes[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amplitudes[n] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Ok(Self { amplitudes })
    }

    /// Phase shift in the sensing arm: `x_k -> exp(i k phi) x_k`.
    pub fn apply_phase(&self, phi: f64) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(k, a)| a * Complex64::from_polar(1.0, k as f64 * phi))
            .collect();
        Self { amplitudes }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.total_photons() != other.total_photons() {
            return domain(format!(
                "photon numbers differ: {} vs {}",
                self.total_photons(),
                other.total_photons()
            ));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// `|<a|b>|^2`, clamped to `[0, 1]` against rounding.
pub fn overlap_sq(a: &TwoModeFockState, b: &TwoModeFockState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().clamp(0.0, 1.0))
}

/// Overlap of `copies` independent copies of each state, `overlap_sq(a, b)^copies`.
pub fn overlap_sq_copies(a: &TwoModeFockState, b: &TwoModeFockState, copies: u32) -> Result<f64> {
    if copies == 0 {
        return domain("number of copies must be at least 1");
    }
    Ok(overlap_sq(a, b)?.powi(copies as i32))
}
