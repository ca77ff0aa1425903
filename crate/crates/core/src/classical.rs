//! Coherent-light Mach-Zehnder with Poissonian photocounting.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{check_transmission, domain, Result};
use crate::fisher::{fisher_sum, ParametricDistribution};

/// Mean photocounts `n1 = N/2 (1 + V cos phi)`, `n2 = N/2 (1 - V cos phi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FringeModel {
    pub total_mean_counts: f64,
    pub visibility: f64,
}

impl FringeModel {
    pub fn new(total_mean_counts: f64, visibility: f64) -> Result<Self> {
        if !(total_mean_counts.is_finite() && total_mean_counts >= 0.0) {
            return domain(format!("mean counts must be non-negative, got {total_mean_counts}"));
        }
        if !(0.0..=1.0).contains(&visibility) {
            return domain(format!("visibility must lie in [0, 1], got {visibility}"));
        }
        Ok(Self {
            total_mean_counts,
            visibility,
        })
    }

    pub fn means(&self, phi: f64) -> (f64, f64) {
        let half = self.total_mean_counts / 2.0;
        let m = self.visibility * phi.cos();
        ((half * (1.0 + m)).max(0.0), (half * (1.0 - m)).max(0.0))
    }

    pub fn mean_derivatives(&self, phi: f64) -> (f64, f64) {
        let d = -self.total_mean_counts / 2.0 * self.visibility * phi.sin();
        (d, -d)
    }
}

/// Outcome probabilities of which detector fires, given a single detection.
impl ParametricDistribution for FringeModel {
    fn prob(&self, phi: f64) -> Vec<f64> {
        let m = self.visibility * phi.cos();
        vec![(1.0 + m) / 2.0, (1.0 - m) / 2.0]
    }

    fn dprob(&self, phi: f64) -> Vec<f64> {
        let d = -self.visibility * phi.sin() / 2.0;
        vec![d, -d]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterferometerSetting {
    pub input_mean_photons: f64,
    /// Intensity fraction sent into the sensing arm.
    pub sensing_fraction: f64,
    pub transmission: f64,
    pub operating_phase: f64,
}

impl InterferometerSetting {
    pub fn new(
        input_mean_photons: f64,
        sensing_fraction: f64,
        transmission: f64,
        operating_phase: f64,
    ) -> Result<Self> {
        if !(input_mean_photons.is_finite() && input_mean_photons >= 0.0) {
            return domain(format!("input photons must be non-negative, got {input_mean_photons}"));
        }
        if !(0.0..=1.0).contains(&sensing_fraction) {
            return domain(format!("sensing fraction must lie in [0, 1], got {sensing_fraction}"));
        }
        check_transmission(transmission)?;
        Ok(Self {
            input_mean_photons,
            sensing_fraction,
            transmission,
            operating_phase,
        })
    }
}

/// Fringe produced by a balanced output coupler mixing the attenuated sensing
/// beam with the reference beam.
pub fn fringe_from_setting(s: &InterferometerSetting) -> FringeModel {
    let sensing = s.sensing_fraction * s.transmission;
    let reference = 1.0 - s.sensing_fraction;
    let total = sensing + reference;
    let visibility = if total > 0.0 {
        (2.0 * (sensing * reference).sqrt() / total).min(1.0)
    } else {
        0.0
    };
    FringeModel {
        total_mean_counts: s.input_mean_photons * total,
        visibility,
    }
}

/// Fisher information of independent Poissonian counts at both detectors,
/// `N V^2 sin^2 phi / (1 - V^2 cos^2 phi)`.
///
/// At `V = 1` and `phi` a multiple of `pi` one detector has zero mean and zero
/// slope, so every term vanishes and the value is 0 even though the limit
/// from neighbouring phases is `N`.
pub fn poisson_cfi(m: &FringeModel, phi: f64) -> Result<f64> {
    if !(m.total_mean_counts > 0.0) {
        return domain("Poisson Fisher information needs a positive mean count");
    }
    let (n1, n2) = m.means(phi);
    let (d1, d2) = m.mean_derivatives(phi);
    Ok(fisher_sum(&[n1, n2], &[d1, d2]))
}

/// Closed-form loss-optimized shot-noise operating point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalOptimum {
    pub tau_star: f64,
    pub phi_star: f64,
    pub fisher_max: f64,
    pub delta_phi: f64,
}

impl ClassicalOptimum {
    pub fn fringe(&self, eta: f64, input_photons: f64) -> FringeModel {
        fringe_from_setting(&InterferometerSetting {
            input_mean_photons: input_photons,
            sensing_fraction: self.tau_star,
            transmission: eta,
            operating_phase: self.phi_star,
        })
    }
}

/// `tau* = 1/(1+sqrt eta)`, `phi* = pi/2`, `F = 4 N0 eta / (1+sqrt eta)^2`.
pub fn classical_closed_form(eta: f64, input_photons: f64) -> Result<ClassicalOptimum> {
    check_input(eta, input_photons)?;
    let s = eta.sqrt();
    let fisher_max = 4.0 * input_photons * eta / (1.0 + s).powi(2);
    Ok(ClassicalOptimum {
        tau_star: 1.0 / (1.0 + s),
        phi_star: FRAC_PI_2,
        fisher_max,
        delta_phi: 1.0 / fisher_max.sqrt(),
    })
}

fn check_input(eta: f64, input_photons: f64) -> Result<()> {
    check_transmission(eta)?;
    if !(input_photons.is_finite() && input_photons > 0.0) {
        return domain(format!("input photons must be positive, got {input_photons}"));
    }
    Ok(())
}

const GRID: usize = 512;

/// Numerically maximizes the Poisson Fisher information over the input split
/// and the operating phase: a 512 x 512 grid over `[0,1] x [0,pi]`, then
/// alternating golden-section refinement inside the best cell.
pub fn optimize_classical(eta: f64, input_photons: f64) -> Result<ClassicalOptimum> {
    check_input(eta, input_photons)?;
    let fisher = |tau: f64, phi: f64| -> f64 {
        let m = fringe_from_setting(&InterferometerSetting {
            input_mean_photons: input_photons,
            sensing_fraction: tau,
            transmission: eta,
            operating_phase: phi,
        });
        if m.total_mean_counts <= 0.0 {
            return 0.0;
        }
        let (n1, n2) = m.means(phi);
        let (d1, d2) = m.mean_derivatives(phi);
        let f = fisher_sum(&[n1, n2], &[d1, d2]);
        if f.is_finite() {
            f
        } else {
            0.0
        }
    };

    let step_tau = 1.0 / (GRID - 1) as f64;
    let step_phi = PI / (GRID - 1) as f64;
    let (mut tau, mut phi, mut best) = (0.5, FRAC_PI_2, f64::NEG_INFINITY);
    for i in 0..GRID {
        let t = i as f64 * step_tau;
        for j in 0..GRID {
            let p = j as f64 * step_phi;
            let f = fisher(t, p);
            if f > best {
                (tau, phi, best) = (t, p, f);
            }
        }
    }

    let (tau_lo, tau_hi) = ((tau - step_tau).max(0.0), (tau + step_tau).min(1.0));
    let (phi_lo, phi_hi) = ((phi - step_phi).max(0.0), (phi + step_phi).min(PI));
    for _ in 0..20 {
        let prev = best;
        tau = golden_max(|t| fisher(t, phi), tau_lo, tau_hi, 1e-13);
        phi = golden_max(|p| fisher(tau, p), phi_lo, phi_hi, 1e-13);
        best = fisher(tau, phi);
        if (best - prev).abs() <= 1e-15 * best.abs() {
            break;
        }
    }
    Ok(ClassicalOptimum {
        tau_star: tau,
        phi_star: phi,
        fisher_max: best,
        delta_phi: 1.0 / best.sqrt(),
    })
}

/// Golden-section search for the maximum of a unimodal function on `[lo, hi]`.
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    let (a, b) = (lo, hi);
    let (mut lo, mut hi) = (lo, hi);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    // endpoints of the original bracket are never evaluated by the loop
    [mid, a, b]
        .into_iter()
        .max_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap_or(mid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn setting(tau: f64, eta: f64) -> InterferometerSetting {
        InterferometerSetting::new(100.0, tau, eta, FRAC_PI_2).unwrap()
    }

    #[test]
    fn fringe_examples() {
        let m = fringe_from_setting(&setting(0.5, 1.0));
        assert_abs_diff_eq!(m.visibility, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.total_mean_counts, 100.0, epsilon = 1e-12);

        let m = fringe_from_setting(&setting(1.0, 0.7));
        assert_eq!(m.visibility, 0.0);

        let eta: f64 = 0.64;
        let m = fringe_from_setting(&setting(1.0 / (1.0 + eta.sqrt()), eta));
        assert_relative_eq!(m.total_mean_counts, 80.0, max_relative = 1e-14);
        assert_abs_diff_eq!(m.visibility, 0.993_807_989_999_906_5, epsilon = 1e-12);
    }

    /// Two beams with amplitudes `a`, `b` on a 50/50 coupler, scanned over the
    /// relative phase to read off max/min intensities.
    #[test]
    fn fringe_matches_two_beam_interference() {
        for (tau, eta) in [(0.3f64, 0.9f64), (0.6, 0.64), (0.5, 1.0), (0.8, 0.2)] {
            let a = (tau * eta).sqrt();
            let b = (1.0f64 - tau).sqrt();
            let out = |phi: f64| (a * a + b * b + 2.0 * a * b * phi.cos()) / 2.0;
            let samples: Vec<f64> = (0..2001).map(|i| out(i as f64 * 2.0 * PI / 2000.0)).collect();
            let hi = samples.iter().cloned().fold(f64::MIN, f64::max);
            let lo = samples.iter().cloned().fold(f64::MAX, f64::min);
            let m = fringe_from_setting(&setting(tau, eta));
            assert_abs_diff_eq!(m.visibility, (hi - lo) / (hi + lo), epsilon = 1e-9);
            assert_abs_diff_eq!(m.total_mean_counts, 100.0 * (a * a + b * b), epsilon = 1e-9);
        }
    }

    #[test]
    fn visibility_one_only_at_balance() {
        for eta in [0.36f64, 0.5, 0.81] {
            let tau_bal = 1.0 / (1.0 + eta);
            assert_abs_diff_eq!(
                fringe_from_setting(&setting(tau_bal, eta)).visibility,
                1.0,
                epsilon = 1e-12
            );
            assert!(fringe_from_setting(&setting(tau_bal + 0.05, eta)).visibility < 1.0);
        }
    }

    #[test]
    fn poisson_cfi_examples() {
        let m = FringeModel::new(100.0, 1.0).unwrap();
        assert_abs_diff_eq!(poisson_cfi(&m, FRAC_PI_2).unwrap(), 100.0, epsilon = 1e-12);
        let flat = FringeModel::new(100.0, 0.0).unwrap();
        assert_eq!(poisson_cfi(&flat, 0.3).unwrap(), 0.0);
        let m = FringeModel::new(100.0, 0.9).unwrap();
        assert_abs_diff_eq!(poisson_cfi(&m, FRAC_PI_2).unwrap(), 81.0, epsilon = 1e-12);
        assert_eq!(poisson_cfi(&FringeModel::new(100.0, 1.0).unwrap(), 0.0).unwrap(), 0.0);
        assert!(poisson_cfi(&FringeModel::new(0.0, 0.5).unwrap(), 1.0).is_err());
    }

    #[test]
    fn poisson_cfi_matches_closed_form_and_peaks_at_quadrature() {
        let m = FringeModel::new(37.0, 0.83).unwrap();
        let closed = |phi: f64| {
            let v2 = m.visibility.powi(2);
            m.total_mean_counts * v2 * phi.sin().powi(2) / (1.0 - v2 * phi.cos().powi(2))
        };
        let mut best = (0.0, 0.0);
        for i in 1..1000 {
            let phi = i as f64 * PI / 1000.0;
            let f = poisson_cfi(&m, phi).unwrap();
            assert_relative_eq!(f, closed(phi), max_relative = 1e-12);
            if f > best.1 {
                best = (phi, f);
            }
        }
        assert_abs_diff_eq!(best.0, FRAC_PI_2, epsilon = PI / 1000.0);
        assert_relative_eq!(best.1, 37.0 * 0.83 * 0.83, max_relative = 1e-12);
    }

    #[test]
    fn numerical_optimum_matches_closed_form() {
        for eta in [0.6, 0.8, 0.9, 1.0] {
            let num = optimize_classical(eta, 100.0).unwrap();
            let cf = classical_closed_form(eta, 100.0).unwrap();
            assert_relative_eq!(num.tau_star, cf.tau_star, max_relative = 1e-6);
            assert_relative_eq!(num.fisher_max, cf.fisher_max, max_relative = 1e-6);
            // at eta = 1 the fringe has V = 1 and F is flat in phi
            if eta < 1.0 {
                assert_abs_diff_eq!(num.phi_star, FRAC_PI_2, epsilon = 1e-5);
            }
        }
        let cf = classical_closed_form(0.64, 100.0).unwrap();
        assert_abs_diff_eq!(cf.delta_phi, 0.1125, epsilon = 1e-15);
        assert!(optimize_classical(0.0, 1.0).is_err());
        assert!(optimize_classical(0.5, 0.0).is_err());
    }

    #[test]
    fn optimal_visibility_drops_below_one_with_loss() {
        let v = |eta: f64| classical_closed_form(eta, 10.0).unwrap().fringe(eta, 10.0).visibility;
        assert_abs_diff_eq!(v(1.0), 1.0, epsilon = 1e-15);
        assert!(v(0.9) < 1.0 && v(0.6) < v(0.9));
    }

    #[test]
    fn golden_section_finds_interior_and_boundary_maxima() {
        assert_abs_diff_eq!(golden_max(|x| -(x - 0.3).powi(2), 0.0, 1.0, 1e-12), 0.3, epsilon = 1e-6);
        assert_eq!(golden_max(|x| x, 0.0, 1.0, 1e-12), 1.0);
    }
}
