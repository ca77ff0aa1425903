//! Multi-start ascent on the probability simplex.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exec::Exec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AscentOptions {
    pub starts: usize,
    pub max_iters: usize,
    /// Absolute accuracy target for the objective value of each start.
    pub tolerance: f64,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self {
            starts: 32,
            max_iters: 200,
            tolerance: 1e-10,
            seed: 0x5eed,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AscentResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// [`duality_gap`] at the returned point.
    pub gap: f64,
}

/// Euclidean projection onto `{w : w_k >= 0, sum w_k = 1}` (sort-based).
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// Uniformly distributed point on the simplex (normalized exponentials).
pub fn random_simplex_point<R: Rng>(dim: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

/// Seed for start `index`; independent of how starts are scheduled.
pub(crate) fn start_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// A smooth function on the probability simplex.
pub trait SimplexObjective {
    fn value_and_gradient(&self, w: &[f64]) -> (f64, Vec<f64>);

    /// Optional Hessian; when present each iteration also tries a Newton step
    /// restricted to the current support.
    fn hessian(&self, _w: &[f64]) -> Option<DMatrix<f64>> {
        None
    }
}

/// Adapts a value-and-gradient closure.
pub struct Smooth<F>(pub F);

impl<F: Fn(&[f64]) -> (f64, Vec<f64>)> SimplexObjective for Smooth<F> {
    fn value_and_gradient(&self, w: &[f64]) -> (f64, Vec<f64>) {
        (self.0)(w)
    }
}

/// Frank-Wolfe gap `max_k g_k - g.w`; bounds the distance to the maximum of a
/// concave objective from above.
pub fn duality_gap(w: &[f64], grad: &[f64]) -> f64 {
    let best = grad.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean: f64 = grad.iter().zip(w).map(|(g, x)| g * x).sum();
    (best - mean).max(0.0)
}

struct Candidate {
    point: Vec<f64>,
    value: f64,
    grad: Vec<f64>,
}

fn projected_gradient_step<O: SimplexObjective + ?Sized>(
    objective: &O,
    w: &[f64],
    value: f64,
    grad: &[f64],
    step: &mut f64,
) -> Option<Candidate> {
    let mut trial_step = *step;
    while trial_step > 1e-18 {
        let trial: Vec<f64> = w.iter().zip(grad).map(|(x, g)| x + trial_step * g).collect();
        let point = project_to_simplex(&trial);
        let (cand_value, cand_grad) = objective.value_and_gradient(&point);
        let ascent: f64 = grad
            .iter()
            .zip(point.iter().zip(w))
            .map(|(g, (c, x))| g * (c - x))
            .sum();
        if cand_value >= value + 1e-4 * ascent {
            *step = trial_step * 2.0;
            return Some(Candidate {
                point,
                value: cand_value,
                grad: cand_grad,
            });
        }
        trial_step *= 0.5;
    }
    None
}

/// Orthonormal basis (as columns) of the complement of `v`, from a Householder
/// reflection mapping the first unit vector onto `v / |v|`.
fn orthogonal_complement(v: &DVector<f64>) -> DMatrix<f64> {
    let dim = v.len();
    let mut u = v / v.norm();
    u[0] += if u[0] >= 0.0 { 1.0 } else { -1.0 };
    let scale = 2.0 / u.norm_squared();
    DMatrix::from_fn(dim, dim - 1, |i, j| {
        let delta = if i == j + 1 { 1.0 } else { 0.0 };
        delta - scale * u[i] * u[j + 1]
    })
}

/// Log-barrier Newton ascent for objectives with a Hessian. Maximizes
/// `f(w) + mu sum_k ln w_k` on the open simplex for a decreasing sequence of
/// `mu`; at the end `f` lies within `dim * mu <= tolerance` of the maximum of a
/// concave `f`. One iteration is one Newton step.
fn barrier_ascent<O: SimplexObjective + ?Sized>(
    objective: &O,
    start: &[f64],
    max_iters: usize,
    tolerance: f64,
) -> AscentResult {
    let dim = start.len();
    let interior = 1e-3;
    let mut w: Vec<f64> = project_to_simplex(start)
        .iter()
        .map(|x| (1.0 - interior) * x + interior / dim as f64)
        .collect();
    let (_, grad) = objective.value_and_gradient(&w);
    let scale = grad.iter().fold(1.0f64, |m, g| m.max(g.abs()));
    let mu_end = tolerance / dim as f64;
    let mut mu = (1e-2 * scale / dim as f64).max(mu_end);
    let barrier = |w: &[f64], mu: f64| -> (f64, f64, Vec<f64>) {
        let (f, g) = objective.value_and_gradient(w);
        let phi = f + mu * w.iter().map(|x| x.ln()).sum::<f64>();
        (phi, f, g)
    };

    let mut iterations = 0;
    let mut converged = false;
    'stages: loop {
        loop {
            if iterations >= max_iters {
                break 'stages;
            }
            iterations += 1;
            let (phi, _, g) = barrier(&w, mu);
            let Some(hessian) = objective.hessian(&w) else {
                break 'stages;
            };
            // Newton system in the scaled variables w = diag(w) v, which stays
            // well conditioned as weights approach zero
            let system = DMatrix::from_fn(dim, dim, |i, j| {
                -hessian[(i, j)] * w[i] * w[j] + if i == j { mu } else { 0.0 }
            });
            let full_grad = DVector::from_iterator(dim, g.iter().zip(&w).map(|(g, x)| g + mu / x));
            let scaled_grad = DVector::from_iterator(dim, full_grad.iter().zip(&w).map(|(g, x)| g * x));
            let weights = DVector::from_column_slice(&w);
            // the step must keep sum w fixed, i.e. stay orthogonal to w in the
            // scaled variables; solve on that complement (w itself is a null
            // vector of the Hessian, so eliminating the constraint by a Schur
            // complement would cancel catastrophically)
            let basis = orthogonal_complement(&weights);
            let reduced = basis.transpose() * &system * &basis;
            let Some(chol) = reduced.clone().cholesky() else {
                break 'stages;
            };
            let z = chol.solve(&(basis.transpose() * &scaled_grad));
            let decrement = z.dot(&(&reduced * &z));
            let scaled = &basis * z;
            let direction = scaled.component_mul(&weights);
            let slope = full_grad.dot(&direction);
            let direction: Vec<f64> = direction.iter().copied().collect();

            let mut alpha = direction
                .iter()
                .zip(&w)
                .filter(|(d, _)| **d < 0.0)
                .map(|(d, x)| -0.99 * x / d)
                .fold(1.0f64, f64::min);
            let mut accepted = false;
            while alpha > 1e-14 {
                let trial: Vec<f64> = w.iter().zip(direction.iter()).map(|(x, d)| x + alpha * d).collect();
                if trial.iter().all(|x| *x > 0.0) && barrier(&trial, mu).0 >= phi + 0.25 * alpha * slope {
                    let total: f64 = trial.iter().sum();
                    w = trial.iter().map(|x| x / total).collect();
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            let stage_done = !accepted || decrement / 2.0 < if mu > mu_end { mu } else { tolerance };
            if stage_done {
                break;
            }
        }
        if mu <= mu_end {
            converged = true;
            break;
        }
        mu = (mu * 0.1).max(mu_end);
    }

    let (value, grad) = objective.value_and_gradient(&w);
    AscentResult {
        gap: duality_gap(&w, &grad),
        point: w,
        value,
        iterations,
        converged,
    }
}

fn gradient_ascent<O: SimplexObjective + ?Sized>(
    objective: &O,
    start: &[f64],
    max_iters: usize,
    tolerance: f64,
) -> AscentResult {
    let mut w = project_to_simplex(start);
    let (mut value, mut grad) = objective.value_and_gradient(&w);
    let scale = grad.iter().fold(0.0f64, |m, g| m.max(g.abs())).max(1.0);
    let mut step = 1.0 / scale;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iters {
        iterations += 1;
        let Some(next) = projected_gradient_step(objective, &w, value, &grad, &mut step) else {
            // no ascent left at machine precision
            converged = true;
            break;
        };
        let improvement = next.value - value;
        w = next.point;
        value = next.value;
        grad = next.grad;
        if improvement < tolerance {
            converged = true;
            break;
        }
    }
    AscentResult {
        gap: duality_gap(&w, &grad),
        point: w,
        value,
        iterations,
        converged,
    }
}

/// Ascent from a single start. Objectives with a Hessian use a log-barrier
/// Newton method and converge once the barrier bound on the remaining gain
/// drops below `tolerance`; the others use projected gradient with Armijo
/// backtracking and converge once a step gains less than `tolerance`.
pub fn ascend<O: SimplexObjective + ?Sized>(
    objective: &O,
    start: Vec<f64>,
    max_iters: usize,
    tolerance: f64,
) -> AscentResult {
    if objective.hessian(&start).is_some() {
        barrier_ascent(objective, &start, max_iters, tolerance)
    } else {
        gradient_ascent(objective, &start, max_iters, tolerance)
    }
}

/// Runs [`ascend`] from `extra_starts` followed by `options.starts` random
/// points and returns the best result. Ties go to the earliest start.
pub fn maximize_on_simplex<O>(
    objective: &O,
    dim: usize,
    extra_starts: &[Vec<f64>],
    options: &AscentOptions,
) -> AscentResult
where
    O: SimplexObjective + Sync + ?Sized,
{
    let mut starts: Vec<Vec<f64>> = extra_starts.to_vec();
    starts.extend((0..options.starts).map(|i| random_simplex_point(dim, &mut start_rng(options.seed, i))));
    let results = options.exec.map(&starts, |s| {
        ascend(objective, s.clone(), options.max_iters, options.tolerance)
    });
    results
        .into_iter()
        .reduce(|best, r| if r.value > best.value { r } else { best })
        .expect("at least one start")
}
