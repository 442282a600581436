//! Restarted finite-difference gradient ascent over density matrices.
//!
//! States are parameterized as `ρ = T T† / Tr(T T†)` with `T` a full complex
//! `d×d` matrix, so the search is unconstrained over `2d²` real coordinates.
//! Restart 0 always starts at the maximally mixed state; restart `k > 0`
//! starts from a Ginibre factor drawn from stream `k` of the seed.

use rayon::prelude::*;
use serde::Serialize;

use crate::linmath::random::{ginibre, stream_rng};
use crate::linmath::{ComplexMatrix, DensityState, C64};

#[derive(Clone, Debug, Serialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Central-difference step on the factor coordinates.
    pub fd_step: f64,
    /// Value tolerance; restarts disagreeing by more than `10·tol` mark the
    /// estimate unconverged.
    pub tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            seed: 0,
            max_iters: 500,
            fd_step: 1e-5,
            tol: 1e-4,
        }
    }
}

impl OptimizerConfig {
    pub fn with_restarts(restarts: usize, seed: u64, tol: f64) -> Self {
        Self {
            restarts,
            seed,
            tol,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct RestartOutcome {
    pub value: f64,
    pub state: DensityState,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct Maximization {
    pub best: RestartOutcome,
    pub best_restart: usize,
    /// Final objective of every restart, in restart order.
    pub restart_values: Vec<f64>,
    pub converged: bool,
}

/// Maximize `objective` over `dim`-dimensional density matrices.
///
/// The result depends only on `cfg` and the objective, never on the thread
/// schedule: restarts are merged by value, ties going to the lower index.
pub fn maximize_over_states<F>(dim: usize, objective: F, cfg: &OptimizerConfig) -> Maximization
where
    F: Fn(&ComplexMatrix) -> f64 + Sync,
{
    let restarts = cfg.restarts.max(1);
    let outcomes: Vec<RestartOutcome> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let start = initial_factor(dim, cfg.seed, k);
            ascend(&start, &objective, cfg)
        })
        .collect();

    let mut best_restart = 0;
    for (k, o) in outcomes.iter().enumerate() {
        if o.value > outcomes[best_restart].value {
            best_restart = k;
        }
    }
    let restart_values: Vec<f64> = outcomes.iter().map(|o| o.value).collect();
    let mut sorted = restart_values.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let converged = sorted.len() < 2 || sorted[0] - sorted[1] <= 10.0 * cfg.tol;
    Maximization {
        best: outcomes[best_restart].clone(),
        best_restart,
        restart_values,
        converged,
    }
}

fn initial_factor(dim: usize, seed: u64, restart: usize) -> ComplexMatrix {
    if restart == 0 {
        ComplexMatrix::identity(dim)
    } else {
        ginibre(&mut stream_rng(seed, restart as u64), dim, dim)
    }
}

fn to_params(t: &ComplexMatrix) -> Vec<f64> {
    t.data().iter().flat_map(|z| [z.re, z.im]).collect()
}

fn to_factor(dim: usize, x: &[f64]) -> ComplexMatrix {
    let data = x.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect();
    ComplexMatrix::from_vec(dim, dim, data).expect("parameter length matches")
}

fn state_of(dim: usize, x: &[f64]) -> ComplexMatrix {
    let t = to_factor(dim, x);
    let m = t.mul_unchecked(&t.dagger());
    let tr = m.trace().re;
    m.hermitian_part().scale_real(1.0 / tr)
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 40;
const STALL_IMPROVEMENT: f64 = 1e-13;
const STALL_LIMIT: usize = 3;
const GRADIENT_FLOOR: f64 = 1e-11;

fn ascend<F>(start: &ComplexMatrix, objective: &F, cfg: &OptimizerConfig) -> RestartOutcome
where
    F: Fn(&ComplexMatrix) -> f64,
{
    let dim = start.rows();
    let eval = |x: &[f64]| {
        let v = objective(&state_of(dim, x));
        if v.is_finite() {
            v
        } else {
            f64::NEG_INFINITY
        }
    };

    let mut x = to_params(start);
    normalize(&mut x);
    let mut fx = eval(&x);
    let mut step = 1.0;
    let mut stalls = 0;
    let mut iterations = 0;
    let h = cfg.fd_step;

    while iterations < cfg.max_iters {
        iterations += 1;
        let mut grad = vec![0.0; x.len()];
        let mut probe = x.clone();
        for i in 0..x.len() {
            let orig = probe[i];
            probe[i] = orig + h;
            let up = eval(&probe);
            probe[i] = orig - h;
            let down = eval(&probe);
            probe[i] = orig;
            grad[i] = (up - down) / (2.0 * h);
        }
        let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
        if !gnorm2.is_finite() || gnorm2.sqrt() < GRADIENT_FLOOR {
            break;
        }

        let mut accepted = None;
        let mut trial_step = step;
        for _ in 0..MAX_HALVINGS {
            let cand: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a + trial_step * g).collect();
            let fc = eval(&cand);
            if fc >= fx + ARMIJO * trial_step * gnorm2 {
                accepted = Some((cand, fc));
                break;
            }
            trial_step *= 0.5;
        }
        let Some((mut cand, fc)) = accepted else {
            break;
        };
        let gain = fc - fx;
        normalize(&mut cand);
        x = cand;
        fx = fc;
        step = (trial_step * 2.0).min(1e3);
        if gain < STALL_IMPROVEMENT {
            stalls += 1;
            if stalls >= STALL_LIMIT {
                break;
            }
        } else {
            stalls = 0;
        }
    }

    RestartOutcome {
        value: fx,
        state: DensityState::from_matrix_unchecked(state_of(dim, &x)),
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_top_eigenvalue_of_linear_objective() {
        // max Tr(Hρ) = λ_max(H)
        let h = ComplexMatrix::from_real_rows(&[&[0.2, 0.3], &[0.3, -0.4]]);
        let lmax = crate::linmath::herm_eigvals(&h).unwrap()[0];
        let cfg = OptimizerConfig::with_restarts(4, 1, 1e-6);
        let res = maximize_over_states(2, |rho| rho.trace_product(&h).re, &cfg);
        assert!((res.best.value - lmax).abs() < 1e-6, "{} vs {lmax}", res.best.value);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let h = ComplexMatrix::from_real_diag(&[0.1, 0.7, 0.2]);
        let cfg = OptimizerConfig::with_restarts(6, 9, 1e-6);
        let a = maximize_over_states(3, |rho| rho.trace_product(&h).re, &cfg);
        let b = maximize_over_states(3, |rho| rho.trace_product(&h).re, &cfg);
        assert_eq!(a.restart_values, b.restart_values);
        assert_eq!(a.best.state, b.best.state);
    }
}
