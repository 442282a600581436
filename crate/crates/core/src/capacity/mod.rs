//! Coherent information and one-shot quantum capacity estimates.
//!
//! Every estimate is a lower bound on `Q⁽¹⁾`: the optimizer returns the best
//! state it found, and the reported value is the coherent information at that
//! state.

mod optimizer;

pub use optimizer::{maximize_over_states, Maximization, OptimizerConfig, RestartOutcome};

use serde::Serialize;

use crate::channels::{tensor_power, KrausChannel};
use crate::error::{Error, Result};
use crate::linmath::{
    binary_entropy, entropy_of_spectrum, herm_eigvals, von_neumann_entropy, ComplexMatrix,
    DensityState,
};

/// Value tolerance for qubit-input channels.
pub const QUBIT_TOL: f64 = 1e-4;
/// Value tolerance for four-dimensional inputs.
pub const DIM4_TOL: f64 = 1e-3;
/// Largest input dimension accepted by [`regularized_probe`].
pub const PROBE_DIM_CAP: usize = 16;

/// `I_c(Φ, ρ) = S(Φ(ρ)) − S(Φᶜ(ρ))` in bits.
pub fn coherent_information(ch: &KrausChannel, rho: &DensityState) -> Result<f64> {
    if rho.dim() != ch.dim_in() {
        return Err(Error::dims(format!(
            "state dimension {} for a channel with input dimension {}",
            rho.dim(),
            ch.dim_in()
        )));
    }
    CoherentInfo::new(ch).eval(rho.matrix())
}

/// Coherent information with the complement precomputed.
#[derive(Clone, Debug)]
pub struct CoherentInfo<'a> {
    channel: &'a KrausChannel,
    complement: KrausChannel,
}

impl<'a> CoherentInfo<'a> {
    pub fn new(channel: &'a KrausChannel) -> Self {
        Self {
            channel,
            complement: channel.complement(),
        }
    }

    pub fn eval(&self, rho: &ComplexMatrix) -> Result<f64> {
        let out = self.channel.apply_matrix(rho)?.hermitian_part();
        let env = self.complement.apply_matrix(rho)?.hermitian_part();
        Ok(von_neumann_entropy(&out)? - von_neumann_entropy(&env)?)
    }

    /// Objective form used inside the optimizer: spectra are clamped at zero
    /// instead of erroring.
    pub(crate) fn eval_lenient(&self, rho: &ComplexMatrix) -> f64 {
        lenient_entropy(&self.channel.apply_matrix(rho).expect("dimension checked"))
            - lenient_entropy(&self.complement.apply_matrix(rho).expect("dimension checked"))
    }
}

pub(crate) fn lenient_entropy(m: &ComplexMatrix) -> f64 {
    match herm_eigvals(&m.hermitian_part()) {
        Ok(vals) => {
            let clamped: Vec<f64> = vals.into_iter().map(|v| v.max(0.0)).collect();
            entropy_of_spectrum(&clamped).unwrap_or(f64::NAN)
        }
        Err(_) => f64::NAN,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CapacityEstimate {
    pub value: f64,
    pub argmax_state: DensityState,
    pub restarts_used: usize,
    pub converged: bool,
    #[serde(skip)]
    pub restart_values: Vec<f64>,
}

/// Restarted estimate of `max_ρ I_c(Φ, ρ)` with the default budget and seed 0.
pub fn one_shot_capacity(ch: &KrausChannel, restarts: usize, tol: f64) -> Result<CapacityEstimate> {
    one_shot_capacity_with(ch, &OptimizerConfig::with_restarts(restarts, 0, tol))
}

pub fn one_shot_capacity_with(ch: &KrausChannel, cfg: &OptimizerConfig) -> Result<CapacityEstimate> {
    let ic = CoherentInfo::new(ch);
    let result = maximize_over_states(ch.dim_in(), |rho| ic.eval_lenient(rho), cfg);
    // Re-evaluate strictly so the value is exactly I_c at the returned state.
    let value = ic.eval(result.best.state.matrix())?;
    Ok(CapacityEstimate {
        value,
        argmax_state: result.best.state,
        restarts_used: result.restart_values.len(),
        converged: result.converged,
        restart_values: result.restart_values,
    })
}

/// Both sides of `S(pω) = p S(ω) − p log₂ p`: the left via the spectrum of
/// the scaled matrix, the right in closed form.
pub fn subnorm_entropy_identity(p: f64, omega: &DensityState) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ParameterRange(format!("weight {p} outside [0, 1]")));
    }
    if p == 0.0 {
        return Ok((0.0, 0.0));
    }
    let lhs = von_neumann_entropy(&omega.matrix().scale_real(p))?;
    let rhs = p * von_neumann_entropy(omega.matrix())? - p * p.log2();
    Ok((lhs, rhs))
}

/// `Q⁽¹⁾(Φ^{⊗n}) / n` for `n ∈ {1, 2}`; a lower bound on the quantum capacity.
pub fn regularized_probe(ch: &KrausChannel, n: usize, cfg: &OptimizerConfig) -> Result<f64> {
    Ok(probe_estimate(ch, n, cfg)?.value / n as f64)
}

/// The full estimate for `Φ^{⊗n}` behind [`regularized_probe`] (value not
/// divided by `n`).
pub fn probe_estimate(ch: &KrausChannel, n: usize, cfg: &OptimizerConfig) -> Result<CapacityEstimate> {
    let within_cap = ch
        .dim_in()
        .checked_pow(n as u32)
        .is_some_and(|d| d <= PROBE_DIM_CAP);
    if !within_cap {
        return Err(Error::DimensionCap(format!(
            "input dimension {}^{n} exceeds {PROBE_DIM_CAP}",
            ch.dim_in()
        )));
    }
    one_shot_capacity_with(&tensor_power(ch, n)?, cfg)
}

/// Closed-form one-shot capacity of the amplitude damping channel.
///
/// Coherent information is maximized on diagonal inputs `diag(1−p, p)`, where
/// it equals `h((1−η)p) − h(ηp)`; that is concave in `p` for `η < 1/2` and
/// never positive for `η ≥ 1/2`.
pub fn amplitude_damping_q1(eta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::ParameterRange(format!(
            "amplitude damping parameter {eta} outside [0, 1]"
        )));
    }
    if eta >= 0.5 {
        return Ok(0.0);
    }
    let f = |p: f64| binary_entropy((1.0 - eta) * p) - binary_entropy(eta * p);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if f(a) < f(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    Ok(f(0.5 * (lo + hi)).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmath::random::{random_density, stream_rng};

    #[test]
    fn coherent_information_examples() {
        let id = KrausChannel::identity(2);
        let omega = DensityState::maximally_mixed(2);
        assert!((coherent_information(&id, &omega).unwrap() - 1.0).abs() < 1e-12);

        let half = KrausChannel::amplitude_damping(0.5).unwrap();
        let mut rng = stream_rng(11, 0);
        for _ in 0..20 {
            let rho = random_density(&mut rng, 2);
            assert!(coherent_information(&half, &rho).unwrap().abs() < 1e-9);
        }

        let full = KrausChannel::amplitude_damping(1.0).unwrap();
        assert!((coherent_information(&full, &omega).unwrap() + 1.0).abs() < 1e-8);

        let bad = DensityState::maximally_mixed(3);
        assert!(matches!(
            coherent_information(&id, &bad),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn one_shot_capacity_examples() {
        let id = one_shot_capacity(&KrausChannel::identity(2), 4, QUBIT_TOL).unwrap();
        assert!((id.value - 1.0).abs() < QUBIT_TOL);

        let half = one_shot_capacity(&KrausChannel::amplitude_damping(0.5).unwrap(), 4, QUBIT_TOL).unwrap();
        assert!(half.value.abs() < QUBIT_TOL);

        let ad0 = KrausChannel::amplitude_damping(0.0).unwrap();
        let two = tensor_power(&ad0, 2).unwrap();
        let est = one_shot_capacity(&two, 4, DIM4_TOL).unwrap();
        assert!((est.value - 2.0).abs() < DIM4_TOL);
    }

    #[test]
    fn estimate_is_its_own_certificate() {
        let ch = KrausChannel::amplitude_damping(0.2).unwrap();
        let est = one_shot_capacity(&ch, 4, QUBIT_TOL).unwrap();
        let again = coherent_information(&ch, &est.argmax_state).unwrap();
        assert!((again - est.value).abs() <= 1e-8);
        let probe = coherent_information(&ch, &DensityState::maximally_mixed(2)).unwrap();
        assert!(est.value >= probe - 1e-8);
    }

    #[test]
    fn subnorm_identity_examples() {
        let omega = DensityState::maximally_mixed(2);
        let (l, r) = subnorm_entropy_identity(1.0, &omega).unwrap();
        assert!((l - 1.0).abs() < 1e-15 && (r - 1.0).abs() < 1e-15);
        let (l, r) = subnorm_entropy_identity(0.5, &omega).unwrap();
        assert!((l - 1.0).abs() < 1e-12 && (r - 1.0).abs() < 1e-12);
        let pure = DensityState::basis(2, 0);
        let (l, r) = subnorm_entropy_identity(0.5, &pure).unwrap();
        assert!((l - 0.5).abs() < 1e-12 && (r - 0.5).abs() < 1e-12);
        assert_eq!(subnorm_entropy_identity(0.0, &pure).unwrap(), (0.0, 0.0));
        assert!(subnorm_entropy_identity(1.5, &pure).is_err());
    }

    #[test]
    fn probe_dimension_cap() {
        let big = KrausChannel::identity(5);
        let cfg = OptimizerConfig::with_restarts(1, 0, QUBIT_TOL);
        assert!(matches!(
            regularized_probe(&big, 2, &cfg),
            Err(Error::DimensionCap(_))
        ));
    }

    #[test]
    fn analytic_amplitude_damping_capacity() {
        assert!((amplitude_damping_q1(0.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(amplitude_damping_q1(0.5).unwrap(), 0.0);
        assert_eq!(amplitude_damping_q1(0.8).unwrap(), 0.0);
        let mid = amplitude_damping_q1(0.3).unwrap();
        assert!(mid > 0.0 && mid < 1.0);
    }
}
