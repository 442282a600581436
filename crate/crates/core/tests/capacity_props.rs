use capq_core::capacity::{
    amplitude_damping_q1, coherent_information, one_shot_capacity, one_shot_capacity_with, probe_estimate,
    regularized_probe, subnorm_entropy_identity, OptimizerConfig,
};
use capq_core::channels::{tensor_power, KrausChannel};
use capq_core::linmath::random::{random_density, random_unitary, stream_rng};
use capq_core::linmath::{binary_entropy, von_neumann_entropy, DensityState};
use capq_core::Error;
use proptest::prelude::*;
use rand::Rng;

fn ad(eta: f64) -> KrausChannel {
    KrausChannel::amplitude_damping(eta).unwrap()
}

/// Dense grid over diagonal inputs, which are optimal for amplitude damping.
fn ad_grid_max(eta: f64) -> f64 {
    (0..=20_000)
        .map(|k| {
            let p = k as f64 / 20_000.0;
            binary_entropy((1.0 - eta) * p) - binary_entropy(eta * p)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn unitary_channels_transmit_entropy(seed in any::<u64>(), d in 1usize..=6) {
        let mut rng = stream_rng(seed, 20);
        let ch = KrausChannel::unitary(random_unitary(&mut rng, d)).unwrap();
        let rho = random_density(&mut rng, d);
        let ic = coherent_information(&ch, &rho).unwrap();
        prop_assert!((ic - von_neumann_entropy(rho.matrix()).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn half_damping_has_zero_coherent_information(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 21);
        let rho = random_density(&mut rng, 2);
        prop_assert!(coherent_information(&ad(0.5), &rho).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn estimate_certificate_reproduces_value(seed in any::<u64>(), eta in 0.0f64..1.0) {
        let cfg = OptimizerConfig::with_restarts(4, seed, 1e-4);
        let ch = ad(eta);
        let est = one_shot_capacity_with(&ch, &cfg).unwrap();
        let again = coherent_information(&ch, &est.argmax_state).unwrap();
        prop_assert!((again - est.value).abs() <= 1e-8);
    }
}

#[test]
fn subnormalized_entropy_identity_holds() {
    let mut rng = stream_rng(7, 22);
    for _ in 0..1000 {
        let d = rng.random_range(1..=8);
        let p = rng.random_range(0.0..=1.0);
        let omega = random_density(&mut rng, d);
        let (lhs, rhs) = subnorm_entropy_identity(p, &omega).unwrap();
        assert!((lhs - rhs).abs() <= 1e-9, "p = {p}, d = {d}");
    }
}

#[test]
fn subnormalized_entropy_examples() {
    let (l, r) = subnorm_entropy_identity(0.5, &DensityState::maximally_mixed(2)).unwrap();
    assert!((l - 1.0).abs() <= 1e-12 && (r - 1.0).abs() <= 1e-12);
    let (l, r) = subnorm_entropy_identity(0.5, &DensityState::basis(2, 0)).unwrap();
    assert!((l - 0.5).abs() <= 1e-12 && (r - 0.5).abs() <= 1e-12);
    assert_eq!(subnorm_entropy_identity(0.0, &DensityState::basis(2, 0)).unwrap(), (0.0, 0.0));
}

#[test]
fn coherent_information_examples() {
    let mixed = DensityState::maximally_mixed(2);
    assert!((coherent_information(&KrausChannel::identity(2), &mixed).unwrap() - 1.0).abs() <= 1e-12);
    assert!((coherent_information(&ad(1.0), &mixed).unwrap() + 1.0).abs() <= 1e-8);
    assert!(matches!(
        coherent_information(&ad(0.3), &DensityState::maximally_mixed(3)),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn one_shot_examples() {
    assert!((one_shot_capacity(&KrausChannel::identity(2), 16, 1e-4).unwrap().value - 1.0).abs() <= 1e-4);
    assert!(one_shot_capacity(&ad(0.5), 16, 1e-4).unwrap().value.abs() <= 1e-4);
    let two = tensor_power(&ad(0.0), 2).unwrap();
    assert!((one_shot_capacity(&two, 16, 1e-3).unwrap().value - 2.0).abs() <= 1e-3);
}

#[test]
fn more_restarts_never_hurt() {
    let mut rng = stream_rng(3, 23);
    for _ in 0..4 {
        let ch = KrausChannel::random(&mut rng, 2, 2, 2).unwrap();
        let few = one_shot_capacity_with(&ch, &OptimizerConfig::with_restarts(4, 11, 1e-4)).unwrap();
        let many = one_shot_capacity_with(&ch, &OptimizerConfig::with_restarts(32, 11, 1e-4)).unwrap();
        assert!(many.value >= few.value - 1e-9, "{} < {}", many.value, few.value);
    }
}

#[test]
fn degradable_restarts_agree_with_grid_oracle() {
    for eta in [0.05, 0.1, 0.2, 0.3, 0.4, 0.45] {
        let est = one_shot_capacity(&ad(eta), 16, 1e-4).unwrap();
        assert_eq!(est.restart_values.len(), 16);
        let lo = est.restart_values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = est.restart_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(hi - lo <= 1e-5, "eta = {eta}: spread {}", hi - lo);
        let grid = ad_grid_max(eta);
        assert!((est.value - grid).abs() <= 1e-4, "eta = {eta}: {} vs {grid}", est.value);
        assert!((amplitude_damping_q1(eta).unwrap() - grid).abs() <= 1e-6);
        assert!(est.converged);
    }
}

#[test]
fn regularized_probe_examples() {
    let cfg = OptimizerConfig::with_restarts(16, 0, 1e-3);
    assert!((regularized_probe(&KrausChannel::identity(2), 2, &cfg).unwrap() - 1.0).abs() <= 1e-3);
    assert!(regularized_probe(&ad(0.5), 2, &cfg).unwrap().abs() <= 1e-3);
    let one = regularized_probe(&ad(0.3), 1, &cfg).unwrap();
    let two = regularized_probe(&ad(0.3), 2, &cfg).unwrap();
    assert!(two >= one - 1e-3, "{two} < {one}");
}

#[test]
fn two_copy_antidegradable_states_never_help() {
    let two = tensor_power(&ad(0.5), 2).unwrap();
    let mut rng = stream_rng(5, 24);
    for _ in 0..200 {
        let rho = random_density(&mut rng, 4);
        assert!(coherent_information(&two, &rho).unwrap() <= 1e-9);
    }
}

#[test]
fn probe_dimension_cap() {
    let cfg = OptimizerConfig::with_restarts(1, 0, 1e-3);
    assert!(matches!(
        probe_estimate(&KrausChannel::identity(5), 2, &cfg),
        Err(Error::DimensionCap(_))
    ));
}
