use capq_core::channels::{
    amplitude_damping_antidegrader, amplitude_damping_degrader, compose, tensor, verify_degrading_map,
    KrausChannel, CHANNEL_TOL,
};
use capq_core::linmath::random::{random_density, random_pure, random_unitary, stream_rng};
use capq_core::linmath::{herm_eigvals, partial_trace, ComplexMatrix, Subsystem};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn constructed<R: Rng>(rng: &mut R, which: u8) -> KrausChannel {
    match which % 8 {
        0 => KrausChannel::identity(rng.random_range(1..=4)),
        1 => {
            let d = rng.random_range(1..=4);
            KrausChannel::unitary(random_unitary(rng, d)).unwrap()
        }
        2 => KrausChannel::trace_out(rng.random_range(1..=4)),
        3 => {
            let d_in: usize = rng.random_range(1..=3);
            let d_out = rng.random_range(1..=3);
            let psi = random_pure(rng, d_out);
            KrausChannel::prepare(d_in, &psi).unwrap()
        }
        4 => KrausChannel::amplitude_damping(rng.random_range(0.0..=1.0)).unwrap(),
        5 => KrausChannel::dephasing(rng.random_range(1..=4)),
        6 => {
            let d_in: usize = rng.random_range(1..=3);
            let d_out: usize = rng.random_range(1..=3);
            let nk = rng.random_range(d_in.div_ceil(d_out)..=4);
            KrausChannel::random(rng, d_in, d_out, nk).unwrap()
        }
        _ => {
            let a = KrausChannel::amplitude_damping(rng.random_range(0.0..=1.0)).unwrap();
            let b = KrausChannel::random(rng, 2, 2, 2).unwrap();
            if rng.random_bool(0.5) {
                compose(&a, &b).unwrap()
            } else {
                tensor(&a, &b).unwrap()
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_constructor_is_valid(seed in any::<u64>(), which in any::<u8>()) {
        let mut rng = stream_rng(seed, 10);
        let ch = constructed(&mut rng, which);
        let v = ch.validity().unwrap();
        prop_assert!(v.tp_defect <= 1e-9, "tp defect {}", v.tp_defect);
        prop_assert!(v.choi_min_eigenvalue >= -1e-9);
        prop_assert!(v.is_valid(CHANNEL_TOL));
        let c = ch.complement().validity().unwrap();
        prop_assert!(c.is_valid(CHANNEL_TOL));
    }

    #[test]
    fn choi_round_trip(seed in any::<u64>(), which in any::<u8>()) {
        let mut rng = stream_rng(seed, 11);
        let ch = constructed(&mut rng, which);
        let rho = random_density(&mut rng, ch.dim_in()).into_matrix();
        let direct = ch.apply_matrix(&rho).unwrap();
        let choi = ch.choi();
        prop_assert!(choi.apply(&rho).unwrap().max_abs_diff(&direct) <= 1e-10);
        let omega = ComplexMatrix::identity(ch.dim_in()).scale_real(1.0 / ch.dim_in() as f64);
        prop_assert!(choi.input_marginal().max_abs_diff(&omega) <= 1e-9);
    }

    #[test]
    fn stinespring_dilation_reproduces_channel(seed in any::<u64>(), which in any::<u8>()) {
        let mut rng = stream_rng(seed, 12);
        let ch = constructed(&mut rng, which);
        let rho = random_density(&mut rng, ch.dim_in()).into_matrix();
        let v = ch.stinespring();
        let joint = v.conjugate(&rho).unwrap();
        let dims = (ch.dim_out(), ch.num_kraus());
        let out = partial_trace(&joint, dims, Subsystem::A).unwrap();
        prop_assert!(out.max_abs_diff(&ch.apply_matrix(&rho).unwrap()) <= 1e-10);
        let env = partial_trace(&joint, dims, Subsystem::B).unwrap();
        prop_assert!(env.max_abs_diff(&ch.complement().apply_matrix(&rho).unwrap()) <= 1e-10);
    }

    #[test]
    fn complement_spectrum_ignores_kraus_order(seed in any::<u64>(), which in any::<u8>()) {
        let mut rng = stream_rng(seed, 13);
        let ch = constructed(&mut rng, which);
        let mut kraus = ch.kraus().to_vec();
        kraus.shuffle(&mut rng);
        let permuted = KrausChannel::new(ch.dim_in(), ch.dim_out(), kraus).unwrap();
        let rho = random_density(&mut rng, ch.dim_in()).into_matrix();
        let a = herm_eigvals(&ch.complement().apply_matrix(&rho).unwrap()).unwrap();
        let b = herm_eigvals(&permuted.complement().apply_matrix(&rho).unwrap()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }
}

#[test]
fn amplitude_damping_is_degradable_below_half() {
    for eta in [0.1, 0.2, 0.3, 0.4] {
        let ch = KrausChannel::amplitude_damping(eta).unwrap();
        let d = amplitude_damping_degrader(eta).unwrap();
        assert!(verify_degrading_map(&ch, &d, 1e-9).unwrap(), "eta = {eta}");
    }
}

#[test]
fn amplitude_damping_is_antidegradable_above_half() {
    for eta in [0.5, 0.55, 0.7, 0.85, 1.0] {
        let ch = KrausChannel::amplitude_damping(eta).unwrap();
        let a = amplitude_damping_antidegrader(eta).unwrap();
        // The complement simulates the channel: a ∘ chᶜ = ch.
        assert!(verify_degrading_map(&ch.complement(), &a, 1e-9).unwrap(), "eta = {eta}");
    }
}

#[test]
fn amplitude_damping_complement_swaps_parameter() {
    for eta in [0.0, 0.25, 0.6, 1.0] {
        let c = KrausChannel::amplitude_damping(eta).unwrap().complement();
        let swapped = KrausChannel::amplitude_damping(1.0 - eta).unwrap();
        assert!(capq_core::channels::channels_equal(&c, &swapped, 1e-10).unwrap());
    }
}

#[test]
fn not_trace_preserving_is_rejected() {
    let k = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.5]]);
    assert!(matches!(
        KrausChannel::new(2, 2, vec![k]),
        Err(capq_core::Error::InvalidChannel(_))
    ));
}
