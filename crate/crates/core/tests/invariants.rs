//! Structural and conservation invariants of the cascade and its evolution.

mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use ringcascade_core::model::chain_slot;
use ringcascade_core::{build_cascade, evolve, jump_rates, ArraySpec, StateVector};

use common::{real, run};

fn chain_spec() -> impl Strategy<Value = ArraySpec> {
    (1usize..=5, 0.05f64..6.0, -std::f64::consts::PI..std::f64::consts::PI, -2.0f64..2.0)
        .prop_flat_map(|(n, g_abs, g_arg, delta)| {
            (
                Just((n, Complex64::from_polar(g_abs, g_arg), delta)),
                prop::collection::vec(0.3f64..2.0, n),
                prop::collection::vec(-3.0f64..3.0, n),
            )
        })
        .prop_map(|((n, g, delta), kappa, mut detunings)| {
            detunings[0] = delta;
            let spec = ArraySpec::chain(g, delta, kappa, detunings);
            assert_eq!(spec.n_cavities, n);
            spec
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_plus_detection_is_one(spec in chain_spec()) {
        let ops = build_cascade(&spec).unwrap();
        let dt = ops.max_step();
        let traj = evolve(&ops, &StateVector::excited_atom(spec.n_cavities), 8.0, dt).unwrap();
        prop_assert!(traj.conservation_defect() <= 1e-8, "defect {}", traj.conservation_defect());
        prop_assert!(traj.p_det_a.windows(2).into_iter().all(|w| w[1] >= w[0]));
        prop_assert!(traj.p_det_b.windows(2).into_iter().all(|w| w[1] >= w[0]));
    }

    #[test]
    fn anti_hermitian_part_is_the_decay(spec in chain_spec()) {
        let ops = build_cascade(&spec).unwrap();
        prop_assert!(ops.decomposition_defect() <= 1e-12);
    }

    #[test]
    fn later_rings_never_feed_earlier_ones(spec in chain_spec()) {
        let ops = build_cascade(&spec).unwrap();
        let h = ops.h_nh();
        for i in 1..=spec.n_cavities {
            for j in (i + 1)..=spec.n_cavities {
                prop_assert_eq!(h[[chain_slot(i), chain_slot(j)]], Complex64::new(0.0, 0.0));
                let expected = Complex64::new(0.0, -(spec.kappa[i - 1] * spec.kappa[j - 1]).sqrt());
                prop_assert!((h[[chain_slot(j), chain_slot(i)]] - expected).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn counter_propagating_mode_talks_only_to_the_atom(spec in chain_spec()) {
        let ops = build_cascade(&spec).unwrap();
        let h = ops.h_nh();
        for k in 1..ops.dim() {
            if k != 2 {
                prop_assert_eq!(h[[2, k]], Complex64::new(0.0, 0.0));
                prop_assert_eq!(h[[k, 2]], Complex64::new(0.0, 0.0));
            }
        }
        prop_assert!((h[[2, 2]].im + spec.kappa[0] / 2.0).abs() < 1e-14);
    }

    #[test]
    fn ring_modes_share_their_modulus(g_abs in 0.05f64..6.0, g_arg in -3.0f64..3.0, delta in -2.0f64..2.0) {
        let spec = ArraySpec::single(Complex64::from_polar(g_abs, g_arg), delta, 1.0);
        let (_, traj) = run(&spec, 6.0, 0.01 / g_abs.max(1.0));
        for i in 0..traj.len() {
            let (c1, c2) = (traj.amplitudes[[i, 1]].norm(), traj.amplitudes[[i, 2]].norm());
            prop_assert!((c1 - c2).abs() <= 1e-14, "t={} |c1|={} |c2|={}", traj.times[i], c1, c2);
        }
    }

    #[test]
    fn jump_rates_are_nonnegative(spec in chain_spec(), seed in any::<u64>()) {
        let ops = build_cascade(&spec).unwrap();
        let mut x = seed;
        let amps = (0..ops.dim()).map(|_| {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            Complex64::new(((x >> 11) as f64 / (1u64 << 53) as f64) - 0.5, ((x >> 7) % 1000) as f64 / 1000.0 - 0.5)
        });
        let state = StateVector::new(amps.collect());
        let (pa, pb) = jump_rates(&state, &ops).unwrap();
        prop_assert!(pa >= 0.0 && pb >= 0.0);
    }
}

#[test]
fn conservation_for_each_regime_and_length() {
    for n in [1, 2, 3, 4, 5] {
        for g in [0.25, 5.0] {
            let spec = ArraySpec::uniform(n, real(g), 0.5, 1.0, 0.5);
            let ops = build_cascade(&spec).unwrap();
            let (_, traj) = run(&spec, 40.0, ops.max_step());
            assert!(traj.conservation_defect() <= 1e-8, "N={n} g={g}: {}", traj.conservation_defect());
        }
    }
}

#[test]
fn defect_shrinks_at_fourth_order() {
    let spec = ArraySpec::uniform(2, real(1.0), 0.5, 1.0, 0.5);
    let mut defects = Vec::new();
    for dt in [0.01, 0.005, 0.0025, 0.00125] {
        let (_, traj) = run(&spec, 10.0, dt);
        defects.push(traj.conservation_defect());
    }
    for w in defects.windows(2) {
        let ratio = w[0] / w[1];
        assert!((12.0..=20.0).contains(&ratio), "defects {defects:?}");
    }
}

#[test]
fn decoupled_atom_stays_excited() {
    let spec = ArraySpec::uniform(3, real(0.0), 0.0, 1.0, 0.0);
    let (_, traj) = run(&spec, 10.0, 0.005);
    for i in 0..traj.len() {
        assert!((traj.amplitudes[[i, 0]] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }
    assert_eq!(*traj.p_det_a.last().unwrap(), 0.0);
    assert_eq!(*traj.p_det_b.last().unwrap(), 0.0);
}

#[test]
fn oversized_step_is_rejected() {
    let spec = ArraySpec::single(real(5.0), 0.5, 1.0);
    let ops = build_cascade(&spec).unwrap();
    let init = StateVector::excited_atom(1);
    assert!(evolve(&ops, &init, 1.0, 0.01).is_err());
    assert!(evolve(&ops, &init, 1.0, 0.002).is_ok());
}
