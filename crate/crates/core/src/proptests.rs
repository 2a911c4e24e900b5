extern crate std;

use std::prelude::rust_2021::*;

use crate::contraction::{expect_layout, expect_layout_dense_oracle};
use crate::estimator::{
    eigenvalues_from_moments, estimate_gqd, mean_and_sd, moments_from_outcomes, outcomes_exact,
    outcomes_sampled, Mode, MomentTriple, SpectrumRoute,
};
use crate::pairing::standard_layouts;
use crate::rng::child_seed;
use crate::state::random_unitary2;
use crate::tomography::{qst_estimate, Shots};
use crate::{decompose, gqd_by_minimization, gqd_exact, k_matrix, make_family, random_state, Side};
use proptest::prelude::*;

fn max_dev(a: &crate::linalg::Mat4, b: &crate::linalg::Mat4) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn any_state() -> impl Strategy<Value = crate::TwoQubitState> {
    (any::<u64>(), 1usize..=4).prop_map(|(seed, rank)| random_state(seed, rank))
}

fn unit_ball() -> impl Strategy<Value = [f64; 3]> {
    (
        0.0f64..=1.0,
        0.0f64..core::f64::consts::PI,
        0.0f64..core::f64::consts::TAU,
    )
        .prop_map(|(r, t, p)| [r * t.sin() * p.cos(), r * t.sin() * p.sin(), r * t.cos()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bloch_round_trip(s in any_state()) {
        let b = decompose(&s);
        let back = b.reconstruct().unwrap();
        prop_assert!(max_dev(back.matrix(), s.matrix()) <= 1e-12);
        for v in b.x.iter().chain(b.y.iter()).chain(b.t.iter()) {
            prop_assert!(v.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn purity_matches_bloch_norm(s in any_state()) {
        prop_assert!((4.0 * s.purity() - 1.0 - s.bloch().norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn local_unitaries_preserve_discord(s in any_state(), ua in any::<u64>(), ub in any::<u64>()) {
        let r = s.local_rotated(&random_unitary2(ua), &random_unitary2(ub));
        for side in [Side::A, Side::B] {
            prop_assert!((gqd_exact(&r, side).value - gqd_exact(&s, side).value).abs() < 1e-9);
        }
    }

    #[test]
    fn product_states_have_no_discord(a in unit_ball(), b in unit_ball()) {
        let p: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
        let s = make_family("product", &p).unwrap();
        prop_assert!(gqd_exact(&s, Side::A).value < 1e-12);
        prop_assert!(gqd_exact(&s, Side::B).value < 1e-12);
    }

    #[test]
    fn classical_states_have_no_discord_on_a(
        p1 in 0.0f64..=1.0,
        theta in 0.0f64..3.2,
        phi in 0.0f64..6.3,
        r1 in unit_ball(),
        r2 in unit_ball(),
    ) {
        let mut p = vec![p1, theta, phi];
        p.extend(r1);
        p.extend(r2);
        let s = make_family("classical_AB", &p).unwrap();
        prop_assert!(gqd_exact(&s, Side::A).value < 1e-12);
    }

    #[test]
    fn spectrum_from_power_sums(mut l in prop::array::uniform3(0.0f64..=2.0)) {
        l.sort_by(|a, b| b.total_cmp(a));
        let m = MomentTriple {
            m1: l.iter().sum(),
            m2: l.iter().map(|v| v * v).sum(),
            m3: l.iter().map(|v| v * v * v).sum(),
        };
        let s = eigenvalues_from_moments(&m, SpectrumRoute::Sampled).unwrap();
        // the real parts survive a rounding-induced complex pair at a double root
        for (a, b) in s.values.iter().zip(l) {
            prop_assert!((a - b).abs() <= 1e-9 || s.imag > 0.0 && (a - b).abs() <= 1e-6, "{l:?} -> {:?}", s.values);
        }
    }

    #[test]
    fn first_moment_is_trace_of_k(s in any_state()) {
        let m = moments_from_outcomes(&outcomes_exact(&s).unwrap());
        let k = k_matrix(&s.bloch(), Side::A);
        prop_assert!((m.m1 - k.entries.trace()).abs() < 1e-10);
        prop_assert!(m.within_power_mean_bounds());
    }

    #[test]
    fn scheme_exact_equals_closed_form(s in any_state()) {
        for side in [Side::A, Side::B] {
            let est = estimate_gqd(&s, Mode::SchemeExact, side).unwrap();
            prop_assert!((est.estimate.value - gqd_exact(&s, side).value).abs() <= 1e-8);
        }
    }

    #[test]
    fn tomography_output_is_a_state(s in any_state(), shots in 1u64..200, seed in any::<u64>()) {
        let (r, _) = qst_estimate(&s, Shots::Finite(shots), seed).unwrap();
        prop_assert!((r.matrix().trace().re - 1.0).abs() <= 1e-10);
        prop_assert!(crate::TwoQubitState::new(*r.matrix()).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(25))]

    #[test]
    fn contraction_matches_dense_oracle(s in any_state()) {
        for l in standard_layouts().iter().filter(|l| l.n_copies() <= 4) {
            let a = expect_layout(l, &s).unwrap();
            let b = expect_layout_dense_oracle(l, &s).unwrap();
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn minimization_never_beats_closed_form(seed in any::<u64>(), rank in 1usize..=4) {
        let s = random_state(seed, rank);
        let exact = gqd_exact(&s, Side::A).value;
        prop_assert!(gqd_by_minimization(&s, 4, seed) >= exact - 1e-6);
    }
}

#[test]
fn first_moment_noise_shrinks_as_inverse_root_shots() {
    let s = make_family("werner", &[0.5]).unwrap();
    let spread = |shots| {
        let m1: Vec<f64> = (0..200)
            .map(|r| {
                moments_from_outcomes(&outcomes_sampled(&s, shots, child_seed(17, r)).unwrap()).m1
            })
            .collect();
        mean_and_sd(&m1)
    };
    let ((lo_mean, lo), (hi_mean, hi)) = (spread(100_000), spread(400_000));
    let ratio = hi / (lo / 2.0);
    assert!((1.0 / 1.5..=1.5).contains(&ratio), "ratio {ratio}");
    for (mean, sd) in [(lo_mean, lo), (hi_mean, hi)] {
        assert!((mean - 0.75).abs() <= 3.0 * sd / 200f64.sqrt());
    }
}

#[test]
fn sampled_werner_mean_is_consistent() {
    for (p, seed) in [(0.6, 7), (0.8, 7)] {
        let s = make_family("werner", &[p]).unwrap();
        let e = estimate_gqd(
            &s,
            Mode::SchemeSampled {
                shots: 1_000_000,
                repeats: 20,
                seed,
            },
            Side::A,
        )
        .unwrap();
        assert!(
            (e.estimate.value - p * p / 2.0).abs() <= 3.0 * e.estimate.std_err,
            "{p}: {:?}",
            e.estimate
        );
    }
}

#[test]
fn werner_is_swap_symmetric_on_the_scheme() {
    for p in [0.2, 0.8] {
        let s = make_family("werner", &[p]).unwrap();
        let a = estimate_gqd(&s, Mode::SchemeExact, Side::A)
            .unwrap()
            .estimate
            .value;
        let b = estimate_gqd(&s, Mode::SchemeExact, Side::B)
            .unwrap()
            .estimate
            .value;
        assert!((a - b).abs() <= 1e-8);
    }
}

#[test]
fn sampled_runs_are_reproducible_across_threads() {
    let s = random_state(42, 3);
    let mode = Mode::SchemeSampled {
        shots: 5_000,
        repeats: 4,
        seed: 99,
    };
    let here = estimate_gqd(&s, mode, Side::A).unwrap();
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let s = s.clone();
            std::thread::spawn(move || estimate_gqd(&s, mode, Side::A).unwrap())
        })
        .collect();
    for h in handles {
        assert_eq!(h.join().unwrap(), here);
    }
}
