//! Geometric discord: the closed form from the spectrum of K = x xᵗ + T Tᵗ,
//! its subsystem-swapped variant, and a brute-force minimization over
//! zero-discord states used as an independent oracle.

use nalgebra::Matrix3;
use rand::Rng;

use crate::linalg::{c, kron2, sym3_eigenvalues};
use crate::simplex::{self, SimplexOptions};
use crate::state::{qubit_state, BlochForm, TwoQubitState};

/// Which subsystem the zero-discord reference state is classical on.
///
/// `A` gives D(ρ) from K = x xᵗ + T Tᵗ; `B` gives the permuted D′(ρ) from
/// K′ = y yᵗ + Tᵗ T.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Side {
    #[default]
    A,
    B,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::A => "A",
            Side::B => "B",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMatrix {
    pub entries: Matrix3<f64>,
    pub side: Side,
}

impl KMatrix {
    pub fn eigenvalues(&self) -> [f64; 3] {
        sym3_eigenvalues(&self.entries)
    }

    /// tr(Kᵏ) by repeated multiplication.
    pub fn power_trace(&self, k: u32) -> f64 {
        let mut m = Matrix3::identity();
        for _ in 0..k {
            m *= self.entries;
        }
        m.trace()
    }
}

pub fn k_matrix(bloch: &BlochForm, side: Side) -> KMatrix {
    let entries = match side {
        Side::A => bloch.x * bloch.x.transpose() + bloch.t * bloch.t.transpose(),
        Side::B => bloch.y * bloch.y.transpose() + bloch.t.transpose() * bloch.t,
    };
    KMatrix { entries, side }
}

/// A discord value together with the K spectrum it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GqdValue {
    pub value: f64,
    /// λ₁ ≥ λ₂ ≥ λ₃
    pub eigenvalues: [f64; 3],
}

impl GqdValue {
    /// D = (Σλ − λ_max)/4 = (λ₂ + λ₃)/4, floored at zero.
    pub fn from_eigenvalues(mut eigenvalues: [f64; 3]) -> Self {
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        let value = ((eigenvalues[1] + eigenvalues[2]) / 4.0).max(0.0);
        Self { value, eigenvalues }
    }
}

pub fn gqd_exact(state: &TwoQubitState, side: Side) -> GqdValue {
    let k = k_matrix(&state.bloch(), side);
    GqdValue::from_eigenvalues(k.eigenvalues())
}

pub const DEFAULT_RESTARTS: usize = 200;

const MAX_POLISH: usize = 10;

/// Squared Hilbert–Schmidt distance from `state` to the zero-discord state
/// p₁|ψ₁⟩⟨ψ₁|⊗ρ₁ + (1 − p₁)|ψ₂⟩⟨ψ₂|⊗ρ₂ encoded by `params`:
/// `[θ, φ, p₁, r₁(3), r₂(3)]`. p₁ is clamped to [0, 1] and each rᵢ is
/// radially projected into the unit ball.
pub fn distance_to_classical(state: &TwoQubitState, params: &[f64]) -> f64 {
    let (theta, phi) = (params[0], params[1]);
    let p1 = params[2].clamp(0.0, 1.0);
    let ball = |w: &[f64]| {
        let n = libm::sqrt(w.iter().map(|v| v * v).sum::<f64>()).max(1.0);
        [w[0] / n, w[1] / n, w[2] / n]
    };
    let n = [
        libm::sin(theta) * libm::cos(phi),
        libm::sin(theta) * libm::sin(phi),
        libm::cos(theta),
    ];
    let chi = kron2(&qubit_state(&n), &qubit_state(&ball(&params[3..6]))) * c(p1, 0.0)
        + kron2(
            &qubit_state(&[-n[0], -n[1], -n[2]]),
            &qubit_state(&ball(&params[6..9])),
        ) * c(1.0 - p1, 0.0);
    (state.matrix() - chi).iter().map(|z| z.norm_sqr()).sum()
}

/// Upper bound on min_χ ‖ρ − χ‖² over zero-discord states (classical on A),
/// found by Nelder–Mead from `restarts` seeded random starting points.
///
/// Restart `k` draws its start from the substream `(seed, k)`, so the result
/// does not depend on evaluation order.
pub fn gqd_by_minimization(state: &TwoQubitState, restarts: usize, seed: u64) -> f64 {
    assert!(restarts >= 1, "at least one restart is required");
    let objective = |p: &[f64]| distance_to_classical(state, p);
    let opts = SimplexOptions::default();
    let mut best = f64::INFINITY;
    for k in 0..restarts {
        let mut rng = crate::rng::substream(seed, k as u64);
        let mut x0 = [0.0; 9];
        x0[0] = rng.random_range(0.0..core::f64::consts::PI);
        x0[1] = rng.random_range(0.0..core::f64::consts::TAU);
        x0[2] = rng.random::<f64>();
        for v in x0[3..].iter_mut() {
            *v = rng.random_range(-0.6..0.6);
        }
        let mut run = simplex::minimize(objective, &x0, 0.3, opts);
        // restart from a fresh simplex until it stops helping; a collapsed
        // simplex can otherwise stall short of the minimum
        for _ in 0..MAX_POLISH {
            let next = simplex::minimize(objective, &run.x, 0.05, opts);
            let gain = run.value - next.value;
            run = if next.value < run.value { next } else { run };
            if gain <= 1e-14 {
                break;
            }
        }
        best = best.min(run.value);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{make_family, random_state, TwoQubitState};
    use nalgebra::Vector3;

    #[test]
    fn k_of_maximally_mixed_is_zero() {
        let k = k_matrix(&TwoQubitState::maximally_mixed().bloch(), Side::A);
        assert_eq!(k.entries, Matrix3::zeros());
    }

    #[test]
    fn k_of_werner_is_scaled_identity() {
        for p in [0.0, 0.3, 0.7, 1.0] {
            let k = k_matrix(&make_family("werner", &[p]).unwrap().bloch(), Side::A);
            assert!((k.entries - Matrix3::identity() * (p * p)).norm() < 1e-15);
        }
    }

    #[test]
    fn k_of_ket_00() {
        let s = make_family("product", &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        let k = k_matrix(&s.bloch(), Side::A);
        assert!((k.entries - Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, 2.0))).norm() < 1e-15);
    }

    #[test]
    fn werner_closed_form() {
        for p in [0.0, 0.3, 0.7, 1.0] {
            let d = gqd_exact(&make_family("werner", &[p]).unwrap(), Side::A);
            assert!((d.value - p * p / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn singlet_has_maximal_discord() {
        let d = gqd_exact(&make_family("werner", &[1.0]).unwrap(), Side::A);
        assert_eq!(d.eigenvalues, [1.0, 1.0, 1.0]);
        assert!((d.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn permuted_side_matches_swapped_state() {
        for seed in 0..50 {
            let s = random_state(seed, 1 + (seed as usize % 4));
            let a = gqd_exact(&s, Side::B).value;
            let b = gqd_exact(&s.swapped(), Side::A).value;
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn minimization_finds_zero_for_classical_state() {
        let s = make_family(
            "classical_AB",
            &[0.3, 1.1, 0.4, 0.2, -0.3, 0.5, 0.0, 0.6, -0.1],
        )
        .unwrap();
        assert!(gqd_exact(&s, Side::A).value < 1e-12);
        assert!(gqd_by_minimization(&s, 8, 1) <= 1e-6);
    }

    #[test]
    fn minimization_matches_werner() {
        let s = make_family("werner", &[0.8]).unwrap();
        let m = gqd_by_minimization(&s, 8, 3);
        assert!((m - 0.32).abs() < 1e-4, "{m}");
    }

    #[test]
    fn minimization_is_deterministic() {
        let s = random_state(11, 2);
        assert_eq!(gqd_by_minimization(&s, 3, 5), gqd_by_minimization(&s, 3, 5));
    }
}
