//! From measurement outcomes to a discord estimate.
//!
//! The pipeline is: outcome values c₁..c₁₁ (exact expectations or sampled
//! frequencies) → power sums M₁, M₂, M₃ of K → eigenvalues of K → D.

mod moments;
mod spectrum;

pub use moments::{
    derive_moment_table, monomial_name, table_diff, verify_moment_formulas, CoefficientChange,
    MomentAudit, MomentPolynomial, MomentTable, Monomial, AUDIT_TOL,
};
pub use spectrum::{
    eigenvalues_from_moments, elementary_symmetric, Spectrum, SpectrumRoute, EXACT_IMAG_TOL,
};

use alloc::vec::Vec;

use crate::contraction::{expect_layout, joint_distribution, OutcomeDistribution};
use crate::discord::{gqd_exact, GqdValue, Side};
use crate::error::{Error, Result};
use crate::pairing::{setting_of, settings, standard_layouts};
use crate::rng::{child_seed, multinomial, substream};
use crate::state::TwoQubitState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Exact,
    Sampled { shots: u64, seed: u64 },
}

/// The eleven outcome values, `c[i - 1]` holding cᵢ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeVector {
    pub c: [f64; 11],
    pub provenance: Provenance,
}

impl OutcomeVector {
    pub fn exact(c: [f64; 11]) -> Self {
        Self {
            c,
            provenance: Provenance::Exact,
        }
    }

    /// cᵢ for 1-based `i`.
    pub fn get(&self, i: usize) -> f64 {
        self.c[i - 1]
    }
}

/// Power sums M_k = Σ λᵢᵏ of the K spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MomentTriple {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

impl MomentTriple {
    /// M₁²/3 ≤ M₂ ≤ M₁² (within 1e-9), which holds for any three
    /// non-negative reals.
    pub fn within_power_mean_bounds(&self) -> bool {
        let sq = self.m1 * self.m1;
        self.m1 >= -1e-9 && self.m2 >= sq / 3.0 - 1e-9 && self.m2 <= sq + 1e-9
    }
}

/// cᵢ = tr[Pᵢ ρ^⊗n] for the eleven standard layouts.
pub fn outcomes_exact(state: &TwoQubitState) -> Result<OutcomeVector> {
    let mut c = [0.0; 11];
    for (ci, layout) in c.iter_mut().zip(standard_layouts()) {
        let v = expect_layout(&layout, state)?;
        if !(-1e-12..=1.0 + 1e-12).contains(&v) {
            return Err(Error::NegativeProbability(v));
        }
        *ci = v.clamp(0.0, 1.0);
    }
    Ok(OutcomeVector::exact(c))
}

/// Exact joint distributions of the three settings, in setting order.
pub fn setting_distributions(state: &TwoQubitState) -> Result<Vec<OutcomeDistribution>> {
    settings()
        .iter()
        .map(|s| joint_distribution(s, state))
        .collect()
}

/// Simulate `shots` runs of every setting and read off cᵢ as the fraction
/// of runs in which all singlet pairs of Pᵢ reported the singlet.
///
/// Setting `j` draws from the substream `(seed, j)`.
pub fn outcomes_sampled(state: &TwoQubitState, shots: u64, seed: u64) -> Result<OutcomeVector> {
    let dists = setting_distributions(state)?;
    sample_outcomes(&dists, shots, seed)
}

/// [`outcomes_sampled`] for precomputed distributions.
pub fn sample_outcomes(
    dists: &[OutcomeDistribution],
    shots: u64,
    seed: u64,
) -> Result<OutcomeVector> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let layouts = standard_layouts();
    let mut c = [0.0; 11];
    for (j, dist) in dists.iter().enumerate() {
        let mut rng = substream(seed, j as u64);
        let counts = multinomial(&mut rng, shots, &dist.probs);
        for &i in &dist.setting.covered {
            let mask = dist
                .setting
                .mask_of(&layouts[i - 1])
                .expect("covered layouts share the matching");
            let hits: u64 = counts
                .iter()
                .enumerate()
                .filter(|(pattern, _)| *pattern as u32 & mask == mask)
                .map(|(_, n)| n)
                .sum();
            c[i - 1] = hits as f64 / shots as f64;
        }
    }
    debug_assert!((1..=11).all(|i| setting_of(i) < dists.len()));
    Ok(OutcomeVector {
        c,
        provenance: Provenance::Sampled { shots, seed },
    })
}

/// Evaluate the verified outcome-to-moment polynomials.
pub fn moments_from_outcomes(c: &OutcomeVector) -> MomentTriple {
    MomentTable::verified().eval(&c.c)
}

/// Exchange the roles of the subsystems: (c₂↔c₃), (c₅↔c₆), (c₉↔c₁₀).
/// The moments of the result are those of K′ = y yᵗ + Tᵗ T.
pub fn permute_outcomes(c: &OutcomeVector) -> OutcomeVector {
    let mut out = *c;
    for (i, j) in [(2, 3), (5, 6), (9, 10)] {
        out.c.swap(i - 1, j - 1);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    BlochExact,
    SchemeExact,
    SchemeSampled,
    Tomography,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::BlochExact => "bloch-exact",
            Route::SchemeExact => "scheme-exact",
            Route::SchemeSampled => "scheme-sampled",
            Route::Tomography => "qst",
        }
    }
}

/// A discord value with its spectrum and statistical spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GqdEstimate {
    pub value: f64,
    /// sample standard deviation across repeats; 0 for exact routes
    pub std_err: f64,
    pub eigenvalues: [f64; 3],
    pub route: Route,
}

impl GqdEstimate {
    pub fn bloch_exact(state: &TwoQubitState, side: Side) -> Self {
        Self::from_value(gqd_exact(state, side), Route::BlochExact)
    }

    pub(crate) fn from_value(v: GqdValue, route: Route) -> Self {
        Self {
            value: v.value,
            std_err: 0.0,
            eigenvalues: v.eigenvalues,
            route,
        }
    }
}

pub const DEFAULT_REPEATS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    SchemeExact,
    /// `repeats` independent experiments of `shots` runs per setting each.
    SchemeSampled {
        shots: u64,
        repeats: usize,
        seed: u64,
    },
}

/// Everything the scheme pipeline produced for one state.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeEstimate {
    pub estimate: GqdEstimate,
    /// exact outcomes, or the mean over repeats when sampled
    pub outcomes: OutcomeVector,
    /// moments of the exact outcomes, or the mean over repeats
    pub moments: MomentTriple,
    /// number of repeats whose spectrum needed clamping or had a complex pair
    pub noisy_repeats: usize,
}

fn discord_from_outcomes(
    c: &OutcomeVector,
    side: Side,
    route: SpectrumRoute,
) -> Result<(GqdValue, MomentTriple, Spectrum)> {
    let c = match side {
        Side::A => *c,
        Side::B => permute_outcomes(c),
    };
    let m = moments_from_outcomes(&c);
    let spectrum = eigenvalues_from_moments(&m, route)?;
    Ok((GqdValue::from_eigenvalues(spectrum.values), m, spectrum))
}

/// Run the multi-copy measurement pipeline on `state`.
///
/// `side` selects D (A) or the permuted D′ (B); the latter reuses the same
/// outcomes with the subsystem roles exchanged.
pub fn estimate_gqd(state: &TwoQubitState, mode: Mode, side: Side) -> Result<SchemeEstimate> {
    match mode {
        Mode::SchemeExact => {
            let outcomes = outcomes_exact(state)?;
            let (value, moments, _) = discord_from_outcomes(&outcomes, side, SpectrumRoute::Exact)?;
            Ok(SchemeEstimate {
                estimate: GqdEstimate::from_value(value, Route::SchemeExact),
                outcomes,
                moments,
                noisy_repeats: 0,
            })
        }
        Mode::SchemeSampled {
            shots,
            repeats,
            seed,
        } => {
            if repeats < 2 {
                return Err(Error::InvalidArgument(
                    "sampled estimates need at least 2 repeats".into(),
                ));
            }
            let dists = setting_distributions(state)?;
            let mut values = Vec::with_capacity(repeats);
            let mut eig_sum = [0.0; 3];
            let mut c_sum = [0.0; 11];
            let mut m_sum = MomentTriple::default();
            let mut noisy_repeats = 0;
            for r in 0..repeats {
                let c = sample_outcomes(&dists, shots, child_seed(seed, r as u64))?;
                let (value, m, spectrum) = discord_from_outcomes(&c, side, SpectrumRoute::Sampled)?;
                values.push(value.value);
                for (s, v) in eig_sum.iter_mut().zip(value.eigenvalues) {
                    *s += v;
                }
                for (s, v) in c_sum.iter_mut().zip(c.c) {
                    *s += v;
                }
                m_sum.m1 += m.m1;
                m_sum.m2 += m.m2;
                m_sum.m3 += m.m3;
                noisy_repeats += spectrum.is_noisy() as usize;
            }
            let n = repeats as f64;
            let (mean, sd) = mean_and_sd(&values);
            Ok(SchemeEstimate {
                estimate: GqdEstimate {
                    value: mean,
                    std_err: sd,
                    eigenvalues: eig_sum.map(|s| s / n),
                    route: Route::SchemeSampled,
                },
                outcomes: OutcomeVector {
                    c: c_sum.map(|s| s / n),
                    provenance: Provenance::Sampled { shots, seed },
                },
                moments: MomentTriple {
                    m1: m_sum.m1 / n,
                    m2: m_sum.m2 / n,
                    m3: m_sum.m3 / n,
                },
                noisy_repeats,
            })
        }
    }
}

/// Mean and sample standard deviation (n − 1 denominator).
pub fn mean_and_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discord::k_matrix;
    use crate::state::{make_family, random_state};

    const MIXED_C: [f64; 11] = [
        1.0 / 16.0,
        0.25,
        0.25,
        1.0 / 256.0,
        1.0 / 64.0,
        1.0 / 64.0,
        1.0 / 16.0,
        1.0 / 4096.0,
        1.0 / 1024.0,
        1.0 / 1024.0,
        1.0 / 256.0,
    ];

    #[test]
    fn maximally_mixed_outcomes() {
        let c = outcomes_exact(&TwoQubitState::maximally_mixed()).unwrap();
        for (a, b) in c.c.iter().zip(MIXED_C) {
            assert!((a - b).abs() < 1e-16);
        }
        let m = moments_from_outcomes(&c);
        assert!(m.m1.abs() < 1e-13 && m.m2.abs() < 1e-13 && m.m3.abs() < 1e-13);
    }

    #[test]
    fn ket_00_outcomes_and_first_moment() {
        let s = make_family("product", &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        let c = outcomes_exact(&s).unwrap();
        assert!(c.get(1).abs() < 1e-15 && c.get(2).abs() < 1e-15 && c.get(3).abs() < 1e-15);
        assert!((moments_from_outcomes(&c).m1 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn werner_outcomes_and_moments() {
        for p in [0.0f64, 0.25, 0.6, 1.0] {
            let c = outcomes_exact(&make_family("werner", &[p]).unwrap()).unwrap();
            assert!((c.get(2) - 0.25).abs() < 1e-15 && (c.get(3) - 0.25).abs() < 1e-15);
            let m = moments_from_outcomes(&c);
            let l = p * p;
            assert!((m.m1 - 3.0 * l).abs() < 1e-9);
            assert!((m.m2 - 3.0 * l * l).abs() < 1e-9);
            assert!((m.m3 - 3.0 * l * l * l).abs() < 1e-9);
        }
    }

    #[test]
    fn permutation_is_an_involution() {
        let c = outcomes_exact(&random_state(2, 3)).unwrap();
        assert_eq!(permute_outcomes(&permute_outcomes(&c)), c);
        let mixed = OutcomeVector::exact(MIXED_C);
        assert_eq!(permute_outcomes(&mixed), mixed);
    }

    #[test]
    fn permuted_moments_are_those_of_k_prime() {
        for seed in 0..40 {
            let s = random_state(seed, 1 + seed as usize % 4);
            let m = moments_from_outcomes(&permute_outcomes(&outcomes_exact(&s).unwrap()));
            let k = k_matrix(&s.bloch(), Side::B);
            assert!((m.m1 - k.power_trace(1)).abs() < 1e-9);
            assert!((m.m2 - k.power_trace(2)).abs() < 1e-9);
            assert!((m.m3 - k.power_trace(3)).abs() < 1e-9);
        }
    }

    #[test]
    fn scheme_exact_matches_closed_form() {
        for seed in 0..60 {
            let s = random_state(seed, 1 + seed as usize % 4);
            for side in [Side::A, Side::B] {
                let est = estimate_gqd(&s, Mode::SchemeExact, side).unwrap();
                let want = gqd_exact(&s, side).value;
                assert!(
                    (est.estimate.value - want).abs() < 1e-8,
                    "seed {seed}: {} vs {want}",
                    est.estimate.value
                );
                assert_eq!(est.estimate.std_err, 0.0);
            }
        }
    }

    #[test]
    fn single_shot_outcomes_are_binary() {
        let c = outcomes_sampled(&random_state(1, 4), 1, 3).unwrap();
        assert!(c.c.iter().all(|v| *v == 0.0 || *v == 1.0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let s = random_state(5, 2);
        assert_eq!(
            outcomes_sampled(&s, 1000, 8).unwrap(),
            outcomes_sampled(&s, 1000, 8).unwrap()
        );
        assert_ne!(
            outcomes_sampled(&s, 1000, 8).unwrap(),
            outcomes_sampled(&s, 1000, 9).unwrap()
        );
    }

    #[test]
    fn sampled_needs_repeats_and_shots() {
        let s = random_state(5, 2);
        let one = Mode::SchemeSampled {
            shots: 10,
            repeats: 1,
            seed: 0,
        };
        assert!(estimate_gqd(&s, one, Side::A).is_err());
        assert!(outcomes_sampled(&s, 0, 0).is_err());
    }

    #[test]
    fn power_mean_bounds_on_exact_moments() {
        for seed in 0..40 {
            let m = moments_from_outcomes(
                &outcomes_exact(&random_state(seed, 1 + seed as usize % 4)).unwrap(),
            );
            assert!(m.within_power_mean_bounds());
        }
    }
}
