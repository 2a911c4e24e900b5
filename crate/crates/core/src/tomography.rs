//! Single-copy Pauli tomography as a baseline for the multi-copy scheme.
//!
//! Nine local settings σⁱ⊗σʲ, each with four outcomes, give every Bloch
//! component by linear inversion. The estimate is projected back onto the
//! density matrices before the discord is read off.

use alloc::vec::Vec;

use crate::discord::{gqd_exact, Side};
use crate::error::{Error, Result};
use crate::estimator::{mean_and_sd, GqdEstimate, Route};
use crate::linalg::{c, kron2, pauli, Mat2, Mat4};
use crate::pairing::{settings, standard_layouts};
use crate::rng::{child_seed, multinomial, substream};
use crate::state::{BlochForm, TwoQubitState};

/// Runs per tomography setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shots {
    Finite(u64),
    /// analytic outcome probabilities in place of frequencies
    Infinite,
}

/// Projector onto the `s = ±1` eigenspace of σⁱ.
fn pauli_projector(i: usize, plus: bool) -> Mat2 {
    let sign = if plus { 1.0 } else { -1.0 };
    (pauli(0) + pauli(i) * c(sign, 0.0)) * c(0.5, 0.0)
}

/// Outcome probabilities of σⁱ⊗σʲ in the order (+,+), (+,−), (−,+), (−,−).
pub fn setting_probabilities(state: &TwoQubitState, i: usize, j: usize) -> [f64; 4] {
    let mut p = [0.0; 4];
    for (k, pk) in p.iter_mut().enumerate() {
        let proj = kron2(&pauli_projector(i, k < 2), &pauli_projector(j, k % 2 == 0));
        *pk = (proj * state.matrix()).trace().re.max(0.0);
    }
    let total: f64 = p.iter().sum();
    p.map(|v| v / total)
}

/// Linear-inversion Bloch estimate from the nine settings.
///
/// Setting (i, j) draws from the substream `(seed, 3(i − 1) + (j − 1))`.
pub fn tomography_bloch(state: &TwoQubitState, shots: Shots, seed: u64) -> Result<BlochForm> {
    if shots == Shots::Finite(0) {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let mut b = BlochForm::zero();
    for i in 1..=3 {
        for j in 1..=3 {
            let probs = setting_probabilities(state, i, j);
            let freq = match shots {
                Shots::Infinite => probs,
                Shots::Finite(n) => {
                    let mut rng = substream(seed, (3 * (i - 1) + (j - 1)) as u64);
                    let counts = multinomial(&mut rng, n, &probs);
                    let mut f = [0.0; 4];
                    for (fk, ck) in f.iter_mut().zip(counts) {
                        *fk = ck as f64 / n as f64;
                    }
                    f
                }
            };
            let [pp, pm, mp, mm] = freq;
            b.t[(i - 1, j - 1)] = pp - pm - mp + mm;
            b.x[i - 1] += (pp + pm - mp - mm) / 3.0;
            b.y[j - 1] += (pp - pm + mp - mm) / 3.0;
        }
    }
    Ok(b)
}

/// Clip negative eigenvalues of a Hermitian unit-trace operator and
/// renormalize the trace.
pub fn project_to_state(m: &Mat4) -> Result<TwoQubitState> {
    let herm = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let clipped: Vec<f64> = eig.eigenvalues.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if !(total > 0.0) {
        return Err(Error::NotPositive {
            min_eigenvalue: eig.eigenvalues.min(),
        });
    }
    let mut out = Mat4::zeros();
    for (k, v) in clipped.iter().enumerate() {
        let col = eig.eigenvectors.column(k);
        out += col * col.adjoint() * c(v / total, 0.0);
    }
    TwoQubitState::new((out + out.adjoint()) * c(0.5, 0.0))
}

/// Tomographic reconstruction of `state` and the discord of the result.
pub fn qst_estimate(
    state: &TwoQubitState,
    shots: Shots,
    seed: u64,
) -> Result<(TwoQubitState, GqdEstimate)> {
    let bloch = tomography_bloch(state, shots, seed)?;
    let rebuilt = project_to_state(&bloch.to_matrix())?;
    let est = GqdEstimate::from_value(gqd_exact(&rebuilt, Side::A), Route::Tomography);
    Ok((rebuilt, est))
}

/// [`qst_estimate`] repeated with per-repeat seeds `child_seed(seed, r)`;
/// reports the mean and the sample standard deviation across repeats.
pub fn qst_estimate_repeated(
    state: &TwoQubitState,
    shots: u64,
    repeats: usize,
    seed: u64,
    side: Side,
) -> Result<GqdEstimate> {
    if repeats < 2 {
        return Err(Error::InvalidArgument(
            "sampled estimates need at least 2 repeats".into(),
        ));
    }
    let mut values = Vec::with_capacity(repeats);
    let mut eig_sum = [0.0; 3];
    for r in 0..repeats {
        let bloch = tomography_bloch(state, Shots::Finite(shots), child_seed(seed, r as u64))?;
        let d = gqd_exact(&project_to_state(&bloch.to_matrix())?, side);
        values.push(d.value);
        for (s, v) in eig_sum.iter_mut().zip(d.eigenvalues) {
            *s += v;
        }
    }
    let (value, std_err) = mean_and_sd(&values);
    Ok(GqdEstimate {
        value,
        std_err,
        eigenvalues: eig_sum.map(|s| s / repeats as f64),
        route: Route::Tomography,
    })
}

/// Measurement-resource figures for the scheme and for tomography.
///
/// r_p counts parameters to be measured, r_c the cost per parameter and
/// r = r_p·r_c the total. The tabulated figures are carried as constants;
/// the two tallies are recomputed from the layouts for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceReport {
    pub r_p_scheme: u32,
    pub r_p_qst: u32,
    pub r_c_scheme: u32,
    pub r_c_qst: u32,
    pub r_scheme: u32,
    pub r_qst: u32,
    pub projector_count_scheme: u32,
    pub settings_scheme: u32,
    /// Σ over the eleven projective measurements of their copy counts
    pub tally_copies_per_measurement: u32,
    /// Σ over the three settings of their copy counts
    pub tally_copies_per_setting: u32,
}

pub fn resource_report() -> ResourceReport {
    let layouts = standard_layouts();
    let sets = settings();
    ResourceReport {
        r_p_scheme: 3,
        r_p_qst: 15,
        r_c_scheme: 44,
        r_c_qst: 15,
        r_scheme: 132,
        r_qst: 225,
        projector_count_scheme: 11,
        settings_scheme: sets.len() as u32,
        tally_copies_per_measurement: layouts.iter().map(|l| l.n_copies() as u32).sum(),
        tally_copies_per_setting: sets.iter().map(|s| s.n_copies as u32).sum(),
    }
}
