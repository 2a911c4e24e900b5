//! Exact expectation values tr[(⊗ pair operators) ρ^⊗n] and joint outcome
//! distributions of the measurement settings.
//!
//! Each copy has exactly one a-pair and one b-pair, so the copies and pairs
//! form disjoint cycles that alternate between a- and b-edges. Walking each
//! cycle multiplies 4×4 transfer matrices: one per copy (ρ reshaped to map
//! its a-qubit index pair onto its b-qubit index pair) and one per pair
//! operator. Nothing larger than 4×4 is ever formed.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{c, singlet_projector, Mat4, C64};
use crate::pairing::{PairKind, PairingLayout, Party, Setting};
use crate::state::TwoQubitState;

/// Residues above this are treated as bugs rather than rounding.
pub const IMAG_TOL: f64 = 1e-10;
/// Probabilities down to this are rounding and get clamped to zero.
pub const NEG_PROB_TOL: f64 = 1e-12;

/// ρ as a transfer matrix R[(r_a c_a), (r_b c_b)] = ρ[(r_a r_b), (c_a c_b)],
/// where r is the row (ket) bit and c the column (bra) bit of each qubit.
fn copy_transfer(rho: &Mat4) -> Mat4 {
    Mat4::from_fn(|i, j| {
        let (ra, ca) = (i / 2, i % 2);
        let (rb, cb) = (j / 2, j % 2);
        rho[(ra * 2 + rb, ca * 2 + cb)]
    })
}

/// Pair operator O on qubits (m, n) as W[(r_m c_m), (r_n c_n)] = O[(c_m c_n), (r_m r_n)].
fn pair_transfer(op: &Mat4) -> Mat4 {
    Mat4::from_fn(|i, j| {
        let (rm, cm) = (i / 2, i % 2);
        let (rn, cn) = (j / 2, j % 2);
        op[(cm * 2 + cn, rm * 2 + rn)]
    })
}

fn pair_operator(kind: PairKind) -> Mat4 {
    match kind {
        PairKind::Singlet => singlet_projector(),
        PairKind::Identity => Mat4::identity(),
    }
}

/// tr[(⊗ pair operators)(ρ^⊗n)] for a layout over n copies of `state`.
pub fn expect_layout(layout: &PairingLayout, state: &TwoQubitState) -> Result<f64> {
    let z = expect_layout_complex(layout, state);
    if z.im.abs() > IMAG_TOL {
        return Err(Error::ImaginaryResidue(z.im));
    }
    Ok(z.re)
}

fn expect_layout_complex(layout: &PairingLayout, state: &TwoQubitState) -> C64 {
    let r = copy_transfer(state.matrix());
    let rt = r.transpose();
    let singlet_w = pair_transfer(&singlet_projector());
    let identity_w = pair_transfer(&pair_operator(PairKind::Identity));

    let n = layout.n_copies();
    let mut visited = vec![false; n + 1];
    let mut total = c(1.0, 0.0);
    for start in 1..=n {
        if visited[start] {
            continue;
        }
        // leave `start` through its a-qubit; the walk returns through its b-qubit
        let mut product = Mat4::identity();
        let mut copy = start;
        let mut exit = Party::A;
        loop {
            visited[copy] = true;
            product *= if exit == Party::A { rt } else { r };
            let pair = layout.partner_pair(crate::pairing::QubitSlot { copy, party: exit });
            let w = match pair.kind {
                PairKind::Singlet => singlet_w,
                PairKind::Identity => identity_w,
            };
            let next = if pair.copies.0 == copy {
                product *= w;
                pair.copies.1
            } else {
                product *= w.transpose();
                pair.copies.0
            };
            copy = next;
            exit = exit.other();
            if copy == start && exit == Party::A {
                break;
            }
        }
        total *= product.trace();
    }
    total
}

/// Dense reference: builds the full 4ⁿ-dimensional operator and ρ^⊗n and
/// traces their product. Limited to n ≤ 4.
pub fn expect_layout_dense_oracle(layout: &PairingLayout, state: &TwoQubitState) -> Result<f64> {
    let n = layout.n_copies();
    if n > 4 {
        return Err(Error::TooManyCopies(n));
    }
    let qubits = 2 * n;
    let dim = 1usize << qubits;
    // qubit order a1 b1 a2 b2 ...; bit position counted from the most significant
    let bit = |index: usize, copy: usize, party: Party| -> usize {
        let q = 2 * (copy - 1) + party as usize;
        index >> (qubits - 1 - q) & 1
    };

    let rho = state.matrix();
    let rho_dyn = DMatrix::from_fn(4, 4, |i, j| rho[(i, j)]);
    let mut rho_n = rho_dyn.clone();
    for _ in 1..n {
        rho_n = rho_n.kronecker(&rho_dyn);
    }

    let ops: Vec<(Mat4, _)> = layout
        .pairs()
        .iter()
        .map(|p| (pair_operator(p.kind), *p))
        .collect();
    let op = DMatrix::from_fn(dim, dim, |i, j| {
        ops.iter().fold(c(1.0, 0.0), |acc, (o, p)| {
            let (m, k) = p.copies;
            let row = bit(i, m, p.party) * 2 + bit(i, k, p.party);
            let col = bit(j, m, p.party) * 2 + bit(j, k, p.party);
            acc * o[(row, col)]
        })
    });

    let z = (op * rho_n).trace();
    if z.im.abs() > IMAG_TOL {
        return Err(Error::ImaginaryResidue(z.im));
    }
    Ok(z.re)
}

/// Probabilities of all 2^k outcome patterns of a setting. Bit `j` of a
/// pattern is 1 when pair `j` of the setting reported the singlet.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    pub setting: Setting,
    pub probs: Vec<f64>,
}

impl OutcomeDistribution {
    /// Probability that every pair in `mask` reported singlet, others free.
    pub fn marginal(&self, mask: u32) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(pattern, _)| *pattern as u32 & mask == mask)
            .map(|(_, p)| p)
            .sum()
    }
}

/// Joint distribution of the pairwise {P⁻, 𝕀 − P⁻} outcomes of `setting`.
///
/// Complement outcomes come from inclusion–exclusion over layouts with
/// singlets and identities only: 𝕀 − P⁻ = 𝕀 − P⁻ per pair.
pub fn joint_distribution(setting: &Setting, state: &TwoQubitState) -> Result<OutcomeDistribution> {
    let k = setting.pair_count();
    let size = 1usize << k;
    let singlet_expect = (0..size)
        .map(|mask| expect_layout(&setting.layout_for_mask(mask as u32), state))
        .collect::<Result<Vec<f64>>>()?;

    let mut probs = vec![0.0; size];
    for (pattern, prob) in probs.iter_mut().enumerate() {
        let zeros = !pattern & (size - 1);
        // iterate subsets of the zero bits in a fixed order
        let mut acc = 0.0;
        let mut sub = zeros;
        loop {
            let sign = if sub.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * singlet_expect[pattern | sub];
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & zeros;
        }
        if acc < -NEG_PROB_TOL {
            return Err(Error::NegativeProbability(acc));
        }
        *prob = acc.max(0.0);
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::DistributionNotNormalized(total));
    }
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(OutcomeDistribution {
        setting: setting.clone(),
        probs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::{settings, standard_layout, standard_layouts, PairOp};
    use crate::state::{make_family, random_state};

    #[test]
    fn maximally_mixed_factorizes() {
        let s = TwoQubitState::maximally_mixed();
        for l in standard_layouts() {
            let e = expect_layout(&l, &s).unwrap();
            let want = 0.25f64.powi(l.singlet_count() as i32);
            assert!((e - want).abs() < 1e-15, "{:?}", l.label());
        }
        assert!(
            (expect_layout(&standard_layout("P8").unwrap(), &s).unwrap() - 1.0 / 4096.0).abs()
                < 1e-18
        );
    }

    #[test]
    fn p2_depends_only_on_local_a_vector() {
        for seed in 0..20 {
            let s = random_state(seed, 2);
            let x2 = s.bloch().x.norm_squared();
            let e = expect_layout(&standard_layout("P2").unwrap(), &s).unwrap();
            assert!((e - (1.0 - x2) / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn p1_on_werner() {
        for p in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let s = make_family("werner", &[p]).unwrap();
            let e = expect_layout(&standard_layout("P1").unwrap(), &s).unwrap();
            assert!((e - (1.0 + 3.0 * p * p) / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn dense_oracle_refuses_six_copies() {
        let s = TwoQubitState::maximally_mixed();
        assert_eq!(
            expect_layout_dense_oracle(&standard_layout("P8").unwrap(), &s),
            Err(Error::TooManyCopies(6))
        );
    }

    #[test]
    fn p3_on_mixed_both_routes() {
        let s = TwoQubitState::maximally_mixed();
        let l = standard_layout("P3").unwrap();
        assert!((expect_layout(&l, &s).unwrap() - 0.25).abs() < 1e-15);
        assert!((expect_layout_dense_oracle(&l, &s).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn p4_on_singlet_both_routes() {
        let s = make_family("werner", &[1.0]).unwrap();
        let l = standard_layout("P4").unwrap();
        let fast = expect_layout(&l, &s).unwrap();
        let dense = expect_layout_dense_oracle(&l, &s).unwrap();
        assert!((fast - dense).abs() < 1e-12);
    }

    #[test]
    fn order_insensitive() {
        let s = random_state(3, 4);
        for l in standard_layouts() {
            let mut pairs: Vec<PairOp> = l.pairs().to_vec();
            pairs.reverse();
            let r = PairingLayout::new(l.n_copies(), pairs).unwrap();
            assert!(
                (expect_layout(&l, &s).unwrap() - expect_layout(&r, &s).unwrap()).abs() < 1e-15
            );
        }
    }

    #[test]
    fn s2_on_maximally_mixed() {
        let d = joint_distribution(&settings()[0], &TwoQubitState::maximally_mixed()).unwrap();
        let want = [9.0 / 16.0, 3.0 / 16.0, 3.0 / 16.0, 1.0 / 16.0];
        for (p, w) in d.probs.iter().zip(want) {
            assert!((p - w).abs() < 1e-15);
        }
    }

    #[test]
    fn s6_on_ket_00_never_all_singlet() {
        let s = make_family("product", &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        let d = joint_distribution(&settings()[2], &s).unwrap();
        assert_eq!(d.probs.len(), 64);
        assert!(d.probs[63].abs() < 1e-15);
    }

    #[test]
    fn marginals_match_single_singlet_layouts() {
        let st = random_state(8, 3);
        for s in settings() {
            let d = joint_distribution(&s, &st).unwrap();
            assert!((d.probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            for k in 0..s.pair_count() {
                let direct = expect_layout(&s.layout_for_mask(1 << k), &st).unwrap();
                assert!((d.marginal(1 << k) - direct).abs() < 1e-10);
            }
        }
    }
}
