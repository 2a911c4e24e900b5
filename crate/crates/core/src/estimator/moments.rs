//! Polynomials that turn the eleven outcome values c₁..c₁₁ into the power
//! sums M_k = tr(Kᵏ), plus the machinery that re-derives and audits them.
//!
//! Every M_k is the expectation of ⊗U ⊗V over 2k copies with
//! U = 𝕀 − 4P⁻ on a-pairs and V = 2𝕀 − 4P⁻ on b-pairs. Expanding the
//! product gives one layout per subset of singlet pairs; on identical copies
//! the expectation of a layout factorizes over the connected pieces of its
//! singlet pairs, and each piece is one of the standard layouts. That
//! expansion is what [`derive_moment_table`] computes.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::discord::{k_matrix, Side};
use crate::error::{Error, Result};
use crate::pairing::{settings, standard_layouts, PairKind, PairingLayout, Party};
use crate::rng::child_seed;
use crate::state::random_state;

use super::{outcomes_exact, MomentTriple};

/// Product of outcome values, stored as sorted 1-based indices. The empty
/// monomial is the constant 1.
pub type Monomial = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MomentPolynomial {
    terms: BTreeMap<Monomial, f64>,
}

impl MomentPolynomial {
    pub fn from_terms(terms: &[(f64, &[u8])]) -> Self {
        let mut p = Self::default();
        for (coef, factors) in terms {
            p.add(factors.to_vec(), *coef);
        }
        p
    }

    pub fn add(&mut self, mut monomial: Monomial, coef: f64) {
        monomial.sort_unstable();
        let entry = self.terms.entry(monomial).or_insert(0.0);
        *entry += coef;
    }

    /// Drop zero coefficients.
    pub fn pruned(mut self) -> Self {
        self.terms.retain(|_, v| *v != 0.0);
        self
    }

    pub fn coefficient(&self, monomial: &[u8]) -> f64 {
        self.terms.get(monomial).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        self.terms.keys().cloned().collect()
    }

    pub fn eval(&self, c: &[f64; 11]) -> f64 {
        self.terms
            .iter()
            .map(|(m, coef)| coef * monomial_value(m, c))
            .sum()
    }
}

pub fn monomial_value(m: &[u8], c: &[f64; 11]) -> f64 {
    m.iter().map(|&i| c[i as usize - 1]).product()
}

/// M₁, M₂, M₃ as polynomials in c₁..c₁₁.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub polys: [MomentPolynomial; 3],
}

impl MomentTable {
    /// The outcome-to-moment formulas exactly as tabulated, expanded term by
    /// term. Kept for auditing; the M₃ line carries a sign error on the
    /// linear c₃ term.
    pub fn printed() -> Self {
        Self {
            polys: [
                MomentPolynomial::from_terms(&[
                    (16.0, &[1]),
                    (-8.0, &[2]),
                    (-4.0, &[3]),
                    (2.0, &[]),
                ]),
                MomentPolynomial::from_terms(&[
                    (256.0, &[4]),
                    (128.0, &[7]),
                    (-128.0, &[5]),
                    (-256.0, &[6]),
                    (-16.0, &[3]),
                    (-32.0, &[2]),
                    (16.0, &[3, 3]),
                    (64.0, &[2, 2]),
                    (4.0, &[]),
                ]),
                MomentPolynomial::from_terms(&[
                    (4096.0, &[8]),
                    // -16(32c₂³ + 4c₃³ − 24c₂² − 6c₃² + 6c₂ − 3c₃)
                    (-512.0, &[2, 2, 2]),
                    (-64.0, &[3, 3, 3]),
                    (384.0, &[2, 2]),
                    (96.0, &[3, 3]),
                    (-96.0, &[2]),
                    (48.0, &[3]),
                    // 192(8c₇² + 16c₂c₆ + 4c₃c₅ − 8c₂c₇ − 4c₃c₇ + c₂c₃)
                    (1536.0, &[7, 7]),
                    (3072.0, &[2, 6]),
                    (768.0, &[3, 5]),
                    (-1536.0, &[2, 7]),
                    (-768.0, &[3, 7]),
                    (192.0, &[2, 3]),
                    // 384(c₇ + 8c₁₁ − c₅ − 2c₆ − 8c₉ − 16c₁₀)
                    (384.0, &[7]),
                    (3072.0, &[11]),
                    (-384.0, &[5]),
                    (-768.0, &[6]),
                    (-3072.0, &[9]),
                    (-6144.0, &[10]),
                    (8.0, &[]),
                ]),
            ],
        }
    }

    /// The table used by [`moments_from_outcomes`](super::moments_from_outcomes):
    /// identical to the tabulated one except for the linear c₃ term of M₃,
    /// which the expansion gives as −48c₃.
    pub fn verified() -> Self {
        let mut t = Self::printed();
        t.polys[2].terms.insert(vec![3], -48.0);
        t
    }

    pub fn eval(&self, c: &[f64; 11]) -> MomentTriple {
        MomentTriple {
            m1: self.polys[0].eval(c),
            m2: self.polys[1].eval(c),
            m3: self.polys[2].eval(c),
        }
    }
}

/// Shape of one connected piece of singlet pairs, up to relabeling copies.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum PieceShape {
    /// closed loop through this many copies
    Cycle(usize),
    /// open chain; parties of consecutive pairs, read from the smaller end
    Path(Vec<Party>),
}

fn singlet_pieces(layout: &PairingLayout) -> Vec<PieceShape> {
    let n = layout.n_copies();
    // neighbor through each party's singlet pair, if any
    let mut link = vec![[None::<usize>; 2]; n + 1];
    for p in layout
        .pairs()
        .iter()
        .filter(|p| p.kind == PairKind::Singlet)
    {
        let (m, k) = p.copies;
        link[m][p.party as usize] = Some(k);
        link[k][p.party as usize] = Some(m);
    }
    let degree = |v: usize| link[v].iter().flatten().count();
    let mut seen = vec![false; n + 1];
    let mut pieces = Vec::new();

    let walk = |start: usize, first: Party, seen: &mut Vec<bool>| -> (Vec<Party>, bool) {
        let mut parties = Vec::new();
        let mut v = start;
        let mut party = first;
        seen[v] = true;
        while let Some(next) = link[v][party as usize] {
            parties.push(party);
            v = next;
            if v == start {
                return (parties, true);
            }
            seen[v] = true;
            party = party.other();
        }
        (parties, false)
    };

    // open chains first, from an endpoint
    for v in 1..=n {
        if seen[v] || degree(v) != 1 {
            continue;
        }
        let first = if link[v][0].is_some() {
            Party::A
        } else {
            Party::B
        };
        let (parties, _) = walk(v, first, &mut seen);
        let mut rev = parties.clone();
        rev.reverse();
        pieces.push(PieceShape::Path(parties.min(rev)));
    }
    for v in 1..=n {
        if seen[v] || degree(v) != 2 {
            continue;
        }
        let (parties, closed) = walk(v, Party::A, &mut seen);
        debug_assert!(closed);
        pieces.push(PieceShape::Cycle(parties.len()));
    }
    pieces
}

/// Map from piece shape to the index (1..=11) of the standard layout whose
/// singlet pairs have exactly that shape.
fn standard_shapes() -> Result<BTreeMap<PieceShape, u8>> {
    let mut map = BTreeMap::new();
    for (i, l) in standard_layouts().iter().enumerate() {
        let pieces = singlet_pieces(l);
        if pieces.len() != 1 {
            return Err(Error::UnmatchedFactor);
        }
        map.insert(pieces[0].clone(), i as u8 + 1);
    }
    Ok(map)
}

/// Expand ⊗U ⊗V over the 2-, 4- and 6-copy matchings and factorize every
/// term into standard-layout outcomes.
pub fn derive_moment_table() -> Result<MomentTable> {
    let shapes = standard_shapes()?;
    let mut polys: [MomentPolynomial; 3] = Default::default();
    for (k, setting) in settings().iter().enumerate() {
        for mask in 0..=setting.full_singlet_mask() {
            let mut coef = 1.0;
            for (j, (party, _)) in setting.pairs.iter().enumerate() {
                let singlet = mask >> j & 1 == 1;
                coef *= match (party, singlet) {
                    (_, true) => -4.0,
                    (Party::A, false) => 1.0,
                    (Party::B, false) => 2.0,
                };
            }
            let monomial = singlet_pieces(&setting.layout_for_mask(mask))
                .iter()
                .map(|s| shapes.get(s).copied().ok_or(Error::UnmatchedFactor))
                .collect::<Result<Monomial>>()?;
            polys[k].add(monomial, coef);
        }
    }
    Ok(MomentTable {
        polys: polys.map(MomentPolynomial::pruned),
    })
}

/// A coefficient that differs between the tabulated and the corrected table.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientChange {
    /// moment order, 1..=3
    pub k: usize,
    pub monomial: Monomial,
    pub printed: f64,
    pub corrected: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentAudit {
    pub trials: usize,
    pub seed: u64,
    /// max |M_k(printed) − tr(Kᵏ)| over the trial states
    pub printed_max_deviation: [f64; 3],
    /// Present when some printed line misses the tolerance.
    pub corrected: Option<MomentTable>,
    /// least-squares coefficients before rounding, per refitted order
    pub fitted_raw: [Option<Vec<(Monomial, f64)>>; 3],
    /// max deviation of the corrected table on fresh states
    pub corrected_max_deviation: Option<[f64; 3]>,
    /// whether the refit equals the symbolic expansion term by term
    pub fit_matches_expansion: bool,
    pub diff: Vec<CoefficientChange>,
}

impl MomentAudit {
    pub fn passes(&self) -> bool {
        let ok = |d: &[f64; 3]| d.iter().all(|v| *v <= AUDIT_TOL);
        ok(&self.printed_max_deviation) || self.corrected_max_deviation.as_ref().is_some_and(ok)
    }
}

pub const AUDIT_TOL: f64 = 1e-6;

struct Sample {
    c: [f64; 11],
    oracle: [f64; 3],
}

fn sample_states(trials: usize, seed: u64) -> Result<Vec<Sample>> {
    (0..trials)
        .map(|t| {
            let state = random_state(child_seed(seed, t as u64), 1 + t % 4);
            let k = k_matrix(&state.bloch(), Side::A);
            let c = outcomes_exact(&state)?.c;
            Ok(Sample {
                c,
                oracle: [k.power_trace(1), k.power_trace(2), k.power_trace(3)],
            })
        })
        .collect()
}

fn max_deviation(table: &MomentTable, samples: &[Sample]) -> [f64; 3] {
    let mut dev = [0.0f64; 3];
    for s in samples {
        let m = table.eval(&s.c);
        for (d, (got, want)) in dev.iter_mut().zip([m.m1, m.m2, m.m3].iter().zip(s.oracle)) {
            *d = d.max((got - want).abs());
        }
    }
    dev
}

/// Least-squares coefficients of `basis` reproducing the oracle moment.
fn fit(basis: &[Monomial], samples: &[Sample], k: usize) -> Option<Vec<f64>> {
    let rows = samples.len();
    let cols = basis.len();
    let mut a = DMatrix::from_fn(rows, cols, |r, j| monomial_value(&basis[j], &samples[r].c));
    let scale: Vec<f64> = (0..cols)
        .map(|j| a.column(j).norm().max(f64::MIN_POSITIVE))
        .collect();
    for (j, s) in scale.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / s);
    }
    let b = DVector::from_fn(rows, |r, _| samples[r].oracle[k]);
    let x = a.svd(true, true).solve(&b, 1e-13).ok()?;
    Some(x.iter().zip(&scale).map(|(v, s)| v / s).collect())
}

/// Check the tabulated outcome-to-moment formulas against tr(Kᵏ) on
/// `trials` seeded random states. Orders that miss [`AUDIT_TOL`] are refit
/// by least squares over the monomials of the symbolic expansion; the refit
/// is rounded to integers, checked on fresh states and diffed against the
/// tabulated coefficients.
pub fn verify_moment_formulas(trials: usize, seed: u64) -> Result<MomentAudit> {
    if trials < 30 {
        return Err(Error::InvalidArgument(alloc::format!(
            "moment audit needs at least 30 trials, got {trials}"
        )));
    }
    let printed = MomentTable::printed();
    let samples = sample_states(trials, seed)?;
    let printed_max_deviation = max_deviation(&printed, &samples);

    let mut audit = MomentAudit {
        trials,
        seed,
        printed_max_deviation,
        corrected: None,
        fitted_raw: [None, None, None],
        corrected_max_deviation: None,
        fit_matches_expansion: true,
        diff: Vec::new(),
    };
    if printed_max_deviation.iter().all(|d| *d <= AUDIT_TOL) {
        return Ok(audit);
    }

    let expansion = derive_moment_table()?;
    let mut corrected = printed.clone();
    for k in 0..3 {
        if printed_max_deviation[k] <= AUDIT_TOL {
            continue;
        }
        let basis = expansion.polys[k].monomials();
        let Some(coefs) = fit(&basis, &samples, k) else {
            audit.fit_matches_expansion = false;
            continue;
        };
        let mut poly = MomentPolynomial::default();
        for (m, v) in basis.iter().zip(&coefs) {
            let rounded = libm::round(*v);
            let value = if (v - rounded).abs() < 1e-4 {
                rounded
            } else {
                *v
            };
            poly.add(m.clone(), value);
        }
        let poly = poly.pruned();
        if poly != expansion.polys[k] {
            audit.fit_matches_expansion = false;
        }
        audit.fitted_raw[k] = Some(basis.iter().cloned().zip(coefs).collect());
        corrected.polys[k] = poly;
    }

    let fresh = sample_states(trials, child_seed(seed, u64::MAX))?;
    audit.corrected_max_deviation = Some(max_deviation(&corrected, &fresh));
    audit.diff = table_diff(&printed, &corrected);
    audit.corrected = Some(corrected);
    Ok(audit)
}

/// Coefficients that differ between two tables, in (k, monomial) order.
pub fn table_diff(printed: &MomentTable, corrected: &MomentTable) -> Vec<CoefficientChange> {
    let mut out = Vec::new();
    for k in 0..3 {
        let mut monomials: Vec<Monomial> = printed.polys[k].monomials();
        monomials.extend(corrected.polys[k].monomials());
        monomials.sort();
        monomials.dedup();
        for m in monomials {
            let (p, c) = (
                printed.polys[k].coefficient(&m),
                corrected.polys[k].coefficient(&m),
            );
            if p != c {
                out.push(CoefficientChange {
                    k: k + 1,
                    monomial: m,
                    printed: p,
                    corrected: c,
                });
            }
        }
    }
    out
}

/// Render a monomial as `c2*c2*c7`, or `1` for the constant.
pub fn monomial_name(m: &[u8]) -> alloc::string::String {
    use core::fmt::Write;
    if m.is_empty() {
        return "1".into();
    }
    let mut s = alloc::string::String::new();
    for (i, f) in m.iter().enumerate() {
        if i > 0 {
            s.push('*');
        }
        let _ = write!(s, "c{f}");
    }
    s
}
