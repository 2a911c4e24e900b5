//! Pair operators placed across the qubits of n identical copies.
//!
//! A layout puts either the singlet projector P⁻ or the identity on disjoint
//! pairs of same-side qubits so that every qubit belongs to exactly one pair.
//! The eleven standard layouts P1..P11 and the three measurement settings
//! that produce them are defined here.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};

/// The two halves of every copy: qubit `a` (subsystem A) and qubit `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Party {
    A,
    B,
}

impl Party {
    pub fn other(self) -> Self {
        match self {
            Party::A => Party::B,
            Party::B => Party::A,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Party::A => 'a',
            Party::B => 'b',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitSlot {
    /// 1-based copy index
    pub copy: usize,
    pub party: Party,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PairKind {
    Singlet,
    Identity,
}

/// P⁻ or 𝕀 acting on qubits `party` of copies `copies.0` and `copies.1`.
///
/// The copy pair is unordered; it is stored with the smaller index first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairOp {
    pub party: Party,
    pub copies: (usize, usize),
    pub kind: PairKind,
}

impl PairOp {
    pub fn new(party: Party, m: usize, n: usize, kind: PairKind) -> Result<Self> {
        if m == n {
            return Err(Error::InvalidLayout(format!(
                "pair {}{m}{}{n} joins a qubit to itself",
                party.letter(),
                party.letter()
            )));
        }
        Ok(Self {
            party,
            copies: (m.min(n), m.max(n)),
            kind,
        })
    }

    pub fn slots(&self) -> [QubitSlot; 2] {
        [
            QubitSlot {
                copy: self.copies.0,
                party: self.party,
            },
            QubitSlot {
                copy: self.copies.1,
                party: self.party,
            },
        ]
    }

    pub fn name(&self) -> String {
        let l = self.party.letter();
        format!("{l}{}{l}{}", self.copies.0, self.copies.1)
    }
}

/// A perfect matching of the 2n qubits of n copies into same-side pairs.
///
/// Equality compares the set of (pair, kind) entries; the pair order and the
/// label do not take part.
#[derive(Debug, Clone)]
pub struct PairingLayout {
    n_copies: usize,
    pairs: Vec<PairOp>,
    label: Option<String>,
}

impl PartialEq for PairingLayout {
    fn eq(&self, other: &Self) -> bool {
        self.n_copies == other.n_copies && self.canonical_pairs() == other.canonical_pairs()
    }
}

impl Eq for PairingLayout {}

impl PairingLayout {
    pub fn new(n_copies: usize, pairs: Vec<PairOp>) -> Result<Self> {
        if n_copies < 2 || n_copies % 2 != 0 {
            return Err(Error::InvalidLayout(format!(
                "copy count must be even and at least 2, got {n_copies}"
            )));
        }
        let mut seen = vec![[false; 2]; n_copies];
        for p in &pairs {
            for s in p.slots() {
                if s.copy == 0 || s.copy > n_copies {
                    return Err(Error::InvalidLayout(format!(
                        "pair {} refers to a copy outside 1..={n_copies}",
                        p.name()
                    )));
                }
                let used = &mut seen[s.copy - 1][s.party as usize];
                if *used {
                    return Err(Error::InvalidLayout(format!(
                        "qubit {}{} appears in more than one pair",
                        s.party.letter(),
                        s.copy
                    )));
                }
                *used = true;
            }
        }
        if let Some(m) = seen.iter().position(|s| !s[0] || !s[1]) {
            let party = if seen[m][0] { 'b' } else { 'a' };
            return Err(Error::InvalidLayout(format!(
                "qubit {party}{} is not paired",
                m + 1
            )));
        }
        Ok(Self {
            n_copies,
            pairs,
            label: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn n_copies(&self) -> usize {
        self.n_copies
    }

    pub fn pairs(&self) -> &[PairOp] {
        &self.pairs
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn singlet_count(&self) -> usize {
        self.pairs
            .iter()
            .filter(|p| p.kind == PairKind::Singlet)
            .count()
    }

    /// Pairs sorted into a canonical order.
    pub fn canonical_pairs(&self) -> Vec<PairOp> {
        let mut v = self.pairs.clone();
        v.sort();
        v
    }

    /// The underlying matching, ignoring kinds.
    pub fn matching(&self) -> Vec<(Party, (usize, usize))> {
        let mut v: Vec<_> = self.pairs.iter().map(|p| (p.party, p.copies)).collect();
        v.sort();
        v
    }

    /// The pair acting on `slot`.
    pub fn partner_pair(&self, slot: QubitSlot) -> &PairOp {
        self.pairs
            .iter()
            .find(|p| p.party == slot.party && (p.copies.0 == slot.copy || p.copies.1 == slot.copy))
            .expect("validated layouts pair every qubit")
    }

    /// Tensor-product name, e.g. `I(a1a6) P-(a2a3) ...`.
    pub fn formula(&self) -> String {
        let mut out = String::new();
        for (i, p) in self.pairs.iter().enumerate() {
            if i > 0 {
                out.push_str(" ⊗ ");
            }
            let op = match p.kind {
                PairKind::Singlet => "P-",
                PairKind::Identity => "I",
            };
            let _ = write!(out, "{op}({})", p.name());
        }
        out
    }
}

fn layout(n: usize, spec: &[(Party, usize, usize, bool)], label: &str) -> PairingLayout {
    let pairs = spec
        .iter()
        .map(|&(party, m, k, singlet)| {
            let kind = if singlet {
                PairKind::Singlet
            } else {
                PairKind::Identity
            };
            PairOp::new(party, m, k, kind).expect("static layout")
        })
        .collect();
    PairingLayout::new(n, pairs)
        .expect("static layout")
        .with_label(label)
}

const MATCHING_2: [(Party, usize, usize); 2] = [(Party::A, 1, 2), (Party::B, 1, 2)];
const MATCHING_4: [(Party, usize, usize); 4] = [
    (Party::A, 1, 4),
    (Party::A, 2, 3),
    (Party::B, 1, 2),
    (Party::B, 3, 4),
];
const MATCHING_6: [(Party, usize, usize); 6] = [
    (Party::A, 1, 6),
    (Party::A, 2, 3),
    (Party::A, 4, 5),
    (Party::B, 1, 2),
    (Party::B, 3, 4),
    (Party::B, 5, 6),
];

/// Kinds of each standard layout over its setting's matching, 1 = singlet.
const STANDARD_KINDS: [(usize, &[bool]); 11] = [
    (2, &[true, true]),
    (2, &[true, false]),
    (2, &[false, true]),
    (4, &[true, true, true, true]),
    (4, &[true, false, true, true]),
    (4, &[true, true, true, false]),
    (4, &[false, true, true, false]),
    (6, &[true, true, true, true, true, true]),
    (6, &[true, true, false, true, true, true]),
    (6, &[true, true, true, true, true, false]),
    (6, &[false, true, true, true, true, false]),
];

fn matching_for(n: usize) -> &'static [(Party, usize, usize)] {
    match n {
        2 => &MATCHING_2,
        4 => &MATCHING_4,
        6 => &MATCHING_6,
        _ => unreachable!("standard settings use 2, 4 or 6 copies"),
    }
}

/// The eleven projector layouts P1..P11, in order.
pub fn standard_layouts() -> Vec<PairingLayout> {
    STANDARD_KINDS
        .iter()
        .enumerate()
        .map(|(i, &(n, kinds))| {
            let spec: Vec<_> = matching_for(n)
                .iter()
                .zip(kinds)
                .map(|(&(p, m, k), &s)| (p, m, k, s))
                .collect();
            layout(n, &spec, &format!("P{}", i + 1))
        })
        .collect()
}

/// Look up a standard layout by label (`P1`..`P11`, case-insensitive).
pub fn standard_layout(label: &str) -> Option<PairingLayout> {
    standard_layouts()
        .into_iter()
        .find(|l| l.label().is_some_and(|x| x.eq_ignore_ascii_case(label)))
}

/// One measurement setting: every pair of a fixed matching is measured in
/// the two-outcome basis {P⁻, 𝕀 − P⁻}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Setting {
    pub n_copies: usize,
    /// Pair order defines the bit order of outcome patterns: bit `k` refers
    /// to `pairs[k]`.
    pub pairs: Vec<(Party, (usize, usize))>,
    /// 1-based indices of the standard layouts obtainable from this setting.
    pub covered: Vec<usize>,
}

impl Setting {
    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// The layout with singlets on the pairs whose bit is set in `mask`.
    pub fn layout_for_mask(&self, mask: u32) -> PairingLayout {
        let pairs = self
            .pairs
            .iter()
            .enumerate()
            .map(|(k, &(party, (m, n)))| {
                let kind = if mask >> k & 1 == 1 {
                    PairKind::Singlet
                } else {
                    PairKind::Identity
                };
                PairOp::new(party, m, n, kind).expect("setting pairs are valid")
            })
            .collect();
        PairingLayout::new(self.n_copies, pairs).expect("setting matching is perfect")
    }

    /// Singlet mask of `layout` if it shares this setting's matching.
    pub fn mask_of(&self, layout: &PairingLayout) -> Option<u32> {
        if layout.n_copies() != self.n_copies {
            return None;
        }
        let mut mask = 0;
        let mut hit = 0;
        for p in layout.pairs() {
            let k = self
                .pairs
                .iter()
                .position(|&(party, c)| party == p.party && c == p.copies)?;
            hit |= 1 << k;
            if p.kind == PairKind::Singlet {
                mask |= 1 << k;
            }
        }
        (hit == (1 << self.pairs.len()) - 1).then_some(mask)
    }

    pub fn full_singlet_mask(&self) -> u32 {
        (1 << self.pairs.len()) - 1
    }

    pub fn name(&self) -> String {
        format!("S{}", self.n_copies)
    }
}

/// The three settings S2, S4, S6 realized by the all-singlet layouts P1, P4
/// and P8.
pub fn settings() -> [Setting; 3] {
    let make = |n: usize, covered: Vec<usize>| Setting {
        n_copies: n,
        pairs: matching_for(n)
            .iter()
            .map(|&(p, m, k)| (p, (m, k)))
            .collect(),
        covered,
    };
    [
        make(2, vec![1, 2, 3]),
        make(4, vec![4, 5, 6, 7]),
        make(6, vec![8, 9, 10, 11]),
    ]
}

/// Setting index (0..3) that realizes standard layout `i` (1-based).
pub fn setting_of(i: usize) -> usize {
    match i {
        1..=3 => 0,
        4..=7 => 1,
        8..=11 => 2,
        _ => panic!("standard layout index {i} out of range"),
    }
}

/// ASCII diagram in the spirit of the usual pairing figures.
///
/// One row per copy with the `a` qubit on the left and the `b` qubit on the
/// right, joined by dots. Each pair gets its own vertical lane: a-side lanes
/// to the left, b-side lanes to the right. Singlet lanes are drawn with `|`
/// and `*` endpoints, identity lanes with `:` and `o` endpoints. The pair
/// list follows the drawing.
pub fn render_layout(layout: &PairingLayout) -> String {
    let n = layout.n_copies();
    // pairs whose copy ranges do not overlap share a lane; wider arcs sit further out
    let lanes = |party: Party| -> Vec<Vec<PairOp>> {
        let mut pairs: Vec<PairOp> = layout
            .pairs()
            .iter()
            .copied()
            .filter(|p| p.party == party)
            .collect();
        pairs.sort_by_key(|p| (core::cmp::Reverse(p.copies.1 - p.copies.0), p.copies));
        let mut lanes: Vec<Vec<PairOp>> = Vec::new();
        for p in pairs {
            let free = lanes.iter().position(|lane| {
                lane.iter()
                    .all(|q| q.copies.1 < p.copies.0 || p.copies.1 < q.copies.0)
            });
            match free {
                Some(i) => lanes[i].push(p),
                None => lanes.push(vec![p]),
            }
        }
        lanes
    };
    let a_lanes = lanes(Party::A);
    let b_lanes: Vec<Vec<PairOp>> = lanes(Party::B).into_iter().rev().collect();

    let cell = |lane: &[PairOp], row: usize| -> char {
        let Some(p) = lane.iter().find(|p| p.copies.0 <= row && row <= p.copies.1) else {
            return ' ';
        };
        let singlet = p.kind == PairKind::Singlet;
        match (row == p.copies.0 || row == p.copies.1, singlet) {
            (true, true) => '*',
            (true, false) => 'o',
            (false, true) => '|',
            (false, false) => ':',
        }
    };

    let mut out = String::new();
    let title = layout
        .label()
        .map(ToString::to_string)
        .unwrap_or_else(|| "layout".to_string());
    let _ = writeln!(out, "{title} ({n} copies)");
    for row in 1..=n {
        let mut line = String::new();
        for p in &a_lanes {
            line.push(cell(p, row));
            line.push(' ');
        }
        let _ = write!(line, "a{row:<2}......b{row:<2}");
        for p in &b_lanes {
            line.push(' ');
            line.push(cell(p, row));
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }
    let _ = writeln!(out, "{}", layout.formula());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeSet;

    #[test]
    fn eleven_valid_layouts() {
        let ls = standard_layouts();
        assert_eq!(ls.len(), 11);
        for l in &ls {
            let a = l.pairs().iter().filter(|p| p.party == Party::A).count();
            let b = l.pairs().iter().filter(|p| p.party == Party::B).count();
            assert_eq!(a, l.n_copies() / 2);
            assert_eq!(b, l.n_copies() / 2);
        }
    }

    #[test]
    fn p1_and_p7_as_printed() {
        let p1 = standard_layout("P1").unwrap();
        assert_eq!(p1.n_copies(), 2);
        assert!(p1.pairs().iter().all(|p| p.kind == PairKind::Singlet));

        let p7 = standard_layout("p7").unwrap();
        let kinds: Vec<_> = p7.pairs().iter().map(|p| (p.name(), p.kind)).collect();
        assert_eq!(
            kinds,
            vec![
                ("a1a4".to_string(), PairKind::Identity),
                ("a2a3".to_string(), PairKind::Singlet),
                ("b1b2".to_string(), PairKind::Singlet),
                ("b3b4".to_string(), PairKind::Identity),
            ]
        );
    }

    #[test]
    fn p11_matches_formula() {
        let p11 = standard_layout("P11").unwrap();
        assert_eq!(
            p11.formula(),
            "I(a1a6) ⊗ P-(a2a3) ⊗ P-(a4a5) ⊗ P-(b1b2) ⊗ P-(b3b4) ⊗ I(b5b6)"
        );
    }

    #[test]
    fn layout_validation() {
        let s = PairKind::Singlet;
        assert!(PairOp::new(Party::A, 1, 1, s).is_err());
        let dup = vec![
            PairOp::new(Party::A, 1, 2, s).unwrap(),
            PairOp::new(Party::A, 1, 2, s).unwrap(),
            PairOp::new(Party::B, 1, 2, s).unwrap(),
        ];
        assert!(PairingLayout::new(2, dup).is_err());
        let missing = vec![PairOp::new(Party::A, 1, 2, s).unwrap()];
        assert!(PairingLayout::new(2, missing).is_err());
        let out_of_range = vec![
            PairOp::new(Party::A, 1, 3, s).unwrap(),
            PairOp::new(Party::B, 1, 2, s).unwrap(),
        ];
        assert!(PairingLayout::new(2, out_of_range).is_err());
        assert!(PairingLayout::new(3, vec![]).is_err());
    }

    #[test]
    fn equality_ignores_order_and_label() {
        let p4 = standard_layout("P4").unwrap();
        let mut pairs = p4.pairs().to_vec();
        pairs.reverse();
        let shuffled = PairingLayout::new(4, pairs).unwrap();
        assert_eq!(p4, shuffled);
        assert_ne!(p4, standard_layout("P5").unwrap());
    }

    #[test]
    fn settings_partition_the_layouts() {
        let ss = settings();
        assert_eq!(ss[0].covered, vec![1, 2, 3]);
        assert_eq!(ss[2].pair_count(), 6);
        assert_eq!(1u32 << ss[2].pair_count(), 64);
        let mut all = BTreeSet::new();
        for s in &ss {
            for &i in &s.covered {
                assert!(all.insert(i), "P{i} covered twice");
            }
        }
        assert_eq!(all.len(), 11);
    }

    #[test]
    fn settings_share_matching_of_full_singlet_layout() {
        let ls = standard_layouts();
        for s in settings() {
            let full = &ls[s.covered[0] - 1];
            assert_eq!(full.singlet_count(), s.pair_count());
            for &i in &s.covered {
                assert_eq!(ls[i - 1].matching(), full.matching());
                let mask = s.mask_of(&ls[i - 1]).unwrap();
                assert_eq!(s.layout_for_mask(mask), ls[i - 1]);
            }
        }
        assert_eq!(settings()[0].mask_of(&ls[3]), None);
    }

    #[test]
    fn renderings_are_distinct() {
        let rendered: BTreeSet<String> = standard_layouts().iter().map(render_layout).collect();
        assert_eq!(rendered.len(), 11);
    }

    #[test]
    fn p1_rendering() {
        let r = render_layout(&standard_layout("P1").unwrap());
        assert_eq!(
            r,
            "P1 (2 copies)\n* a1 ......b1  *\n* a2 ......b2  *\nP-(a1a2) ⊗ P-(b1b2)\n"
        );
    }
}
