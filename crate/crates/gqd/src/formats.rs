//! JSON schemas for states, layouts, estimates, audits and resource reports.

use gqd_core::estimator::GqdEstimate;
use gqd_core::estimator::{
    monomial_name, MomentAudit, MomentTable, MomentTriple, OutcomeVector, SchemeEstimate,
};
use gqd_core::linalg::{Mat4, C64};
use gqd_core::pairing::{PairKind, PairOp, PairingLayout, Party};
use gqd_core::tomography::ResourceReport;
use gqd_core::{make_family, TwoQubitState};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// `{"matrix": [[[re, im] × 4] × 4]}` or `{"family": "...", "params": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<[[[f64; 2]; 4]; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<f64>>,
}

impl StateFile {
    pub fn from_state(state: &TwoQubitState) -> Self {
        let m = state.matrix();
        let mut matrix = [[[0.0; 2]; 4]; 4];
        for (r, row) in matrix.iter_mut().enumerate() {
            for (c, z) in row.iter_mut().enumerate() {
                *z = [m[(r, c)].re, m[(r, c)].im];
            }
        }
        Self {
            matrix: Some(matrix),
            family: None,
            params: None,
        }
    }

    pub fn to_state(&self) -> Result<TwoQubitState, CliError> {
        match (&self.matrix, &self.family, &self.params) {
            (Some(rows), None, None) => {
                let m = Mat4::from_fn(|r, c| C64::new(rows[r][c][0], rows[r][c][1]));
                Ok(TwoQubitState::new(m)?)
            }
            (None, Some(family), params) => {
                Ok(make_family(family, params.as_deref().unwrap_or(&[]))?)
            }
            (Some(_), Some(_), _) => Err(CliError::Input(
                "state file gives both `matrix` and `family`".into(),
            )),
            (Some(_), None, Some(_)) => Err(CliError::Input("`params` requires `family`".into())),
            (None, None, _) => Err(CliError::Input(
                "state file needs `matrix` or `family`".into(),
            )),
        }
    }
}

pub fn parse_state(text: &str) -> Result<TwoQubitState, CliError> {
    let file: StateFile = serde_json::from_str(text)
        .map_err(|e| CliError::Input(format!("malformed state file: {e}")))?;
    file.to_state()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideJson {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindJson {
    Singlet,
    Identity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairJson {
    pub side: SideJson,
    pub copies: [usize; 2],
    pub kind: KindJson,
}

/// `{"n_copies": n, "pairs": [{"side": "a", "copies": [m, n], "kind": "singlet"}, ...]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutJson {
    pub n_copies: usize,
    pub pairs: Vec<PairJson>,
}

impl LayoutJson {
    pub fn from_layout(layout: &PairingLayout) -> Self {
        let pairs = layout
            .pairs()
            .iter()
            .map(|p| PairJson {
                side: match p.party {
                    Party::A => SideJson::A,
                    Party::B => SideJson::B,
                },
                copies: [p.copies.0, p.copies.1],
                kind: match p.kind {
                    PairKind::Singlet => KindJson::Singlet,
                    PairKind::Identity => KindJson::Identity,
                },
            })
            .collect();
        Self {
            n_copies: layout.n_copies(),
            pairs,
        }
    }

    pub fn to_layout(&self) -> Result<PairingLayout, CliError> {
        let pairs = self
            .pairs
            .iter()
            .map(|p| {
                let party = match p.side {
                    SideJson::A => Party::A,
                    SideJson::B => Party::B,
                };
                let kind = match p.kind {
                    KindJson::Singlet => PairKind::Singlet,
                    KindJson::Identity => PairKind::Identity,
                };
                PairOp::new(party, p.copies[0], p.copies[1], kind)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PairingLayout::new(self.n_copies, pairs)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomesJson {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub c8: f64,
    pub c9: f64,
    pub c10: f64,
    pub c11: f64,
}

impl From<&OutcomeVector> for OutcomesJson {
    fn from(v: &OutcomeVector) -> Self {
        let c = v.c;
        Self {
            c1: c[0],
            c2: c[1],
            c3: c[2],
            c4: c[3],
            c5: c[4],
            c6: c[5],
            c7: c[6],
            c8: c[7],
            c9: c[8],
            c10: c[9],
            c11: c[10],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsJson {
    #[serde(rename = "M1")]
    pub m1: f64,
    #[serde(rename = "M2")]
    pub m2: f64,
    #[serde(rename = "M3")]
    pub m3: f64,
}

impl From<&MomentTriple> for MomentsJson {
    fn from(m: &MomentTriple) -> Self {
        Self {
            m1: m.m1,
            m2: m.m2,
            m3: m.m3,
        }
    }
}

/// `{"route", "value", "std_err", "eigenvalues", "outcomes": {"c1", ...}, "moments": {"M1", ...}}`;
/// the last two are absent for routes that do not produce them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateJson {
    pub route: String,
    pub value: f64,
    pub std_err: f64,
    pub eigenvalues: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcomes: Option<OutcomesJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<MomentsJson>,
}

impl From<&GqdEstimate> for EstimateJson {
    fn from(e: &GqdEstimate) -> Self {
        Self {
            route: e.route.as_str().into(),
            value: e.value,
            std_err: e.std_err,
            eigenvalues: e.eigenvalues,
            outcomes: None,
            moments: None,
        }
    }
}

impl From<&SchemeEstimate> for EstimateJson {
    fn from(s: &SchemeEstimate) -> Self {
        Self {
            outcomes: Some((&s.outcomes).into()),
            moments: Some((&s.moments).into()),
            ..(&s.estimate).into()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub monomial: String,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChangeJson {
    pub moment: String,
    pub monomial: String,
    pub printed: f64,
    pub corrected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditJson {
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub passes: bool,
    pub printed_max_deviation: [f64; 3],
    pub corrected_max_deviation: Option<[f64; 3]>,
    pub fit_matches_expansion: bool,
    pub diff: Vec<ChangeJson>,
    /// M1, M2, M3 of the corrected table when one was produced
    pub corrected_table: Option<Vec<Vec<TermJson>>>,
}

fn table_json(t: &MomentTable) -> Vec<Vec<TermJson>> {
    t.polys
        .iter()
        .map(|p| {
            p.terms()
                .map(|(m, coefficient)| TermJson {
                    monomial: monomial_name(m),
                    coefficient,
                })
                .collect()
        })
        .collect()
}

impl From<&MomentAudit> for AuditJson {
    fn from(a: &MomentAudit) -> Self {
        Self {
            trials: a.trials,
            seed: a.seed,
            tolerance: gqd_core::estimator::AUDIT_TOL,
            passes: a.passes(),
            printed_max_deviation: a.printed_max_deviation,
            corrected_max_deviation: a.corrected_max_deviation,
            fit_matches_expansion: a.fit_matches_expansion,
            diff: a
                .diff
                .iter()
                .map(|d| ChangeJson {
                    moment: format!("M{}", d.k),
                    monomial: monomial_name(&d.monomial),
                    printed: d.printed,
                    corrected: d.corrected,
                })
                .collect(),
            corrected_table: a.corrected.as_ref().map(table_json),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TalliesJson {
    pub copies_summed_over_measurements: u32,
    pub copies_summed_over_settings: u32,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceJson {
    pub r_p_scheme: u32,
    pub r_p_qst: u32,
    pub r_c_scheme: u32,
    pub r_c_qst: u32,
    pub r_scheme: u32,
    pub r_qst: u32,
    pub projector_count_scheme: u32,
    pub settings_scheme: u32,
    pub independent_tallies: TalliesJson,
}

impl From<&ResourceReport> for ResourceJson {
    fn from(r: &ResourceReport) -> Self {
        Self {
            r_p_scheme: r.r_p_scheme,
            r_p_qst: r.r_p_qst,
            r_c_scheme: r.r_c_scheme,
            r_c_qst: r.r_c_qst,
            r_scheme: r.r_scheme,
            r_qst: r.r_qst,
            projector_count_scheme: r.projector_count_scheme,
            settings_scheme: r.settings_scheme,
            independent_tallies: TalliesJson {
                copies_summed_over_measurements: r.tally_copies_per_measurement,
                copies_summed_over_settings: r.tally_copies_per_setting,
                note: "recomputed from the standard layouts; not claimed to equal r_c_scheme"
                    .into(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gqd_core::estimator::{estimate_gqd, Mode};
    use gqd_core::pairing::standard_layouts;
    use gqd_core::{random_state, Side};

    #[test]
    fn family_file() {
        let s = parse_state(r#"{"family": "werner", "params": [0.4]}"#).unwrap();
        assert_eq!(s, make_family("werner", &[0.4]).unwrap());
    }

    #[test]
    fn matrix_file_round_trip() {
        let s = random_state(8, 3);
        let text = serde_json::to_string(&StateFile::from_state(&s)).unwrap();
        assert_eq!(parse_state(&text).unwrap(), s);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let e = parse_state(r#"{"family": "werner", "params": [0.4], "note": 1}"#).unwrap_err();
        assert!(e.to_string().contains("unknown field"), "{e}");
    }

    #[test]
    fn invalid_matrix_names_the_invariant() {
        let mut rows = [[[0.0; 2]; 4]; 4];
        rows[0][0] = [2.0, 0.0];
        let text = serde_json::to_string(&StateFile {
            matrix: Some(rows),
            family: None,
            params: None,
        })
        .unwrap();
        let e = parse_state(&text).unwrap_err();
        assert!(e.to_string().contains("trace"), "{e}");
    }

    #[test]
    fn both_sources_are_rejected() {
        let text = r#"{"family": "werner", "params": [0.4], "matrix": [[[1,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]]]}"#;
        assert!(parse_state(text).is_err());
    }

    #[test]
    fn layouts_round_trip() {
        for l in standard_layouts() {
            let json = serde_json::to_string(&LayoutJson::from_layout(&l)).unwrap();
            let back: LayoutJson = serde_json::from_str(&json).unwrap();
            assert_eq!(back.to_layout().unwrap(), l);
        }
    }

    #[test]
    fn layout_json_shape() {
        let l = gqd_core::pairing::standard_layout("P2").unwrap();
        let v = serde_json::to_value(LayoutJson::from_layout(&l)).unwrap();
        assert_eq!(v["n_copies"], 2);
        assert_eq!(v["pairs"][0]["side"], "a");
        assert_eq!(v["pairs"][0]["copies"], serde_json::json!([1, 2]));
    }

    #[test]
    fn estimate_round_trip() {
        let e = estimate_gqd(&random_state(2, 2), Mode::SchemeExact, Side::A).unwrap();
        let json = EstimateJson::from(&e);
        let text = serde_json::to_string(&json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in [
            "route",
            "value",
            "std_err",
            "eigenvalues",
            "outcomes",
            "moments",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v["outcomes"].get("c11").is_some() && v["moments"].get("M3").is_some());
        assert_eq!(serde_json::from_str::<EstimateJson>(&text).unwrap(), json);
    }
}
