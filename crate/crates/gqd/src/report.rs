//! Plain-text renderings of states, estimates and reports.

use std::fmt::Write;

use gqd_core::estimator::{monomial_name, GqdEstimate, MomentAudit, SchemeEstimate};
use gqd_core::tomography::ResourceReport;
use gqd_core::{BlochForm, GqdValue, Side};

fn vec3(v: impl IntoIterator<Item = f64>) -> String {
    let parts: Vec<String> = v.into_iter().map(|x| format!("{x}")).collect();
    format!("[{}]", parts.join(", "))
}

fn primes(side: Side) -> &'static str {
    match side {
        Side::A => "",
        Side::B => "′",
    }
}

pub fn bloch_text(b: &BlochForm) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "x = {}", vec3(b.x.iter().copied()));
    let _ = writeln!(s, "y = {}", vec3(b.y.iter().copied()));
    for i in 0..3 {
        let head = if i == 0 { "T = " } else { "    " };
        let _ = writeln!(s, "{head}{}", vec3(b.t.row(i).iter().copied()));
    }
    s
}

pub fn exact_text(b: &BlochForm, d: &GqdValue, side: Side) -> String {
    let p = primes(side);
    let mut s = bloch_text(b);
    let _ = writeln!(s, "K{p} eigenvalues = {}", vec3(d.eigenvalues));
    let _ = writeln!(s, "D{p} = {}", d.value);
    s
}

pub fn estimate_line(e: &GqdEstimate) -> String {
    format!("{} ± {} ({})", e.value, e.std_err, e.route.as_str())
}

pub fn scheme_text(e: &SchemeEstimate, side: Side) -> String {
    let p = primes(side);
    let mut s = String::new();
    let _ = writeln!(s, "route = {}", e.estimate.route.as_str());
    for (i, c) in e.outcomes.c.iter().enumerate() {
        let _ = writeln!(s, "c{:<2} = {c}", i + 1);
    }
    let m = e.moments;
    let _ = writeln!(s, "M1 = {}\nM2 = {}\nM3 = {}", m.m1, m.m2, m.m3);
    let _ = writeln!(s, "K{p} eigenvalues = {}", vec3(e.estimate.eigenvalues));
    let _ = writeln!(s, "D{p} = {}", e.estimate.value);
    let _ = writeln!(s, "std_err = {}", e.estimate.std_err);
    if e.noisy_repeats > 0 {
        let _ = writeln!(
            s,
            "noisy repeats = {} (complex root pair or clamped root)",
            e.noisy_repeats
        );
    }
    s
}

pub fn resource_table(r: &ResourceReport) -> String {
    let rows = [
        (
            "parameters measured (r_p)",
            r.r_p_scheme.to_string(),
            r.r_p_qst.to_string(),
        ),
        (
            "cost per parameter (r_c)",
            r.r_c_scheme.to_string(),
            r.r_c_qst.to_string(),
        ),
        (
            "total (r = r_p r_c)",
            r.r_scheme.to_string(),
            r.r_qst.to_string(),
        ),
        (
            "projective measurements",
            r.projector_count_scheme.to_string(),
            "-".into(),
        ),
        (
            "measurement settings",
            r.settings_scheme.to_string(),
            "9".into(),
        ),
    ];
    let w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let mut s = String::new();
    let _ = writeln!(s, "{:<w$}  {:>6}  {:>6}", "quantity", "scheme", "qst");
    for (name, a, b) in rows {
        let _ = writeln!(s, "{name:<w$}  {a:>6}  {b:>6}");
    }
    let _ = writeln!(
        s,
        "independent tallies: copies summed over the 11 measurements = {}, over the 3 settings = {}",
        r.tally_copies_per_measurement, r.tally_copies_per_setting
    );
    s
}

pub fn audit_text(a: &MomentAudit) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "trials = {}, seed = {}", a.trials, a.seed);
    for k in 0..3 {
        let _ = writeln!(
            s,
            "M{} tabulated max deviation = {:e}",
            k + 1,
            a.printed_max_deviation[k]
        );
    }
    if let Some(d) = a.corrected_max_deviation {
        for (k, v) in d.iter().enumerate() {
            let _ = writeln!(s, "M{} corrected max deviation = {v:e}", k + 1);
        }
        let _ = writeln!(
            s,
            "refit matches symbolic expansion: {}",
            a.fit_matches_expansion
        );
    }
    if a.diff.is_empty() {
        let _ = writeln!(s, "no coefficient changes");
    }
    for d in &a.diff {
        let _ = writeln!(
            s,
            "M{}: coefficient of {} {} -> {}",
            d.k,
            monomial_name(&d.monomial),
            d.printed,
            d.corrected
        );
    }
    let _ = writeln!(s, "{}", if a.passes() { "PASS" } else { "FAIL" });
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use gqd_core::tomography::resource_report;

    #[test]
    fn resource_table_snapshot() {
        assert_eq!(
            resource_table(&resource_report()),
            "\
quantity                   scheme     qst
parameters measured (r_p)       3      15
cost per parameter (r_c)       44      15
total (r = r_p r_c)           132     225
projective measurements        11       -
measurement settings            3       9
independent tallies: copies summed over the 11 measurements = 46, over the 3 settings = 12
"
        );
    }
}
