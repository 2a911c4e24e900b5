//! Command-line interface.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gqd_core::estimator::{
    estimate_gqd, verify_moment_formulas, GqdEstimate, Mode, DEFAULT_REPEATS,
};
use gqd_core::pairing::{render_layout, standard_layout, standard_layouts};
use gqd_core::tomography::{qst_estimate_repeated, resource_report};
use gqd_core::{gqd_exact, make_family, Side, TwoQubitState};
use serde::Serialize;

use crate::formats::{parse_state, AuditJson, EstimateJson, LayoutJson, ResourceJson};
use crate::report;
use crate::CliError;

/// Fixed header of `sweep` CSV output.
pub const SWEEP_HEADER: &str = "param,D_exact,D_scheme_exact,D_sampled_mean,D_sampled_stderr";

#[derive(Debug, Parser)]
#[command(
    name = "gqd",
    version,
    about = "Geometric quantum discord of two-qubit states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form discord from the Bloch decomposition
    Exact {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, value_enum, ignore_case = true, default_value = "A")]
        side: SideArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Discord from the multi-copy measurement scheme, exact or sampled
    Scheme {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long, value_enum, ignore_case = true, default_value = "A")]
        side: SideArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sweep one parameter of a state family over a grid
    Sweep {
        #[arg(long)]
        family: String,
        /// Values for the remaining parameters; the swept one is overwritten
        #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
        params: Vec<f64>,
        /// Position of the swept parameter
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, allow_negative_numbers = true)]
        start: f64,
        #[arg(long, allow_negative_numbers = true)]
        stop: f64,
        #[arg(long)]
        step: f64,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long, value_enum, ignore_case = true, default_value = "A")]
        side: SideArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Draw the standard pairing layouts
    Layouts {
        /// Layout label, P1 to P11; all layouts when omitted
        #[arg(long)]
        name: Option<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Scheme against tomography at equal shot budget, with resource counts
    Compare {
        #[command(flatten)]
        state: StateArgs,
        /// Runs per scheme setting; tomography gets the same total spread over its nine settings
        #[arg(long)]
        shots: u64,
        #[arg(long, default_value_t = DEFAULT_REPEATS)]
        repeats: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, ignore_case = true, default_value = "A")]
        side: SideArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check the outcome-to-moment polynomials against tr(K^k) on random states
    VerifyMoments {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// JSON state file
    #[arg(long, conflicts_with = "family", required_unless_present = "family")]
    pub file: Option<PathBuf>,
    /// Named family: werner, bell_diagonal, pure, product, classical_AB
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, requires = "family", value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    pub params: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    /// Runs per measurement setting; exact expectations when omitted
    #[arg(long, requires = "seed")]
    pub shots: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_REPEATS)]
    pub repeats: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write to this file instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    A,
    B,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::A => Side::A,
            SideArg::B => Side::B,
        }
    }
}

fn load_state(args: &StateArgs) -> Result<TwoQubitState, CliError> {
    match (&args.file, &args.family) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
            parse_state(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
        }
        (None, Some(family)) => Ok(make_family(family, &args.params)?),
        (None, None) => Err(CliError::Input("give --file or --family".into())),
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn unsupported(format: Format, command: &str) -> CliError {
    CliError::Input(format!("--format {format:?} is not available for `{command}`").to_lowercase())
}

fn mode_of(s: &SamplingArgs) -> Result<Mode, CliError> {
    match (s.shots, s.seed) {
        (None, _) => Ok(Mode::SchemeExact),
        (Some(shots), Some(seed)) => Ok(Mode::SchemeSampled {
            shots,
            repeats: s.repeats,
            seed,
        }),
        (Some(_), None) => Err(CliError::Input("--seed is required when sampling".into())),
    }
}

/// 17 significant digits, locale-free.
pub fn csv_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Grid `start, start + step, ..., stop`, with the last point snapped onto
/// `stop` when rounding leaves it a hair away.
pub fn grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(CliError::Input(format!(
            "empty grid: start {start}, stop {stop}, step {step}"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| {
            let v = start + i as f64 * step;
            if (v - stop).abs() <= 1e-9 * step {
                stop
            } else {
                v
            }
        })
        .collect())
}

/// Run one command and return what it prints.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Exact { state, side, out } => {
            let s = load_state(state)?;
            let side = Side::from(*side);
            let d = gqd_exact(&s, side);
            match out.format {
                Format::Text => Ok(report::exact_text(&s.bloch(), &d, side)),
                Format::Json => Ok(json(&EstimateJson::from(&GqdEstimate::bloch_exact(
                    &s, side,
                )))),
                f => Err(unsupported(f, "exact")),
            }
        }
        Command::Scheme {
            state,
            sampling,
            side,
            out,
        } => {
            let s = load_state(state)?;
            let side = Side::from(*side);
            let e = estimate_gqd(&s, mode_of(sampling)?, side)?;
            match out.format {
                Format::Text => Ok(report::scheme_text(&e, side)),
                Format::Json => Ok(json(&EstimateJson::from(&e))),
                f => Err(unsupported(f, "scheme")),
            }
        }
        Command::Sweep {
            family,
            params,
            index,
            start,
            stop,
            step,
            sampling,
            side,
            out,
        } => {
            let rows = sweep(
                family,
                params,
                *index,
                &grid(*start, *stop, *step)?,
                sampling,
                (*side).into(),
            )?;
            match out.format {
                Format::Csv | Format::Text => {
                    let mut s = String::from(SWEEP_HEADER);
                    s.push('\n');
                    for r in &rows {
                        let sampled = match r.sampled {
                            Some((m, e)) => format!("{},{}", csv_float(m), csv_float(e)),
                            None => ",".into(),
                        };
                        let _ = writeln!(
                            s,
                            "{},{},{},{sampled}",
                            csv_float(r.param),
                            csv_float(r.exact),
                            csv_float(r.scheme)
                        );
                    }
                    Ok(s)
                }
                Format::Json => Ok(json(&rows)),
            }
        }
        Command::Layouts { name, out } => {
            let layouts = match name {
                Some(n) => vec![standard_layout(n).ok_or_else(|| {
                    CliError::Input(format!("unknown layout `{n}`; expected one of P1 to P11"))
                })?],
                None => standard_layouts(),
            };
            match out.format {
                Format::Text => Ok(layouts
                    .iter()
                    .map(render_layout)
                    .collect::<Vec<_>>()
                    .join("\n")),
                Format::Json if name.is_some() => Ok(json(&LayoutJson::from_layout(&layouts[0]))),
                Format::Json => Ok(json(
                    &layouts
                        .iter()
                        .map(LayoutJson::from_layout)
                        .collect::<Vec<_>>(),
                )),
                f => Err(unsupported(f, "layouts")),
            }
        }
        Command::Compare {
            state,
            shots,
            repeats,
            seed,
            side,
            out,
        } => {
            let s = load_state(state)?;
            let c = compare(&s, *shots, *repeats, *seed, (*side).into())?;
            match out.format {
                Format::Text => Ok(compare_text(&c)),
                Format::Json => Ok(json(&c)),
                f => Err(unsupported(f, "compare")),
            }
        }
        Command::VerifyMoments { trials, seed, out } => {
            let audit = verify_moment_formulas(*trials, *seed)?;
            let text = match out.format {
                Format::Text => report::audit_text(&audit),
                Format::Json => json(&AuditJson::from(&audit)),
                f => return Err(unsupported(f, "verify-moments")),
            };
            if audit.passes() {
                Ok(text)
            } else {
                Err(CliError::Numerical(format!(
                    "moment formulas fail the audit\n{text}"
                )))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub exact: f64,
    pub scheme: f64,
    /// mean and sample standard deviation when sampling was requested
    pub sampled: Option<(f64, f64)>,
}

pub fn sweep(
    family: &str,
    base: &[f64],
    index: usize,
    grid: &[f64],
    sampling: &SamplingArgs,
    side: Side,
) -> Result<Vec<SweepRow>, CliError> {
    let mode = mode_of(sampling)?;
    grid.iter()
        .map(|&v| {
            let mut p = base.to_vec();
            if p.len() <= index {
                p.resize(index + 1, 0.0);
            }
            p[index] = v;
            let s = make_family(family, &p)?;
            let scheme = estimate_gqd(&s, Mode::SchemeExact, side)?.estimate.value;
            let sampled = match mode {
                Mode::SchemeExact => None,
                m => {
                    let e = estimate_gqd(&s, m, side)?.estimate;
                    Some((e.value, e.std_err))
                }
            };
            Ok(SweepRow {
                param: v,
                exact: gqd_exact(&s, side).value,
                scheme,
                sampled,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub exact: f64,
    pub scheme_shots_per_setting: u64,
    pub qst_shots_per_setting: u64,
    pub scheme: EstimateJson,
    pub qst: EstimateJson,
    pub resources: ResourceJson,
}

/// The scheme spends `shots` runs on each of its three settings; tomography
/// gets the same 3·`shots` runs spread over its nine settings.
pub fn compare(
    s: &TwoQubitState,
    shots: u64,
    repeats: usize,
    seed: u64,
    side: Side,
) -> Result<Comparison, CliError> {
    if shots < 3 {
        return Err(CliError::Input("compare needs at least 3 shots".into()));
    }
    let qst_shots = 3 * shots / 9;
    let scheme = estimate_gqd(
        s,
        Mode::SchemeSampled {
            shots,
            repeats,
            seed,
        },
        side,
    )?;
    let qst = qst_estimate_repeated(s, qst_shots, repeats, seed, side)?;
    Ok(Comparison {
        exact: gqd_exact(s, side).value,
        scheme_shots_per_setting: shots,
        qst_shots_per_setting: qst_shots,
        scheme: (&scheme).into(),
        qst: (&qst).into(),
        resources: (&resource_report()).into(),
    })
}

fn compare_text(c: &Comparison) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "exact          = {}", c.exact);
    for (name, e, shots) in [
        ("scheme", &c.scheme, c.scheme_shots_per_setting),
        ("qst", &c.qst, c.qst_shots_per_setting),
    ] {
        let _ = writeln!(
            s,
            "{name:<6} {shots:>8} shots/setting: {} ± {} (error {:+e})",
            e.value,
            e.std_err,
            e.value - c.exact
        );
    }
    s.push('\n');
    s.push_str(&report::resource_table(&resource_report()));
    s
}

/// Parse `args`, run, write the output and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let output = match &cli.command {
        Command::Exact { out, .. }
        | Command::Scheme { out, .. }
        | Command::Sweep { out, .. }
        | Command::Layouts { out, .. }
        | Command::Compare { out, .. }
        | Command::VerifyMoments { out, .. } => out.output.clone(),
    };
    match execute(&cli) {
        Ok(text) => match output {
            Some(path) => match std::fs::write(&path, text) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    2
                }
            },
            None => {
                print!("{text}");
                0
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_endpoint() {
        let g = grid(0.0, 1.0, 0.1).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[10], 1.0);
        assert_eq!(grid(0.5, 0.5, 0.1).unwrap(), vec![0.5]);
    }

    #[test]
    fn empty_grids_are_rejected() {
        assert!(grid(0.0, 1.0, 0.0).is_err());
        assert!(grid(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn csv_floats_carry_17_digits() {
        assert_eq!(csv_float(0.125), "1.2500000000000000e-1");
        assert_eq!(csv_float(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn sweep_header_is_stable() {
        assert_eq!(
            SWEEP_HEADER,
            "param,D_exact,D_scheme_exact,D_sampled_mean,D_sampled_stderr"
        );
    }
}
