//! Command-line front end: parse state files, dispatch to the library, and
//! emit JSON or CSV reports with 12 significant digits. Every error path
//! exits nonzero with a single-line machine-parsable record on stderr:
//! parse problems exit 2, invariant violations 3, solver non-convergence 4.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use neglab_core::{base_norm, bounds, gaussian, io, locc, measures, multipartite, Error};

const CSV_HEADER: &str = "# neg-lab v1";

#[derive(Parser)]
#[command(name = "neglab", version, about = "Negativity-family entanglement measures")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConeArg {
    All,
    Ppt,
}

#[derive(Subcommand)]
enum Cmd {
    /// Negativity, log-negativity, and the partial-transpose spectrum of a
    /// bipartite state file
    Measure {
        #[arg(long)]
        input: PathBuf,
        /// Which party to transpose (0 or 1)
        #[arg(long, default_value_t = 0)]
        party: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Symplectic spectra and log-negativity of a Gaussian covariance file
    Gaussian {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Teleportation and distillation bounds for a state on m x m
    Bounds {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Negativity across every splitting of a multipartite state
    Multi {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Randomized LOCC monotonicity sweep
    Monotonicity {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// PRNG seed (required: sweeps must be reproducible)
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Base-norm S-negativity via bisection and alternating projections
    Sneg {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        cone: ConeArg,
        /// Bisection tolerance on the trace budget
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Round to 12 significant digits so reports are stable across platforms.
fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap()
}

fn sig12_vec(xs: &[f64]) -> Vec<f64> {
    xs.iter().copied().map(sig12).collect()
}

fn csv_num(x: f64) -> String {
    format!("{x:.11e}")
}

fn csv_list(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| csv_num(*x))
        .collect::<Vec<_>>()
        .join(";")
}

fn emit(text: String, output: &Option<PathBuf>) -> Result<(), Error> {
    match output {
        Some(path) => fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report serializes")
}

fn read_input(path: &PathBuf) -> Result<String, Error> {
    Ok(fs::read_to_string(path)?)
}

#[derive(Serialize)]
struct MeasureOut {
    negativity: f64,
    log_negativity: f64,
    trace_norm_pt: f64,
    negative_eigvals: Vec<f64>,
}

fn cmd_measure(
    input: &PathBuf,
    party: usize,
    format: Format,
    output: &Option<PathBuf>,
) -> Result<(), Error> {
    let rho = io::state_from_json(&read_input(input)?)?;
    let report = measures::measure_report(&rho, party)?;
    let out = MeasureOut {
        negativity: sig12(report.negativity),
        log_negativity: sig12(report.log_negativity),
        trace_norm_pt: sig12(report.trace_norm_pt),
        negative_eigvals: sig12_vec(&report.negative_eigvals),
    };
    let text = match format {
        Format::Json => to_json(&out),
        Format::Csv => format!(
            "{CSV_HEADER}\nnegativity,log_negativity,trace_norm_pt,negative_eigvals\n{},{},{},{}",
            csv_num(report.negativity),
            csv_num(report.log_negativity),
            csv_num(report.trace_norm_pt),
            csv_list(&report.negative_eigvals),
        ),
    };
    emit(text, output)
}

#[derive(Serialize)]
struct TwoModeOut {
    det_a: f64,
    det_b: f64,
    det_c: f64,
    det_gamma: f64,
    quartic_pt_spectrum: [f64; 2],
}

#[derive(Serialize)]
struct GaussianOut {
    n_a: usize,
    n_b: usize,
    physical: bool,
    symplectic_spectrum: Vec<f64>,
    pt_symplectic_spectrum: Vec<f64>,
    log_negativity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    two_mode: Option<TwoModeOut>,
}

fn cmd_gaussian(input: &PathBuf, format: Format, output: &Option<PathBuf>) -> Result<(), Error> {
    let cov = io::gaussian_from_json(&read_input(input)?)?;
    let spectrum = gaussian::symplectic_spectrum(&cov)?;
    let pt = gaussian::gaussian_partial_transpose(&cov);
    let pt_spectrum = gaussian::symplectic_spectrum(&pt)?;
    let log_negativity = gaussian::gaussian_log_negativity(&cov)?;
    let two_mode = if cov.n_a() == 1 && cov.n_b() == 1 {
        let (det_a, det_b, det_c, det_gamma) = gaussian::two_mode_invariants(&cov)?;
        let (c1, c2) = gaussian::two_mode_pt_spectrum_via_quartic(&cov)?;
        Some(TwoModeOut {
            det_a: sig12(det_a),
            det_b: sig12(det_b),
            det_c: sig12(det_c),
            det_gamma: sig12(det_gamma),
            quartic_pt_spectrum: [sig12(c1), sig12(c2)],
        })
    } else {
        None
    };
    let out = GaussianOut {
        n_a: cov.n_a(),
        n_b: cov.n_b(),
        physical: cov.is_physical()?,
        symplectic_spectrum: sig12_vec(&spectrum),
        pt_symplectic_spectrum: sig12_vec(&pt_spectrum),
        log_negativity: sig12(log_negativity),
        two_mode,
    };
    let text = match format {
        Format::Json => to_json(&out),
        Format::Csv => format!(
            "{CSV_HEADER}\nn_a,n_b,physical,log_negativity,symplectic_spectrum,pt_symplectic_spectrum\n{},{},{},{},{},{}",
            out.n_a,
            out.n_b,
            out.physical,
            csv_num(log_negativity),
            csv_list(&spectrum),
            csv_list(&pt_spectrum),
        ),
    };
    emit(text, output)
}

fn cmd_bounds(input: &PathBuf, format: Format, output: &Option<PathBuf>) -> Result<(), Error> {
    let rho = io::state_from_json(&read_input(input)?)?;
    let r = bounds::teleportation_bounds(&rho)?;
    let rounded = bounds::BoundsReport {
        m: r.m,
        negativity: sig12(r.negativity),
        singlet_distance_lb: sig12(r.singlet_distance_lb),
        teleport_distance_lb: sig12(r.teleport_distance_lb),
        singlet_fidelity_ub: sig12(r.singlet_fidelity_ub),
        channel_fidelity_ub: sig12(r.channel_fidelity_ub),
        distillation_ub_bits: sig12(r.distillation_ub_bits),
        raw_singlet_distance_lb: sig12(r.raw_singlet_distance_lb),
        raw_teleport_distance_lb: sig12(r.raw_teleport_distance_lb),
        raw_singlet_fidelity_ub: sig12(r.raw_singlet_fidelity_ub),
        raw_channel_fidelity_ub: sig12(r.raw_channel_fidelity_ub),
    };
    let text = match format {
        Format::Json => to_json(&rounded),
        Format::Csv => format!(
            "{CSV_HEADER}\nm,negativity,singlet_distance_lb,teleport_distance_lb,singlet_fidelity_ub,channel_fidelity_ub,distillation_ub_bits\n{},{},{},{},{},{},{}",
            r.m,
            csv_num(r.negativity),
            csv_num(r.singlet_distance_lb),
            csv_num(r.teleport_distance_lb),
            csv_num(r.singlet_fidelity_ub),
            csv_num(r.channel_fidelity_ub),
            csv_num(r.distillation_ub_bits),
        ),
    };
    emit(text, output)
}

#[derive(Serialize)]
struct SplitRow {
    splitting: String,
    negativity: f64,
    log_negativity: f64,
}

#[derive(Serialize)]
struct MultiOut {
    splittings: Vec<SplitRow>,
}

fn cmd_multi(input: &PathBuf, format: Format, output: &Option<PathBuf>) -> Result<(), Error> {
    let rho = io::state_from_json(&read_input(input)?)?;
    let mut rows = Vec::new();
    for s in multipartite::all_splittings(rho.party_count()) {
        let n = multipartite::splitting_negativity(&rho, &s)?;
        rows.push(SplitRow {
            splitting: s.label(),
            negativity: sig12(n),
            log_negativity: sig12((1.0 + 2.0 * n).log2()),
        });
    }
    let text = match format {
        Format::Json => to_json(&MultiOut { splittings: rows }),
        Format::Csv => {
            let mut lines = vec![
                CSV_HEADER.to_string(),
                "splitting,negativity,log_negativity".to_string(),
            ];
            for row in rows {
                lines.push(format!(
                    "{},{},{}",
                    row.splitting,
                    csv_num(row.negativity),
                    csv_num(row.log_negativity)
                ));
            }
            lines.join("\n")
        }
    };
    emit(text, output)
}

fn cmd_monotonicity(
    trials: usize,
    seed: u64,
    format: Format,
    output: &Option<PathBuf>,
) -> Result<(), Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = locc::monotonicity_sweep(trials, &mut rng)?;
    let rounded = locc::SweepReport {
        trials: r.trials,
        violations: r.violations,
        max_slack: sig12(r.max_slack),
    };
    let text = match format {
        Format::Json => to_json(&rounded),
        Format::Csv => format!(
            "{CSV_HEADER}\ntrials,violations,max_slack\n{},{},{}",
            r.trials,
            r.violations,
            csv_num(r.max_slack),
        ),
    };
    emit(text, output)
}

#[derive(Serialize)]
struct SnegOut {
    cone: &'static str,
    tol: f64,
    value: f64,
}

fn cmd_sneg(
    input: &PathBuf,
    cone: ConeArg,
    tol: f64,
    format: Format,
    output: &Option<PathBuf>,
) -> Result<(), Error> {
    let rho = io::state_from_json(&read_input(input)?)?;
    let (label, value) = match cone {
        ConeArg::All => ("all", base_norm::negativity_via_base_norm(&rho, tol)?),
        ConeArg::Ppt => ("ppt", base_norm::ppt_negativity(&rho, tol)?),
    };
    let out = SnegOut {
        cone: label,
        tol: sig12(tol),
        value: sig12(value),
    };
    let text = match format {
        Format::Json => to_json(&out),
        Format::Csv => format!(
            "{CSV_HEADER}\ncone,tol,value\n{label},{},{}",
            csv_num(tol),
            csv_num(value),
        ),
    };
    emit(text, output)
}

fn run(cli: Cli) -> Result<(), Error> {
    match &cli.command {
        Cmd::Measure {
            input,
            party,
            format,
            output,
        } => cmd_measure(input, *party, *format, output),
        Cmd::Gaussian {
            input,
            format,
            output,
        } => cmd_gaussian(input, *format, output),
        Cmd::Bounds {
            input,
            format,
            output,
        } => cmd_bounds(input, *format, output),
        Cmd::Multi {
            input,
            format,
            output,
        } => cmd_multi(input, *format, output),
        Cmd::Monotonicity {
            trials,
            seed,
            format,
            output,
        } => cmd_monotonicity(*trials, *seed, *format, output),
        Cmd::Sneg {
            input,
            cone,
            tol,
            format,
            output,
        } => cmd_sneg(input, *cone, *tol, *format, output),
    }
}

fn error_category(e: &Error) -> (&'static str, u8) {
    match e {
        Error::Parse(_) | Error::Io(_) => ("parse", 2),
        Error::NoConvergence(_) => ("no_convergence", 4),
        _ => ("invariant", 3),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (category, code) = error_category(&e);
            let record = serde_json::json!({
                "error": category,
                "message": e.to_string(),
            });
            eprintln!("{record}");
            ExitCode::from(code)
        }
    }
}
