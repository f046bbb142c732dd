//! `isoflow`: tables, flow runs, and verification suites for isospectral
//! lattice flows on tridiagonal matrices.
//!
//! Subcommands:
//!   chi       Euler characteristic tables per family and method
//!   morse     equilibrium listings and signed index counts
//!   flow      integrate a Volterra trajectory (CSV + summary JSON)
//!   map       apply the Volterra-to-Toda map to one state
//!   spectrum  eigenvalues and the negation-symmetry check
//!   verify    run the seeded verification suites
//!
//! Every randomized run is fully determined by its flags and `--seed`;
//! repeated invocations print byte-identical output. JSON reports share
//! the top-level shape {"command", "seed", "results", "pass"}.
//!
//! Exit codes: 0 all requested checks passed, 1 a check failed,
//! 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use isoflow_core::chi::{chi_j_closed, chi_m_closed, chi_m_combinatorial, chi_m_egf};
use isoflow_core::combinatorics::psi;
use isoflow_core::flows::{
    component_signature, integrate_volterra, volterra_rhs, volterra_to_toda, FlowError,
    IntegrationMethod, IntegratorConfig,
};
use isoflow_core::morse::{
    enumerate_critical_points, enumerate_critical_points_toda, enumerate_equilibria_even,
    morse_chi_j, morse_chi_m, morse_index, morse_index_toda, nearest_critical_point,
    nearest_state, SpectrumParams,
};
use isoflow_core::rng::{random_initial_state, SplitMix64};
use isoflow_core::tridiag::{
    spectrum_symmetry_check, JacobiMatrix, Matrix, SymmetryReport, ZeroDiagMatrix,
};
use isoflow_core::verify::{run_suites, VerifyConfig, SUITE_NAMES};

/// Environment variable naming the default output directory for files
/// written by `flow`.
const OUT_DIR_ENV: &str = "ISOFLOW_OUT_DIR";

/// Largest l for which the exact chi routes are guaranteed inside
/// 128-bit rationals.
const CHI_L_MAX: u32 = 12;
/// Signed-count enumerations walk (l+1) * l! points.
const MORSE_COUNT_MAX: usize = 10;
/// Full listings materialize every sign choice as well.
const MORSE_LIST_MAX: usize = 5;

#[derive(Parser)]
#[command(
    name = "isoflow",
    about = "Isospectral lattice flows: chi tables, Morse counts, Volterra/Toda runs, verification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Euler characteristic tables with per-method agreement
    Chi(ChiArgs),
    /// Equilibrium listings and signed index counts
    Morse(MorseArgs),
    /// Integrate a Volterra trajectory; writes CSV, prints a summary
    Flow(FlowArgs),
    /// Map an even-size Volterra state to its Toda image
    Map(MapArgs),
    /// Eigenvalues and the spectrum symmetry check
    Spectrum(SpectrumArgs),
    /// Run verification suites and emit a JSON report
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Zero-diagonal family, odd sizes 2l+1
    M,
    /// Jacobi family, size n
    J,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct ChiArgs {
    /// Which isospectral family to tabulate
    #[arg(long, value_enum)]
    family: Family,
    /// Largest l (family M); chi rows cover l = 0..=l_max
    #[arg(long, conflicts_with = "n_max")]
    l_max: Option<u32>,
    /// Largest n (family J); chi rows cover n = 1..=n_max
    #[arg(long)]
    n_max: Option<u32>,
    /// Comma-separated method subset (M: closed,egf,combinatorial,morse;
    /// J: closed,psi,morse); default all
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

#[derive(Args)]
struct MorseArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Spectrum half-size l (family M)
    #[arg(long, conflicts_with = "n")]
    l: Option<usize>,
    /// Matrix size n (family J)
    #[arg(long)]
    n: Option<usize>,
    /// Emit the full point listing instead of the summary
    #[arg(long)]
    list: bool,
    /// Spectrum values (M: strictly decreasing positive lambda;
    /// J: strictly increasing mu); defaults are l+1-m and 1..=n
    #[arg(long, value_delimiter = ',')]
    spectrum: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

#[derive(Args)]
struct FlowArgs {
    /// Matrix size k (state has k-1 coordinates)
    #[arg(long)]
    k: usize,
    /// Explicit initial state c_1,...,c_{k-1}
    #[arg(long, value_delimiter = ',', conflicts_with = "random")]
    init: Option<Vec<f64>>,
    /// Draw the initial state from the seeded generator
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 20.0)]
    t_final: f64,
    /// Per-step local error bound of the adaptive integrator
    #[arg(long, default_value_t = 1e-10)]
    error_tol: f64,
    #[arg(long, default_value_t = 0.1)]
    sample_interval: f64,
    #[arg(long, default_value_t = 1e-3)]
    initial_step: f64,
    /// rk45 (adaptive) or rk4 (fixed-step cross-check)
    #[arg(long, default_value = "rk45")]
    method: String,
    /// Trajectory CSV path; default <ISOFLOW_OUT_DIR or .>/flow_k<k>[_seed<s>].csv
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
}

#[derive(Args)]
struct MapArgs {
    /// Volterra state c_1,...,c_{k-1} for even k
    #[arg(long, value_delimiter = ',', required = true)]
    c: Vec<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Off-diagonal of a zero-diagonal matrix
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["a", "b"])]
    c: Option<Vec<f64>>,
    /// Diagonal of a Jacobi matrix (with --b)
    #[arg(long, value_delimiter = ',', requires = "b")]
    a: Option<Vec<f64>>,
    /// Off-diagonal of a Jacobi matrix (with --a)
    #[arg(long, value_delimiter = ',', requires = "a")]
    b: Option<Vec<f64>>,
    /// Absolute eigenvalue accuracy
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,
}

#[derive(Args)]
struct VerifyArgs {
    /// Comma-separated suite subset; default all
    #[arg(long, value_delimiter = ',')]
    suites: Option<Vec<String>>,
    /// Odd sizes for the flow suites
    #[arg(long, value_delimiter = ',', default_values_t = vec![3usize, 5, 7])]
    k: Vec<usize>,
    /// Even sizes for the map suite
    #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 4, 6])]
    even_k: Vec<usize>,
    /// Runs per size
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

/// Distinguishes bad invocations (exit 2) from failed checks (exit 1).
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Chi(args) => cmd_chi(args),
        Command::Morse(args) => cmd_morse(args),
        Command::Flow(args) => cmd_flow(args),
        Command::Map(args) => cmd_map(args),
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

// ------------------------------------------------------------------
// chi
// ------------------------------------------------------------------

#[derive(Serialize)]
struct ChiRow {
    index: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed: Option<i128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    egf: Option<i128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    combinatorial: Option<i128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    psi: Option<i128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    morse: Option<i128>,
    agree: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

const M_METHODS: [&str; 4] = ["closed", "egf", "combinatorial", "morse"];
const J_METHODS: [&str; 3] = ["closed", "psi", "morse"];

fn cmd_chi(args: ChiArgs) -> Result<bool> {
    let allowed: &[&str] = match args.family {
        Family::M => &M_METHODS,
        Family::J => &J_METHODS,
    };
    let explicit = args.methods.is_some();
    let methods: Vec<String> = match &args.methods {
        Some(list) => {
            for m in list {
                if !allowed.contains(&m.as_str()) {
                    return Err(usage(format!(
                        "unknown method {m:?}; valid: {}",
                        allowed.join(", ")
                    )));
                }
            }
            list.clone()
        }
        None => allowed.iter().map(|s| s.to_string()).collect(),
    };
    let has = |m: &str| methods.iter().any(|x| x == m);

    let mut rows: Vec<ChiRow> = Vec::new();
    match args.family {
        Family::M => {
            let l_max = args
                .l_max
                .ok_or_else(|| usage("--family m requires --l-max"))?;
            if l_max > CHI_L_MAX {
                return Err(usage(format!(
                    "--l-max up to {CHI_L_MAX} (128-bit exactness bound), got {l_max}"
                )));
            }
            if explicit && has("morse") && l_max as usize > MORSE_COUNT_MAX {
                return Err(usage(format!(
                    "the morse method enumerates (l+1)*l! points; --l-max up to {MORSE_COUNT_MAX}"
                )));
            }
            let egf = chi_m_egf(l_max)?;
            for l in 0..=l_max {
                let closed = has("closed").then(|| chi_m_closed(l)).transpose()?;
                let egf_value = has("egf").then(|| egf[l as usize]);
                let combinatorial = has("combinatorial")
                    .then(|| chi_m_combinatorial(l))
                    .transpose()?;
                // The signed count walks (l+1)*l! points; with the
                // default method set it is simply left blank past the
                // enumeration bound.
                let morse = (has("morse") && l > 0 && l as usize <= MORSE_COUNT_MAX)
                    .then(|| morse_chi_m(l as usize, &SpectrumParams::default_for(l as usize)));
                let (agree, note) = judge_m_row(l, closed, egf_value, combinatorial, morse);
                rows.push(ChiRow {
                    index: l,
                    closed,
                    egf: egf_value,
                    combinatorial,
                    psi: None,
                    morse,
                    agree,
                    note,
                });
            }
        }
        Family::J => {
            let n_max = args
                .n_max
                .ok_or_else(|| usage("--family j requires --n-max"))?;
            if n_max > CHI_L_MAX {
                return Err(usage(format!(
                    "--n-max up to {CHI_L_MAX} (128-bit exactness bound), got {n_max}"
                )));
            }
            if explicit && has("morse") && n_max as usize > MORSE_COUNT_MAX {
                return Err(usage(format!(
                    "the morse method enumerates n! points; --n-max up to {MORSE_COUNT_MAX}"
                )));
            }
            for n in 1..=n_max {
                let closed = has("closed").then(|| chi_j_closed(n)).transpose()?;
                let psi_value = has("psi").then(|| psi(n)).transpose()?;
                let morse =
                    (has("morse") && n as usize <= MORSE_COUNT_MAX).then(|| morse_chi_j(n as usize));
                let values: Vec<i128> = [closed, psi_value, morse].into_iter().flatten().collect();
                let agree = values.windows(2).all(|w| w[0] == w[1]);
                rows.push(ChiRow {
                    index: n,
                    closed,
                    egf: None,
                    combinatorial: None,
                    psi: psi_value,
                    morse,
                    agree,
                    note: None,
                });
            }
        }
    }

    let pass = rows.iter().all(|r| r.agree);
    let family = match args.family {
        Family::M => "M",
        Family::J => "J",
    };
    match args.format {
        OutputFormat::Json => {
            print_report("chi", None, serde_json::json!({
                "family": family,
                "methods": methods,
                "rows": serde_json::to_value(&rows)?,
            }), pass)?;
        }
        OutputFormat::Csv => {
            // Canonical column order; only requested methods appear.
            let label = if family == "M" { "l" } else { "n" };
            let mut header = vec![label.to_string()];
            for m in allowed {
                if has(m) {
                    header.push(column_name(m));
                }
            }
            println!("{}", header.join(","));
            for r in &rows {
                let mut fields = vec![r.index.to_string()];
                for m in allowed {
                    if has(m) {
                        let v = match *m {
                            "closed" => r.closed,
                            "egf" => r.egf,
                            "combinatorial" => r.combinatorial,
                            "psi" => r.psi,
                            "morse" => r.morse,
                            _ => None,
                        };
                        fields.push(v.map_or(String::new(), |x| x.to_string()));
                    }
                }
                println!("{}", fields.join(","));
            }
        }
        OutputFormat::Text => {
            let label = if family == "M" { "l" } else { "n" };
            let mut header = vec![format!("{label:>3}")];
            for m in allowed {
                if has(m) {
                    header.push(format!("{:>16}", column_name(m)));
                }
            }
            header.push("  agreement".into());
            println!("{}", header.join(" "));
            for r in &rows {
                let mut line = vec![format!("{:>3}", r.index)];
                for m in allowed {
                    if has(m) {
                        let v = match *m {
                            "closed" => r.closed,
                            "egf" => r.egf,
                            "combinatorial" => r.combinatorial,
                            "psi" => r.psi,
                            "morse" => r.morse,
                            _ => None,
                        };
                        line.push(format!("{:>16}", v.map_or("-".into(), |x| x.to_string())));
                    }
                }
                line.push(if r.agree {
                    "  ok".into()
                } else {
                    "  DISAGREE".into()
                });
                if let Some(note) = &r.note {
                    line.push(format!("  ({note})"));
                }
                println!("{}", line.join(" "));
            }
        }
    }
    Ok(pass)
}

/// psi(n) is not itself a chi value, so its column keeps the bare name.
fn column_name(method: &str) -> String {
    if method == "psi" {
        "psi".to_string()
    } else {
        format!("chi_{method}")
    }
}

/// Row verdict for the zero-diagonal family. The l = 0 row is the
/// documented convention gap (closed form 1 vs generating function 0);
/// it is annotated, not failed.
fn judge_m_row(
    l: u32,
    closed: Option<i128>,
    egf: Option<i128>,
    combinatorial: Option<i128>,
    morse: Option<i128>,
) -> (bool, Option<String>) {
    if l == 0 {
        let gap_ok = closed.is_none_or(|v| v == 1)
            && egf.is_none_or(|v| v == 0)
            && combinatorial.is_none_or(|v| v == 0);
        let note = "l=0 convention gap: closed form counts the point (1), \
                    generating function starts at 0"
            .to_string();
        return (gap_ok, Some(note));
    }
    let values: Vec<i128> = [closed, egf, combinatorial, morse]
        .into_iter()
        .flatten()
        .collect();
    (values.windows(2).all(|w| w[0] == w[1]), None)
}

// ------------------------------------------------------------------
// morse
// ------------------------------------------------------------------

#[derive(Serialize)]
struct ListedPoint<'a> {
    j: usize,
    s: &'a [u8],
    pi: &'a [usize],
    coords: &'a [f64],
    index: usize,
}

fn cmd_morse(args: MorseArgs) -> Result<bool> {
    match args.family {
        Family::M => {
            let l = args.l.ok_or_else(|| usage("--family m requires --l"))?;
            if l == 0 {
                return Err(usage("--l must be at least 1"));
            }
            let limit = if args.list { MORSE_LIST_MAX } else { MORSE_COUNT_MAX };
            if l > limit {
                return Err(usage(format!(
                    "--l up to {limit} for this mode (enumeration size), got {l}"
                )));
            }
            let params = match args.spectrum {
                Some(values) => SpectrumParams::new(values).map_err(|e| usage(e.to_string()))?,
                None => SpectrumParams::default_for(l),
            };
            if params.len() != l {
                return Err(usage(format!(
                    "--spectrum needs exactly {l} values, got {}",
                    params.len()
                )));
            }
            let chi = morse_chi_m(l, &params);
            let count = (l as i128 + 1) * (1i128 << l) * (1..=l as i128).product::<i128>();
            if args.list {
                let points = enumerate_critical_points(&params);
                let listed: Vec<ListedPoint> = points
                    .iter()
                    .map(|p| ListedPoint {
                        j: p.j,
                        s: &p.s,
                        pi: &p.pi,
                        coords: &p.coords,
                        index: morse_index(p),
                    })
                    .collect();
                match args.format {
                    OutputFormat::Json => print_report("morse", None, serde_json::json!({
                        "family": "M",
                        "l": l,
                        "count": points.len(),
                        "chi": chi.to_string(),
                        "points": serde_json::to_value(&listed)?,
                    }), true)?,
                    _ => {
                        for p in &listed {
                            println!(
                                "j={} s={:?} pi={:?} coords={:?} index={}",
                                p.j, p.s, p.pi, p.coords, p.index
                            );
                        }
                        println!("count {}  chi {}", points.len(), chi);
                    }
                }
            } else {
                match args.format {
                    OutputFormat::Json => print_report("morse", None, serde_json::json!({
                        "family": "M",
                        "l": l,
                        "count": count.to_string(),
                        "chi": chi.to_string(),
                    }), true)?,
                    _ => println!("family M l={l}: {count} critical points, chi = {chi}"),
                }
            }
            Ok(true)
        }
        Family::J => {
            let n = args.n.ok_or_else(|| usage("--family j requires --n"))?;
            if n == 0 {
                return Err(usage("--n must be at least 1"));
            }
            let limit = if args.list { 6 } else { MORSE_COUNT_MAX };
            if n > limit {
                return Err(usage(format!(
                    "--n up to {limit} for this mode (n! points), got {n}"
                )));
            }
            let spectrum: Vec<f64> = match args.spectrum {
                Some(values) => values,
                None => (1..=n).map(|i| i as f64).collect(),
            };
            if spectrum.len() != n {
                return Err(usage(format!(
                    "--spectrum needs exactly {n} values, got {}",
                    spectrum.len()
                )));
            }
            if spectrum.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(usage("--spectrum must be strictly increasing for family j"));
            }
            let chi = morse_chi_j(n);
            if args.list {
                let points = enumerate_critical_points_toda(&spectrum)
                    .map_err(|e| usage(e.to_string()))?;
                let mut listed = Vec::with_capacity(points.len());
                for p in &points {
                    listed.push(serde_json::json!({
                        "sigma": p.sigma,
                        "diag": p.matrix.diag(),
                        "index": morse_index_toda(&p.sigma, &spectrum),
                    }));
                }
                match args.format {
                    OutputFormat::Json => print_report("morse", None, serde_json::json!({
                        "family": "J",
                        "n": n,
                        "count": points.len(),
                        "chi": chi.to_string(),
                        "points": listed,
                    }), true)?,
                    _ => {
                        for p in &points {
                            println!(
                                "sigma={:?} diag={:?} index={}",
                                p.sigma,
                                p.matrix.diag(),
                                morse_index_toda(&p.sigma, &spectrum)
                            );
                        }
                        println!("count {}  chi {}", points.len(), chi);
                    }
                }
            } else {
                let count: i128 = (1..=n as i128).product();
                match args.format {
                    OutputFormat::Json => print_report("morse", None, serde_json::json!({
                        "family": "J",
                        "n": n,
                        "count": count.to_string(),
                        "chi": chi.to_string(),
                    }), true)?,
                    _ => println!("family J n={n}: {count} critical points, chi = {chi}"),
                }
            }
            Ok(true)
        }
    }
}

// ------------------------------------------------------------------
// flow
// ------------------------------------------------------------------

#[derive(Serialize)]
struct NearestEquilibrium {
    coords: Vec<f64>,
    distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    index: Option<usize>,
}

#[derive(Serialize)]
struct FlowSummary {
    k: usize,
    initial_state: Vec<f64>,
    t_final: f64,
    samples: usize,
    max_spectrum_drift: f64,
    max_invariant_drift: f64,
    f_monotone: bool,
    worst_f_increase: f64,
    final_state: Vec<f64>,
    final_rhs_max_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    equilibrium_detected_at: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nearest_equilibrium: Option<NearestEquilibrium>,
    #[serde(skip_serializing_if = "Option::is_none")]
    component_signature: Option<Vec<i8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    signature_constant: Option<bool>,
    csv_path: String,
}

fn cmd_flow(args: FlowArgs) -> Result<bool> {
    if args.k < 2 {
        return Err(usage("--k must be at least 2"));
    }
    let initial: Vec<f64> = if args.random {
        let mut rng = SplitMix64::new(args.seed);
        random_initial_state(&mut rng, args.k)
    } else {
        let init = args
            .init
            .clone()
            .ok_or_else(|| usage("provide --init or --random"))?;
        if init.len() != args.k - 1 {
            return Err(usage(format!(
                "--init needs k-1 = {} values, got {}",
                args.k - 1,
                init.len()
            )));
        }
        init
    };

    let method = match args.method.as_str() {
        "rk45" => IntegrationMethod::Rk45Adaptive,
        "rk4" => IntegrationMethod::Rk4Fixed,
        other => return Err(usage(format!("--method must be rk45 or rk4, got {other:?}"))),
    };
    let cfg = IntegratorConfig {
        initial_step: args.initial_step,
        error_tol: args.error_tol,
        t_final: args.t_final,
        sample_interval: args.sample_interval,
        method,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;

    let record = integrate_volterra(&initial, &cfg)
        .with_context(|| format!("integration failed for k={}", args.k))?;

    // Signature (even k) and nearest enumerated equilibrium.
    let (signature, signature_constant) = if args.k % 2 == 0 {
        match component_signature(&initial) {
            Ok(sig) => {
                let constant = record
                    .states
                    .iter()
                    .all(|s| component_signature(s).map(|x| x == sig).unwrap_or(false));
                (Some(sig), Some(constant))
            }
            Err(_) => (None, Some(false)),
        }
    } else {
        (None, None)
    };

    let nearest = nearest_equilibrium_info(args.k, &initial, record.final_state());

    let equilibrium_detected_at = record.equilibrium_sample().map(|i| record.times[i]);
    let worst_increase = record.worst_f_increase();
    let f_monotone = worst_increase <= 1e-8;

    let csv_path = args.out.clone().unwrap_or_else(|| {
        let dir = std::env::var(OUT_DIR_ENV).unwrap_or_else(|_| ".".into());
        let name = if args.random {
            format!("flow_k{}_seed{}.csv", args.k, args.seed)
        } else {
            format!("flow_k{}.csv", args.k)
        };
        PathBuf::from(dir).join(name)
    });
    std::fs::write(&csv_path, record.to_csv())
        .with_context(|| format!("writing trajectory CSV to {}", csv_path.display()))?;

    let final_rhs = volterra_rhs(record.final_state())
        .iter()
        .map(|v| v.abs())
        .fold(0.0f64, f64::max);
    let summary = FlowSummary {
        k: args.k,
        initial_state: initial.clone(),
        t_final: args.t_final,
        samples: record.len(),
        max_spectrum_drift: record.max_spectrum_drift(),
        max_invariant_drift: record.max_invariant_drift(),
        f_monotone,
        worst_f_increase: worst_increase,
        final_state: record.final_state().to_vec(),
        final_rhs_max_norm: final_rhs,
        equilibrium_detected_at,
        nearest_equilibrium: nearest,
        component_signature: signature,
        signature_constant,
        csv_path: csv_path.display().to_string(),
    };

    let pass = f_monotone && signature_constant.unwrap_or(true);
    let seed = args.random.then_some(args.seed);
    match args.format {
        OutputFormat::Text => {
            println!("k={} samples={} csv={}", args.k, summary.samples, summary.csv_path);
            println!(
                "max spectrum drift {:.3e}  max invariant drift {:.3e}",
                summary.max_spectrum_drift, summary.max_invariant_drift
            );
            println!(
                "f monotone: {}  final state {:?}",
                summary.f_monotone, summary.final_state
            );
            if let Some(n) = &summary.nearest_equilibrium {
                println!(
                    "nearest equilibrium {:?} at distance {:.3e}{}",
                    n.coords,
                    n.distance,
                    n.index
                        .map_or(String::new(), |i| format!(" (index {i})"))
                );
            }
        }
        _ => print_report("flow", seed, serde_json::to_value(&summary)?, pass)?,
    }
    Ok(pass)
}

/// Nearest enumerated equilibrium for the trajectory's own spectrum.
/// Enumeration grows factorially, so sizes beyond l = 6 are skipped.
fn nearest_equilibrium_info(
    k: usize,
    initial: &[f64],
    final_state: &[f64],
) -> Option<NearestEquilibrium> {
    let matrix = ZeroDiagMatrix::new(initial.to_vec()).ok()?;
    let half = matrix.eigenvalues(1e-12).ok()?.positive_descending(1e-9);
    if half.len() > 6 {
        return None;
    }
    let params = SpectrumParams::new(half).ok()?;
    if k % 2 == 1 {
        let points = enumerate_critical_points(&params);
        let (point, distance) = nearest_critical_point(final_state, &points)?;
        Some(NearestEquilibrium {
            coords: point.coords.clone(),
            distance,
            index: Some(morse_index(point)),
        })
    } else {
        let equilibria = enumerate_equilibria_even(&params);
        let (idx, distance) =
            nearest_state(final_state, equilibria.iter().map(|e| e.as_slice()))?;
        Some(NearestEquilibrium {
            coords: equilibria[idx].clone(),
            distance,
            index: None,
        })
    }
}

// ------------------------------------------------------------------
// map
// ------------------------------------------------------------------

#[derive(Serialize)]
struct MapOutput {
    matrix: Matrix,
    volterra_spectrum: Vec<f64>,
    mapped_spectrum: Vec<f64>,
    expected_mapped_spectrum: Vec<f64>,
    max_residual: f64,
}

fn cmd_map(args: MapArgs) -> Result<bool> {
    if args.c.len() % 2 != 1 {
        return Err(usage(format!(
            "the map needs an even matrix size (odd state length); got k = {}",
            args.c.len() + 1
        )));
    }
    let mapped = match volterra_to_toda(&args.c) {
        Ok(m) => m,
        Err(FlowError::MapRequiresEvenSize { k }) => {
            return Err(usage(format!("even size required, got k = {k}")))
        }
        Err(e) => return Err(anyhow!(e)),
    };
    let source = ZeroDiagMatrix::new(args.c.clone())?;
    let volterra_spectrum = source.eigenvalues(1e-12)?;
    let expected: Vec<f64> = {
        let mut v: Vec<f64> = volterra_spectrum
            .positive_descending(1e-9)
            .iter()
            .map(|l| l * l / 2.0)
            .collect();
        v.sort_by(|x, y| x.partial_cmp(y).unwrap());
        v
    };
    let mapped_spectrum = mapped.eigenvalues(1e-12)?;
    let max_residual = mapped_spectrum
        .values()
        .iter()
        .zip(&expected)
        .map(|(got, want)| (got - want).abs())
        .fold(0.0f64, f64::max);
    let pass = max_residual < 1e-8;
    let output = MapOutput {
        matrix: Matrix::Jacobi(mapped),
        volterra_spectrum: volterra_spectrum.values().to_vec(),
        mapped_spectrum: mapped_spectrum.values().to_vec(),
        expected_mapped_spectrum: expected,
        max_residual,
    };
    match args.format {
        OutputFormat::Text => {
            println!("{}", serde_json::to_string(&output.matrix)?);
            println!("volterra spectrum {:?}", output.volterra_spectrum);
            println!("mapped spectrum   {:?}", output.mapped_spectrum);
            println!("expected (half-squared) {:?}", output.expected_mapped_spectrum);
            println!("max residual {:.3e}", output.max_residual);
        }
        _ => print_report("map", None, serde_json::to_value(&output)?, pass)?,
    }
    Ok(pass)
}

// ------------------------------------------------------------------
// spectrum
// ------------------------------------------------------------------

#[derive(Serialize)]
struct SpectrumOutput {
    matrix: Matrix,
    eigenvalues: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    symmetry: Option<SymmetryReport>,
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<bool> {
    if !(args.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let matrix = match (&args.c, &args.a, &args.b) {
        (Some(c), None, None) => Matrix::ZeroDiag(ZeroDiagMatrix::new(c.clone())?),
        (None, Some(a), Some(b)) => Matrix::Jacobi(
            JacobiMatrix::new(a.clone(), b.clone()).map_err(|e| usage(e.to_string()))?,
        ),
        _ => return Err(usage("provide either --c, or --a with --b")),
    };
    let spectrum = isoflow_core::tridiag::eigenvalues(&matrix, args.tol)?;
    let symmetry = match &matrix {
        Matrix::ZeroDiag(m) => Some(spectrum_symmetry_check(
            &spectrum,
            m.size(),
            args.tol.max(1e-9),
        )),
        Matrix::Jacobi(_) => None,
    };
    let pass = symmetry.as_ref().is_none_or(|s| s.pass);
    let output = SpectrumOutput {
        matrix,
        eigenvalues: spectrum.values().to_vec(),
        symmetry,
    };
    match args.format {
        OutputFormat::Text => {
            println!("eigenvalues {:?}", output.eigenvalues);
            if let Some(s) = &output.symmetry {
                println!(
                    "negation symmetric: {}  zero expected/found: {}/{}  pass: {}",
                    s.negation_symmetric, s.zero_expected, s.zero_found, s.pass
                );
            }
        }
        _ => print_report("spectrum", None, serde_json::to_value(&output)?, pass)?,
    }
    Ok(pass)
}

// ------------------------------------------------------------------
// verify
// ------------------------------------------------------------------

fn cmd_verify(args: VerifyArgs) -> Result<bool> {
    if args.samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    for &k in &args.k {
        if k < 3 || k % 2 == 0 {
            return Err(usage(format!("--k values must be odd and >= 3, got {k}")));
        }
    }
    for &k in &args.even_k {
        if k < 2 || k % 2 == 1 {
            return Err(usage(format!("--even-k values must be even and >= 2, got {k}")));
        }
    }
    let names: Vec<String> = match args.suites {
        Some(list) => list,
        None => SUITE_NAMES.iter().map(|s| s.to_string()).collect(),
    };
    let cfg = VerifyConfig {
        k_values: args.k,
        even_k_values: args.even_k,
        samples: args.samples,
        seed: args.seed,
    };
    let report = run_suites(&names, &cfg).map_err(|e| usage(e.to_string()))?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(report.pass)
}

// ------------------------------------------------------------------

/// All JSON output shares the shape {"command", "seed", "results", "pass"}.
fn print_report(
    command: &str,
    seed: Option<u64>,
    results: serde_json::Value,
    pass: bool,
) -> Result<()> {
    #[derive(Serialize)]
    struct Report<'a> {
        command: &'a str,
        seed: Option<u64>,
        results: serde_json::Value,
        pass: bool,
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&Report {
            command,
            seed,
            results,
            pass,
        })?
    );
    Ok(())
}
