//! `araki`: batch front end for the relative-entropy library.
//!
//! Exit codes: 0 success, 1 input error, 2 verification failure.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use araki_core::checks::{run_suite, Suite, SuiteSummary};
use araki_core::entropy::{ExponentialExcitation, MultiExcitation, NonOrthogonalWarning, StandardSubspaceExcitation};
use araki_core::majorana::{
    mode_functions_orthonormal, tail_bound, ClosedForm, MatrixRoute, OrthonormalityReport, DEFAULT_N_MAX,
    DEFAULT_PANELS, MAX_MATRIX_MODES,
};
use araki_core::modular::{modular_operator_bipartite, relative_modular_bipartite};
use araki_core::serde_ext::extended_f64;
use araki_core::{
    araki_entropy_bipartite, closed_form_entropy, exponential_excitation_entropy, full_report, kms_polarization,
    multi_excitation_entropy, run_sweep, schmidt, standard_subspace_excitation_entropy, truncated_matrix_entropy,
    vn_relative_entropy, CVector, DensityMatrix, EntropyReport, MajoranaConfig, RouteOptions, SweepConfig, C64,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{parse_coeff, read_json, BipartiteConfig, EntropyConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] araki_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Parser)]
#[command(name = "araki", version, about = "Relative entropy of fermionic excitations")]
struct Cli {
    /// Output format; `sweep` defaults to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Acceptance tolerance for route discrepancies.
    #[arg(long, global = true, default_value_t = araki_core::entropy::DEFAULT_TOL_ACCEPT)]
    tol: f64,
    /// Base step of the finite-difference derivative.
    #[arg(long = "fd-step", global = true, default_value_t = araki_core::entropy::DEFAULT_FD_STEP)]
    fd_step: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entropy of an excitation of a KMS state.
    Entropy {
        #[arg(value_enum)]
        kind: EntropyKind,
        #[arg(long)]
        config: PathBuf,
    },
    /// Majorana field on an interval: closed form and matrix route.
    Majorana(MajoranaArgs),
    /// Araki entropy of bipartite vector states against von Neumann.
    Bipartite {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run invariant suites.
    Check {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// All four entropy routes on seeded random instances.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EntropyKind {
    Single,
    Multi,
    Exp,
    Subspace,
}

#[derive(Debug, Args)]
struct MajoranaArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Mode cutoff `n_max`.
    #[arg(long)]
    modes: Option<u32>,
    /// `n:a⁺,a⁻` with real values or `n:re,im,re,im`; repeatable.
    #[arg(long = "coeff", value_parser = parse_coeff)]
    coeffs: Vec<(u32, [C64; 2])>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 200)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 6, 8, 10, 12])]
    dims: Vec<usize>,
    #[arg(long = "beta-min", default_value_t = 0.1)]
    beta_min: f64,
    #[arg(long = "beta-max", default_value_t = 5.0)]
    beta_max: f64,
}

/// Rendered report plus whether every verification passed.
struct Outcome {
    body: Vec<u8>,
    passed: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(cli.out.as_deref(), &outcome.body) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn emit(out: Option<&Path>, body: &[u8]) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, body),
        None => std::io::stdout().lock().write_all(body),
    }
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if !(cli.tol > 0.0) || !(cli.fd_step > 0.0) {
        return Err(CliError::Input("--tol and --fd-step must be positive".into()));
    }
    let opts = RouteOptions { fd_step: cli.fd_step, tol_accept: cli.tol };
    let format = cli.format.unwrap_or(match cli.command {
        Command::Sweep(_) => Format::Csv,
        _ => Format::Json,
    });
    match &cli.command {
        Command::Entropy { kind, config } => entropy(*kind, config, &opts, format),
        Command::Majorana(args) => majorana(args, &opts, format),
        Command::Bipartite { config } => bipartite(config, &opts, format),
        Command::Check { suite, seed } => check(suite, *seed, format),
        Command::Sweep(args) => sweep(args, &opts, format),
    }
}

fn json_body<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut body = serde_json::to_vec(value)?;
    body.push(b'\n');
    Ok(body)
}

fn csv_body<T: Serialize>(rows: impl IntoIterator<Item = T>, header: &[&str]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

#[derive(Serialize)]
struct SingleOutput<'a> {
    config: &'a EntropyConfig,
    report: EntropyReport,
}

#[derive(Serialize)]
struct MultiOutput<'a> {
    config: &'a EntropyConfig,
    #[serde(flatten)]
    result: &'a MultiExcitation,
    singles_sum: f64,
}

#[derive(Serialize)]
struct MultiRow {
    analytic: f64,
    finite_difference: f64,
    singles_sum: f64,
    orthogonal: bool,
}

#[derive(Serialize)]
struct ExpOutput<'a> {
    config: &'a EntropyConfig,
    #[serde(flatten)]
    result: ExponentialExcitation,
    ratio: f64,
}

#[derive(Serialize)]
struct SubspaceOutput<'a> {
    config: &'a EntropyConfig,
    #[serde(flatten)]
    result: StandardSubspaceExcitation,
    factor: f64,
}

fn option_cell(x: Option<f64>) -> String {
    x.map_or(String::new(), extended_f64::format_extended)
}

fn entropy(kind: EntropyKind, path: &Path, opts: &RouteOptions, format: Format) -> Result<Outcome, CliError> {
    let config: EntropyConfig = read_json(path)?;
    let p = config.problem()?;
    let need_single = || {
        if p.fields.len() != 1 {
            return Err(CliError::Input("this command takes a single field vector \"f\"".into()));
        }
        Ok(&p.fields[0])
    };
    let close = |a: f64, b: f64| (a - b).abs() <= opts.tol_accept * (1.0 + a.abs());
    match kind {
        EntropyKind::Single => {
            let report = full_report(&p.space, &p.generator, p.beta, need_single()?, opts)?;
            let passed = report.passed();
            let body = match format {
                Format::Json => json_body(&SingleOutput { config: &config, report })?,
                Format::Csv => csv_body(
                    [&report],
                    &[
                        "araki_analytic",
                        "araki_fd",
                        "vn_direct",
                        "vn_commutator",
                        "max_pairwise_discrepancy",
                        "tol_accept",
                        "verdict",
                    ],
                )?,
            };
            Ok(Outcome { body, passed })
        }
        EntropyKind::Multi => {
            let s = kms_polarization(&p.space, &p.generator, p.beta)?;
            let r = multi_excitation_entropy(&p.space, &s, &p.generator, p.beta, &p.fields, opts)?;
            let sum = r.singles_sum();
            let orthogonal = r.warning.is_none();
            // Analytic and numerical derivatives must agree; additivity is
            // only asserted for S-orthogonal fields.
            let passed = (r.analytic - r.finite_difference).abs() <= 1e-7 && (!orthogonal || close(r.analytic, sum));
            if let Some(NonOrthogonalWarning { max_overlap, pair }) = r.warning {
                eprintln!("warning: fields {} and {} are not S-orthogonal (overlap {max_overlap:.3e})", pair.0, pair.1);
            }
            let body = match format {
                Format::Json => json_body(&MultiOutput { config: &config, result: &r, singles_sum: sum })?,
                Format::Csv => csv_body(
                    [MultiRow { analytic: r.analytic, finite_difference: r.finite_difference, singles_sum: sum, orthogonal }],
                    &["analytic", "finite_difference", "singles_sum", "orthogonal"],
                )?,
            };
            Ok(Outcome { body, passed })
        }
        EntropyKind::Exp => {
            let s = kms_polarization(&p.space, &p.generator, p.beta)?;
            let r = exponential_excitation_entropy(&p.space, &s, &p.generator, p.beta, need_single()?, opts)?;
            let passed = r.vn_direct.is_none_or(|v| close(r.value, v));
            let body = match format {
                Format::Json => json_body(&ExpOutput { config: &config, result: r, ratio: r.ratio() })?,
                Format::Csv => csv_body(
                    [(r.value, r.base, r.ratio(), option_cell(r.vn_direct))],
                    &["value", "base", "ratio", "vn_direct"],
                )?,
            };
            Ok(Outcome { body, passed })
        }
        EntropyKind::Subspace => {
            let s = kms_polarization(&p.space, &p.generator, p.beta)?;
            let r = standard_subspace_excitation_entropy(&p.space, &s, &p.generator, p.beta, need_single()?, opts)?;
            let body = match format {
                Format::Json => json_body(&SubspaceOutput { config: &config, result: r, factor: r.factor() })?,
                Format::Csv => csv_body(
                    [(r.value, r.same_f_derivative, r.factor(), option_cell(r.vn_direct))],
                    &["value", "same_f_derivative", "factor", "vn_direct"],
                )?,
            };
            Ok(Outcome { body, passed: true })
        }
    }
}

#[derive(Serialize)]
struct MajoranaOutput<'a> {
    config: &'a MajoranaConfig,
    /// Closed-form entropy summed over `n ≤ n_max`.
    total: f64,
    closed_form: &'a ClosedForm,
    orthonormality: OrthonormalityReport,
    /// Matrix route; absent above the mode cap or for a zero excitation.
    matrix: Option<MatrixRoute>,
    matrix_discrepancy: Option<f64>,
}

fn majorana(args: &MajoranaArgs, opts: &RouteOptions, format: Format) -> Result<Outcome, CliError> {
    let mut config = match &args.config {
        Some(path) => read_json::<MajoranaConfig>(path)?,
        None => {
            let (Some(a), Some(m), Some(beta)) = (args.a, args.m, args.beta) else {
                return Err(CliError::Input("give --config or all of --a, --m, --beta".into()));
            };
            MajoranaConfig { a, m, beta, n_max: DEFAULT_N_MAX, coeffs: BTreeMap::new() }
        }
    };
    if let Some(a) = args.a {
        config.a = a;
    }
    if let Some(m) = args.m {
        config.m = m;
    }
    if let Some(beta) = args.beta {
        config.beta = beta;
    }
    if let Some(n) = args.modes {
        config.n_max = n;
    }
    for (n, pair) in &args.coeffs {
        config.coeffs.insert(*n, *pair);
    }
    config.validate()?;

    let closed = closed_form_entropy(&config)?;
    let orthonormality = mode_functions_orthonormal(&config, DEFAULT_PANELS)?;
    let has_excitation = config.coeffs.keys().any(|&n| config.alpha(n).norm() > 0.0);
    let matrix = if config.coeffs.len() <= MAX_MATRIX_MODES && has_excitation {
        Some(truncated_matrix_entropy(&config, opts)?)
    } else {
        None
    };
    let matrix_discrepancy = matrix.as_ref().map(|m| (m.total - closed.total).abs());
    let passed = orthonormality.max_residual() <= 1e-8
        && matrix.as_ref().is_none_or(|m| {
            m.report.passed() && (m.total - closed.total).abs() <= opts.tol_accept * (1.0 + closed.total.abs())
        });
    if config.n_max < *config.coeffs.keys().last().unwrap_or(&0) {
        eprintln!("note: tail bound beyond n_max is {}", tail_bound(&config, config.n_max)?);
    }
    let body = match format {
        Format::Json => json_body(&MajoranaOutput {
            config: &config,
            total: closed.total,
            closed_form: &closed,
            orthonormality,
            matrix,
            matrix_discrepancy,
        })?,
        Format::Csv => csv_body(&closed.modes, &["n", "p", "energy", "E_tilde", "term"])?,
    };
    Ok(Outcome { body, passed })
}

#[derive(Serialize)]
struct BipartiteOutput<'a> {
    config: &'a BipartiteConfig,
    schmidt_coefficients: &'a [f64],
    #[serde(with = "extended_f64")]
    araki: f64,
    #[serde(with = "extended_f64")]
    vn: f64,
    delta_eigenvalues: Vec<f64>,
    relative_delta_eigenvalues: Vec<f64>,
}

#[derive(Serialize)]
struct BipartiteRow {
    #[serde(with = "extended_f64")]
    araki: f64,
    #[serde(with = "extended_f64")]
    vn: f64,
}

fn bipartite(path: &Path, opts: &RouteOptions, format: Format) -> Result<Outcome, CliError> {
    let config: BipartiteConfig = read_json(path)?;
    let psi = CVector::from_column_slice(&config.psi);
    let phi = CVector::from_column_slice(&config.phi);
    let s = schmidt(&psi)?;
    let araki = araki_entropy_bipartite(&phi, &s)?;
    let marginal = |v: &CVector| -> Result<DensityMatrix, CliError> {
        let c = araki_core::modular::coefficient_matrix(v)?;
        Ok(DensityMatrix::new(&c * c.adjoint() / C64::from(v.norm_squared()), 1e-9)?)
    };
    let vn = vn_relative_entropy(&marginal(&psi)?, &marginal(&phi)?);
    let spectrum = |m: &araki_core::CMatrix| araki_core::linalg::HermitianEigen::new(m).values;
    let delta = modular_operator_bipartite(&s)?.delta;
    let unit_psi = &psi / C64::from(psi.norm());
    let relative = relative_modular_bipartite(&(&phi / C64::from(phi.norm())), &schmidt(&unit_psi)?)?;
    let passed = if araki.is_infinite() || vn.is_infinite() {
        araki == vn
    } else {
        (araki - vn).abs() <= opts.tol_accept * (1.0 + vn.abs())
    };
    let body = match format {
        Format::Json => json_body(&BipartiteOutput {
            config: &config,
            schmidt_coefficients: s.coefficients(),
            araki,
            vn,
            delta_eigenvalues: spectrum(&delta),
            relative_delta_eigenvalues: spectrum(&relative),
        })?,
        Format::Csv => csv_body([BipartiteRow { araki, vn }], &["araki", "vn"])?,
    };
    Ok(Outcome { body, passed })
}

fn check(suite: &str, seed: u64, format: Format) -> Result<Outcome, CliError> {
    let suite: Suite = suite.parse()?;
    let summaries: Vec<SuiteSummary> = run_suite(suite, seed)?;
    let passed = summaries.iter().all(SuiteSummary::passed);
    let body = match format {
        Format::Json => json_body(&summaries)?,
        Format::Csv => csv_body(&summaries, &["suite", "checks", "failures", "worst_ratio"])?,
    };
    Ok(Outcome { body, passed })
}

fn sweep(args: &SweepArgs, opts: &RouteOptions, format: Format) -> Result<Outcome, CliError> {
    let config = SweepConfig {
        instances: args.instances,
        seed: args.seed,
        dims: args.dims.clone(),
        beta_min: args.beta_min,
        beta_max: args.beta_max,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    let rows = pool.install(|| run_sweep(&config, opts))?;
    let passed = rows.iter().all(|r| r.verdict == araki_core::Verdict::Pass);
    let body = match format {
        Format::Json => json_body(&rows)?,
        Format::Csv => csv_body(
            &rows,
            &[
                "index",
                "dim",
                "beta",
                "araki_analytic",
                "araki_fd",
                "vn_direct",
                "vn_commutator",
                "max_pairwise_discrepancy",
                "verdict",
            ],
        )?,
    };
    Ok(Outcome { body, passed })
}
