//! Subcommand wiring: argument parsing, validation, pipeline calls, and
//! artifact emission.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use kdsp_core::hamiltonian::{
    build_pauli_cost, count_gates, diagonal_vector_with_cap, effective_statevector_cap,
    estimate_gap, exp_penalty_params, penalize, spectral_gap_bound, DiagonalCost, EncodingConfig, PenaltyScheme,
};
use kdsp_core::lattice::{gram, lll_reduce, Basis};
use kdsp_core::preprocess::{
    preprocess_with_delta, qubit_budget, scramble_basis, BudgetMode, PreprocessPlan, QubitBudget,
};
use kdsp_core::qaoa::{
    optimize_params, sample_report, OptimizeResult, OptimizerConfig, QaoaParams, RunReport,
};
use kdsp_core::rational::{format_rational, parse_rational, rational_to_f64};
use kdsp_core::solvers::{
    brute_force_solve, default_grover_iterations, grover_runtime_estimate, grover_simulate,
    grover_success_curve, GroverOutcome, SolveResult,
};
use kdsp_core::BigRational;

use crate::artifacts::ArtifactWriter;
use crate::errors::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "kdsp",
    version,
    about = "K-densest sub-lattice toolkit: preprocess, budget, and search"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// LLL + gap preprocessing; emits the reduction plan as JSON
    Preprocess(PreprocessArgs),
    /// Qubit budgets for LLL- and HKZ-grade preprocessing
    Budget(BudgetArgs),
    /// Exhaustive classical solve over the encoded coefficient box
    Exact(ExactArgs),
    /// Diagonal spectrum export with gap estimate and analytic bound
    Spectrum(SpectrumArgs),
    /// Grover success-probability curve against the optimal-set oracle
    Grover(GroverArgs),
    /// Train a QAOA circuit and sample a measurement report
    Qaoa(QaoaArgs),
    /// One-layer gate-count sweep over lattice dimension (good vs bad basis)
    Gates(GatesArgs),
    /// Full pipeline bundle with a reproducibility manifest
    Report(ReportArgs),
    /// Normalize bundled CSV/JSON artifacts into plot-ready tables
    Plots(PlotsArgs),
}

#[derive(Args, Clone)]
pub struct CommonArgs {
    /// Basis file: whitespace text rows or {"rows": [[..]]} JSON
    #[arg(long)]
    pub basis: PathBuf,
    /// Sub-lattice dimension K
    #[arg(long)]
    pub k: usize,
    /// Output directory for artifacts
    #[arg(long, default_value = "kdsp-out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct PreprocessArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// LLL quality parameter (rational or decimal in (1/4, 1])
    #[arg(long, default_value = "1")]
    pub delta: String,
}

#[derive(Args)]
pub struct BudgetArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value = "1")]
    pub delta: String,
    /// Optional per-coordinate bit override (reported alongside the bounds)
    #[arg(long)]
    pub m: Option<u32>,
}

#[derive(Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Bits per coordinate: coefficients range over [-2^m, 2^m - 1]
    #[arg(long, default_value_t = 1)]
    pub m: u32,
}

#[derive(Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, default_value = "1")]
    pub delta: String,
    /// Ground-state penalization: "exp:R,S", "quadratic:E", or "auto"
    #[arg(long)]
    pub penalize: Option<String>,
}

#[derive(Args)]
pub struct GroverArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Iteration count override (default: floor(pi/4 sqrt(S/M)))
    #[arg(long)]
    pub iterations: Option<usize>,
}

#[derive(Args)]
pub struct QaoaArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// Number of QAOA layers (0 samples the bare uniform superposition)
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    /// Comma-separated vol^2 thresholds for the probability table
    #[arg(long, default_value = "5,10,20")]
    pub thresholds: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub penalize: Option<String>,
    /// Optimizer restarts (best kept)
    #[arg(long, default_value_t = 4)]
    pub restarts: usize,
    /// Epoch cap per restart
    #[arg(long, default_value_t = 1000)]
    pub epochs: usize,
    /// Gradient-descent learning rate
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    /// Stop when the cost change drops below this tolerance
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Central-difference step for the gradient estimate
    #[arg(long, default_value_t = 1e-3)]
    pub fd_step: f64,
}

#[derive(Args)]
pub struct GatesArgs {
    /// Sub-lattice dimension K
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, default_value_t = 3)]
    pub n_min: usize,
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    /// Seed for the reproducible bad-basis scramble
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "kdsp-out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, default_value = "1")]
    pub delta: String,
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    #[arg(long, default_value = "5,10,20")]
    pub thresholds: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub penalize: Option<String>,
}

#[derive(Args)]
pub struct PlotsArgs {
    /// Directory holding qaoa_p*_report.json / gates.csv artifacts
    #[arg(long)]
    pub report_dir: PathBuf,
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Preprocess(args) => in_dir(&args.common.out.clone(), |w| cmd_preprocess(&args, w)),
        Command::Budget(args) => in_dir(&args.common.out.clone(), |w| cmd_budget(&args, w)),
        Command::Exact(args) => in_dir(&args.common.out.clone(), |w| cmd_exact(&args, w)),
        Command::Spectrum(args) => in_dir(&args.common.out.clone(), |w| cmd_spectrum(&args, w)),
        Command::Grover(args) => in_dir(&args.common.out.clone(), |w| cmd_grover(&args, w)),
        Command::Qaoa(args) => in_dir(&args.common.out.clone(), |w| cmd_qaoa(&args, w)),
        Command::Gates(args) => in_dir(&args.out.clone(), |w| cmd_gates(&args, w)),
        Command::Report(args) => in_dir(&args.common.out.clone(), |w| cmd_report(&args, w)),
        Command::Plots(args) => in_dir(&args.report_dir.clone(), |w| cmd_plots(&args, w)),
    }
}

fn in_dir(dir: &Path, f: impl FnOnce(&mut ArtifactWriter) -> CliResult<()>) -> CliResult<()> {
    let mut writer = ArtifactWriter::new(dir)?;
    match f(&mut writer) {
        Ok(()) => Ok(()),
        Err(e) => {
            writer.rollback();
            Err(e)
        }
    }
}

// ---------------------------------------------------------------------------
// shared input handling
// ---------------------------------------------------------------------------

fn load_basis(path: &Path) -> CliResult<Basis> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        Ok(serde_json::from_str(&text)
            .map_err(|e| CliError::Parse(format!("bad basis JSON: {e}")))?)
    } else {
        Ok(Basis::parse_text(&text)?)
    }
}

fn parse_delta(s: &str) -> CliResult<BigRational> {
    let delta = parse_rational(s).map_err(|_| {
        CliError::Config(format!("--delta must be a rational or decimal, got {s:?}"))
    })?;
    let quarter = BigRational::new(1.into(), 4.into());
    if delta <= quarter || delta > BigRational::from_integer(1.into()) {
        return Err(CliError::Config(format!(
            "--delta must lie in (1/4, 1], got {s}"
        )));
    }
    Ok(delta)
}

fn parse_thresholds(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("bad threshold {t:?}")))
        })
        .collect()
}

enum PenalizeArg {
    Auto,
    Fixed(PenaltyScheme),
}

fn parse_penalize(s: &str) -> CliResult<PenalizeArg> {
    if s == "auto" {
        return Ok(PenalizeArg::Auto);
    }
    if let Some(rest) = s.strip_prefix("exp:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() == 2 {
            let r = parts[0].trim().parse::<f64>();
            let sv = parts[1].trim().parse::<f64>();
            if let (Ok(r), Ok(sv)) = (r, sv) {
                return Ok(PenalizeArg::Fixed(PenaltyScheme::Exp { r, s: sv }));
            }
        }
    }
    if let Some(rest) = s.strip_prefix("quadratic:") {
        if let Ok(e) = rest.trim().parse::<f64>() {
            return Ok(PenalizeArg::Fixed(PenaltyScheme::Quadratic { e }));
        }
    }
    Err(CliError::Config(format!(
        "--penalize must be \"exp:R,S\", \"quadratic:E\", or \"auto\", got {s:?}"
    )))
}

fn apply_penalize(diag: &DiagonalCost, arg: &Option<String>) -> CliResult<DiagonalCost> {
    let Some(spec) = arg else {
        return Ok(diag.clone());
    };
    let scheme = match parse_penalize(spec)? {
        PenalizeArg::Fixed(s) => s,
        PenalizeArg::Auto => {
            let gap = diag.min_nonzero().ok_or(CliError::Numerical(
                "cannot auto-tune penalty: diagonal has no nonzero value".into(),
            ))?;
            let (r, s) = exp_penalty_params(gap, gap)?;
            PenaltyScheme::Exp { r, s }
        }
    };
    Ok(penalize(diag, scheme)?)
}

fn validated_encoding(basis: &Basis, k: usize, m: u32) -> CliResult<EncodingConfig> {
    if k == 0 || k > basis.num_vectors() {
        return Err(CliError::Config(format!(
            "--k must lie in [1, {}], got {k}",
            basis.num_vectors()
        )));
    }
    Ok(EncodingConfig::new(k, basis.num_vectors(), m)?)
}

fn sha256_hex(path: &Path) -> CliResult<String> {
    let bytes = fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

fn cmd_preprocess(args: &PreprocessArgs, w: &mut ArtifactWriter) -> CliResult<()> {
    let delta = parse_delta(&args.delta)?;
    let basis = load_basis(&args.common.basis)?;
    if args.common.k >= basis.num_vectors() {
        return Err(CliError::Config(format!(
            "preprocess needs 1 <= k < N = {}",
            basis.num_vectors()
        )));
    }
    let plan = preprocess_with_delta(&basis, args.common.k, &delta)?;
    w.write_json("plan.json", &plan)?;
    Ok(())
}

#[derive(Serialize)]
struct BudgetOut {
    n_dim: usize,
    k: usize,
    delta: String,
    lll: QubitBudget,
    hkz: QubitBudget,
    #[serde(skip_serializing_if = "Option::is_none")]
    m_override: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m_override_total_qubits: Option<usize>,
}

fn cmd_budget(args: &BudgetArgs, w: &mut ArtifactWriter) -> CliResult<()> {
    let delta = parse_delta(&args.delta)?;
    let basis = load_basis(&args.common.basis)?;
    let n = basis.num_vectors();
    let k = args.common.k;
    let out = BudgetOut {
        n_dim: n,
        k,
        delta: format_rational(&delta),
        lll: qubit_budget(n, k, BudgetMode::Lll, &delta)?,
        hkz: qubit_budget(n, k, BudgetMode::Hkz, &delta)?,
        m_override: args.m,
        m_override_total_qubits: args.m.map(|m| k * n * (m as usize + 1)),
    };
    w.write_json("budget.json", &out)?;
    Ok(())
}

#[derive(Serialize)]
struct ExactOut {
    k: usize,
    m: u32,
    n_dim: usize,
    qubits: usize,
    solve: SolveResult,
    grover_log2_queries: f64,
}

fn cmd_exact(args: &ExactArgs, w: &mut ArtifactWriter) -> CliResult<()> {
    let basis = load_basis(&args.common.basis)?;
    let cfg = validated_encoding(&basis, args.common.k, args.m)?;
    let solve = brute_force_solve(&gram(&basis), &cfg)?;
    let grover_log2_queries =
        grover_runtime_estimate(cfg.n_dim, cfg.k, solve.m_count)?;
    let out = ExactOut {
        k: cfg.k,
        m: cfg.m,
        n_dim: cfg.n_dim,
        qubits: cfg.n,
        solve,
        grover_log2_queries,
    };
    w.write_json("solve.json", &out)?;
    Ok(())
}

#[derive(Serialize)]
struct SpectrumOut {
    k: usize,
    m: u32,
    qubits: usize,
    gap_bound: f64,
    gap_estimate: f64,
    min_nonzero_scan: f64,
    penalized: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    penalty: Option<PenaltyScheme>,
}

fn cmd_spectrum(args: &SpectrumArgs, w: &mut ArtifactWriter) -> CliResult<()> {
    let delta = parse_delta(&args.delta)?;
    let basis = load_basis(&args.common.basis)?;
    let cfg = validated_encoding(&basis, args.common.k, args.m)?;
    let diag = diagonal_vector_with_cap(&gram(&basis), &cfg, effective_statevector_cap())?;
    let reduced = lll_reduce(&basis, &delta)?;
    let gap_bound = spectral_gap_bound(&reduced, cfg.k, &delta)?;
    let gap_estimate = estimate_gap(&diag, gap_bound, 1e-6)?;
    let min_nonzero_scan = diag.min_nonzero().ok_or(CliError::Numerical(
        "diagonal is identically zero".into(),
    ))?;
    let exported = apply_penalize(&diag, &args.penalize)?;
    w.write("diagonal.bin", &exported.to_binary())?;
    w.write_json("diagonal.json", &exported.sidecar())?;
    w.write_json(
        "spectrum.json",
        &SpectrumOut {
            k: cfg.k,
            m: cfg.m,
            qubits: cfg.n,
            gap_bound,
            gap_estimate,
            min_nonzero_scan,
            penalized: exported.penalized(),
            penalty: exported.penalty_params(),
        },
    )?;
    Ok(())
}

#[derive(Serialize)]
struct GroverOut {
    threshold: f64,
    states: u64,
    target_count: u64,
    default_iterations: usize,
    outcome: GroverOutcome,
}

fn cmd_grover(args: &GroverArgs, w: &mut ArtifactWriter) -> CliResult<()> {
    let basis = load_basis(&args.common.basis)?;
    let cfg = validated_encoding(&basis, args.common.k, args.m)?;
    let g = gram(&basis);
    let diag = diagonal_vector_with_cap(&g, &cfg, effective_statevector_cap())?;
    let solve = brute_force_solve(&g, &cfg)?;
    let threshold = rational_to_f64(&solve.min_vol_sq);
    let default_iters = default_grover_iterations(cfg.states(), solve.m_count);
    let curve_len = args.iterations.unwrap_or(default_iters).max(default_iters);
    let curve = grover_success_curve(&diag, threshold, curve_len)?;
    let mut csv = String::from("iteration,success_probability\n");
    for (j, p) in curve.iter().enumerate() {
        csv.push_str(&format!("{j},{p}\n"));
    }
    w.write("grover_curve.csv", csv.as_bytes())?;
    let outcome = grover_simulate(&diag, threshold, args.iterations, args.seed)?;
    w.write_json(
        "grover.json",
        &GroverOut {
            threshold,
            states: cfg.states(),
            target_count: solve.m_count,
            default_iterations: default_iters,
            outcome,
        },
    )?;
    Ok(())
}

#[derive(Serialize)]
struct QaoaOut {
    p: usize,
    shots: u64,
    seed: u64,
    trained_expectation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    training: Option<OptimizeResult>,
    report: RunReport,
}

fn cmd_qaoa(args: &QaoaArgs, w: &mut ArtifactWriter) -> CliResult<()> {
    if args.shots < 1 {
        return Err(CliError::Config("--shots must be >= 1".into()));
    }
    let thresholds = parse_thresholds(&args.thresholds)?;
    let basis = load_basis(&args.common.basis)?;
    let cfg = validated_encoding(&basis, args.common.k, args.m)?;
    let diag = diagonal_vector_with_cap(&gram(&basis), &cfg, effective_statevector_cap())?;
    let diag = apply_penalize(&diag, &args.penalize)?;

    let (params, training) = if args.p == 0 {
        (QaoaParams::new(vec![], vec![]).expect("empty params"), None)
    } else {
        let opt_cfg = OptimizerConfig {
            max_epochs: args.epochs,
            tol: args.tol,
            learning_rate: args.lr,
            restarts: args.restarts,
            fd_step: args.fd_step,
        };
        let result = optimize_params(&diag, args.p, &opt_cfg, args.seed)?;
        (result.params.clone(), Some(result))
    };

    let report = sample_report(&diag, &params, args.shots, &thresholds, args.seed)?;
    let trace_csv = match &training {
        Some(t) => t.trace_csv(),
        None => format!("epoch,expectation\n0,{}\n", diag.mean()),
    };
    let p = args.p;
    w.write(&format!("qaoa_p{p}_trace.csv"), trace_csv.as_bytes())?;
    w.write(
        &format!("qaoa_p{p}_histogram.csv"),
        report.histogram_csv().as_bytes(),
    )?;
    let trained_expectation = training
        .as_ref()
        .map(|t| t.expectation)
        .unwrap_or_else(|| diag.mean());
    w.write_json(
        &format!("qaoa_p{p}_report.json"),
        &QaoaOut {
            p,
            shots: args.shots,
            seed: args.seed,
            trained_expectation,
            training,
            report,
        },
    )?;
    Ok(())
}

fn identity_basis(n: usize) -> Basis {
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    Basis::from_int_rows(&rows).expect("identity is a basis")
}

fn cmd_gates(args: &GatesArgs, w: &mut ArtifactWriter) -> CliResult<()> {
    if args.n_min < 2 || args.n_max < args.n_min {
        return Err(CliError::Config(
            "need 2 <= n_min <= n_max for the gate sweep".into(),
        ));
    }
    if args.k > 4 {
        return Err(CliError::Config(
            "symbolic gate counting is limited to k <= 4".into(),
        ));
    }
    let mut csv = String::from("n,good_one_qubit,good_two_qubit,bad_one_qubit,bad_two_qubit\n");
    for n in args.n_min..=args.n_max {
        let cfg = EncodingConfig::new(args.k, n, args.m)?;
        let good = identity_basis(n);
        let good_counts = count_gates(&build_pauli_cost(&gram(&good), &cfg)?);
        let bad = scramble_basis(&good, args.seed)?;
        let bad_counts = count_gates(&build_pauli_cost(&gram(&bad), &cfg)?);
        csv.push_str(&format!(
            "{n},{},{},{},{}\n",
            good_counts.one_qubit, good_counts.two_qubit, bad_counts.one_qubit, bad_counts.two_qubit
        ));
    }
    w.write("gates.csv", csv.as_bytes())?;
    Ok(())
}

#[derive(Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    basis_path: String,
    basis_sha256: String,
    k: usize,
    m: u32,
    delta: String,
    alpha: f64,
    p: usize,
    shots: u64,
    thresholds: Vec<f64>,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    penalize: Option<String>,
    statevector_cap: usize,
    files: Vec<String>,
    plan_action: String,
}

fn cmd_report(args: &ReportArgs, w: &mut ArtifactWriter) -> CliResult<()> {
    let delta = parse_delta(&args.delta)?;
    let thresholds = parse_thresholds(&args.thresholds)?;
    let basis = load_basis(&args.common.basis)?;
    let k = args.common.k;

    // preprocess
    let plan: Option<PreprocessPlan> = if k < basis.num_vectors() {
        let plan = preprocess_with_delta(&basis, k, &delta)?;
        w.write_json("plan.json", &plan)?;
        Some(plan)
    } else {
        None
    };

    cmd_budget(
        &BudgetArgs {
            common: args.common.clone(),
            delta: args.delta.clone(),
            m: Some(args.m),
        },
        w,
    )?;
    cmd_exact(
        &ExactArgs {
            common: args.common.clone(),
            m: args.m,
        },
        w,
    )?;
    cmd_spectrum(
        &SpectrumArgs {
            common: args.common.clone(),
            m: args.m,
            delta: args.delta.clone(),
            penalize: args.penalize.clone(),
        },
        w,
    )?;
    cmd_grover(
        &GroverArgs {
            common: args.common.clone(),
            m: args.m,
            seed: args.seed,
            iterations: None,
        },
        w,
    )?;
    cmd_qaoa(
        &QaoaArgs {
            common: args.common.clone(),
            m: args.m,
            p: args.p,
            shots: args.shots,
            thresholds: args.thresholds.clone(),
            seed: args.seed,
            penalize: args.penalize.clone(),
            restarts: 4,
            epochs: 1000,
            lr: 1e-3,
            tol: 1e-6,
            fd_step: 1e-3,
        },
        w,
    )?;
    cmd_gates(
        &GatesArgs {
            k,
            m: args.m,
            n_min: 3,
            n_max: 8,
            seed: args.seed,
            out: args.common.out.clone(),
        },
        w,
    )?;

    let mut files = w.file_names();
    files.sort();
    let manifest = Manifest {
        tool: "kdsp",
        version: env!("CARGO_PKG_VERSION"),
        basis_path: args.common.basis.display().to_string(),
        basis_sha256: sha256_hex(&args.common.basis)?,
        k,
        m: args.m,
        delta: format_rational(&delta),
        alpha: rational_to_f64(&kdsp_core::lattice::alpha_from_delta(&delta)),
        p: args.p,
        shots: args.shots,
        thresholds,
        seed: args.seed,
        penalize: args.penalize.clone(),
        statevector_cap: effective_statevector_cap(),
        files,
        plan_action: plan
            .map(|p| format!("{:?}", p.action))
            .unwrap_or_else(|| "none".into()),
    };
    w.write_json("manifest.json", &manifest)?;
    Ok(())
}

fn cmd_plots(args: &PlotsArgs, w: &mut ArtifactWriter) -> CliResult<()> {
    let dir = args.report_dir.clone();
    let mut reports: Vec<(usize, QaoaReportSlim)> = Vec::new();
    let mut gates_csv: Option<String> = None;
    for entry in fs::read_dir(&dir)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", dir.display())))?
    {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(p) = name
            .strip_prefix("qaoa_p")
            .and_then(|s| s.strip_suffix("_report.json"))
            .and_then(|s| s.parse::<usize>().ok())
        {
            let text = fs::read_to_string(entry.path())?;
            let parsed: QaoaReportSlim = serde_json::from_str(&text)
                .map_err(|e| CliError::Parse(format!("bad report {name}: {e}")))?;
            reports.push((p, parsed));
        } else if name == "gates.csv" {
            gates_csv = Some(fs::read_to_string(entry.path())?);
        }
    }
    if reports.is_empty() && gates_csv.is_none() {
        return Err(CliError::Parse(format!(
            "missing inputs: no qaoa_p*_report.json or gates.csv in {}",
            dir.display()
        )));
    }
    reports.sort_by_key(|(p, _)| *p);

    for (p, slim) in &reports {
        let shots: u64 = slim.report.shots;
        let total_bins = slim.report.histogram.len();
        let mut csv = String::from("vol_sq,occurrences,probability,truncated\n");
        let mut cumulative = 0.0;
        let mut truncated_from = total_bins;
        for (i, bin) in slim.report.histogram.iter().enumerate() {
            cumulative += bin.occurrences as f64 / shots as f64;
            if cumulative >= 0.99 && truncated_from == total_bins {
                truncated_from = i + 1;
            }
        }
        for (i, bin) in slim.report.histogram.iter().enumerate() {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                bin.vol_sq,
                bin.occurrences,
                bin.occurrences as f64 / shots as f64,
                u8::from(i >= truncated_from)
            ));
        }
        w.write(&format!("plot_histogram_p{p}.csv"), csv.as_bytes())?;
    }

    if !reports.is_empty() {
        // Table layout: one row per threshold, one column per p.
        let mut thresholds: Vec<f64> = reports
            .iter()
            .flat_map(|(_, s)| s.report.prob_below.iter().map(|(t, _)| *t))
            .collect();
        thresholds.sort_by(f64::total_cmp);
        thresholds.dedup();
        let mut csv = String::from("threshold");
        for (p, _) in &reports {
            csv.push_str(&format!(",p{p}"));
        }
        csv.push('\n');
        for t in &thresholds {
            csv.push_str(&format!("{t}"));
            for (_, slim) in &reports {
                match slim.report.prob_below.iter().find(|(tt, _)| tt == t) {
                    Some((_, prob)) => csv.push_str(&format!(",{prob}")),
                    None => csv.push(','),
                }
            }
            csv.push('\n');
        }
        w.write("plot_prob_below.csv", csv.as_bytes())?;
    }

    if let Some(g) = gates_csv {
        let mut csv = String::from("n,series,one_qubit,two_qubit\n");
        for line in g.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 5 {
                return Err(CliError::Parse(format!("bad gates.csv row: {line}")));
            }
            csv.push_str(&format!("{},good,{},{}\n", cols[0], cols[1], cols[2]));
            csv.push_str(&format!("{},bad,{},{}\n", cols[0], cols[3], cols[4]));
        }
        w.write("plot_gates.csv", csv.as_bytes())?;
    }
    Ok(())
}

#[derive(serde::Deserialize)]
struct QaoaReportSlim {
    report: RunReport,
}
