use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sisrec::harness::{
    export_csv, export_json, generate_random_sis, init_thread_pool_from_env, random_signal, theory_checks, BenchConfig,
    CheckSizes, EstimatorMode, RootMode,
};
use sisrec::io::{read_json, write_json, SignalJson, SpecJson};
use sisrec::{
    add_noise, detect, estimate_core_detailed, estimate_full_detailed, estimate_onesided_detailed, hybrid_filter,
    hybrid_filter_causal, run_monte_carlo, verify_reproducing, Certificates, Complex64, FilterBudget, SolverConfig,
    TwoSidedSequence,
};

/// Exit code for a failed theory check.
const CHECK_FAILED: u8 = 2;

#[derive(Parser)]
#[command(name = "sisrec", version, about = "Denoising and detection of signals obeying an unknown linear recurrence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a signal from a shift-invariant subspace and add noise.
    Synth(SynthArgs),
    /// Build a reproducing filter for a known subspace and report its norms.
    Oracle(OracleArgs),
    /// Estimate the signal from noisy observations.
    Denoise(DenoiseArgs),
    /// Test for the presence of a signal.
    Detect(DetectArgs),
    /// Run a Monte Carlo risk experiment.
    Bench(BenchArgs),
    /// Run the numerical self-check suite.
    Check(CheckArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum RootModeArg {
    UnitCircle,
    Disk,
    Clustered,
    DftGrid,
}

impl From<RootModeArg> for RootMode {
    fn from(m: RootModeArg) -> Self {
        match m {
            RootModeArg::UnitCircle => RootMode::UnitCircle,
            RootModeArg::Disk => RootMode::Disk,
            RootModeArg::Clustered => RootMode::Clustered,
            RootModeArg::DftGrid => RootMode::DftGrid,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Core,
    Full,
    Causal,
}

impl From<ModeArg> for EstimatorMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Core => EstimatorMode::Core,
            ModeArg::Full => EstimatorMode::Full,
            ModeArg::Causal => EstimatorMode::Causal,
        }
    }
}

#[derive(Args)]
struct SynthArgs {
    /// Root set as JSON; a random one is drawn when absent.
    #[arg(long, conflicts_with = "s")]
    spec: Option<PathBuf>,
    /// Order of the random root set.
    #[arg(long, required_unless_present = "spec")]
    s: Option<usize>,
    #[arg(long, value_enum, default_value = "unit-circle")]
    root_mode: RootModeArg,
    /// Observation half-width N.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rescale the clean signal to this windowed ℓ₂ norm.
    #[arg(long)]
    norm: Option<f64>,
    /// Observation JSON.
    #[arg(long)]
    out: PathBuf,
    /// Also write the clean signal here.
    #[arg(long)]
    clean_out: Option<PathBuf>,
    /// Also write the root set here.
    #[arg(long)]
    spec_out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    m: usize,
    /// One-sided construction.
    #[arg(long)]
    causal: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = SolverConfig::default().tol)]
    solver_tol: f64,
    #[arg(long, default_value_t = SolverConfig::default().max_iter)]
    max_iter: usize,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            tol: self.solver_tol,
            max_iter: self.max_iter,
            ..SolverConfig::default()
        }
    }
}

#[derive(Args)]
struct DenoiseArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    s: usize,
    #[arg(long, value_enum, default_value = "core")]
    mode: ModeArg,
    /// Confidence level, recorded with the output.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Growth constant of the one-sided budget.
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    /// Prediction lead of the one-sided fit.
    #[arg(long, default_value_t = 0)]
    lead: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DetectArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    s: usize,
    /// Noise level; defaults to the one stored with the observations.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV output; overrides `out_path` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the full report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Sizes as JSON; built-in defaults otherwise.
    #[arg(long)]
    sizes: Option<PathBuf>,
    /// Write the report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SequenceOut {
    lo: i64,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<&TwoSidedSequence> for SequenceOut {
    fn from(x: &TwoSidedSequence) -> Self {
        Self {
            lo: x.lo(),
            re: x.values().iter().map(|v| v.re).collect(),
            im: x.values().iter().map(|v| v.im).collect(),
        }
    }
}

#[derive(Serialize)]
struct OracleOut {
    m: usize,
    n: usize,
    causal: bool,
    filter: SequenceOut,
    certificates: Certificates,
    budget: FilterBudget,
    within_budget: bool,
    reproducing_error: f64,
}

#[derive(Serialize)]
struct DenoiseOut {
    mode: &'static str,
    s: usize,
    delta: f64,
    xhat: SequenceOut,
    filter_spectra: Vec<SignalJson>,
    objective: f64,
    trace_len: usize,
    converged: bool,
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_json(path, value)?,
        None => println!("{}", serde_json::to_string_pretty(value)?),
    }
    Ok(())
}

fn synth(args: &SynthArgs) -> Result<()> {
    let spec = match (&args.spec, args.s) {
        (Some(path), _) => read_json::<SpecJson>(path)?.to_spec()?,
        (None, Some(s)) => generate_random_sis(s, args.root_mode.into(), args.n, args.seed)?,
        (None, None) => bail!("either --spec or --s is required"),
    };
    let mut x = random_signal(&spec, args.n, args.seed)?;
    if let Some(target) = args.norm {
        let current = x.seminorm(args.n, 2.0);
        if current > 0.0 {
            x = x.scaled(Complex64::new(target / current, 0.0));
        }
    }
    let y = add_noise(&x, args.n, args.sigma, args.seed.wrapping_add(1))?;
    write_json(&args.out, &SignalJson::from_sequence(&y.y, args.n, args.sigma))?;
    if let Some(path) = &args.clean_out {
        write_json(path, &SignalJson::from_sequence(&x, args.n, 0.0))?;
    }
    if let Some(path) = &args.spec_out {
        write_json(path, &SpecJson::from(&spec))?;
    }
    Ok(())
}

fn oracle(args: &OracleArgs) -> Result<()> {
    let spec = read_json::<SpecJson>(&args.spec)?.to_spec()?;
    let (h, budget) = if args.causal {
        let h = hybrid_filter_causal(&spec, args.m)?;
        let budget = FilterBudget::one_sided(h.n, spec.order(), 1.0);
        (h, budget)
    } else {
        let h = hybrid_filter(&spec, args.m)?;
        let budget = FilterBudget::two_sided(h.n, spec.order());
        (h, budget)
    };
    let out = OracleOut {
        m: h.m,
        n: h.n,
        causal: h.causal,
        filter: SequenceOut::from(&h.filter),
        certificates: h.certificates,
        budget,
        within_budget: h.certificates.within(&budget),
        reproducing_error: verify_reproducing(&h.filter, &spec, 5, h.n),
    };
    emit(&out, args.out.as_deref())
}

fn denoise(args: &DenoiseArgs) -> Result<()> {
    let y = read_json::<SignalJson>(&args.input)?.to_observation()?;
    let config = args.solver.config();
    let mode: EstimatorMode = args.mode.into();
    let est = match mode {
        EstimatorMode::Core => estimate_core_detailed(&y, args.s, &config)?,
        EstimatorMode::Full => estimate_full_detailed(&y, args.s, &config)?,
        EstimatorMode::Causal => estimate_onesided_detailed(&y, args.s, args.c1, args.lead, &config)?,
    };
    let out = DenoiseOut {
        mode: mode.as_str(),
        s: args.s,
        delta: args.delta,
        xhat: SequenceOut::from(&est.xhat),
        filter_spectra: est.fits.iter().map(|f| SignalJson::from_spectrum(&f.spectrum)).collect(),
        objective: est.fits.iter().map(|f| f.objective).sum(),
        trace_len: est.fits.iter().map(|f| f.trace.len()).sum(),
        converged: est.converged(),
    };
    emit(&out, args.out.as_deref())
}

fn detect_cmd(args: &DetectArgs) -> Result<()> {
    let input = read_json::<SignalJson>(&args.input)?;
    let sigma = args.sigma.unwrap_or(input.sigma);
    let y = input.to_observation()?;
    let outcome = detect(&y, args.s, sigma, args.delta, &args.solver.config())?;
    emit(&outcome, None)
}

fn bench(args: &BenchArgs) -> Result<()> {
    let config: BenchConfig = read_json(&args.config)?;
    let out = args
        .out
        .clone()
        .or_else(|| config.out_path.as_ref().map(PathBuf::from))
        .context("no CSV destination: pass --out or set out_path in the config")?;
    let report = run_monte_carlo(&config)?;
    for r in &report.reports {
        eprintln!(
            "n = {:5}  s = {:2}  mode = {:6}  (1−δ)-risk = {:.4e}  failures = {}  time = {:.1}s",
            r.n,
            r.s,
            r.mode,
            r.empirical_delta_risk.unwrap_or(f64::NAN),
            r.failures,
            r.wall_clock_secs
        );
    }
    export_csv(&report, &out)?;
    if let Some(path) = &args.json {
        export_json(&report, path)?;
    }
    Ok(())
}

fn check(args: &CheckArgs) -> Result<bool> {
    let sizes = match &args.sizes {
        Some(path) => read_json::<CheckSizes>(path)?,
        None => CheckSizes::default(),
    };
    let report = theory_checks(&sizes);
    for c in &report.checks {
        println!(
            "{:<26} {}  measured = {:.4e}  bound = {:.4e}  slack = {:.4e}",
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.measured,
            c.bound,
            c.slack
        );
    }
    if let Some(path) = &args.out {
        write_json(path, &report)?;
    }
    Ok(report.all_passed())
}

fn run(cli: &Cli) -> Result<ExitCode> {
    init_thread_pool_from_env()?;
    match &cli.command {
        Command::Synth(a) => synth(a)?,
        Command::Oracle(a) => oracle(a)?,
        Command::Denoise(a) => denoise(a)?,
        Command::Detect(a) => detect_cmd(a)?,
        Command::Bench(a) => bench(a)?,
        Command::Check(a) => {
            if !check(a)? {
                return Ok(ExitCode::from(CHECK_FAILED));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
