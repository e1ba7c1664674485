//! Monte Carlo experiments: random subspaces, risk estimation, detection
//! error rates, theory checks and report export.

mod checks;
mod report;

use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection::{detection_threshold, test_statistic, DetectionSetup};
use crate::error::{Error, Result};
use crate::estimator::{estimate_core_detailed, estimate_full_detailed, estimate_onesided_detailed, Estimate, SolverConfig};
use crate::signal::{add_noise, synthesize, ObservationWindow, Root, SisSpec, TwoSidedSequence};
use crate::Complex64;

pub use checks::{theory_checks, CheckReport, CheckResult, CheckSizes};
pub use report::{export_csv, export_csv_to, export_json, import_json, CSV_HEADER};

/// Arc length between the two roots of a clustered pair.
pub const CLUSTER_GAP: f64 = 1e-3;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "SISREC_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootMode {
    /// i.i.d. uniform phases on the unit circle.
    UnitCircle,
    /// Uniform in the closed unit disk.
    Disk,
    /// Pairs of unit-circle roots `10⁻³` apart in phase.
    Clustered,
    /// Distinct nodes of `T_n`.
    DftGrid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorMode {
    Core,
    Full,
    Causal,
}

impl EstimatorMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorMode::Core => "core",
            EstimatorMode::Full => "full",
            EstimatorMode::Causal => "causal",
        }
    }

    /// Inclusive scored window for filter half-width `n`.
    pub fn scored_range(&self, n: usize) -> (i64, i64) {
        let n = n as i64;
        match self {
            EstimatorMode::Core => (-n, n),
            EstimatorMode::Full => (-2 * n, 2 * n),
            EstimatorMode::Causal => (0, 2 * n),
        }
    }
}

fn default_true() -> bool {
    true
}

fn default_c1() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub trials: usize,
    pub n_list: Vec<usize>,
    pub s_list: Vec<usize>,
    pub sigma: f64,
    pub delta: f64,
    pub root_mode: RootMode,
    pub seed: u64,
    pub estimator_mode: EstimatorMode,
    #[serde(default)]
    pub out_path: Option<String>,
    /// Scale every signal to `‖x‖_{2n,2} = 1`.
    #[serde(default = "default_true")]
    pub normalize: bool,
    /// Draw one subspace per `(n, s)` instead of one per trial.
    #[serde(default)]
    pub fixed_spec: bool,
    #[serde(default = "default_c1")]
    pub c1: f64,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.n_list.is_empty() || self.s_list.is_empty() {
            return Err(Error::invalid("n_list and s_list must be nonempty"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid("delta must lie in (0, 1)"));
        }
        if self.sigma.is_nan() || self.sigma < 0.0 {
            return Err(Error::invalid("sigma must be nonnegative"));
        }
        for &n in &self.n_list {
            for &s in &self.s_list {
                check_sizes(self.estimator_mode, n, s)?;
            }
        }
        Ok(())
    }
}

fn check_sizes(mode: EstimatorMode, n: usize, s: usize) -> Result<()> {
    if s == 0 || n == 0 {
        return Err(Error::invalid("n and s must be at least 1"));
    }
    match mode {
        EstimatorMode::Core if 2 * n + 1 < 9 * (s - 1) => {
            Err(Error::invalid(format!("core estimation needs 2n+1 ≥ 9(s−1), got n = {n}, s = {s}")))
        }
        EstimatorMode::Full => crate::estimator::MultiscalePlan::new(n, s).map(|_| ()),
        _ => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Windowed mean squared error; absent when the trial failed.
    pub mse: Option<f64>,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Detection runs: `true` for draws under the alternative.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternative: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub statistic: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reject: Option<bool>,
}

impl TrialRecord {
    fn failed(trial: usize, err: Error) -> Self {
        Self {
            trial,
            mse: None,
            converged: false,
            error: Some(err.to_string()),
            alternative: None,
            statistic: None,
            reject: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    pub n: usize,
    pub s: usize,
    pub sigma: f64,
    pub mode: String,
    pub delta: f64,
    pub trials: Vec<TrialRecord>,
    /// `⌈(1−δ)T⌉`-th smallest MSE over the `T` successful trials.
    pub empirical_delta_risk: Option<f64>,
    pub failures: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type1_errors: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub type2_errors: Option<usize>,
    #[serde(default)]
    pub wall_clock_secs: f64,
}

impl RiskReport {
    pub fn per_trial_mse(&self) -> Vec<f64> {
        self.trials.iter().filter_map(|t| t.mse).collect()
    }

    pub fn median_mse(&self) -> Option<f64> {
        let mut v = self.per_trial_mse();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let mid = v.len() / 2;
        Some(if v.len() % 2 == 1 { v[mid] } else { 0.5 * (v[mid - 1] + v[mid]) })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub reports: Vec<RiskReport>,
}

/// `⌈(1−δ)T⌉`-th order statistic (1-based) of `values`.
pub fn delta_quantile(values: &[f64], delta: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = ((1.0 - delta) * v.len() as f64 - 1e-9).ceil().max(1.0) as usize;
    Some(v[rank.min(v.len()) - 1])
}

/// SplitMix64 finalizer applied to `seed + (index + 1)·φ64`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Salts separating the random streams drawn for one trial.
const SPEC_SALT: u64 = 0x5350_4543;
const COEFF_SALT: u64 = 0x434f_4546;

/// Random root set of order `s`; `grid_n` fixes `T_n` for [`RootMode::DftGrid`].
pub fn generate_random_sis(s: usize, mode: RootMode, grid_n: usize, seed: u64) -> Result<SisSpec> {
    if s == 0 {
        return Err(Error::invalid("s must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    let roots: Vec<Complex64> = match mode {
        RootMode::UnitCircle => (0..s).map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..tau))).collect(),
        RootMode::Disk => (0..s)
            .map(|_| {
                let r: f64 = rng.random_range(0.0..=1.0f64).sqrt();
                Complex64::from_polar(r.max(1e-3), rng.random_range(0.0..tau))
            })
            .collect(),
        RootMode::Clustered => {
            let mut out = Vec::with_capacity(s);
            while out.len() < s {
                let phase = rng.random_range(0.0..tau);
                out.push(Complex64::from_polar(1.0, phase));
                if out.len() < s {
                    out.push(Complex64::from_polar(1.0, phase + CLUSTER_GAP));
                }
            }
            out
        }
        RootMode::DftGrid => {
            let len = 2 * grid_n + 1;
            if s > len {
                return Err(Error::invalid(format!("T_{grid_n} has only {len} nodes, cannot pick {s}")));
            }
            let mut idx = sample(&mut rng, len, s).into_vec();
            idx.sort_unstable();
            idx.into_iter()
                .map(|j| Complex64::from_polar(1.0, tau * j as f64 / len as f64))
                .collect()
        }
    };
    SisSpec::new(roots.into_iter().map(Root::simple).collect())
}

/// Random `x ∈ X` on `[−half, half]` with i.i.d. complex Gaussian coefficients.
///
/// The signal is synthesized on `[0, 2·half]` and moved left, which keeps
/// roots inside the disk from overflowing at negative times.
pub fn random_signal(spec: &SisSpec, half: usize, seed: u64) -> Result<TwoSidedSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<Complex64> = (0..spec.order())
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect();
    let h = half as i64;
    let x = synthesize(spec, &coeffs, 0, 2 * h)?;
    Ok(x.delay(-h))
}

fn normalized(x: TwoSidedSequence, half: usize) -> TwoSidedSequence {
    let norm = x.seminorm(half, 2.0);
    if norm > 0.0 {
        x.scaled(Complex64::new(1.0 / norm, 0.0))
    } else {
        x
    }
}

fn run_estimator(mode: EstimatorMode, y: &ObservationWindow, s: usize, c1: f64, solver: &SolverConfig) -> Result<Estimate> {
    match mode {
        EstimatorMode::Core => estimate_core_detailed(y, s, solver),
        EstimatorMode::Full => estimate_full_detailed(y, s, solver),
        EstimatorMode::Causal => estimate_onesided_detailed(y, s, c1, 0, solver),
    }
}

fn spec_for_trial(config: &BenchConfig, n: usize, s: usize, trial: usize) -> Result<SisSpec> {
    let base = config.seed ^ SPEC_SALT ^ ((n as u64) << 20) ^ s as u64;
    let seed = if config.fixed_spec { trial_seed(base, u64::MAX) } else { trial_seed(base, trial as u64) };
    let spec = generate_random_sis(s, config.root_mode, n, seed)?;
    Ok(spec)
}

fn one_trial(config: &BenchConfig, n: usize, s: usize, trial: usize) -> Result<TrialRecord> {
    let spec = spec_for_trial(config, n, s, trial)?;
    let half = 2 * n;
    let x = random_signal(&spec, half, trial_seed(config.seed ^ COEFF_SALT, trial as u64))?;
    let x = if config.normalize { normalized(x, half) } else { x };
    let y = add_noise(&x, half, config.sigma, trial_seed(config.seed, trial as u64))?;
    let est = run_estimator(config.estimator_mode, &y, s, config.c1, &config.solver)?;
    let (lo, hi) = config.estimator_mode.scored_range(n);
    let mse = (lo..=hi).map(|t| (est.xhat.get(t) - x.get(t)).norm_sqr()).sum::<f64>() / (hi - lo + 1) as f64;
    Ok(TrialRecord {
        trial,
        mse: Some(mse),
        converged: est.converged(),
        error: None,
        alternative: None,
        statistic: None,
        reject: None,
    })
}

/// Risk estimate for one `(n, s)` pair. Trial failures are recorded, not raised.
pub fn run_risk(config: &BenchConfig, n: usize, s: usize) -> Result<RiskReport> {
    check_sizes(config.estimator_mode, n, s)?;
    let start = Instant::now();
    let trials: Vec<TrialRecord> = (0..config.trials)
        .into_par_iter()
        .map(|t| one_trial(config, n, s, t).unwrap_or_else(|e| TrialRecord::failed(t, e)))
        .collect();
    let failures = trials.iter().filter(|t| t.mse.is_none()).count();
    let mses: Vec<f64> = trials.iter().filter_map(|t| t.mse).collect();
    Ok(RiskReport {
        n,
        s,
        sigma: config.sigma,
        mode: config.estimator_mode.as_str().to_string(),
        delta: config.delta,
        empirical_delta_risk: delta_quantile(&mses, config.delta),
        trials,
        failures,
        type1_errors: None,
        type2_errors: None,
        wall_clock_secs: start.elapsed().as_secs_f64(),
    })
}

/// Risk reports for every `(n, s)` pair of the configuration.
pub fn run_monte_carlo(config: &BenchConfig) -> Result<BenchReport> {
    config.validate()?;
    let mut reports = Vec::new();
    for &n in &config.n_list {
        for &s in &config.s_list {
            reports.push(run_risk(config, n, s)?);
        }
    }
    Ok(BenchReport { reports })
}

/// Type-I / Type-II error counts of the detection test.
///
/// Trials `0..T` draw pure noise, trials `T..2T` add a signal scaled to
/// `‖x‖_{2n,2} = signal_norm` (default `r₀`). The full-window estimator is
/// always used.
pub fn run_detection(config: &BenchConfig, n: usize, s: usize, signal_norm: Option<f64>) -> Result<RiskReport> {
    let setup = DetectionSetup::new(n, s, config.sigma, config.delta)?;
    crate::estimator::MultiscalePlan::new(n, s)?;
    let threshold = detection_threshold(&setup);
    let radius = signal_norm.unwrap_or_else(|| threshold.sqrt());
    let half = 2 * n;
    let start = Instant::now();
    let total = config.trials;
    let trials: Vec<TrialRecord> = (0..2 * total)
        .into_par_iter()
        .map(|t| {
            let alternative = t >= total;
            let run = || -> Result<TrialRecord> {
                let x = if alternative {
                    let spec = spec_for_trial(config, n, s, t)?;
                    let x = random_signal(&spec, half, trial_seed(config.seed ^ COEFF_SALT, t as u64))?;
                    normalized(x, half).scaled(Complex64::new(radius, 0.0))
                } else {
                    TwoSidedSequence::zeros(-(half as i64), half as i64)
                };
                let y = add_noise(&x, half, config.sigma, trial_seed(config.seed, t as u64))?;
                let est = estimate_full_detailed(&y, s, &config.solver)?;
                let statistic = test_statistic(&y, &est.xhat)?;
                Ok(TrialRecord {
                    trial: t,
                    mse: None,
                    converged: est.converged(),
                    error: None,
                    alternative: Some(alternative),
                    statistic: Some(statistic),
                    reject: Some(statistic > 0.625 * threshold),
                })
            };
            run().unwrap_or_else(|e| TrialRecord {
                alternative: Some(alternative),
                ..TrialRecord::failed(t, e)
            })
        })
        .collect();
    let failures = trials.iter().filter(|t| t.statistic.is_none()).count();
    let type1 = trials.iter().filter(|t| t.alternative == Some(false) && t.reject == Some(true)).count();
    let type2 = trials.iter().filter(|t| t.alternative == Some(true) && t.reject == Some(false)).count();
    Ok(RiskReport {
        n,
        s,
        sigma: config.sigma,
        mode: "detect".to_string(),
        delta: config.delta,
        trials,
        empirical_delta_risk: None,
        failures,
        type1_errors: Some(type1),
        type2_errors: Some(type2),
        wall_clock_secs: start.elapsed().as_secs_f64(),
    })
}

/// Builds the global worker pool with at most `SISREC_THREADS` workers.
/// Does nothing when the variable is unset or the pool already exists.
pub fn init_thread_pool_from_env() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::invalid(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    if threads == 0 {
        return Err(Error::invalid(format!("{THREADS_ENV} must be a positive integer")));
    }
    // a second initialization (e.g. from tests) keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}
