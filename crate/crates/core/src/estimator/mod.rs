//! Data-driven reproducing filters and the estimators built from them.
//!
//! Every fit has the same shape: choose `ψ ∈ C_n(Z)` inside a spectral
//! ℓ1/ℓ∞ budget to minimize `‖φ ∗ y − y‖²` over a window of `2n + 1` points,
//! where `φ = Δ^{lag} ψ`. The core fit scores `[−n, n]` with `lag = 0`, the
//! side fits of the multiscale estimator score windows centered at `±h`, and
//! the one-sided fit uses `lag = n` so that `φ` is causal.

mod multiscale;
mod projection;
mod solver;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::oracle::FilterBudget;
use crate::signal::{ObservationWindow, TwoSidedSequence};
use crate::spectral::{convolve, idft, SpectrumVec};
use crate::{Complex64, C_STAR};

pub use multiscale::{estimate_full, estimate_full_detailed, MultiscalePlan, SidePiece, SubRun};
pub use projection::project_l1_linf;
pub use solver::{FitResult, SolverConfig};

/// A single constrained least-squares filter fit.
#[derive(Clone, Debug)]
pub struct FitProblem {
    /// Observations; values outside the stored range count as zero.
    pub y: TwoSidedSequence,
    /// Half-width of both the filter variable and the scored window.
    pub n: usize,
    /// Delay applied to the variable: `φ_τ = ψ_{τ − lag}`.
    pub lag: i64,
    /// Center of the scored window `[center − n, center + n]`.
    pub center: i64,
    pub budget: FilterBudget,
}

impl FitProblem {
    /// Core fit on `[−n, n]` with the two-sided budget of order `s`.
    pub fn core(y: &TwoSidedSequence, n: usize, s: usize) -> Self {
        Self::shifted(y, n, 0, s)
    }

    /// Two-sided fit scored on the window centered at `h`.
    pub fn shifted(y: &TwoSidedSequence, n: usize, h: i64, s: usize) -> Self {
        Self {
            y: y.clone(),
            n,
            lag: 0,
            center: h,
            budget: FilterBudget::two_sided(n, s),
        }
    }

    /// One-sided fit: taps on `[lead, lead + 2n]`, scored on `[0, 2n]`.
    pub fn one_sided(y: &TwoSidedSequence, n: usize, s: usize, c1: f64, lead: usize) -> Self {
        Self {
            y: y.clone(),
            n,
            lag: (n + lead) as i64,
            center: n as i64,
            budget: FilterBudget::one_sided(n, s, c1),
        }
    }

    /// Indices read from `y` by the objective.
    pub fn data_range(&self) -> (i64, i64) {
        let n = self.n as i64;
        (self.center - self.lag - 2 * n, self.center - self.lag + 2 * n)
    }

    pub fn scored_range(&self) -> (i64, i64) {
        (self.center - self.n as i64, self.center + self.n as i64)
    }

    /// Allowed support of `φ`.
    pub fn filter_range(&self) -> (i64, i64) {
        (self.lag - self.n as i64, self.lag + self.n as i64)
    }
}

/// `‖φ ∗ y − y‖²` over the scored window of `problem`.
pub fn residual_objective(phi: &TwoSidedSequence, problem: &FitProblem) -> Result<f64> {
    let (lo, hi) = problem.filter_range();
    if !phi.supported_within(lo, hi) {
        let (a, b) = phi.support().unwrap_or((0, 0));
        return Err(Error::SupportViolation { lo: a, hi: b, min: lo, max: hi });
    }
    let (dlo, dhi) = problem.data_range();
    let conv = convolve(phi, &problem.y.window(dlo, dhi));
    let (slo, shi) = problem.scored_range();
    Ok((slo..=shi).map(|t| (conv.get(t) - problem.y.get(t)).norm_sqr()).sum())
}

/// Approximate minimizer of [`residual_objective`] over the budget.
pub fn fit_filter(problem: &FitProblem, config: &SolverConfig) -> FitResult {
    solver::solve(problem, config, None)
}

/// As [`fit_filter`], also guaranteeing an objective no larger than that of
/// `comparator` (projected onto the budget).
pub fn fit_filter_with_comparator(
    problem: &FitProblem,
    config: &SolverConfig,
    comparator: &TwoSidedSequence,
) -> FitResult {
    solver::solve(problem, config, Some(comparator))
}

/// An estimate together with the fits that produced it.
#[derive(Clone, Debug)]
pub struct Estimate {
    pub xhat: TwoSidedSequence,
    pub fits: Vec<FitResult>,
}

impl Estimate {
    pub fn converged(&self) -> bool {
        self.fits.iter().all(|f| f.converged)
    }
}

/// `(φ ∗ y)_t` for `t ∈ [lo, hi]`.
pub(crate) fn filter_output(phi: &TwoSidedSequence, y: &TwoSidedSequence, lo: i64, hi: i64) -> TwoSidedSequence {
    let conv = convolve(phi, y);
    TwoSidedSequence::from_fn(lo, hi, |t| conv.get(t))
}

fn check_order(s: usize) -> Result<()> {
    if s == 0 {
        return Err(Error::invalid("the subspace order s must be at least 1"));
    }
    Ok(())
}

/// Core estimate on `[−n, n]` from observations on `[−2n, 2n]`, `n = ⌊N/2⌋`.
pub fn estimate_core_detailed(y: &ObservationWindow, s: usize, config: &SolverConfig) -> Result<Estimate> {
    check_order(s)?;
    let n = y.half_width / 2;
    if n == 0 {
        return Err(Error::WindowTooShort { len: 2 * y.half_width + 1, required: 5 });
    }
    if 2 * n + 1 < 9 * (s - 1) {
        return Err(Error::invalid(format!(
            "core window 2n+1 = {} is shorter than 9(s−1) = {}",
            2 * n + 1,
            9 * (s - 1)
        )));
    }
    let fit = fit_filter(&FitProblem::core(&y.y, n, s), config);
    let n = n as i64;
    let xhat = filter_output(&fit.filter, &y.y, -n, n);
    Ok(Estimate { xhat, fits: vec![fit] })
}

pub fn estimate_core(y: &ObservationWindow, s: usize, config: &SolverConfig) -> Result<TwoSidedSequence> {
    estimate_core_detailed(y, s, config).map(|e| e.xhat)
}

/// One-sided estimate on `[0, 2n]` with `n = ⌊(N − lead)/2⌋`; with
/// `lead = h > 0` each value is predicted from observations up to `t − h`.
pub fn estimate_onesided_detailed(
    y: &ObservationWindow,
    s: usize,
    c1: f64,
    lead: usize,
    config: &SolverConfig,
) -> Result<Estimate> {
    check_order(s)?;
    if lead > y.half_width {
        return Err(Error::invalid("prediction lead exceeds the observation half-width"));
    }
    let n = (y.half_width - lead) / 2;
    if n == 0 {
        return Err(Error::WindowTooShort { len: 2 * y.half_width + 1, required: 2 * lead + 5 });
    }
    let fit = fit_filter(&FitProblem::one_sided(&y.y, n, s, c1, lead), config);
    let xhat = filter_output(&fit.filter, &y.y, 0, 2 * n as i64);
    Ok(Estimate { xhat, fits: vec![fit] })
}

pub fn estimate_onesided(
    y: &ObservationWindow,
    s: usize,
    c1: f64,
    lead: usize,
    config: &SolverConfig,
) -> Result<TwoSidedSequence> {
    estimate_onesided_detailed(y, s, c1, lead, config).map(|e| e.xhat)
}

/// A vertex of the core feasible set: `(C★/√(2n+1)) F_n^{−1}[Σ_k z_k e^{j_k}]`
/// over `18s` distinct grid indices `j_k` and random unit phases `z_k`.
pub fn sample_extreme_point(s: usize, n: usize, seed: u64) -> Result<TwoSidedSequence> {
    let len = 2 * n + 1;
    if s == 0 || 18 * s > len {
        return Err(Error::invalid(format!("extreme points need 1 ≤ 18s ≤ 2n+1, got s = {s}, n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let height = C_STAR / (len as f64).sqrt();
    let mut spec = SpectrumVec::zeros(n);
    for j in sample(&mut rng, len, 18 * s) {
        spec.values_mut()[j] = Complex64::from_polar(height, rng.random_range(0.0..std::f64::consts::TAU));
    }
    Ok(idft(&spec))
}
