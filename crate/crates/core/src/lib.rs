//! Estimation and detection of signals that satisfy an unknown linear
//! recurrence of known order, observed in complex Gaussian noise.
//!
//! The crate is organized bottom-up:
//!
//! - [`signal`]: two-sided sequences, shift-invariant subspaces given by
//!   their characteristic roots, synthesis and noise.
//! - [`spectral`]: the unitary DFT on symmetric windows, convolution,
//!   Dirichlet/Fejér kernels and grid-summation quantities.
//! - [`oracle`]: construction of reproducing filters with certified
//!   spectral norms (two-sided and causal).
//! - [`estimator`]: the constrained least-squares filter fit, its exact
//!   projection, and the core / multiscale / one-sided estimators.
//! - [`detection`]: test statistic and closed-form threshold.
//! - [`harness`]: Monte Carlo runner, theory checks and report export.

pub mod detection;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod io;
pub mod oracle;
pub mod signal;
pub mod spectral;

pub use num_complex::Complex64;

pub use detection::{detect, detection_threshold, test_statistic, DetectionOutcome, DetectionSetup};
pub use harness::{
    generate_random_sis, run_detection, run_monte_carlo, theory_checks, BenchConfig, BenchReport, CheckReport, CheckSizes,
    EstimatorMode, RiskReport, RootMode, TrialRecord,
};
pub use error::{Error, Result};
pub use estimator::{
    estimate_core, estimate_core_detailed, estimate_full, estimate_full_detailed, estimate_onesided,
    estimate_onesided_detailed, fit_filter, fit_filter_with_comparator, project_l1_linf,
    residual_objective, sample_extreme_point, Estimate, FitProblem, FitResult, MultiscalePlan,
    SolverConfig,
};
pub use oracle::{
    approx_support, autoconvolve_power, convolution_power_constant, fejer_interpolant,
    fejer_interpolant_causal, hybrid_filter, hybrid_filter_causal, min_norm_causal_filter,
    projector_row_filter, verify_reproducing, Certificates, FilterBudget, HybridFilter, SupportSet,
};
pub use signal::{add_noise, apply_recurrence, seminorm, synthesize, ObservationWindow, Root, SisSpec, TwoSidedSequence};
pub use spectral::{
    convolve, dft, dirichlet, eval_grid, fejer, fejer_causal, idft, kernel_grid_sum,
    sparse_oversampling_ratio, SpectrumVec,
};

/// The universal constant `2.16 π² + 6` bounding the sup-norm of the hybrid
/// reproducing filter's spectrum (times `√(2n+1)`).
pub const C_STAR: f64 = 2.16 * std::f64::consts::PI * std::f64::consts::PI + 6.0;

/// Sup-norm bound `1.08 π² + 2` for the Fejér interpolant on a `9m` grid.
pub const INTERPOLANT_BOUND: f64 = 1.08 * std::f64::consts::PI * std::f64::consts::PI + 2.0;
