//! Accelerated projected gradient for the constrained filter fit.
//!
//! The variable is the spectrum `w = F_n[ψ]` of a filter `ψ ∈ C_n(Z)`; the
//! fitted filter is `φ = Δ^{lag} ψ`. The objective
//! `‖φ ∗ y − y‖²` over the scored window is `‖Aψ − b‖²` with `A` a slice of
//! the convolution by `y`, applied through zero-padded FFTs.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::projection::project_l1_linf;
use super::FitProblem;
use crate::spectral::{dft, fast_len, fft_forward, fft_inverse, SpectrumVec};
use crate::signal::TwoSidedSequence;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iter: usize,
    /// Stop once an iteration lowers the objective by less than this fraction.
    pub tol: f64,
    /// Reset momentum whenever the objective goes up.
    pub restart: bool,
    pub lipschitz_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iter: 2000,
            tol: 1e-8,
            restart: true,
            lipschitz_iters: 30,
        }
    }
}

/// Step size is `1/(LIPSCHITZ_SAFETY · L)`.
const LIPSCHITZ_SAFETY: f64 = 1.05;

#[derive(Clone, Debug)]
pub struct FitResult {
    /// Fitted filter `φ̂`, already delayed by the problem's lag.
    pub filter: TwoSidedSequence,
    /// `F_n[ψ̂]` of the undelayed filter.
    pub spectrum: SpectrumVec,
    /// `‖φ̂ ∗ y − y‖²` over the scored window.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after every iteration.
    pub trace: Vec<f64>,
}

/// `ψ ↦ (φ ∗ y)` on the scored window and its adjoint, both FFT-applied.
pub(crate) struct ConvOperator {
    nf: usize,
    len: usize,
    y_hat: Vec<Complex64>,
    ry_hat: Vec<Complex64>,
    pub(crate) target: Vec<Complex64>,
}

impl ConvOperator {
    pub(crate) fn new(problem: &FitProblem) -> Self {
        let nf = problem.n;
        let span = 4 * nf + 1;
        let first = problem.center - problem.lag - 2 * nf as i64;
        let seg: Vec<Complex64> = (0..span as i64).map(|i| problem.y.get(first + i)).collect();
        let len = fast_len(span + 2 * nf);
        let mut y_hat = vec![Complex64::new(0.0, 0.0); len];
        y_hat[..span].copy_from_slice(&seg);
        fft_forward(&mut y_hat);
        let mut ry_hat = vec![Complex64::new(0.0, 0.0); len];
        for (k, v) in seg.iter().rev().enumerate() {
            ry_hat[k] = v.conj();
        }
        fft_forward(&mut ry_hat);
        let start = problem.center - nf as i64;
        let target = (0..=2 * nf as i64).map(|i| problem.y.get(start + i)).collect();
        Self {
            nf,
            len,
            y_hat,
            ry_hat,
            target,
        }
    }

    fn correlate(&self, input: &[Complex64], kernel_hat: &[Complex64]) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        buf[..input.len()].copy_from_slice(input);
        fft_forward(&mut buf);
        for (a, b) in buf.iter_mut().zip(kernel_hat) {
            *a *= b;
        }
        fft_inverse(&mut buf);
        let scale = 1.0 / self.len as f64;
        let offset = 2 * self.nf;
        buf[offset..offset + 2 * self.nf + 1].iter().map(|v| v * scale).collect()
    }

    /// `(φ ∗ y)_t` on the scored window for taps `ψ_{−n..n}`.
    pub(crate) fn apply(&self, taps: &[Complex64]) -> Vec<Complex64> {
        self.correlate(taps, &self.y_hat)
    }

    pub(crate) fn adjoint(&self, r: &[Complex64]) -> Vec<Complex64> {
        self.correlate(r, &self.ry_hat)
    }

    pub(crate) fn residual_sq(&self, image: &[Complex64]) -> f64 {
        image.iter().zip(&self.target).map(|(a, b)| (a - b).norm_sqr()).sum()
    }

    /// Largest eigenvalue of `AᴴA` by power iteration from a fixed start.
    pub(crate) fn lipschitz(&self, iters: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x11f5);
        let dim = 2 * self.nf + 1;
        let mut v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let mut estimate = 0.0;
        for _ in 0..iters.max(1) {
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            v.iter_mut().for_each(|z| *z /= norm);
            let next = self.adjoint(&self.apply(&v));
            estimate = next.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v = next;
        }
        estimate
    }
}

/// Taps `ψ_{−n..n}` from `F_n[ψ]`.
pub(crate) fn spectrum_to_taps(w: &[Complex64]) -> Vec<Complex64> {
    let len = w.len();
    let nf = (len - 1) / 2;
    let mut buf = w.to_vec();
    fft_inverse(&mut buf);
    let scale = 1.0 / (len as f64).sqrt();
    (0..len).map(|j| buf[(j + len - nf) % len] * scale).collect()
}

/// `F_n[ψ]` from taps `ψ_{−n..n}`.
pub(crate) fn taps_to_spectrum(taps: &[Complex64]) -> Vec<Complex64> {
    let len = taps.len();
    let nf = (len - 1) / 2;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (j, v) in taps.iter().enumerate() {
        buf[(j + len - nf) % len] = *v;
    }
    fft_forward(&mut buf);
    let scale = 1.0 / (len as f64).sqrt();
    buf.iter_mut().for_each(|v| *v *= scale);
    buf
}

fn taps_to_filter(taps: &[Complex64], problem: &FitProblem) -> TwoSidedSequence {
    TwoSidedSequence::new(problem.lag - problem.n as i64, taps.to_vec())
}

fn axpby(a: &[Complex64], b: &[Complex64], beta: f64) -> Vec<Complex64> {
    // a + β (a − b)
    a.iter().zip(b).map(|(x, y)| x + (x - y) * beta).collect()
}

struct Point {
    w: Vec<Complex64>,
    image: Vec<Complex64>,
    value: f64,
}

/// Minimizes the fit objective over the problem's budget.
///
/// Candidates for the warm start are the zero filter, the projected unit
/// pulse and, when given, the projected `comparator` (a filter whose support
/// must fit the problem); the returned filter is never worse than any of them.
pub fn solve(problem: &FitProblem, config: &SolverConfig, comparator: Option<&TwoSidedSequence>) -> FitResult {
    let nf = problem.n;
    let dim = 2 * nf + 1;
    let op = ConvOperator::new(problem);
    let zero_value: f64 = op.target.iter().map(|v| v.norm_sqr()).sum();
    let r1 = problem.budget.l1_cap();
    let rinf = problem.budget.linf_cap();
    let zero_spec = vec![Complex64::new(0.0, 0.0); dim];

    let finish = |w: Vec<Complex64>, value: f64, iterations: usize, converged: bool, trace: Vec<f64>| {
        let taps = spectrum_to_taps(&w);
        FitResult {
            filter: taps_to_filter(&taps, problem),
            spectrum: SpectrumVec::new(nf, w).expect("spectrum length is 2n+1"),
            objective: value,
            iterations,
            converged,
            trace,
        }
    };

    if problem.budget.is_degenerate() || zero_value == 0.0 {
        return finish(zero_spec, zero_value, 0, true, vec![zero_value]);
    }

    let evaluate = |w: Vec<Complex64>| {
        let image = op.apply(&spectrum_to_taps(&w));
        let value = op.residual_sq(&image);
        Point { w, image, value }
    };

    let mut candidates = vec![Point {
        image: vec![Complex64::new(0.0, 0.0); dim],
        w: zero_spec,
        value: zero_value,
    }];
    let mut pulse = vec![Complex64::new(0.0, 0.0); dim];
    pulse[nf] = Complex64::new(1.0, 0.0);
    candidates.push(evaluate(project_l1_linf(&taps_to_spectrum(&pulse), r1, rinf)));
    if let Some(phi) = comparator {
        let psi = phi.delay(-problem.lag);
        let w = dft(&psi, nf).into_values();
        candidates.push(evaluate(project_l1_linf(&w, r1, rinf)));
    }
    let start = candidates
        .into_iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one candidate");

    let lipschitz = op.lipschitz(config.lipschitz_iters);
    if !(lipschitz > 0.0 && lipschitz.is_finite()) {
        return finish(start.w, start.value, 0, true, vec![start.value]);
    }
    let step = 1.0 / (LIPSCHITZ_SAFETY * lipschitz);

    let mut trace = vec![start.value];
    let mut best_w = start.w.clone();
    let mut best_value = start.value;
    let mut x = start;
    let mut z_w = x.w.clone();
    let mut z_image = x.image.clone();
    let mut t = 1.0f64;
    let mut converged = false;
    let mut iterations = 0;
    let mut just_restarted = false;

    while iterations < config.max_iter {
        iterations += 1;
        let residual: Vec<Complex64> = z_image.iter().zip(&op.target).map(|(a, b)| a - b).collect();
        let grad = taps_to_spectrum(&op.adjoint(&residual));
        let trial: Vec<Complex64> = z_w.iter().zip(&grad).map(|(z, g)| z - g * step).collect();
        let next = evaluate(project_l1_linf(&trial, r1, rinf));
        trace.push(next.value);

        if next.value < best_value {
            best_value = next.value;
            best_w.clone_from(&next.w);
        }
        if next.value <= f64::MIN_POSITIVE {
            converged = true;
            break;
        }
        if config.restart && next.value > x.value {
            if just_restarted {
                // a plain projected step from x failed to descend: x is optimal to rounding
                converged = true;
                break;
            }
            t = 1.0;
            z_w.clone_from(&x.w);
            z_image.clone_from(&x.image);
            just_restarted = true;
            continue;
        }
        just_restarted = false;
        let decrease = (x.value - next.value) / x.value.max(f64::MIN_POSITIVE);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        z_w = axpby(&next.w, &x.w, beta);
        z_image = axpby(&next.image, &x.image, beta);
        t = t_next;
        x = next;
        if decrease.abs() < config.tol {
            converged = true;
            break;
        }
    }
    finish(best_w, best_value, iterations, converged, trace)
}
