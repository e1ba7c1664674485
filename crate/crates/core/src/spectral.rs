//! Unitary DFT over symmetric windows, z-transform evaluation, convolution
//! and the Dirichlet/Fejér kernels.
//!
//! The z-transform convention is `u(z) = Σ_τ u_τ z^{−τ}` throughout, and the
//! grid node with index `k` is `χ_{k,n} = exp(i2πk/(2n+1))`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::signal::TwoSidedSequence;

/// Sizes at or below this use direct convolution.
pub const CONVOLVE_CROSSOVER: usize = 64;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if forward {
            p.plan_fft_forward(len)
        } else {
            p.plan_fft_inverse(len)
        }
    })
}

/// Unnormalized forward transform `X_k = Σ_j x_j e^{−i2πjk/L}` in place.
pub(crate) fn fft_forward(buf: &mut [Complex64]) {
    if !buf.is_empty() {
        plan(buf.len(), true).process(buf);
    }
}

/// Unnormalized inverse transform `x_j = Σ_k X_k e^{i2πjk/L}` in place.
pub(crate) fn fft_inverse(buf: &mut [Complex64]) {
    if !buf.is_empty() {
        plan(buf.len(), false).process(buf);
    }
}

/// Smallest `2^a 3^b` that is at least `n`.
pub(crate) fn fast_len(n: usize) -> usize {
    let n = n.max(1);
    let mut best = n.next_power_of_two();
    let mut p3 = 1usize;
    while p3 < best {
        let mut v = p3;
        while v < n {
            v *= 2;
        }
        best = best.min(v);
        p3 *= 3;
    }
    best
}

/// The unitary DFT `F_n[u]`, entry `k` attached to node `χ_{k,n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumVec {
    n: usize,
    values: Vec<Complex64>,
}

impl SpectrumVec {
    pub fn new(n: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != 2 * n + 1 {
            return Err(Error::invalid(format!(
                "spectrum of half-width {n} needs {} entries, got {}",
                2 * n + 1,
                values.len()
            )));
        }
        Ok(Self { n, values })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            values: vec![Complex64::new(0.0, 0.0); 2 * n + 1],
        }
    }

    /// `√(2n+1) e^k`, the spectrum of `τ ↦ χ_{k,n}^τ`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut s = Self::zeros(n);
        s.values[k] = Complex64::new(((2 * n + 1) as f64).sqrt(), 0.0);
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `‖·‖_p` of the entries; `p = ∞` gives the largest magnitude.
    pub fn norm(&self, p: f64) -> f64 {
        vec_norm(&self.values, p)
    }
}

pub(crate) fn vec_norm(v: &[Complex64], p: f64) -> f64 {
    if p.is_infinite() {
        v.iter().map(|z| z.norm()).fold(0.0, f64::max)
    } else if p == 1.0 {
        v.iter().map(|z| z.norm()).sum()
    } else if p == 2.0 {
        v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    } else {
        v.iter().map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// `u(e^{i2πj/len})` for `j = 0..len`. Coefficients outside a window of
/// length `len` are folded, which is exact on the circle grid.
pub fn eval_on_circle(u: &TwoSidedSequence, len: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    let l = len as i64;
    for (i, v) in u.values().iter().enumerate() {
        let tau = u.lo() + i as i64;
        buf[tau.rem_euclid(l) as usize] += v;
    }
    fft_forward(&mut buf);
    buf
}

/// `F_n[u]` with `u` first restricted to `[−n, n]`.
pub fn dft(u: &TwoSidedSequence, n: usize) -> SpectrumVec {
    let restricted = u.window(-(n as i64), n as i64);
    let len = 2 * n + 1;
    let scale = 1.0 / (len as f64).sqrt();
    let values = eval_on_circle(&restricted, len).into_iter().map(|v| v * scale).collect();
    SpectrumVec { n, values }
}

/// `F_n^{−1}[a]`, a sequence on `[−n, n]`.
pub fn idft(a: &SpectrumVec) -> TwoSidedSequence {
    let n = a.n as i64;
    let len = a.values.len();
    let mut buf = a.values.clone();
    fft_inverse(&mut buf);
    let scale = 1.0 / (len as f64).sqrt();
    TwoSidedSequence::from_fn(-n, n, |t| buf[t.rem_euclid(len as i64) as usize] * scale)
}

/// `u(χ_{k,N})` for `k = 0..2N`, equal to `√(2N+1) F_N[u]`.
pub fn eval_grid(u: &TwoSidedSequence, n: usize) -> Result<Vec<Complex64>> {
    let bound = n as i64;
    if !u.supported_within(-bound, bound) {
        let (lo, hi) = u.support().unwrap_or((0, 0));
        return Err(Error::SupportViolation {
            lo,
            hi,
            min: -bound,
            max: bound,
        });
    }
    Ok(eval_on_circle(u, 2 * n + 1))
}

/// Direct evaluation of `u(z) = Σ u_τ z^{−τ}` by Horner's rule in `z^{−1}`.
pub fn eval_at(u: &TwoSidedSequence, z: Complex64) -> Complex64 {
    let w = z.inv();
    let acc = u
        .values()
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, v| acc * w + v);
    acc * w.powi(u.lo() as i32)
}

/// `max_z |u(z)|` estimated on `len` equispaced points of the unit circle.
pub fn sup_on_circle(u: &TwoSidedSequence, len: usize) -> f64 {
    vec_norm(&eval_on_circle(u, len), f64::INFINITY)
}

pub fn convolve_direct(u: &TwoSidedSequence, v: &TwoSidedSequence) -> TwoSidedSequence {
    if u.is_empty() || v.is_empty() {
        return TwoSidedSequence::default();
    }
    let (a, b) = (u.values(), v.values());
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    TwoSidedSequence::new(u.lo() + v.lo(), out)
}

pub fn convolve_fft(u: &TwoSidedSequence, v: &TwoSidedSequence) -> TwoSidedSequence {
    if u.is_empty() || v.is_empty() {
        return TwoSidedSequence::default();
    }
    let out_len = u.len() + v.len() - 1;
    let len = fast_len(out_len);
    let mut a = vec![Complex64::new(0.0, 0.0); len];
    let mut b = a.clone();
    a[..u.len()].copy_from_slice(u.values());
    b[..v.len()].copy_from_slice(v.values());
    fft_forward(&mut a);
    fft_forward(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    fft_inverse(&mut a);
    let scale = 1.0 / len as f64;
    a.truncate(out_len);
    a.iter_mut().for_each(|x| *x *= scale);
    TwoSidedSequence::new(u.lo() + v.lo(), a)
}

/// Full linear convolution `(u ∗ v)_t = Σ_τ u_τ v_{t−τ}`.
pub fn convolve(u: &TwoSidedSequence, v: &TwoSidedSequence) -> TwoSidedSequence {
    if u.len().min(v.len()) <= CONVOLVE_CROSSOVER {
        convolve_direct(u, v)
    } else {
        convolve_fft(u, v)
    }
}

/// `Dir_m`: ones on `[−m, m]`.
pub fn dirichlet(m: usize) -> TwoSidedSequence {
    let m = m as i64;
    TwoSidedSequence::from_fn(-m, m, |_| Complex64::new(1.0, 0.0))
}

/// `Fej_m`: coefficients `1 − |k|/(m+1)` on `[−m, m]`.
pub fn fejer(m: usize) -> TwoSidedSequence {
    let mi = m as i64;
    let d = (m + 1) as f64;
    TwoSidedSequence::from_fn(-mi, mi, |k| Complex64::new(1.0 - k.abs() as f64 / d, 0.0))
}

/// `Fej⁺_{2m}(z) = z^m Fej_m(z)` under the `z^{−τ}` convention: `Fej_m` moved to `[0, 2m]`.
pub fn fejer_causal(m: usize) -> TwoSidedSequence {
    fejer(m).delay(m as i64)
}

/// `Dir_m(e^{iω}) = sin((2m+1)ω/2) / sin(ω/2)`.
pub fn dir_closed_form(m: usize, omega: f64) -> f64 {
    let w = omega.rem_euclid(2.0 * PI);
    let half = (w / 2.0).sin();
    if half.abs() < 1e-12 {
        // w ≈ 0 or 2π, where Dir_m = 2m+1
        return (2 * m + 1) as f64;
    }
    ((2 * m + 1) as f64 * w / 2.0).sin() / half
}

/// `Fej_m(e^{iω}) = (1/(m+1)) (1 − cos((m+1)ω)) / (1 − cos ω)`.
pub fn fejer_closed_form(m: usize, omega: f64) -> f64 {
    let d = 1.0 - omega.cos();
    if d.abs() < 1e-14 {
        return (m + 1) as f64;
    }
    let m1 = (m + 1) as f64;
    (1.0 - (m1 * omega).cos()) / (m1 * d)
}

/// `H_n = Σ_{k≤n} 1/k`.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// `(1/(2N+1)) Σ_{w ∈ T_N} |kernel(w/a)|`.
pub fn kernel_grid_sum(kernel: &TwoSidedSequence, n: usize, a: Complex64) -> f64 {
    // kernel(z/a) = Σ (c_τ a^τ) z^{−τ}
    let a = a / a.norm();
    let modulated = TwoSidedSequence::from_fn(kernel.lo(), kernel.hi(), |t| kernel.get(t) * a.powi(t as i32));
    let len = 2 * n + 1;
    eval_on_circle(&modulated, len).iter().map(|v| v.norm()).sum::<f64>() / len as f64
}

/// `(1/√((2N+1)(2n+1))) Σ_{j∈J} |Dir_n(χ_{j,n}/χ_{k,N})|`.
pub fn sparse_oversampling_ratio(n: usize, big_n: usize, indices: &[usize], k: usize) -> f64 {
    let ln = (2 * n + 1) as f64;
    let lbig = (2 * big_n + 1) as f64;
    let sum: f64 = indices
        .iter()
        .map(|&j| {
            let omega = 2.0 * PI * (j as f64 / ln - k as f64 / lbig);
            dir_closed_form(n, omega).abs()
        })
        .sum();
    sum / (ln * lbig).sqrt()
}
