//! Reproducing filters for shift-invariant subspaces.
//!
//! `φ` reproduces `X` when `φ ∗ x = x` for every `x ∈ X`. The constructions
//! here are, in order of use: the minimal-norm row of a slice projector, its
//! convolution powers, the spectral support set on a DFT grid, a Fejér-kernel
//! interpolant of `1/φ²` on that set, and the hybrid filter
//! `φ^X = φ² + ρ (φ² − φ⁴)` whose spectrum is uniformly bounded.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{basis_value, SisSpec, TwoSidedSequence};
use crate::spectral::{convolve, eval_on_circle, fejer, fejer_causal, fft_inverse, sup_on_circle, vec_norm};
use crate::{C_STAR, INTERPOLANT_BOUND};

/// Relative singular-value cutoff for every slice-basis factorization.
pub const RANK_TOL: f64 = 1e-10;

/// Oversampling factor of the circle grid used to estimate sup-norms.
pub const SUP_GRID_FACTOR: usize = 16;

/// Caps on `√(2n+1)·‖F_n[φ]‖_p` for `p = 1, 2, ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterBudget {
    pub n: usize,
    pub r1: f64,
    pub r2: f64,
    pub rinf: f64,
}

impl FilterBudget {
    /// Budget met by the two-sided hybrid filter of order `s`.
    pub fn two_sided(n: usize, s: usize) -> Self {
        let s = s as f64;
        Self {
            n,
            r1: 18.0 * C_STAR * s,
            r2: 3.0 * C_STAR * (2.0 * s).sqrt(),
            rinf: C_STAR,
        }
    }

    /// Budget for one-sided filters, `R_p = C★ (c1 s² log(en))^{1/p}`.
    pub fn one_sided(n: usize, s: usize, c1: f64) -> Self {
        let growth = c1 * (s * s) as f64 * (std::f64::consts::E * n.max(1) as f64).ln();
        Self {
            n,
            r1: C_STAR * growth,
            r2: C_STAR * growth.max(0.0).sqrt(),
            rinf: C_STAR,
        }
    }

    fn scale(&self) -> f64 {
        1.0 / ((2 * self.n + 1) as f64).sqrt()
    }

    /// Cap on the plain `‖F_n[φ]‖_1`.
    pub fn l1_cap(&self) -> f64 {
        self.r1 * self.scale()
    }

    pub fn l2_cap(&self) -> f64 {
        self.r2 * self.scale()
    }

    pub fn linf_cap(&self) -> f64 {
        self.rinf * self.scale()
    }

    /// `true` when a cap is too small to leave room for a nonzero filter.
    pub fn is_degenerate(&self) -> bool {
        self.l1_cap() < f64::EPSILON || self.linf_cap() < f64::EPSILON
    }
}

/// Grid nodes `k` of `T_n` with `|φ(χ_{k,n})| ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportSet {
    pub n: usize,
    pub indices: Vec<usize>,
}

impl SupportSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Measured norms of a constructed filter, each multiplied by `√(2n+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificates {
    pub n: usize,
    pub s: usize,
    pub linf: f64,
    pub l2: f64,
    pub l1: f64,
    pub interpolant_sup: f64,
    pub support_size: usize,
}

impl Certificates {
    pub fn within(&self, budget: &FilterBudget) -> bool {
        self.linf <= budget.rinf && self.l2 <= budget.r2 && self.l1 <= budget.r1
    }
}

/// Output of the hybrid construction with its intermediate pieces.
#[derive(Clone, Debug)]
pub struct HybridFilter {
    pub filter: TwoSidedSequence,
    pub base: TwoSidedSequence,
    pub interpolant: TwoSidedSequence,
    pub support: SupportSet,
    pub certificates: Certificates,
    pub m: usize,
    pub n: usize,
    pub causal: bool,
}

fn describe_roots(spec: &SisSpec) -> String {
    spec.to_string()
}

fn singular_rank(sv: &DVector<f64>) -> usize {
    let max = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&v| v > RANK_TOL * max).count()
}

/// Minimal-norm row of the orthogonal projector onto `X` restricted to
/// `{0, …, m}`, turned into a filter in `C_m(Z)` with `‖φ‖²_2 ≤ s/(m+1)`.
pub fn projector_row_filter(spec: &SisSpec, m: usize) -> Result<TwoSidedSequence> {
    let s = spec.order();
    if m + 1 < s {
        return Err(Error::invalid(format!("projector filter needs m ≥ s − 1, got m = {m}, s = {s}")));
    }
    let rows = m + 1;
    let scale = m.max(1) as f64;
    let mut basis = DMatrix::<Complex64>::zeros(rows, s);
    for (col, (w, j)) in spec.basis().into_iter().enumerate() {
        // w^{t−m} keeps growing exponentials bounded on the slice
        let anchor = if w.norm() > 1.0 { m as i64 } else { 0 };
        for t in 0..rows {
            let mono = (t as f64 / scale).powi(j as i32);
            basis[(t, col)] = w.powi((t as i64 - anchor) as i32) * mono;
        }
        let norm = basis.column(col).norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::IllConditioned {
                rank: 0,
                dim: s,
                roots: describe_roots(spec),
            });
        }
        basis.column_mut(col).unscale_mut(norm);
    }
    let svd = basis.svd(true, false);
    let rank = singular_rank(&svd.singular_values);
    if rank < s {
        return Err(Error::IllConditioned {
            rank,
            dim: s,
            roots: describe_roots(spec),
        });
    }
    let u = svd.u.expect("left singular vectors were requested");
    let row_norms: Vec<f64> = (0..rows).map(|t| u.row(t).norm_squared()).collect();
    let min = row_norms.iter().copied().fold(f64::INFINITY, f64::min);
    let t0 = row_norms.iter().position(|&v| v <= min + 1e-12).unwrap_or(0);
    // x_{t0} = Σ_u P_{t0,u} x_u on X, so φ_τ = P_{t0, t0−τ} for τ ∈ [t0−m, t0]
    let lo = t0 as i64 - m as i64;
    let u_t0 = u.row(t0).into_owned();
    let filter = TwoSidedSequence::from_fn(lo, t0 as i64, |tau| {
        let col = (t0 as i64 - tau) as usize;
        u_t0.iter().zip(u.row(col).iter()).map(|(a, b)| a * b.conj()).sum()
    });
    Ok(filter)
}

/// `φ^k = φ ∗ ⋯ ∗ φ`; `k = 0` gives the unit pulse.
pub fn autoconvolve_power(phi: &TwoSidedSequence, k: usize) -> TwoSidedSequence {
    let mut result = TwoSidedSequence::pulse(0);
    let mut base = phi.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = convolve(&result, &base);
        }
        e >>= 1;
        if e > 0 {
            base = convolve(&base, &base);
        }
    }
    result
}

/// Constant `c_k` in `‖F_{km}[φ^k]‖_1 √(2km+1) ≤ c_k (√(2m+1) ‖φ‖_2)^k`,
/// from `c_1 = 1`, `c_{2j} = 2c_j²` and `c_{2j+1} = 3√(2j+1) c_j²`.
pub fn convolution_power_constant(k: usize) -> f64 {
    match k {
        0 | 1 => 1.0,
        _ if k.is_multiple_of(2) => 2.0 * convolution_power_constant(k / 2).powi(2),
        _ => 3.0 * (k as f64).sqrt() * convolution_power_constant(k / 2).powi(2),
    }
}

/// Nodes of `T_n` where `|φ| ≥ 1`, boundary included.
pub fn approx_support(phi: &TwoSidedSequence, n: usize) -> Result<SupportSet> {
    let bound = n as i64;
    if !phi.supported_within(-bound, bound) {
        let (lo, hi) = phi.support().unwrap_or((0, 0));
        return Err(Error::SupportViolation {
            lo,
            hi,
            min: -bound,
            max: bound,
        });
    }
    Ok(support_from_grid(n, &eval_on_circle(phi, 2 * n + 1)))
}

fn support_from_grid(n: usize, grid: &[Complex64]) -> SupportSet {
    let indices = grid
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() >= 1.0)
        .map(|(k, _)| k)
        .collect();
    SupportSet { n, indices }
}

/// Interpolant of `1/φ²` on the support set, spanned by the shifted kernels
/// `K(z/w)/K(1)` for `w` in the set.
///
/// With all cross terms `K(w/w')` zero the coefficients are `φ(w)^{−2}`; in
/// general they solve the kernel Gram system so that interpolation is exact.
fn kernel_interpolant(
    phi_grid: &[Complex64],
    support: &SupportSet,
    kernel: &TwoSidedSequence,
) -> Result<TwoSidedSequence> {
    let len = phi_grid.len();
    if support.is_empty() {
        return Ok(TwoSidedSequence::zeros(kernel.lo(), kernel.hi()));
    }
    let norm = kernel.sum().re;
    let kernel_grid = eval_on_circle(kernel, len);
    let idx = &support.indices;
    let size = idx.len();
    let gram = DMatrix::from_fn(size, size, |i, j| kernel_grid[(idx[i] + len - idx[j]) % len] / norm);
    let rhs = DVector::from_iterator(size, idx.iter().map(|&k| (phi_grid[k] * phi_grid[k]).inv()));
    let coeffs = match gram.clone().lu().solve(&rhs) {
        Some(c) if c.iter().all(|v| v.re.is_finite() && v.im.is_finite()) => c,
        _ => {
            let svd = gram.svd(true, true);
            let cutoff = RANK_TOL * svd.singular_values.max();
            svd.solve(&rhs, cutoff).map_err(Error::invalid)?
        }
    };
    // Σ_j c_j w_j^τ for all τ at once: an unnormalized inverse DFT on T_n
    let mut spikes = vec![Complex64::new(0.0, 0.0); len];
    for (c, &k) in coeffs.iter().zip(idx) {
        spikes[k] += c;
    }
    fft_inverse(&mut spikes);
    let l = len as i64;
    Ok(TwoSidedSequence::from_fn(kernel.lo(), kernel.hi(), |tau| {
        kernel.get(tau) / norm * spikes[tau.rem_euclid(l) as usize]
    }))
}

/// Fejér interpolant in `C_{5m}(Z)` of `1/φ²` on `S_n(φ)`.
pub fn fejer_interpolant(phi: &TwoSidedSequence, m: usize, n: usize) -> Result<TwoSidedSequence> {
    let support = approx_support(phi, n)?;
    let grid = eval_on_circle(phi, 2 * n + 1);
    kernel_interpolant(&grid, &support, &fejer(5 * m))
}

/// Causal counterpart in `C⁺_{10m}(Z)` built on `Fej⁺_{10m}`.
pub fn fejer_interpolant_causal(phi: &TwoSidedSequence, m: usize, n: usize) -> Result<TwoSidedSequence> {
    let support = approx_support(phi, n)?;
    let grid = eval_on_circle(phi, 2 * n + 1);
    kernel_interpolant(&grid, &support, &fejer_causal(5 * m))
}

fn assemble(
    base: TwoSidedSequence,
    kernel: &TwoSidedSequence,
    s: usize,
    m: usize,
    causal: bool,
) -> Result<HybridFilter> {
    let n = 9 * m;
    let len = 2 * n + 1;
    let base_grid = eval_on_circle(&base, len);
    let support = support_from_grid(n, &base_grid);
    let interpolant = kernel_interpolant(&base_grid, &support, kernel)?;
    let sq = autoconvolve_power(&base, 2);
    let quad = convolve(&sq, &sq);
    let filter = sq.add(&convolve(&interpolant, &sq.sub(&quad)));
    let grid = eval_on_circle(&filter, len);
    let certificates = Certificates {
        n,
        s,
        linf: vec_norm(&grid, f64::INFINITY),
        l2: vec_norm(&grid, 2.0),
        l1: vec_norm(&grid, 1.0),
        interpolant_sup: sup_on_circle(&interpolant, SUP_GRID_FACTOR * len),
        support_size: support.len(),
    };
    Ok(HybridFilter {
        filter,
        base,
        interpolant,
        support,
        certificates,
        m,
        n,
        causal,
    })
}

/// Two-sided hybrid filter in `C_{9m}(Z)` with `n = 9m` certificates.
pub fn hybrid_filter(spec: &SisSpec, m: usize) -> Result<HybridFilter> {
    let base = projector_row_filter(spec, m)?;
    assemble(base, &fejer(5 * m), spec.order(), m, false)
}

/// Causal hybrid filter in `C⁺_{18m}(Z)`; the base is the minimal-norm
/// one-sided filter with taps on `[0, 2m]`.
pub fn hybrid_filter_causal(spec: &SisSpec, m: usize) -> Result<HybridFilter> {
    let base = min_norm_causal_filter(spec, 2 * m, false)?;
    assemble(base, &fejer_causal(5 * m), spec.order(), m, true)
}

/// Least-norm one-sided filter reproducing `X`, taps on `{0..m}` or, when
/// `strict`, on `{1..m}` (a one-step predictor).
pub fn min_norm_causal_filter(spec: &SisSpec, m: usize, strict: bool) -> Result<TwoSidedSequence> {
    let s = spec.order();
    if m < s {
        return Err(Error::invalid(format!("one-sided filter needs m ≥ s, got m = {m}, s = {s}")));
    }
    if !spec.is_quasi_stable() {
        return Err(Error::InvalidSpec(format!(
            "one-sided reproducing filters need all roots in the closed unit disk, got {spec}"
        )));
    }
    let first = usize::from(strict);
    let taps = m + 1 - first;
    let scale = m as f64;
    // Basis element b(u) = (u/m)^j w^u must satisfy Σ_τ ψ_τ b(m−τ) = b(m).
    let b = |w: Complex64, j: usize, u: usize| w.powi(u as i32) * (u as f64 / scale).powi(j as i32);
    let basis = spec.basis();
    let mut a = DMatrix::<Complex64>::zeros(s, taps);
    let mut rhs = DVector::<Complex64>::zeros(s);
    for (row, &(w, j)) in basis.iter().enumerate() {
        for c in 0..taps {
            a[(row, c)] = b(w, j, m - (c + first));
        }
        rhs[row] = b(w, j, m);
        let norm = a.row(row).norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::IllConditioned {
                rank: 0,
                dim: s,
                roots: describe_roots(spec),
            });
        }
        a.row_mut(row).unscale_mut(norm);
        rhs[row] /= norm;
    }
    let svd = a.svd(true, true);
    let rank = singular_rank(&svd.singular_values);
    if rank < s {
        return Err(Error::IllConditioned {
            rank,
            dim: s,
            roots: describe_roots(spec),
        });
    }
    let cutoff = RANK_TOL * svd.singular_values.max();
    let psi = svd.solve(&rhs, cutoff).map_err(Error::invalid)?;
    Ok(TwoSidedSequence::new(first as i64, psi.iter().copied().collect()))
}

/// Largest relative reproduction error `‖φ∗x − x‖_{W,∞} / max|x|` over
/// `trials` random `x ∈ X`, where the maximum in the denominator runs over
/// every sample the convolution reads.
///
/// Each basis element is rescaled to unit peak on that span before the random
/// combination, so decaying or growing roots do not overflow.
pub fn verify_reproducing(phi: &TwoSidedSequence, spec: &SisSpec, trials: usize, window: usize) -> f64 {
    verify_reproducing_seeded(phi, spec, trials, window, 0x5eed)
}

pub fn verify_reproducing_seeded(
    phi: &TwoSidedSequence,
    spec: &SisSpec,
    trials: usize,
    window: usize,
    seed: u64,
) -> f64 {
    let phi = phi.trimmed();
    let w = window as i64;
    let (plo, phi_hi) = if phi.is_empty() { (0, 0) } else { (phi.lo(), phi.hi()) };
    let lo = -w - phi_hi.max(0);
    let hi = w - plo.min(0);
    let tmax = lo.unsigned_abs().max(hi.unsigned_abs()).max(1) as f64;
    let basis: Vec<TwoSidedSequence> = spec
        .basis()
        .into_iter()
        .map(|(root, j)| {
            let anchor = if root.norm() < 1.0 { lo } else { hi };
            let unscaled = TwoSidedSequence::from_fn(lo, hi, |t| {
                basis_value(root, 0, t - anchor) * (t as f64 / tmax).powi(j as i32)
            });
            let peak = unscaled.max_abs();
            if peak > 0.0 && peak.is_finite() {
                unscaled.scaled(Complex64::new(1.0 / peak, 0.0))
            } else {
                unscaled
            }
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials.max(1) {
        let mut x = TwoSidedSequence::zeros(lo, hi);
        for b in &basis {
            let c = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
            x = x.add(&b.scaled(c));
        }
        let peak = x.max_abs();
        if peak == 0.0 {
            continue;
        }
        let mut err: f64 = 0.0;
        for t in -w..=w {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, p) in phi.values().iter().enumerate() {
                acc += p * x.get(t - (phi.lo() + i as i64));
            }
            err = err.max((acc - x.get(t)).norm());
        }
        worst = worst.max(err / peak);
    }
    worst
}

/// Hölder bound `‖a‖_p^p ≤ ‖a‖_1 ‖a‖_∞^{p−1}` evaluated on a vector; returns
/// `(lhs, rhs)`.
pub fn holder_pair(values: &[Complex64], p: f64) -> (f64, f64) {
    let lhs = vec_norm(values, p).powf(p);
    let rhs = vec_norm(values, 1.0) * vec_norm(values, f64::INFINITY).powf(p - 1.0);
    (lhs, rhs)
}

/// `true` when the interpolant respects the uniform bound `1.08π² + 2`.
pub fn interpolant_within_bound(cert: &Certificates) -> bool {
    cert.interpolant_sup <= INTERPOLANT_BOUND
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Root;
    use crate::spectral::{dft, eval_at};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn on_circle(phases: &[f64]) -> SisSpec {
        SisSpec::simple(&phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect::<Vec<_>>()).unwrap()
    }

    /// Orthogonal projector `B (BᴴB)^{-1} Bᴴ` via normal equations.
    fn dense_projector(cols: &[Vec<Complex64>]) -> DMatrix<Complex64> {
        let rows = cols[0].len();
        let b = DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i]);
        let gram = b.adjoint() * &b;
        let inv = gram.try_inverse().unwrap();
        &b * inv * b.adjoint()
    }

    #[test]
    fn constants_at_m1_give_two_halves() {
        let spec = SisSpec::simple(&[c(1.0, 0.0)]).unwrap();
        let p = dense_projector(&[vec![c(1.0, 0.0); 2]]);
        for v in p.iter() {
            assert!((v - c(0.5, 0.0)).norm() < 1e-15);
        }
        let phi = projector_row_filter(&spec, 1).unwrap();
        assert_eq!(phi.len(), 2);
        for v in phi.values() {
            assert!((v - c(0.5, 0.0)).norm() < 1e-12);
        }
        assert!((phi.energy() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn projector_row_matches_dense_projector() {
        let spec = on_circle(&[0.3, 1.9, -2.2]);
        let m = 8;
        let cols: Vec<Vec<Complex64>> = spec
            .basis()
            .iter()
            .map(|&(w, _)| (0..=m as i64).map(|t| w.powi(t as i32)).collect())
            .collect();
        let p = dense_projector(&cols);
        let norms: Vec<f64> = (0..=m).map(|t| p.row(t).norm()).collect();
        let t0 = (0..=m).min_by(|&a, &b| norms[a].partial_cmp(&norms[b]).unwrap()).unwrap();
        let phi = projector_row_filter(&spec, m).unwrap();
        assert!((phi.energy().sqrt() - norms[t0]).abs() < 1e-9);
        assert!(phi.energy() <= 2.0 * 3.0 / (2 * m + 1) as f64);
        assert!(verify_reproducing(&phi, &spec, 5, 20) < 1e-8);
    }

    #[test]
    fn constants_reproduced_for_every_m() {
        let spec = SisSpec::simple(&[c(1.0, 0.0)]).unwrap();
        for m in 0..12 {
            let phi = projector_row_filter(&spec, m).unwrap();
            assert!((phi.sum() - c(1.0, 0.0)).norm() < 1e-12);
            assert!(phi.is_in_cn(m));
        }
    }

    #[test]
    fn projector_rejects_short_window_and_reports_conditioning() {
        let spec = on_circle(&[0.0, 1.0, 2.0]);
        assert!(projector_row_filter(&spec, 1).is_err());
        let close = on_circle(&[1.0, 1.0 + 1e-13]);
        assert!(matches!(projector_row_filter(&close, 20), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn autoconvolution_examples() {
        let pulse = TwoSidedSequence::pulse(0);
        for k in 0..5 {
            assert_eq!(autoconvolve_power(&pulse, k), pulse);
        }
        let half = TwoSidedSequence::from_real(0, &[0.5, 0.5]);
        assert_eq!(autoconvolve_power(&half, 2), TwoSidedSequence::from_real(0, &[0.25, 0.5, 0.25]));
        assert!((convolution_power_constant(3) - 3.0 * 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(convolution_power_constant(2), 2.0);
        assert_eq!(convolution_power_constant(4), 8.0);
    }

    #[test]
    fn square_certificate_for_random_s2() {
        let spec = on_circle(&[0.4, 2.5]);
        let m = 10;
        let phi = projector_row_filter(&spec, m).unwrap();
        let sq = autoconvolve_power(&phi, 2);
        let lhs = dft(&sq, 2 * m).norm(1.0) * ((4 * m + 1) as f64).sqrt();
        assert!(lhs <= 2.0 * (2 * m + 1) as f64 * phi.energy() + 1e-12);
        assert!(verify_reproducing(&sq, &spec, 3, 20) < 1e-8);
    }

    #[test]
    fn support_examples() {
        let n = 6;
        assert!(approx_support(&TwoSidedSequence::from_real(0, &[0.5]), n).unwrap().is_empty());
        assert_eq!(approx_support(&TwoSidedSequence::from_real(0, &[2.0]), n).unwrap().len(), 13);
        assert_eq!(approx_support(&TwoSidedSequence::pulse(0), n).unwrap().len(), 13);
        let phi = projector_row_filter(&SisSpec::simple(&[c(1.0, 0.0)]).unwrap(), 3).unwrap();
        assert!(approx_support(&phi, 27).unwrap().indices.contains(&0));
        assert!(approx_support(&TwoSidedSequence::pulse(9), 4).is_err());
    }

    #[test]
    fn interpolant_examples() {
        let m = 3;
        let rho = fejer_interpolant(&TwoSidedSequence::from_real(0, &[0.5]), m, 9 * m).unwrap();
        assert_eq!(rho.max_abs(), 0.0);

        // φ = δ_0 has every node in its support; take a filter with a single
        // support node instead: φ(z) = 1 at z = 1 only.
        let n = 9 * m;
        let len = 2 * n + 1;
        let grid: Vec<Complex64> = (0..len).map(|k| if k == 0 { c(1.0, 0.0) } else { c(0.2, 0.0) }).collect();
        let support = support_from_grid(n, &grid);
        let rho = kernel_interpolant(&grid, &support, &fejer(5 * m)).unwrap();
        let want = fejer(5 * m).scaled(c(1.0 / (5 * m + 1) as f64, 0.0));
        for t in rho.lo()..=rho.hi() {
            assert!((rho.get(t) - want.get(t)).norm() < 1e-12);
        }
        assert!((eval_at(&rho, c(1.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn interpolation_is_exact_on_support() {
        let spec = on_circle(&[0.7, 0.95]);
        let m = 8;
        let n = 9 * m;
        let phi = projector_row_filter(&spec, m).unwrap();
        let rho = fejer_interpolant(&phi, m, n).unwrap();
        assert!(rho.is_in_cn(5 * m));
        let support = approx_support(&phi, n).unwrap();
        assert!(!support.is_empty());
        let len = 2 * n + 1;
        let rho_grid = eval_on_circle(&rho, len);
        let phi_grid = eval_on_circle(&phi, len);
        for &k in &support.indices {
            let v = rho_grid[k] * phi_grid[k] * phi_grid[k];
            assert!((v - c(1.0, 0.0)).norm() < 1e-9);
        }
        assert!(sup_on_circle(&rho, 16 * len) <= INTERPOLANT_BOUND);
    }

    #[test]
    fn hybrid_constants_and_certificates() {
        let spec = SisSpec::simple(&[c(1.0, 0.0)]).unwrap();
        let h = hybrid_filter(&spec, 2).unwrap();
        assert!((h.filter.sum() - c(1.0, 0.0)).norm() < 1e-10);
        assert!(h.filter.is_in_cn(18));
        assert!(h.certificates.within(&FilterBudget::two_sided(18, 1)));

        let spec = on_circle(&[0.1, 1.3, 2.9, -1.7]);
        let h = hybrid_filter(&spec, 9).unwrap();
        assert!(h.certificates.within(&FilterBudget::two_sided(81, 4)));
        assert!(interpolant_within_bound(&h.certificates));
        assert!(verify_reproducing(&h.filter, &spec, 4, 40) < 1e-7);
    }

    #[test]
    fn hybrid_on_grid_nodes() {
        // roots on T_n: the lower bound s^{1/p} must sit under the caps
        let m = 9;
        let n = 9 * m;
        let len = (2 * n + 1) as f64;
        let spec = on_circle(&[2.0 * PI * 3.0 / len, 2.0 * PI * 40.0 / len]);
        let h = hybrid_filter(&spec, m).unwrap();
        let cert = h.certificates;
        assert!(cert.linf >= 1.0 - 1e-9);
        assert!(cert.l1 >= 2.0 - 1e-9 && cert.l2 >= 2f64.sqrt() - 1e-9);
        assert!(cert.within(&FilterBudget::two_sided(n, 2)));
    }

    #[test]
    fn strict_causal_constants_is_uniform_average() {
        let spec = SisSpec::simple(&[c(1.0, 0.0)]).unwrap();
        for m in [1usize, 5, 64] {
            let psi = min_norm_causal_filter(&spec, m, true).unwrap();
            assert_eq!(psi.lo(), 1);
            for v in psi.values() {
                assert!((v - c(1.0 / m as f64, 0.0)).norm() < 1e-12);
            }
            assert!((m as f64 * psi.energy() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn causal_filter_reproduces_and_rejects_unstable() {
        let spec = SisSpec::new(vec![Root::new(c(1.0, 0.0), 2), Root::simple(c(0.0, 0.9))]).unwrap();
        let psi = min_norm_causal_filter(&spec, 30, false).unwrap();
        assert!(psi.is_in_cn_plus(30));
        assert!(verify_reproducing(&psi, &spec, 4, 10) < 1e-9);
        let unstable = SisSpec::simple(&[c(1.1, 0.0)]).unwrap();
        assert!(min_norm_causal_filter(&unstable, 10, false).is_err());
        assert!(min_norm_causal_filter(&spec, 2, false).is_err());
    }

    #[test]
    fn causal_hybrid_is_one_sided() {
        let spec = SisSpec::simple(&[c(1.0, 0.0)]).unwrap();
        let h = hybrid_filter_causal(&spec, 2).unwrap();
        assert!(h.filter.is_in_cn_plus(36));
        assert!((h.filter.sum() - c(1.0, 0.0)).norm() < 1e-10);
        assert!(h.certificates.linf <= C_STAR);
    }

    #[test]
    fn verify_reproducing_examples() {
        let spec = on_circle(&[0.2, 1.0]);
        assert_eq!(verify_reproducing(&TwoSidedSequence::pulse(0), &spec, 3, 10), 0.0);
        let ones = SisSpec::simple(&[c(1.0, 0.0)]).unwrap();
        let zero = TwoSidedSequence::zeros(0, 0);
        assert!((verify_reproducing(&zero, &ones, 3, 10) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn holder_chain() {
        let spec = on_circle(&[0.5, 2.0, 3.0]);
        let h = hybrid_filter(&spec, 9).unwrap();
        let grid = eval_on_circle(&h.filter, 2 * h.n + 1);
        for p in [1.5, 2.0, 3.0] {
            let (lhs, rhs) = holder_pair(&grid, p);
            assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }
}
