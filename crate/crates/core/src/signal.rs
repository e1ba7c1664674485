//! Two-sided sequences, shift-invariant subspaces and the observation model.
//!
//! A shift-invariant subspace of dimension `s` is the solution set of
//! `f(Δ) x = 0` where `Δ` is the unit delay and
//! `f(z) = Π_k (1 − w_k z)^{m_k}`. Its elements are the exponential
//! polynomials `x_t = Σ_k q_k(t) w_k^t` with `deg q_k < m_k`.

use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest log-magnitude accepted when synthesizing `t^j w^t`.
const MAX_LOG_MAGNITUDE: f64 = 700.0;

/// A finitely supported complex sequence indexed by `Z`.
///
/// Values outside `[lo, hi]` are zero. Every operation in this crate treats a
/// sequence and its trimmed version identically.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TwoSidedSequence {
    lo: i64,
    values: Vec<Complex64>,
}

impl TwoSidedSequence {
    pub fn new(lo: i64, values: Vec<Complex64>) -> Self {
        Self { lo, values }
    }

    /// All-zero sequence stored on `[lo, hi]`.
    pub fn zeros(lo: i64, hi: i64) -> Self {
        let len = if hi >= lo { (hi - lo + 1) as usize } else { 0 };
        Self {
            lo,
            values: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    /// Unit pulse `δ_t`.
    pub fn pulse(t: i64) -> Self {
        Self::new(t, vec![Complex64::new(1.0, 0.0)])
    }

    pub fn from_fn(lo: i64, hi: i64, mut f: impl FnMut(i64) -> Complex64) -> Self {
        let values = if hi >= lo { (lo..=hi).map(&mut f).collect() } else { Vec::new() };
        Self { lo, values }
    }

    pub fn from_real(lo: i64, values: &[f64]) -> Self {
        Self::new(lo, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Largest stored index; equals `lo - 1` for an empty sequence.
    pub fn hi(&self) -> i64 {
        self.lo + self.values.len() as i64 - 1
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

    /// Value at index `t` (zero outside the stored range).
    pub fn get(&self, t: i64) -> Complex64 {
        let i = t - self.lo;
        if i < 0 || i >= self.values.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[i as usize]
        }
    }

    /// The same sequence stored exactly on `[lo, hi]` (zero-padded or cut).
    pub fn window(&self, lo: i64, hi: i64) -> Self {
        Self::from_fn(lo, hi, |t| self.get(t))
    }

    /// Drops leading and trailing exact zeros.
    pub fn trimmed(&self) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let first = self.values.iter().position(|v| *v != zero);
        match first {
            None => Self::default(),
            Some(first) => {
                let last = self.values.iter().rposition(|v| *v != zero).unwrap_or(first);
                Self::new(self.lo + first as i64, self.values[first..=last].to_vec())
            }
        }
    }

    /// Smallest interval containing every nonzero value, if any.
    pub fn support(&self) -> Option<(i64, i64)> {
        let t = self.trimmed();
        if t.is_empty() {
            None
        } else {
            Some((t.lo(), t.hi()))
        }
    }

    /// `true` when every nonzero value lies in `[lo, hi]`.
    pub fn supported_within(&self, lo: i64, hi: i64) -> bool {
        match self.support() {
            None => true,
            Some((a, b)) => a >= lo && b <= hi,
        }
    }

    /// Membership in `C_n(Z)`.
    pub fn is_in_cn(&self, n: usize) -> bool {
        self.supported_within(-(n as i64), n as i64)
    }

    /// Membership in `C_n^+(Z)`.
    pub fn is_in_cn_plus(&self, n: usize) -> bool {
        self.supported_within(0, n as i64)
    }

    /// Delay by `h` samples: `(Δ^h x)_t = x_{t-h}`.
    pub fn delay(&self, h: i64) -> Self {
        Self::new(self.lo + h, self.values.clone())
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        Self::new(self.lo, self.values.iter().map(|v| v * a).collect())
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        if self.is_empty() {
            return other.scaled(Complex64::new(sign, 0.0));
        }
        if other.is_empty() {
            return self.clone();
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        Self::from_fn(lo, hi, |t| self.get(t) + other.get(t) * sign)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1.0)
    }

    /// Windowed seminorm `‖x‖_{n,p}`.
    pub fn seminorm(&self, n: usize, p: f64) -> f64 {
        seminorm(self, n, p)
    }

    /// `Σ_t |x_t|²` over the stored values.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Sum of coefficients, i.e. the z-transform at `z = 1`.
    pub fn sum(&self) -> Complex64 {
        self.values.iter().sum()
    }
}

/// A characteristic root `w` with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub w: Complex64,
    pub mult: usize,
}

impl Root {
    pub fn new(w: Complex64, mult: usize) -> Self {
        Self { w, mult }
    }

    pub fn simple(w: Complex64) -> Self {
        Self { w, mult: 1 }
    }
}

/// Multiset of characteristic roots defining the subspace `X(w_1, …, w_s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SisSpec {
    roots: Vec<Root>,
}

impl SisSpec {
    pub fn new(roots: Vec<Root>) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::InvalidSpec("at least one root is required".into()));
        }
        for (i, r) in roots.iter().enumerate() {
            if r.mult == 0 {
                return Err(Error::InvalidSpec(format!("root {} has zero multiplicity", r.w)));
            }
            if !(r.w.re.is_finite() && r.w.im.is_finite()) {
                return Err(Error::InvalidSpec(format!("root {} is not finite", r.w)));
            }
            // f(z) must keep degree s.
            if r.w == Complex64::new(0.0, 0.0) {
                return Err(Error::InvalidSpec("root w = 0 lowers the recurrence order".into()));
            }
            if roots[..i].iter().any(|q| q.w == r.w) {
                return Err(Error::InvalidSpec(format!("root {} is listed twice", r.w)));
            }
        }
        Ok(Self { roots })
    }

    /// Subspace spanned by `w_k^t` for distinct `w_k`.
    pub fn simple(ws: &[Complex64]) -> Result<Self> {
        Self::new(ws.iter().copied().map(Root::simple).collect())
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    /// Dimension `s = Σ m_k`.
    pub fn order(&self) -> usize {
        self.roots.iter().map(|r| r.mult).sum()
    }

    /// Basis elements in the fixed order `(w_1, 0), (w_1, 1), …, (w_2, 0), …`
    /// where `(w, j)` stands for `t ↦ t^j w^t`.
    pub fn basis(&self) -> Vec<(Complex64, usize)> {
        self.roots
            .iter()
            .flat_map(|r| (0..r.mult).map(move |j| (r.w, j)))
            .collect()
    }

    /// Coefficients `c_0 = 1, …, c_s` of `f(z) = Π (1 − w_k z)^{m_k}`.
    pub fn characteristic_polynomial(&self) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for r in &self.roots {
            for _ in 0..r.mult {
                let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
                for (i, ci) in c.iter().enumerate() {
                    next[i] += ci;
                    next[i + 1] -= ci * r.w;
                }
                c = next;
            }
        }
        c
    }

    /// All roots in the closed unit disk.
    pub fn is_quasi_stable(&self) -> bool {
        self.roots.iter().all(|r| r.w.norm() <= 1.0 + 1e-12)
    }

    /// Pair of distinct roots closest to each other, if `s_distinct ≥ 2`.
    pub fn closest_pair(&self) -> Option<(Complex64, Complex64)> {
        let mut best: Option<(f64, Complex64, Complex64)> = None;
        for (i, a) in self.roots.iter().enumerate() {
            for b in &self.roots[i + 1..] {
                let d = (a.w - b.w).norm();
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, a.w, b.w));
                }
            }
        }
        best.map(|(_, a, b)| (a, b))
    }
}

impl fmt::Display for SisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, r) in self.roots.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({:.6}{:+.6}i)^{}", r.w.re, r.w.im, r.mult)?;
        }
        write!(f, "}}")
    }
}

/// `t^j w^t`.
pub(crate) fn basis_value(w: Complex64, j: usize, t: i64) -> Complex64 {
    let pow = w.powi(t as i32);
    if j == 0 {
        pow
    } else {
        pow * (t as f64).powi(j as i32)
    }
}

fn check_overflow(spec: &SisSpec, t_lo: i64, t_hi: i64) -> Result<()> {
    let t_abs = t_lo.unsigned_abs().max(t_hi.unsigned_abs()).max(1) as f64;
    if t_abs > i32::MAX as f64 {
        return Err(Error::invalid("window exceeds the supported index range"));
    }
    for r in spec.roots() {
        let log_r = r.w.norm().ln();
        let poly = (r.mult - 1) as f64 * t_abs.ln();
        let log_mag = (t_lo as f64 * log_r).max(t_hi as f64 * log_r) + poly;
        if log_mag > MAX_LOG_MAGNITUDE {
            return Err(Error::Overflow {
                root: format!("{}", r.w),
                lo: t_lo,
                hi: t_hi,
                log_mag,
            });
        }
    }
    Ok(())
}

/// Evaluates `x_t = Σ_k q_k(t) w_k^t` on `[t_lo, t_hi]`, with `coeffs` the
/// monomial coefficients of the `q_k` in [`SisSpec::basis`] order.
pub fn synthesize(spec: &SisSpec, coeffs: &[Complex64], t_lo: i64, t_hi: i64) -> Result<TwoSidedSequence> {
    if coeffs.len() != spec.order() {
        return Err(Error::CoefficientLength {
            expected: spec.order(),
            got: coeffs.len(),
        });
    }
    if t_lo > t_hi {
        return Err(Error::invalid(format!("empty window [{t_lo}, {t_hi}]")));
    }
    check_overflow(spec, t_lo, t_hi)?;
    let basis = spec.basis();
    Ok(TwoSidedSequence::from_fn(t_lo, t_hi, |t| {
        basis
            .iter()
            .zip(coeffs)
            .map(|(&(w, j), c)| c * basis_value(w, j, t))
            .sum()
    }))
}

/// `f(Δ) x` on the indices where all `s + 1` taps fall inside the stored
/// range of `x`.
pub fn apply_recurrence(spec: &SisSpec, x: &TwoSidedSequence) -> Result<TwoSidedSequence> {
    let s = spec.order();
    if x.len() <= s {
        return Err(Error::WindowTooShort {
            len: x.len(),
            required: s + 1,
        });
    }
    let c = spec.characteristic_polynomial();
    let vals = x.values();
    let out = (s..vals.len())
        .map(|i| c.iter().enumerate().map(|(j, cj)| cj * vals[i - j]).sum())
        .collect();
    Ok(TwoSidedSequence::new(x.lo() + s as i64, out))
}

/// `‖x‖_{n,p} = (Σ_{|t|≤n} |x_t|^p)^{1/p}`; `p = ∞` gives the maximum.
pub fn seminorm(x: &TwoSidedSequence, n: usize, p: f64) -> f64 {
    let n = n as i64;
    let lo = x.lo().max(-n);
    let hi = x.hi().min(n);
    if hi < lo {
        return 0.0;
    }
    let window = &x.values()[(lo - x.lo()) as usize..=(hi - x.lo()) as usize];
    if p.is_infinite() {
        window.iter().map(|v| v.norm()).fold(0.0, f64::max)
    } else if p == 2.0 {
        window.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    } else if p == 1.0 {
        window.iter().map(|v| v.norm()).sum()
    } else {
        window.iter().map(|v| v.norm().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Noisy observations `y_t = x_t + σ ξ_t` on `[−N, N]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationWindow {
    pub y: TwoSidedSequence,
    pub half_width: usize,
    pub sigma: f64,
}

impl ObservationWindow {
    pub fn new(y: TwoSidedSequence, half_width: usize, sigma: f64) -> Result<Self> {
        if half_width < 1 {
            return Err(Error::invalid("observation half-width must be at least 1"));
        }
        if sigma.is_nan() || sigma < 0.0 {
            return Err(Error::invalid("noise level must be nonnegative"));
        }
        let n = half_width as i64;
        if !y.supported_within(-n, n) {
            return Err(Error::SupportViolation {
                lo: y.lo(),
                hi: y.hi(),
                min: -n,
                max: n,
            });
        }
        Ok(Self {
            y: y.window(-n, n),
            half_width,
            sigma,
        })
    }
}

/// `len` i.i.d. draws of `CN(0, 1)`: independent real and imaginary parts,
/// each of variance 1/2.
pub fn complex_gaussian_noise(len: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    (0..len)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re * scale, im * scale)
        })
        .collect()
}

/// Adds `σ ξ_t` to `x` on `[−N, N]`; noise is a deterministic function of `seed`.
pub fn add_noise(x: &TwoSidedSequence, half_width: usize, sigma: f64, seed: u64) -> Result<ObservationWindow> {
    if sigma.is_nan() || sigma < 0.0 {
        return Err(Error::invalid("noise level must be nonnegative"));
    }
    let n = half_width as i64;
    let noise = complex_gaussian_noise(2 * half_width + 1, seed);
    let y = TwoSidedSequence::from_fn(-n, n, |t| x.get(t) + noise[(t + n) as usize] * sigma);
    ObservationWindow::new(y, half_width, sigma)
}
