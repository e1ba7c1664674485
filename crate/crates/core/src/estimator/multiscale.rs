//! Full-window estimation by a geometric sequence of side fits.
//!
//! For triadic `n = 3^a` and `s = 3^b` the core fit covers `[−n, n]` and the
//! side fit `(k, ±)` with half-width `n_k = n 3^{−k}` centered at `±h_k`,
//! `h_k = 2n − 2n_k`, covers `I^{(k,+)} = (h_k − n_k, h_k + n_k]` and its
//! mirror. These tile `(n, 2n − 9s]`; beyond that the observations are
//! passed through. Other sizes are rounded to triadic ones and, when `n` is
//! not a power of three, covered by three overlapping runs whose estimates
//! are averaged.

use rayon::prelude::*;

use super::{filter_output, fit_filter, Estimate, FitProblem, FitResult, SolverConfig};
use crate::error::{Error, Result};
use crate::signal::{ObservationWindow, TwoSidedSequence};
use crate::Complex64;

/// One side fit of a triadic run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SidePiece {
    pub k: u32,
    /// `+1` for the right side, `−1` for the left.
    pub sign: i8,
    pub n_k: usize,
    pub h_k: i64,
}

impl SidePiece {
    /// Inclusive index range estimated by this fit.
    pub fn interval(&self) -> (i64, i64) {
        let (h, nk) = (self.h_k, self.n_k as i64);
        if self.sign > 0 {
            (h - nk + 1, h + nk)
        } else {
            (-h - nk, -h + nk - 1)
        }
    }

    pub fn center(&self) -> i64 {
        self.sign as i64 * self.h_k
    }
}

/// A triadic run on observations of half-width `2n` centered at `center`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubRun {
    pub center: i64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiscalePlan {
    pub n: usize,
    pub s: usize,
    /// `3^⌈log₃ s⌉`, the order used by every fit.
    pub s_eff: usize,
    /// Number of side scales, `log₃(n_run / (9 s_eff))`.
    pub k: u32,
    /// Side fits of a single run, relative to its center.
    pub pieces: Vec<SidePiece>,
    /// `true` when `n` and `s` are both powers of three.
    pub triadic: bool,
    pub runs: Vec<SubRun>,
}

fn ceil_pow3(v: usize) -> usize {
    let mut p = 1;
    while p < v {
        p *= 3;
    }
    p
}

fn floor_pow3(v: usize) -> usize {
    let mut p = 1;
    while p * 3 <= v {
        p *= 3;
    }
    p
}

impl MultiscalePlan {
    pub fn new(n: usize, s: usize) -> Result<Self> {
        if s == 0 || n == 0 {
            return Err(Error::invalid("multiscale plan needs n ≥ 1 and s ≥ 1"));
        }
        let s_eff = ceil_pow3(s);
        let n_run = floor_pow3(n);
        if n_run < 9 * s_eff {
            return Err(Error::invalid(format!(
                "full-window estimation needs 3^⌊log₃ n⌋ = {n_run} ≥ 9·3^⌈log₃ s⌉ = {}",
                9 * s_eff
            )));
        }
        let mut k = 0;
        let mut scale = n_run / (9 * s_eff);
        while scale > 1 {
            scale /= 3;
            k += 1;
        }
        let pieces = (1..=k)
            .flat_map(|k| {
                let n_k = n_run / 3usize.pow(k);
                let h_k = 2 * (n_run - n_k) as i64;
                [1i8, -1].map(|sign| SidePiece { k, sign, n_k, h_k })
            })
            .collect();
        let runs = if n_run == n {
            vec![SubRun { center: 0, n }]
        } else {
            let offset = 2 * (n - n_run) as i64;
            vec![
                SubRun { center: -offset, n: n_run },
                SubRun { center: 0, n: n_run },
                SubRun { center: offset, n: n_run },
            ]
        };
        Ok(Self {
            n,
            s,
            s_eff,
            k,
            pieces,
            triadic: n_run == n && s_eff == s,
            runs,
        })
    }

    /// Offset beyond which a run passes observations through: `2n − 9s`.
    pub fn passthrough_from(&self) -> i64 {
        let n_run = self.runs[0].n;
        2 * n_run as i64 - 9 * self.s_eff as i64
    }

    /// Number of runs whose window contains `t`.
    pub fn coverage(&self, t: i64) -> usize {
        self.runs
            .iter()
            .filter(|r| (t - r.center).abs() <= 2 * r.n as i64)
            .count()
    }
}

fn run_triadic(
    y: &TwoSidedSequence,
    plan: &MultiscalePlan,
    config: &SolverConfig,
) -> (TwoSidedSequence, Vec<FitResult>) {
    let n = plan.runs[0].n;
    let s = plan.s_eff;
    let mut problems = vec![FitProblem::core(y, n, s)];
    problems.extend(plan.pieces.iter().map(|p| FitProblem::shifted(y, p.n_k, p.center(), s)));
    let fits: Vec<FitResult> = problems.par_iter().map(|p| fit_filter(p, config)).collect();

    let big = 2 * n as i64;
    let ni = n as i64;
    let mut xhat = y.window(-big, big);
    let core = filter_output(&fits[0].filter, y, -ni, ni);
    for t in -ni..=ni {
        xhat.values_mut()[(t + big) as usize] = core.get(t);
    }
    for (piece, fit) in plan.pieces.iter().zip(&fits[1..]) {
        let (lo, hi) = piece.interval();
        let part = filter_output(&fit.filter, y, lo, hi);
        for t in lo..=hi {
            xhat.values_mut()[(t + big) as usize] = part.get(t);
        }
    }
    (xhat, fits)
}

/// Estimate on `[−2n, 2n]` with `n = ⌊N/2⌋`.
pub fn estimate_full_detailed(y: &ObservationWindow, s: usize, config: &SolverConfig) -> Result<Estimate> {
    let n = y.half_width / 2;
    let plan = MultiscalePlan::new(n, s)?;
    if plan.runs.len() == 1 {
        let (xhat, fits) = run_triadic(&y.y, &plan, config);
        return Ok(Estimate { xhat, fits });
    }
    let big = 2 * n as i64;
    let mut sum = vec![Complex64::new(0.0, 0.0); (2 * big + 1) as usize];
    let mut count = vec![0usize; sum.len()];
    let mut fits = Vec::new();
    for run in &plan.runs {
        let half = 2 * run.n as i64;
        let local = y.y.delay(-run.center).window(-half, half);
        let (part, run_fits) = run_triadic(&local, &plan, config);
        for t in -half..=half {
            let i = (t + run.center + big) as usize;
            sum[i] += part.get(t);
            count[i] += 1;
        }
        fits.extend(run_fits);
    }
    let values = sum.iter().zip(&count).map(|(v, &c)| v / c.max(1) as f64).collect();
    Ok(Estimate {
        xhat: TwoSidedSequence::new(-big, values),
        fits,
    })
}

pub fn estimate_full(y: &ObservationWindow, s: usize, config: &SolverConfig) -> Result<TwoSidedSequence> {
    estimate_full_detailed(y, s, config).map(|e| e.xhat)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triadic_plan_tiles_the_side_region() {
        let plan = MultiscalePlan::new(243, 3).unwrap();
        assert!(plan.triadic);
        assert_eq!(plan.k, 2);
        assert_eq!(plan.runs.len(), 1);
        let edge = plan.passthrough_from();
        assert_eq!(edge, 459);
        let mut owner = vec![0u32; (2 * 486 + 1) as usize];
        for t in -243i64..=243 {
            owner[(t + 486) as usize] += 1;
        }
        for p in &plan.pieces {
            let (lo, hi) = p.interval();
            for t in lo..=hi {
                owner[(t + 486) as usize] += 1;
            }
        }
        for t in -486i64..=486 {
            let expected = u32::from(t.abs() <= edge);
            assert_eq!(owner[(t + 486) as usize], expected, "t = {t}");
        }
    }

    #[test]
    fn non_triadic_plan_covers_everything() {
        let plan = MultiscalePlan::new(242, 3).unwrap();
        assert!(!plan.triadic);
        assert_eq!(plan.runs.len(), 3);
        assert_eq!(plan.runs[0].n, 81);
        for t in -484i64..=484 {
            assert!(plan.coverage(t) >= 1, "t = {t}");
        }
        let rounded = MultiscalePlan::new(243, 2).unwrap();
        assert_eq!((rounded.s_eff, rounded.runs.len(), rounded.triadic), (3, 1, false));
        assert!(MultiscalePlan::new(26, 3).is_err());
        assert_eq!(MultiscalePlan::new(27, 3).unwrap().k, 0);
        assert_eq!(MultiscalePlan::new(27, 1).unwrap().k, 1);
    }
}
