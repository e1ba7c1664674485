//! Testing "no signal" against an `s`-dimensional shift-invariant alternative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{estimate_full, SolverConfig};
use crate::signal::{ObservationWindow, TwoSidedSequence};
use crate::C_STAR;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionSetup {
    pub n: usize,
    pub s: usize,
    pub sigma: f64,
    pub delta: f64,
}

impl DetectionSetup {
    pub fn new(n: usize, s: usize, sigma: f64, delta: f64) -> Result<Self> {
        if s == 0 || n < 9 * s {
            return Err(Error::invalid(format!("detection needs s ≥ 1 and n ≥ 9s, got n = {n}, s = {s}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::invalid("delta must lie in (0, 1)"));
        }
        if sigma.is_nan() || sigma < 0.0 {
            return Err(Error::invalid("noise level must be nonnegative"));
        }
        Ok(Self { n, s, sigma, delta })
    }

    pub fn r0_squared(&self) -> f64 {
        detection_threshold(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionOutcome {
    pub statistic: f64,
    /// `r₀²`; the test rejects when the statistic exceeds `(5/8) r₀²`.
    pub threshold: f64,
    pub reject: bool,
}

/// `r₀² = 128 C★² σ² (6s + 3s log(2n+1) + log(9e³s) log(6 log₃(n/s)/δ)) log(9e⁴s) log₃(n/s)`.
pub fn detection_threshold(setup: &DetectionSetup) -> f64 {
    let s = setup.s as f64;
    let n = setup.n as f64;
    let log3 = (n / s).ln() / 3f64.ln();
    let e = std::f64::consts::E;
    let inner = 6.0 * s
        + 3.0 * s * (2.0 * n + 1.0).ln()
        + (9.0 * e.powi(3) * s).ln() * (6.0 * log3 / setup.delta).ln();
    128.0 * C_STAR * C_STAR * setup.sigma * setup.sigma * inner * (9.0 * e.powi(4) * s).ln() * log3
}

/// `‖y‖²_{2n,2} − ‖y − x̂‖²_{2n,2}` with `2n` the half-width of `y`'s window.
pub fn test_statistic(y: &ObservationWindow, xhat: &TwoSidedSequence) -> Result<f64> {
    let half = 2 * (y.half_width / 2);
    let h = half as i64;
    if !(xhat.lo() <= -h && xhat.hi() >= h) || !xhat.supported_within(-h, h) {
        return Err(Error::invalid(format!(
            "estimate on [{}, {}] does not match the window [−{half}, {half}]",
            xhat.lo(),
            xhat.hi()
        )));
    }
    let total: f64 = (-h..=h).map(|t| y.y.get(t).norm_sqr()).sum();
    let residual: f64 = (-h..=h).map(|t| (y.y.get(t) - xhat.get(t)).norm_sqr()).sum();
    Ok(total - residual)
}

/// Runs the full-window estimator and compares the statistic to `(5/8) r₀²`.
pub fn detect(y: &ObservationWindow, s: usize, sigma: f64, delta: f64, config: &SolverConfig) -> Result<DetectionOutcome> {
    let setup = DetectionSetup::new(y.half_width / 2, s, sigma, delta)?;
    let xhat = estimate_full(y, s, config)?;
    let statistic = test_statistic(y, &xhat)?;
    let threshold = detection_threshold(&setup);
    Ok(DetectionOutcome {
        statistic,
        threshold,
        reject: statistic > 0.625 * threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::add_noise;
    use crate::Complex64;

    #[test]
    fn threshold_scaling_and_zero_noise() {
        let a = DetectionSetup::new(27, 1, 1.0, 0.1).unwrap();
        let b = DetectionSetup { sigma: 2.0, ..a };
        let z = DetectionSetup { sigma: 0.0, ..a };
        assert!((detection_threshold(&b) / detection_threshold(&a) - 4.0).abs() < 1e-12);
        assert_eq!(detection_threshold(&z), 0.0);
        assert!(DetectionSetup::new(8, 1, 1.0, 0.1).is_err());
        assert!(DetectionSetup::new(27, 1, 1.0, 1.0).is_err());
    }

    #[test]
    fn threshold_at_unit_size() {
        // s = 1, n = 9: log₃ 9 = 2
        let setup = DetectionSetup::new(9, 1, 1.0, 0.1).unwrap();
        let c2 = (2.16 * std::f64::consts::PI.powi(2) + 6.0).powi(2);
        let inner = 6.0 + 3.0 * 19f64.ln() + (9.0 * 1f64.exp().powi(3)).ln() * 120f64.ln();
        let want = 128.0 * c2 * inner * (9.0 * 1f64.exp().powi(4)).ln() * 2.0;
        assert!((detection_threshold(&setup) / want - 1.0).abs() < 1e-9);
    }

    #[test]
    fn statistic_examples() {
        let x = TwoSidedSequence::from_real(-3, &[1.0, -2.0, 0.5, 0.0, 3.0, 1.0, 1.0]);
        let y = add_noise(&x, 4, 0.3, 5).unwrap();
        let zero = TwoSidedSequence::zeros(-4, 4);
        assert!(test_statistic(&y, &zero).unwrap().abs() < 1e-12);
        let full = test_statistic(&y, &y.y).unwrap();
        assert!((full - y.y.energy()).abs() < 1e-12);
        assert!(test_statistic(&y, &TwoSidedSequence::zeros(-2, 2)).is_err());
    }

    #[test]
    fn decision_edges() {
        let cfg = SolverConfig::default();
        let zero = ObservationWindow::new(TwoSidedSequence::zeros(-54, 54), 54, 1.0).unwrap();
        assert!(!detect(&zero, 1, 1.0, 0.1, &cfg).unwrap().reject);
        let x = TwoSidedSequence::from_fn(-54, 54, |t| Complex64::from_polar(1.0, 0.3 * t as f64));
        let clean = ObservationWindow::new(x, 54, 0.0).unwrap();
        let out = detect(&clean, 1, 0.0, 0.1, &cfg).unwrap();
        assert!(out.reject && out.threshold == 0.0);
    }
}
