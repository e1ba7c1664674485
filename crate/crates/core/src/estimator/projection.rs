//! Euclidean projection onto `{w ∈ C^d : ‖w‖_1 ≤ R1, ‖w‖_∞ ≤ R∞}`.

use num_complex::Complex64;

/// Projects `w` onto the intersection of the complex ℓ1 ball of radius `r1`
/// and the complex ℓ∞ ball of radius `rinf`.
///
/// Phases are kept and the magnitudes `a` are mapped to
/// `u_i = clamp(a_i − λ, 0, R∞)`, with the smallest `λ ≥ 0` that brings
/// `Σ u_i` under `R1`. `λ` is found exactly by sweeping the sorted
/// breakpoints of the piecewise-linear map `λ ↦ Σ u_i(λ)`.
pub fn project_l1_linf(w: &[Complex64], r1: f64, rinf: f64) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    if !(r1 > 0.0 && rinf > 0.0) {
        return vec![zero; w.len()];
    }
    let mags: Vec<f64> = w.iter().map(|z| z.norm()).collect();
    let lambda = shrinkage(&mags, r1, rinf);
    w.iter()
        .zip(&mags)
        .map(|(z, &a)| {
            let u = (a - lambda).clamp(0.0, rinf);
            if a > 0.0 && u > 0.0 {
                z * (u / a)
            } else {
                zero
            }
        })
        .collect()
}

/// Threshold `λ` of [`project_l1_linf`] for nonnegative magnitudes.
pub(crate) fn shrinkage(mags: &[f64], r1: f64, rinf: f64) -> f64 {
    let total: f64 = mags.iter().map(|&a| a.min(rinf)).sum();
    if total <= r1 {
        return 0.0;
    }
    // Events: at a_i − R∞ coordinate i leaves the cap (slope −1); at a_i it
    // reaches zero (slope +1).
    let mut events: Vec<(f64, i64)> = Vec::with_capacity(2 * mags.len());
    let mut free: i64 = 0;
    for &a in mags {
        if a <= 0.0 {
            continue;
        }
        if a > rinf {
            events.push((a - rinf, -1));
        } else {
            free += 1;
        }
        events.push((a, 1));
    }
    events.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut lambda = 0.0;
    let mut g = total;
    let mut i = 0;
    while i < events.len() {
        let next = events[i].0;
        let g_next = g - free as f64 * (next - lambda);
        if free > 0 && g_next <= r1 {
            return lambda + (g - r1) / free as f64;
        }
        g = g_next;
        lambda = next;
        while i < events.len() && events[i].0 == next {
            free -= events[i].1;
            i += 1;
        }
    }
    // g reaches 0 at the largest magnitude, and r1 > 0, so the loop returns
    lambda
}
