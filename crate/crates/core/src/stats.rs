//! Binomial statistics helpers for Monte Carlo reports.

use statrs::distribution::{ContinuousCDF, Normal};

/// Wilson score interval for a binomial proportion.
///
/// Well-behaved at boundary counts: the interval stays inside [0, 1] and
/// collapses to the correct endpoint at 0 or `trials` successes.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(trials >= 1, "wilson_interval needs at least one trial");
    assert!(successes <= trials);
    assert!((0.0..1.0).contains(&confidence) && confidence > 0.0);

    let n = trials as f64;
    let p_hat = successes as f64 / n;
    let z = Normal::standard().inverse_cdf(1.0 - (1.0 - confidence) / 2.0);
    let z2 = z * z;

    let denom = 1.0 + z2 / n;
    let center = (p_hat + z2 / (2.0 * n)) / denom;
    let half = z * (p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // At the boundary counts the exact endpoints are 0 and 1; rounding in
    // center +/- half must not pull them inside.
    let low = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (low, high)
}

/// Standard deviation of the empirical frequency of a Bernoulli(p) over
/// `trials` draws.
pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// |empirical - analytic| expressed in binomial standard deviations of the
/// analytic rate. Returns 0 when sigma degenerates and the values agree.
pub fn sigma_deviation(empirical: f64, analytic: f64, trials: u64) -> f64 {
    let sigma = binomial_sigma(analytic, trials);
    if sigma > 0.0 {
        (empirical - analytic).abs() / sigma
    } else if empirical == analytic {
        0.0
    } else {
        f64::INFINITY
    }
}
