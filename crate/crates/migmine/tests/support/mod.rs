//! Shared helpers for the integration suites, including the independent
//! numeric-integration oracle that cross-checks chi-squared p-values.

/// Upper-tail probability of the chi-squared distribution by Simpson
/// integration of the density. Substituting x = u^2 turns the density into
/// 2 u^(k-1) e^(-u^2/2) / (2^(k/2) Gamma(k/2)), which is smooth at zero even
/// for one degree of freedom, so fixed-panel Simpson converges fast. The
/// gamma factor is evaluated exactly for integer and half-integer shapes.
/// This path shares nothing with the series/continued-fraction evaluation
/// under test.
pub fn chi_squared_upper_tail_quadrature(df: u32, statistic: f64) -> f64 {
    assert!(df >= 1 && statistic >= 0.0);
    if statistic == 0.0 {
        return 1.0;
    }
    let k = df as f64;
    let norm = 2f64.powf(k / 2.0) * gamma_half_integer(df);
    let upper = statistic.sqrt();
    let integrand = |u: f64| 2.0 * u.powf(k - 1.0) * (-u * u / 2.0).exp();

    let panels = 100_000usize; // even
    let h = upper / panels as f64;
    let mut sum = integrand(0.0) + integrand(upper);
    for i in 1..panels {
        let u = i as f64 * h;
        sum += integrand(u) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let cdf = sum * h / 3.0 / norm;
    (1.0 - cdf).clamp(0.0, 1.0)
}

/// Gamma(k/2) for integer k >= 1, via Gamma(1/2) = sqrt(pi), Gamma(1) = 1
/// and the recurrence Gamma(x+1) = x Gamma(x).
fn gamma_half_integer(k: u32) -> f64 {
    let target = k as f64 / 2.0;
    let (mut x, mut value) = if k % 2 == 1 {
        (0.5, std::f64::consts::PI.sqrt())
    } else {
        (1.0, 1.0)
    };
    while x + 0.25 < target {
        value *= x;
        x += 1.0;
    }
    value
}

#[allow(dead_code)]
pub fn assert_close(actual: f64, expected: f64, tolerance: f64, label: &str) {
    assert!(
        (actual - expected).abs() <= tolerance,
        "{label}: {actual} vs {expected} (tolerance {tolerance})"
    );
}
