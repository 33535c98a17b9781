//! Decile grouping and the chi-squared independence test, with the p-value
//! computed from a self-contained regularized incomplete gamma.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("need at least 10 values to compute deciles, got {0}")]
    TooFewValues(usize),
    #[error("degenerate chi-squared input: {0}")]
    DegenerateInput(&'static str),
}

/// Result of a chi-squared goodness-of-fit test against group sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquaredResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Tests whether observations distribute across groups in proportion to the
/// group sizes. Expected counts are total * size_i / total_size; the
/// p-value is the upper tail Q(df/2, statistic/2).
pub fn chi_squared(observed: &[u64], group_sizes: &[u64]) -> Result<ChiSquaredResult, StatsError> {
    if observed.len() != group_sizes.len() {
        return Err(StatsError::DegenerateInput("length mismatch"));
    }
    if observed.len() < 2 {
        return Err(StatsError::DegenerateInput("need at least 2 groups"));
    }
    if group_sizes.contains(&0) {
        return Err(StatsError::DegenerateInput("group sizes must be positive"));
    }
    let total_observed: u64 = observed.iter().sum();
    if total_observed == 0 {
        return Err(StatsError::DegenerateInput("no observations"));
    }
    let total_size: u64 = group_sizes.iter().sum();

    let mut statistic = 0.0;
    for (&obs, &size) in observed.iter().zip(group_sizes) {
        let expected = total_observed as f64 * size as f64 / total_size as f64;
        let delta = obs as f64 - expected;
        statistic += delta * delta / expected;
    }
    let df = observed.len() - 1;
    Ok(ChiSquaredResult {
        statistic,
        df,
        p_value: reg_upper_gamma(df as f64 / 2.0, statistic / 2.0),
    })
}

/// Empirical decile upper bounds using lower interpolation: bound k is the
/// smallest data value with at least k/10 of the values at or below it.
pub fn deciles(values: &[f64]) -> Result<[f64; 10], StatsError> {
    if values.len() < 10 {
        return Err(StatsError::TooFewValues(values.len()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = sorted.len();
    let mut bounds = [0.0; 10];
    for (k, bound) in bounds.iter_mut().enumerate() {
        let rank = ((k + 1) * n).div_ceil(10);
        *bound = sorted[rank - 1];
    }
    Ok(bounds)
}

/// 1-based decile group of a value: the first decile whose bound contains it.
pub fn decile_group(value: f64, bounds: &[f64; 10]) -> usize {
    for (k, bound) in bounds.iter().enumerate() {
        if value <= *bound {
            return k + 1;
        }
    }
    10
}

// ---------------------------------------------------------------------------
// Regularized incomplete gamma, series + continued fraction
// ---------------------------------------------------------------------------

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_81,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection for the half-integer shapes below one
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

const GAMMA_EPS: f64 = 1e-16;
const GAMMA_ITMAX: usize = 10_000;

fn lower_gamma_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut denominator = a;
    for _ in 0..GAMMA_ITMAX {
        denominator += 1.0;
        term *= x / denominator;
        sum += term;
        if term.abs() < sum.abs() * GAMMA_EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn upper_gamma_continued_fraction(a: f64, x: f64) -> f64 {
    // modified Lentz evaluation of the standard continued fraction
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=GAMMA_ITMAX {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < GAMMA_EPS {
            break;
        }
    }
    h * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Regularized upper incomplete gamma Q(a, x) for a > 0, x >= 0.
pub fn reg_upper_gamma(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0, "domain: a > 0, x >= 0");
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        (1.0 - lower_gamma_series(a, x)).clamp(0.0, 1.0)
    } else {
        upper_gamma_continued_fraction(a, x).clamp(0.0, 1.0)
    }
}
