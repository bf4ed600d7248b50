//! Special functions: digamma, log-gamma, rising factorials, normal CDF.
//!
//! Log-gamma and log-factorial come from `statrs`, erfc from `libm`; digamma
//! is computed here by upward recurrence followed by the asymptotic series.

use statrs::function::{factorial, gamma};

use crate::error::{domain, Result};

/// Below this the argument is shifted up with `psi(x) = psi(x + 1) - 1/x`.
const DIGAMMA_SHIFT: f64 = 10.0;

/// Digamma, the logarithmic derivative of the gamma function, for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("digamma needs x > 0, got {x}"));
    }
    let mut shift = 0.0;
    let mut y = x;
    while y < DIGAMMA_SHIFT {
        shift += 1.0 / y;
        y += 1.0;
    }
    // ln y - 1/(2y) - sum B_2k / (2k y^2k), truncated after y^-14
    let r = 1.0 / (y * y);
    let tail = r
        * (1.0 / 12.0
            - r * (1.0 / 120.0
                - r * (1.0 / 252.0
                    - r * (1.0 / 240.0
                        - r * (1.0 / 132.0 - r * (691.0 / 32760.0 - r / 12.0))))));
    Ok(y.ln() - 0.5 / y - tail - shift)
}

/// `psi(x + n) - psi(x) = sum_{i<n} 1/(x+i)`. Sums directly for short ranges,
/// where the digamma difference would cancel badly.
pub fn harmonic_shift(x: f64, n: usize) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("harmonic shift needs x > 0, got {x}"));
    }
    if n <= 64 {
        return Ok((0..n).map(|i| 1.0 / (x + i as f64)).sum());
    }
    Ok(digamma(x + n as f64)? - digamma(x)?)
}

pub fn ln_gamma(x: f64) -> f64 {
    gamma::ln_gamma(x)
}

pub fn ln_factorial(k: u64) -> f64 {
    factorial::ln_factorial(k)
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Log of the rising factorial `x (x+1) ... (x+n-1)`, with `x^(0) = 1`.
pub fn log_rising_factorial(x: f64, n: u64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("rising factorial needs x > 0, got {x}"));
    }
    if n <= 64 {
        return Ok((0..n).map(|i| (x + i as f64).ln()).sum());
    }
    Ok(ln_gamma(x + n as f64) - ln_gamma(x))
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn digamma_reference_values() {
        assert!(rel(digamma(1.0).unwrap(), -EULER_GAMMA) < 1e-14);
        // psi(1/2) = -gamma - 2 ln 2
        let half = -EULER_GAMMA - 2.0 * std::f64::consts::LN_2;
        assert!(rel(digamma(0.5).unwrap(), half) < 1e-14);
        // psi(n) = H_{n-1} - gamma
        let h: f64 = (1..100).map(|k| 1.0 / k as f64).sum();
        assert!(rel(digamma(100.0).unwrap(), h - EULER_GAMMA) < 1e-14);
        // psi(1e-3) = psi(1.001) - 1000, psi(1.001) by series around 1:
        // psi(1+e) = -gamma + zeta(2) e - zeta(3) e^2 + zeta(4) e^3 - ...
        let e: f64 = 1e-3;
        let near_one = -EULER_GAMMA + 1.644_934_066_848_226_4 * e - 1.202_056_903_159_594_3 * e * e
            + 1.082_323_233_711_138_2 * e.powi(3)
            - 1.036_927_755_143_369_9 * e.powi(4);
        assert!(rel(digamma(1.0 + e).unwrap(), near_one) < 1e-13);
        assert!(rel(digamma(e).unwrap(), near_one - 1000.0) < 1e-13);
    }

    #[test]
    fn digamma_recurrence_and_sum_identity() {
        for x in [0.5, 1.0, 7.3, 0.013, 42.0, 1e6] {
            let lhs = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
            assert!((lhs - 1.0 / x).abs() < 1e-13 * (1.0 / x).max(1.0), "x = {x}");
        }
        let direct: f64 = (0..5).map(|i| 1.0 / (2.0 + i as f64)).sum();
        assert!((digamma(7.0).unwrap() - digamma(2.0).unwrap() - direct).abs() < 1e-14);
        assert!((harmonic_shift(2.0, 5).unwrap() - direct).abs() < 1e-15);
        let long: f64 = (0..1000).map(|i| 1.0 / (0.7 + i as f64)).sum();
        assert!(rel(harmonic_shift(0.7, 1000).unwrap(), long) < 1e-13);
    }

    #[test]
    fn digamma_domain() {
        assert!(digamma(0.0).is_err());
        assert!(digamma(-1.5).is_err());
        assert!(digamma(f64::NAN).is_err());
    }

    #[test]
    fn rising_factorial_examples() {
        assert_eq!(log_rising_factorial(3.7, 0).unwrap(), 0.0);
        assert!((log_rising_factorial(1.0, 5).unwrap() - 120f64.ln()).abs() < 1e-14);
        assert!((log_rising_factorial(2.0, 3).unwrap() - 24f64.ln()).abs() < 1e-14);
        // long range goes through log-gamma: 1^(100) = 100!
        assert!(rel(log_rising_factorial(1.0, 100).unwrap(), ln_factorial(100)) < 1e-14);
        assert!(log_rising_factorial(0.0, 3).is_err());
    }

    #[test]
    fn normal_cdf_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-12);
        assert!((normal_cdf(-1.959_963_984_540_054) - 0.025).abs() < 1e-12);
        assert!((normal_cdf(3.0) + normal_cdf(-3.0) - 1.0).abs() < 1e-15);
    }
}
