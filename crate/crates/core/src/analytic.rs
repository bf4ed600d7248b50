//! Closed-form laws of records, descents, inversions and the first value
//! under the record-biased distribution.
//!
//! Products of rising factorials and factorials are assembled in log space
//! and exponentiated only at the end, so sizes well beyond 170 are fine.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::permutation::Permutation;
use crate::special::{harmonic_shift, ln_binomial, ln_factorial, log_rising_factorial, normal_cdf};
use crate::stats;

/// Default size cap for [`exact_pmf_inversions`] (O(n^3) convolution).
pub const INVERSIONS_PMF_CAP: usize = 2000;
/// Size cap for [`exact_pmf_records`] (O(n^2) polynomial product).
pub const RECORDS_PMF_CAP: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StatisticId {
    Records,
    Descents,
    Inversions,
    FirstValue,
}

impl StatisticId {
    pub const ALL: [StatisticId; 4] = [
        StatisticId::Records,
        StatisticId::Descents,
        StatisticId::Inversions,
        StatisticId::FirstValue,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StatisticId::Records => "records",
            StatisticId::Descents => "descents",
            StatisticId::Inversions => "inversions",
            StatisticId::FirstValue => "first",
        }
    }

    /// Value of the statistic on `p`. The first value of the empty
    /// permutation is reported as 0.
    pub fn evaluate(&self, p: &Permutation) -> u64 {
        match self {
            StatisticId::Records => stats::records(p) as u64,
            StatisticId::Descents => stats::descents(p) as u64,
            StatisticId::Inversions => stats::inversions(p),
            StatisticId::FirstValue => p.word().first().copied().unwrap_or(0) as u64,
        }
    }
}

impl fmt::Display for StatisticId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StatisticId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StatisticId::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown statistic {s:?}")))
    }
}

/// Growth regimes of theta with the size n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeId {
    /// theta = 1
    Uniform,
    FixedTheta(f64),
    /// theta = n^eps, 0 < eps < 1
    Sublinear(f64),
    /// theta = lambda n
    Linear(f64),
    /// theta = n^delta, delta > 1
    Superlinear(f64),
}

impl RegimeId {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            RegimeId::Uniform => true,
            RegimeId::FixedTheta(t) => t > 0.0 && t.is_finite(),
            RegimeId::Sublinear(e) => e > 0.0 && e < 1.0,
            RegimeId::Linear(l) => l > 0.0 && l.is_finite(),
            RegimeId::Superlinear(d) => d > 1.0 && d.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            domain(format!("invalid regime {self:?}"))
        }
    }

    /// The theta this regime assigns to size `n`.
    pub fn theta(&self, n: usize) -> f64 {
        let n = n as f64;
        match *self {
            RegimeId::Uniform => 1.0,
            RegimeId::FixedTheta(t) => t,
            RegimeId::Sublinear(e) | RegimeId::Superlinear(e) => n.powf(e),
            RegimeId::Linear(l) => l * n,
        }
    }

    /// Regime matching a theta specification.
    pub fn from_bias(bias: crate::samplers::RecordBias) -> Self {
        use crate::samplers::RecordBias;
        match bias {
            RecordBias::Fixed(t) if t == 1.0 => RegimeId::Uniform,
            RecordBias::Fixed(t) => RegimeId::FixedTheta(t),
            RecordBias::LinearInSize(l) => RegimeId::Linear(l),
            RecordBias::PowerOfSize(e) if e < 1.0 => RegimeId::Sublinear(e),
            RecordBias::PowerOfSize(e) if e == 1.0 => RegimeId::Linear(1.0),
            RecordBias::PowerOfSize(e) => RegimeId::Superlinear(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceDistribution {
    StandardNormal,
    /// CDF `1 - (1 - x)^theta` on `[0, 1]`.
    BetaOneTheta(f64),
}

impl ReferenceDistribution {
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            ReferenceDistribution::StandardNormal => normal_cdf(x),
            ReferenceDistribution::BetaOneTheta(theta) => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    (1.0 - (1.0 - x).powf(theta)).clamp(0.0, 1.0)
                }
            }
        }
    }
}

pub fn reference_cdf(d: ReferenceDistribution, x: f64) -> f64 {
    d.cdf(x)
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveTheta(theta))
    }
}

/// `P(record at i) = theta / (theta + i - 1)`.
pub fn prob_record_at(theta: f64, i: usize) -> Result<f64> {
    check_theta(theta)?;
    if i == 0 {
        return domain("record position starts at 1");
    }
    Ok(theta / (theta + (i - 1) as f64))
}

/// `P(sigma(i-1) > sigma(i))` for `i >= 2`.
pub fn prob_descent_at(theta: f64, i: usize) -> Result<f64> {
    check_theta(theta)?;
    if i < 2 {
        return domain("descent position starts at 2");
    }
    let i = i as f64;
    Ok((i - 1.0) * (2.0 * theta + i - 2.0) / (2.0 * (theta + i - 1.0) * (theta + i - 2.0)))
}

/// `P(inv_j = k)`: `theta / (theta + j - 1)` for `k = 0`, `1 / (theta + j - 1)` otherwise.
pub fn prob_invj(theta: f64, j: usize, k: usize) -> Result<f64> {
    check_theta(theta)?;
    if j == 0 || k >= j {
        return domain(format!("need 0 <= k < j, got j = {j}, k = {k}"));
    }
    let denom = theta + (j - 1) as f64;
    Ok(if k == 0 { theta / denom } else { 1.0 / denom })
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return domain("size must be at least 1");
    }
    Ok(())
}

/// `P(sigma(1) = k) = (n-1)! theta^(n-k) theta / ((n-k)! theta^(n))`.
pub fn prob_first_value(theta: f64, n: usize, k: usize) -> Result<f64> {
    check_theta(theta)?;
    check_size(n)?;
    if k == 0 || k > n {
        return domain(format!("first value {k} outside 1..={n}"));
    }
    let (n64, k64) = (n as u64, k as u64);
    let log_p = ln_factorial(n64 - 1) + log_rising_factorial(theta, n64 - k64)? + theta.ln()
        - ln_factorial(n64 - k64)
        - log_rising_factorial(theta, n64)?;
    Ok(log_p.exp())
}

/// `P(lmax(sigma, i) = j)`, zero for `j < i`.
pub fn prob_lmax(theta: f64, n: usize, i: usize, j: usize) -> Result<f64> {
    check_theta(theta)?;
    check_size(n)?;
    if i == 0 || i > n || j == 0 || j > n {
        return domain(format!("need 1 <= i, j <= {n}, got i = {i}, j = {j}"));
    }
    if j < i {
        return Ok(0.0);
    }
    let (n, i, j) = (n as u64, i as u64, j as u64);
    // theta^(i) theta^(n-j) / theta^(n) * (i/j) C(j,i) C(n-i, j-i) (j-i)!
    let log_p = log_rising_factorial(theta, i)? + log_rising_factorial(theta, n - j)?
        - log_rising_factorial(theta, n)?
        + (i as f64).ln()
        - (j as f64).ln()
        + ln_binomial(j, i)
        + ln_binomial(n - i, j - i)
        + ln_factorial(j - i);
    Ok(log_p.exp())
}

/// Exact expectation of a statistic at size `n`.
pub fn expected_value(stat: StatisticId, theta: f64, n: usize) -> Result<f64> {
    check_theta(theta)?;
    check_size(n)?;
    let nf = n as f64;
    Ok(match stat {
        StatisticId::Records => theta * harmonic_shift(theta, n)?,
        StatisticId::Descents => nf * (nf - 1.0) / (2.0 * (theta + nf - 1.0)),
        StatisticId::Inversions => {
            nf * (nf + 1.0 - 2.0 * theta) / 4.0
                + theta * (theta - 1.0) / 2.0 * harmonic_shift(theta, n)?
        }
        StatisticId::FirstValue => (theta + nf) / (theta + 1.0),
    })
}

/// Variance of `inv_j`.
pub fn variance_invj(theta: f64, j: usize) -> Result<f64> {
    check_theta(theta)?;
    if j == 0 {
        return domain("column index starts at 1");
    }
    let j = j as f64;
    let d = theta + j - 1.0;
    Ok(j * (j - 1.0) * (j * j + (4.0 * theta - 3.0) * j + 2.0 - 2.0 * theta) / (12.0 * d * d))
}

/// Variance of the inversion count, a sum over independent columns.
pub fn variance_inversions(theta: f64, n: usize) -> Result<f64> {
    check_theta(theta)?;
    (1..=n).map(|j| variance_invj(theta, j)).sum()
}

/// Pmf of the record count, indexed by value `0..=n` (entry 0 is zero for
/// `n >= 1`). Coefficients of `prod_i (1 - p_i + p_i z)`.
pub fn exact_pmf_records(theta: f64, n: usize) -> Result<Vec<f64>> {
    check_theta(theta)?;
    if n > RECORDS_PMF_CAP {
        return Err(Error::SupportTooLarge {
            n,
            cap: RECORDS_PMF_CAP,
        });
    }
    let mut coeffs = vec![0.0; n + 1];
    coeffs[0] = 1.0;
    for i in 1..=n {
        let p = theta / (theta + (i - 1) as f64);
        for k in (1..=i).rev() {
            coeffs[k] = coeffs[k] * (1.0 - p) + coeffs[k - 1] * p;
        }
        coeffs[0] *= 1.0 - p;
    }
    Ok(coeffs)
}

/// Pmf of the inversion count over `0..=n(n-1)/2`, capped at
/// [`INVERSIONS_PMF_CAP`].
pub fn exact_pmf_inversions(theta: f64, n: usize) -> Result<Vec<f64>> {
    exact_pmf_inversions_capped(theta, n, INVERSIONS_PMF_CAP)
}

/// Convolution of the per-column laws; each step is a window sum done with
/// prefix sums, O(n^3) overall. Windows are taken from whichever end leaves
/// less mass outside them, which keeps both tails accurate.
pub fn exact_pmf_inversions_capped(theta: f64, n: usize, cap: usize) -> Result<Vec<f64>> {
    check_theta(theta)?;
    if n > cap {
        return Err(Error::SupportTooLarge { n, cap });
    }
    let max = n * n.saturating_sub(1) / 2;
    let mut pmf = vec![0.0; max + 1];
    pmf[0] = 1.0;
    let mut prefix = vec![0.0; max + 2];
    let mut suffix = vec![0.0; max + 2];
    let mut support = 0;
    for j in 2..=n {
        let denom = theta + (j - 1) as f64;
        for k in 0..=support {
            prefix[k + 1] = prefix[k] + pmf[k];
        }
        suffix[support + 1] = 0.0;
        for k in (0..=support).rev() {
            suffix[k] = suffix[k + 1] + pmf[k];
        }
        let new_support = support + j - 1;
        for k in (0..=new_support).rev() {
            // sum of old pmf over [k - j + 1, k - 1]
            let hi = k.min(support + 1);
            let lo = (k + 1).saturating_sub(j).min(hi);
            let window = if prefix[lo] <= suffix[hi] {
                prefix[hi] - prefix[lo]
            } else {
                suffix[lo] - suffix[hi]
            };
            let stay = if k <= support { pmf[k] } else { 0.0 };
            pmf[k] = ((theta * stay + window) / denom).max(0.0);
        }
        support = new_support;
    }
    Ok(pmf)
}

/// Eulerian numbers `a_{r,0..r-1}`: permutations of size `r` by descent count.
pub fn eulerian_numbers(r: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for size in 2..=r {
        let mut next = vec![0.0; size];
        for (k, cell) in next.iter_mut().enumerate() {
            let stay = if k < row.len() { (k + 1) as f64 * row[k] } else { 0.0 };
            let rise = if k >= 1 { (size - k) as f64 * row[k - 1] } else { 0.0 };
            *cell = stay + rise;
        }
        row = next;
    }
    if r == 0 {
        Vec::new()
    } else {
        row
    }
}

/// Exact `E[sigma(1)^r]` for `1 <= r <= n - 1`, from the Eulerian expansion
/// `((n-1)! theta / theta^(n)) sum_j a_{r,j-1} (theta+r+1)^(n-j) / (n-j)!`.
pub fn first_value_moment(theta: f64, n: usize, r: usize) -> Result<f64> {
    check_theta(theta)?;
    if r == 0 || r >= n {
        return domain(format!("moment order {r} outside 1..{n}"));
    }
    let n64 = n as u64;
    let base = ln_factorial(n64 - 1) + theta.ln() - log_rising_factorial(theta, n64)?;
    let shifted = theta + r as f64 + 1.0;
    let mut total = 0.0;
    for (j, a) in (1..=r).zip(eulerian_numbers(r)) {
        let j = j as u64;
        let log_term =
            base + log_rising_factorial(shifted, n64 - j)? - ln_factorial(n64 - j);
        total += a * log_term.exp();
    }
    Ok(total)
}

/// Limit of `E[(sigma(1)/n)^r]`: the Beta(1, theta) moment `r! / (theta+1)^(r)`.
pub fn beta_moment(theta: f64, r: usize) -> Result<f64> {
    check_theta(theta)?;
    Ok((ln_factorial(r as u64) - log_rising_factorial(theta + 1.0, r as u64)?).exp())
}

/// `f(lambda) = 1 - 2 lambda + 2 lambda^2 log(1 + 1/lambda)`.
pub fn inversion_shape(lambda: f64) -> f64 {
    1.0 - 2.0 * lambda + 2.0 * lambda * lambda * (1.0 / lambda).ln_1p()
}

/// Asymptotic equivalent of the expectation in each growth regime.
pub fn asymptotic_expectation(stat: StatisticId, regime: RegimeId, n: usize) -> Result<f64> {
    regime.validate()?;
    if n < 2 {
        return domain("asymptotics need n >= 2");
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    use RegimeId::*;
    use StatisticId::*;
    Ok(match (stat, regime) {
        (Records, Uniform) => ln_n,
        (Records, FixedTheta(t)) => t * ln_n,
        (Records, Sublinear(e)) => (1.0 - e) * nf.powf(e) * ln_n,
        (Records, Linear(l)) => l * (1.0 / l).ln_1p() * nf,
        (Records, Superlinear(_)) => nf,

        (Descents, Uniform | FixedTheta(_) | Sublinear(_)) => nf / 2.0,
        (Descents, Linear(l)) => nf / (2.0 * (l + 1.0)),
        (Descents, Superlinear(d)) => nf.powf(2.0 - d) / 2.0,

        (Inversions, Uniform | FixedTheta(_) | Sublinear(_)) => nf * nf / 4.0,
        (Inversions, Linear(l)) => nf * nf / 4.0 * inversion_shape(l),
        (Inversions, Superlinear(d)) => nf.powf(3.0 - d) / 6.0,

        (FirstValue, Uniform) => nf / 2.0,
        (FirstValue, FixedTheta(t)) => nf / (t + 1.0),
        (FirstValue, Sublinear(e)) => nf.powf(1.0 - e),
        (FirstValue, Linear(l)) => (l + 1.0) / l,
        (FirstValue, Superlinear(_)) => 1.0,
    })
}

/// Mean and variance of a pmf indexed by value.
pub fn pmf_moments(pmf: &[f64]) -> (f64, f64) {
    let mean: f64 = pmf.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
    let var = pmf
        .iter()
        .enumerate()
        .map(|(k, p)| (k as f64 - mean).powi(2) * p)
        .sum();
    (mean, var)
}
