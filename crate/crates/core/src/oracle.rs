//! Exhaustive-enumeration ground truth for small sizes.
//!
//! Exact laws come from weighting every permutation of size `n`. Sampler
//! laws come from running the production sampler code against a
//! [`Choices`] implementation that walks every branch of its decision tree
//! and multiplies the step probabilities along each path.

use std::collections::BTreeMap;
use std::fmt;

use crate::analytic::{self, StatisticId};
use crate::error::{domain, Error, Result};
use crate::permutation::{all_permutations, Permutation};
use crate::rng::{Branch, Choices};
use crate::samplers::SamplerKind;
use crate::special::log_rising_factorial;
use crate::stats;

pub const ENUMERATION_CAP: usize = 8;
pub const TREE_CAP: usize = 6;
/// Relative tolerance of every exact comparison.
pub const EXACT_TOL: f64 = 1e-12;

/// A finite probability law.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactLaw<K: Ord> {
    support: BTreeMap<K, f64>,
}

/// Per-permutation path mass of a sampler's decision tree.
pub type DecisionTreeLaw = ExactLaw<Permutation>;

impl<K: Ord> Default for ExactLaw<K> {
    fn default() -> Self {
        Self {
            support: BTreeMap::new(),
        }
    }
}

impl<K: Ord> ExactLaw<K> {
    /// Normalizes non-negative weights; repeated keys accumulate.
    pub fn from_weights(weights: impl IntoIterator<Item = (K, f64)>) -> Result<Self> {
        let mut support = BTreeMap::new();
        let mut total = 0.0;
        for (k, w) in weights {
            if !(w >= 0.0) || !w.is_finite() {
                return domain(format!("weight {w} is not a finite non-negative number"));
            }
            total += w;
            *support.entry(k).or_insert(0.0) += w;
        }
        if !(total > 0.0) {
            return Err(Error::EmptyInput);
        }
        support.values_mut().for_each(|p| *p /= total);
        Ok(Self { support })
    }

    pub fn prob(&self, k: &K) -> f64 {
        self.support.get(k).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, f64)> {
        self.support.iter().map(|(k, &p)| (k, p))
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.support.values().sum()
    }

    /// Pushforward through `f`.
    pub fn map<L: Ord>(&self, mut f: impl FnMut(&K) -> L) -> ExactLaw<L> {
        let mut support = BTreeMap::new();
        for (k, &p) in &self.support {
            *support.entry(f(k)).or_insert(0.0) += p;
        }
        ExactLaw { support }
    }

    /// Largest relative discrepancy between two laws, over the union of supports.
    pub fn max_relative_error(&self, other: &Self) -> f64 {
        let one = self.support.iter().map(|(k, &p)| rel_err(p, other.prob(k)));
        let two = other.support.iter().map(|(k, &q)| rel_err(self.prob(k), q));
        one.chain(two).fold(0.0, f64::max)
    }
}

impl ExactLaw<u64> {
    pub fn mean(&self) -> f64 {
        self.iter().map(|(&k, p)| k as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.iter().map(|(&k, p)| (k as f64 - m).powi(2) * p).sum()
    }
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Exponent of `theta` in the weight of a permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    Records,
    Cycles,
}

impl Weight {
    fn exponent(&self, p: &Permutation) -> usize {
        match self {
            Weight::Records => stats::records(p),
            Weight::Cycles => p.cycle_count(),
        }
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return domain("size must be at least 1");
    }
    if n > cap {
        return Err(Error::NTooLarge { n, cap });
    }
    Ok(())
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveTheta(theta))
    }
}

fn weighted(n: usize, theta: f64, weight: Weight) -> Result<Vec<(Permutation, f64)>> {
    check_theta(theta)?;
    check_cap(n, ENUMERATION_CAP)?;
    Ok(all_permutations(n)
        .map(|p| {
            let w = theta.powi(weight.exponent(&p) as i32);
            (p, w)
        })
        .collect())
}

/// `sum over S_n of theta^weight`.
pub fn weight_sum(n: usize, theta: f64, weight: Weight) -> Result<f64> {
    Ok(weighted(n, theta, weight)?.iter().map(|(_, w)| w).sum())
}

pub fn exact_distribution(n: usize, theta: f64, weight: Weight) -> Result<ExactLaw<Permutation>> {
    ExactLaw::from_weights(weighted(n, theta, weight)?)
}

/// Law of a statistic under the record-biased distribution.
pub fn exact_statistic_pmf(n: usize, theta: f64, stat: StatisticId) -> Result<ExactLaw<u64>> {
    Ok(exact_distribution(n, theta, Weight::Records)?.map(|p| stat.evaluate(p)))
}

/// Walks the decision tree depth first. `path[d]` is `(choice, arity)` at
/// depth `d`, choice 0 being the favoured branch.
struct TreeWalk {
    path: Vec<(usize, usize)>,
    depth: usize,
    prob: f64,
}

impl Choices for TreeWalk {
    fn pick(&mut self, theta: f64, m: usize) -> Branch {
        let arity = m + 1;
        let choice = if self.depth < self.path.len() {
            debug_assert_eq!(self.path[self.depth].1, arity, "tree shape changed on replay");
            self.path[self.depth].0
        } else {
            self.path.push((0, arity));
            0
        };
        self.depth += 1;
        let denom = theta + m as f64;
        if choice == 0 {
            self.prob *= theta / denom;
            Branch::Favored
        } else {
            self.prob /= denom;
            Branch::Other(choice - 1)
        }
    }
}

impl TreeWalk {
    /// Moves to the next leaf; false once the tree is exhausted.
    fn advance(&mut self) -> bool {
        self.path.truncate(self.depth);
        while let Some(last) = self.path.last_mut() {
            if last.0 + 1 < last.1 {
                last.0 += 1;
                return true;
            }
            self.path.pop();
        }
        false
    }
}

/// Exact output law of a sampler, summed over every path of its tree.
pub fn sampler_tree_law(kind: SamplerKind, n: usize, theta: f64) -> Result<DecisionTreeLaw> {
    check_theta(theta)?;
    check_cap(n, TREE_CAP)?;
    let mut walk = TreeWalk {
        path: Vec::new(),
        depth: 0,
        prob: 1.0,
    };
    let mut support = BTreeMap::new();
    loop {
        walk.depth = 0;
        walk.prob = 1.0;
        let p = kind.sample(n, theta, &mut walk);
        *support.entry(p).or_insert(0.0) += walk.prob;
        if !walk.advance() {
            break;
        }
    }
    Ok(ExactLaw { support })
}

/// Half the L1 distance; missing outcomes have probability 0.
pub fn tv_distance<K: Ord>(a: &ExactLaw<K>, b: &ExactLaw<K>) -> f64 {
    let one: f64 = a.iter().map(|(k, p)| (p - b.prob(k)).abs()).sum();
    let only_b: f64 = b.iter().filter(|(k, _)| a.prob(k) == 0.0).map(|(_, q)| q).sum();
    0.5 * (one + only_b)
}

pub fn empirical_histogram(samples: &[Permutation], stat: StatisticId) -> Result<ExactLaw<u64>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    ExactLaw::from_weights(samples.iter().map(|p| (stat.evaluate(p), 1.0)))
}

/// Two-sided Kolmogorov-Smirnov distance between the empirical CDF of
/// `samples` and `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if samples.iter().any(|x| x.is_nan()) {
        return domain("NaN sample");
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut worst = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        worst = worst.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(worst)
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Limit permuton mass of `[0, a] x [0, b]` integrated numerically from the
/// two densities: `lambda / (lambda + x)` on the curve `y = f(x)` and
/// `1 / (lambda + 1)` below it. The curve crossing height `b` is located by
/// bisection and used as a breakpoint.
pub fn limit_corner_by_integration(lambda: f64, a: f64, b: f64, tol: f64) -> f64 {
    let f = |x: f64| x * (lambda + 1.0) / (lambda + x);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= b {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let cross = lo.min(a);
    let curve = integrate(|x| lambda / (lambda + x), 0.0, cross, tol);
    let below = integrate(|x| f(x) / (lambda + 1.0), 0.0, cross, tol)
        + integrate(|x| f(x).min(b) / (lambda + 1.0), cross, a, tol);
    curve + below
}

/// Closed forms under test. The defaults are the ones in
/// [`crate::analytic`]; swapping one out lets a perturbed formula be checked
/// against the suite.
#[derive(Clone, Copy)]
pub struct Formulas {
    pub record_at: fn(f64, usize) -> Result<f64>,
    pub descent_at: fn(f64, usize) -> Result<f64>,
    pub invj: fn(f64, usize, usize) -> Result<f64>,
    pub first_value: fn(f64, usize, usize) -> Result<f64>,
    pub lmax: fn(f64, usize, usize, usize) -> Result<f64>,
    pub expected: fn(StatisticId, f64, usize) -> Result<f64>,
    pub pmf_records: fn(f64, usize) -> Result<Vec<f64>>,
    pub pmf_inversions: fn(f64, usize) -> Result<Vec<f64>>,
    pub variance_inversions: fn(f64, usize) -> Result<f64>,
}

impl Default for Formulas {
    fn default() -> Self {
        Self {
            record_at: analytic::prob_record_at,
            descent_at: analytic::prob_descent_at,
            invj: analytic::prob_invj,
            first_value: analytic::prob_first_value,
            lmax: analytic::prob_lmax,
            expected: analytic::expected_value,
            pmf_records: analytic::exact_pmf_records,
            pmf_inversions: analytic::exact_pmf_inversions,
            variance_inversions: analytic::variance_inversions,
        }
    }
}

/// Position-wise marginals of an exact law over `S_n`, all 1-based.
#[derive(Debug, Clone)]
pub struct Marginals {
    pub n: usize,
    pub record_at: Vec<f64>,
    pub descent_at: Vec<f64>,
    /// `invj[j][k] = P(inv_j = k)`.
    pub invj: Vec<Vec<f64>>,
    pub first_value: Vec<f64>,
    /// `lmax[i][j] = P(lmax(sigma, i) = j)`.
    pub lmax: Vec<Vec<f64>>,
}

impl Marginals {
    pub fn of(law: &ExactLaw<Permutation>) -> Result<Self> {
        let n = match law.iter().next() {
            Some((p, _)) => p.len(),
            None => return Err(Error::EmptyInput),
        };
        let mut m = Self {
            n,
            record_at: vec![0.0; n + 1],
            descent_at: vec![0.0; n + 1],
            invj: (0..=n).map(|j| vec![0.0; j.max(1)]).collect(),
            first_value: vec![0.0; n + 1],
            lmax: vec![vec![0.0; n + 1]; n + 1],
        };
        for (p, prob) in law.iter() {
            let w = p.word();
            let maxima = p.prefix_maxima();
            for i in 1..=n {
                if p.is_record_at(i) {
                    m.record_at[i] += prob;
                }
                if i >= 2 && w[i - 2] > w[i - 1] {
                    m.descent_at[i] += prob;
                }
                m.lmax[i][maxima[i - 1] as usize] += prob;
            }
            for (j, &k) in stats::inv_profile(p).iter().enumerate() {
                m.invj[j + 1][k as usize] += prob;
            }
            m.first_value[w[0] as usize] += prob;
        }
        Ok(m)
    }
}

/// Outcome of one verification check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Largest relative error seen.
    pub error: f64,
    pub tolerance: f64,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {} (error {:.3e}, tolerance {:.0e})", self.name, self.error, self.tolerance)
    }
}

struct Recorder {
    checks: Vec<Check>,
}

impl Recorder {
    fn push(&mut self, name: String, error: f64, tolerance: f64) {
        self.checks.push(Check {
            name,
            passed: error <= tolerance,
            error,
            tolerance,
        });
    }
}

fn worst<I: IntoIterator<Item = Result<(f64, f64)>>>(pairs: I) -> Result<f64> {
    let mut w = 0.0f64;
    for pair in pairs {
        let (a, b) = pair?;
        w = w.max(rel_err(a, b));
    }
    Ok(w)
}

/// Runs every exhaustive check for sizes `1..=max_n` and the given thetas.
/// Tree laws stop at [`TREE_CAP`].
pub fn verify_suite(max_n: usize, thetas: &[f64], formulas: &Formulas) -> Result<Vec<Check>> {
    check_cap(max_n, ENUMERATION_CAP)?;
    let mut rec = Recorder { checks: Vec::new() };
    for &theta in thetas {
        check_theta(theta)?;
        for n in 1..=max_n {
            let tag = format!("n={n} theta={theta}");
            let by_records = exact_distribution(n, theta, Weight::Records)?;
            let by_cycles = exact_distribution(n, theta, Weight::Cycles)?;

            let z = weight_sum(n, theta, Weight::Records)?;
            let rising = log_rising_factorial(theta, n as u64)?.exp();
            rec.push(format!("normalization {tag}"), rel_err(z, rising), EXACT_TOL);

            let pushed = by_cycles.map(|p| p.foata());
            rec.push(format!("foata pushforward {tag}"), pushed.max_relative_error(&by_records), EXACT_TOL);

            if n <= TREE_CAP {
                for kind in SamplerKind::ALL {
                    let tree = sampler_tree_law(kind, n, theta)?;
                    let mut err = tree.max_relative_error(&by_records);
                    if tree.len() != by_records.len() {
                        err = f64::INFINITY;
                    }
                    rec.push(format!("tree law {kind} {tag}"), err, EXACT_TOL);
                }
            }

            let m = Marginals::of(&by_records)?;
            let e = worst((1..=n).map(|i| Ok((m.record_at[i], (formulas.record_at)(theta, i)?))))?;
            rec.push(format!("record marginals {tag}"), e, EXACT_TOL);
            let e = worst((2..=n).map(|i| Ok((m.descent_at[i], (formulas.descent_at)(theta, i)?))))?;
            rec.push(format!("descent marginals {tag}"), e, EXACT_TOL);
            let e = worst((1..=n).flat_map(|j| (0..j).map(move |k| (j, k))).map(|(j, k)| {
                Ok((m.invj[j][k], (formulas.invj)(theta, j, k)?))
            }))?;
            rec.push(format!("inversion column marginals {tag}"), e, EXACT_TOL);
            let e = worst((1..=n).map(|k| Ok((m.first_value[k], (formulas.first_value)(theta, n, k)?))))?;
            rec.push(format!("first value law {tag}"), e, EXACT_TOL);
            let e = worst((1..=n).flat_map(|i| (1..=n).map(move |j| (i, j))).map(|(i, j)| {
                Ok((m.lmax[i][j], (formulas.lmax)(theta, n, i, j)?))
            }))?;
            rec.push(format!("lmax law {tag}"), e, EXACT_TOL);
            let e = worst((1..=n).map(|j| Ok(((formulas.lmax)(theta, n, 1, j)?, (formulas.first_value)(theta, n, j)?))))?;
            rec.push(format!("lmax at 1 equals first value {tag}"), e, EXACT_TOL);

            let mut e_mean = 0.0f64;
            for stat in StatisticId::ALL {
                let pmf = by_records.map(|p| stat.evaluate(p));
                e_mean = e_mean.max(rel_err(pmf.mean(), (formulas.expected)(stat, theta, n)?));
            }
            rec.push(format!("expectations {tag}"), e_mean, 1e-10);

            for (stat, formula) in [
                (StatisticId::Records, formulas.pmf_records),
                (StatisticId::Inversions, formulas.pmf_inversions),
            ] {
                let exact = by_records.map(|p| stat.evaluate(p));
                let pmf = formula(theta, n)?;
                let mut e = pmf
                    .iter()
                    .enumerate()
                    .map(|(k, &q)| rel_err(exact.prob(&(k as u64)), q))
                    .fold(0.0, f64::max);
                if exact.iter().any(|(&k, _)| k as usize >= pmf.len()) {
                    e = f64::INFINITY;
                }
                rec.push(format!("{stat} pmf {tag}"), e, EXACT_TOL);
            }
            let inv = by_records.map(|p| StatisticId::Inversions.evaluate(p));
            let e = rel_err(inv.variance(), (formulas.variance_inversions)(theta, n)?);
            rec.push(format!("inversion variance {tag}"), e, 1e-10);
        }
    }
    Ok(rec.checks)
}
