//! Empirical permutons of permutations and the limit permuton of
//! record-biased permutations with `theta = lambda * n`.
//!
//! The limit measure is a singular part on the curve `y = f(x)` with
//! `f(x) = x (lambda + 1) / (lambda + x)`, carrying density
//! `lambda / (lambda + x)` along the x axis, plus Lebesgue density
//! `1 / (lambda + 1)` on the region below the curve. Its mass on the corner
//! rectangle `[0, a] x [0, b]` is
//!
//! ```text
//! M(a, b) = x* + b (a - x*) / (lambda + 1),   x* = min(a, f^-1(b)),
//! ```
//!
//! since on `[0, x*]` the two densities integrate to 1 per unit of x.

use crate::error::{domain, Error, Result};
use crate::permutation::Permutation;
use crate::rng::RandomStream;

/// Largest size stored as a dense `(n+1)^2` table; above it queries go
/// through a Fenwick tree of sorted value lists.
pub const DENSE_LIMIT: usize = 4096;

#[derive(Debug, Clone)]
enum Counts {
    Dense(Vec<u32>),
    /// Node `k` holds the sorted values at positions `(k - lowbit(k), k]`.
    Sorted(Vec<Vec<u32>>),
}

/// The permuton of a permutation, queried through dominance counts
/// `prefix(i, j) = |{k <= i : sigma(k) <= j}|`.
#[derive(Debug, Clone)]
pub struct EmpiricalPermuton {
    n: usize,
    counts: Counts,
}

impl EmpiricalPermuton {
    pub fn new(p: &Permutation) -> Result<Self> {
        Self::with_dense_limit(p, DENSE_LIMIT)
    }

    pub fn with_dense_limit(p: &Permutation, dense_limit: usize) -> Result<Self> {
        let n = p.len();
        if n == 0 {
            return Err(Error::EmptyPermutation);
        }
        let counts = if n <= dense_limit {
            let w = n + 1;
            let mut table = vec![0u32; w * w];
            for (i, &v) in p.word().iter().enumerate() {
                let (prev, cur) = table.split_at_mut((i + 1) * w);
                let prev = &prev[i * w..];
                let cur = &mut cur[..w];
                for j in 0..w {
                    cur[j] = prev[j] + u32::from(j >= v as usize);
                }
            }
            Counts::Dense(table)
        } else {
            let mut nodes = vec![Vec::new(); n + 1];
            for k in 1..=n {
                let low = k & k.wrapping_neg();
                let mut vals: Vec<u32> = p.word()[k - low..k].to_vec();
                vals.sort_unstable();
                nodes[k] = vals;
            }
            Counts::Sorted(nodes)
        };
        Ok(Self { n, counts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.counts, Counts::Dense(_))
    }

    /// Points among the first `i` columns with value at most `j`.
    /// Panics if `i` or `j` exceeds `n`.
    pub fn prefix(&self, i: usize, j: usize) -> u32 {
        assert!(i <= self.n && j <= self.n, "prefix({i}, {j}) outside 0..={}", self.n);
        match &self.counts {
            Counts::Dense(table) => table[i * (self.n + 1) + j],
            Counts::Sorted(nodes) => {
                let mut total = 0;
                let mut k = i;
                while k > 0 {
                    total += nodes[k].partition_point(|&v| v as usize <= j) as u32;
                    k &= k - 1;
                }
                total
            }
        }
    }

    /// Mass of `[0, i/n] x [0, j/n]`.
    pub fn corner_mass(&self, i: usize, j: usize) -> f64 {
        self.prefix(i, j) as f64 / self.n as f64
    }
}

pub fn empirical_from_perm(p: &Permutation) -> Result<EmpiricalPermuton> {
    EmpiricalPermuton::new(p)
}

/// The limit permuton for parameter `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitPermuton {
    lambda: f64,
}

fn unit(x: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        domain(format!("{what} = {x} outside [0, 1]"))
    }
}

impl LimitPermuton {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda > 0.0 && lambda.is_finite() {
            Ok(Self { lambda })
        } else {
            domain(format!("lambda must be positive, got {lambda}"))
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    fn curve(&self, x: f64) -> f64 {
        x * (self.lambda + 1.0) / (self.lambda + x)
    }

    #[inline]
    fn curve_inv(&self, y: f64) -> f64 {
        self.lambda * y / (1.0 + self.lambda - y)
    }

    #[inline]
    fn corner(&self, a: f64, b: f64) -> f64 {
        let xs = a.min(self.curve_inv(b));
        xs + b * (a - xs) / (self.lambda + 1.0)
    }

    pub fn f(&self, x: f64) -> Result<f64> {
        unit(x, "x")?;
        Ok(self.curve(x))
    }

    pub fn f_inv(&self, y: f64) -> Result<f64> {
        unit(y, "y")?;
        Ok(self.curve_inv(y))
    }

    /// Total mass of the curve part, `lambda log(1 + 1/lambda)`.
    pub fn curve_mass(&self) -> f64 {
        self.lambda * (1.0 / self.lambda).ln_1p()
    }

    /// Mass of the curve part over the column strip `[a, b] x [0, 1]`.
    pub fn curve_mass_between(&self, a: f64, b: f64) -> f64 {
        self.lambda * ((self.lambda + b) / (self.lambda + a)).ln()
    }

    /// `mu([0, a] x [0, b])`.
    pub fn mass_corner(&self, a: f64, b: f64) -> Result<f64> {
        unit(a, "a")?;
        unit(b, "b")?;
        Ok(self.corner(a, b))
    }

    /// `mu([a1, a2] x [b1, b2])` by inclusion-exclusion.
    pub fn mass_rect(&self, a1: f64, a2: f64, b1: f64, b2: f64) -> Result<f64> {
        for (v, what) in [(a1, "a1"), (a2, "a2"), (b1, "b1"), (b2, "b2")] {
            unit(v, what)?;
        }
        if a1 > a2 || b1 > b2 {
            return domain("rectangle corners out of order");
        }
        Ok(self.corner(a2, b2) - self.corner(a1, b2) - self.corner(a2, b1) + self.corner(a1, b1))
    }

    /// `log F(x, y)` of the lmax large-deviation rate, for `0 < x < y < 1`.
    pub fn log_rate(&self, x: f64, y: f64) -> Result<f64> {
        if !(0.0 < x && x < y && y < 1.0) {
            return domain(format!("rate needs 0 < x < y < 1, got x = {x}, y = {y}"));
        }
        let l = self.lambda;
        Ok(xlogx(y) + xlogx(1.0 - x) + xlogx(l + x) + xlogx(l + 1.0 - y)
            - xlogx(x)
            - xlogx(y - x)
            - xlogx(1.0 - y)
            - xlogx(l)
            - xlogx(l + 1.0))
    }

    pub fn rate(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.log_rate(x, y)?.exp())
    }

    /// A point drawn from the limit permuton: on the curve with probability
    /// [`Self::curve_mass`] (x by inverse CDF), otherwise uniform below the
    /// curve by rejection from the unit square.
    pub fn sample_point(&self, s: &mut RandomStream) -> (f64, f64) {
        let l = self.lambda;
        if s.bernoulli(self.curve_mass()) {
            let x = (l * ((s.uniform() * (1.0 / l).ln_1p()).exp_m1())).min(1.0);
            return (x, self.curve(x));
        }
        loop {
            let (x, y) = (s.uniform(), s.uniform());
            if y <= self.curve(x) {
                return (x, y);
            }
        }
    }

    /// `sup |mu_sigma(R) - mu(R)|` over the corner rectangles
    /// `[0, i/n] x [0, j/n]`. Row sweep, O(n^2) time and O(n) memory.
    pub fn distance_grid(&self, p: &Permutation) -> Result<f64> {
        let n = p.len();
        if n == 0 {
            return Err(Error::EmptyPermutation);
        }
        let nf = n as f64;
        let heights: Vec<f64> = (0..=n).map(|j| j as f64 / nf).collect();
        let inv_heights: Vec<f64> = heights.iter().map(|&b| self.curve_inv(b)).collect();
        let scale = 1.0 / (self.lambda + 1.0);
        let mut row = vec![0u32; n + 1];
        let mut worst = 0.0f64;
        for (i, &v) in p.word().iter().enumerate() {
            for c in &mut row[v as usize..] {
                *c += 1;
            }
            let a = (i + 1) as f64 / nf;
            for j in 0..=n {
                let b = heights[j];
                let xs = a.min(inv_heights[j]);
                let limit = xs + b * (a - xs) * scale;
                worst = worst.max((row[j] as f64 / nf - limit).abs());
            }
        }
        Ok(worst)
    }
}

/// `x log x` with `0 log 0 = 0`.
fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

pub fn f_lambda(lambda: f64, x: f64) -> Result<f64> {
    LimitPermuton::new(lambda)?.f(x)
}

pub fn f_lambda_inv(lambda: f64, y: f64) -> Result<f64> {
    LimitPermuton::new(lambda)?.f_inv(y)
}

pub fn limit_mass_corner(lambda: f64, a: f64, b: f64) -> Result<f64> {
    LimitPermuton::new(lambda)?.mass_corner(a, b)
}

pub fn limit_mass_rect(lambda: f64, a1: f64, a2: f64, b1: f64, b2: f64) -> Result<f64> {
    LimitPermuton::new(lambda)?.mass_rect(a1, a2, b1, b2)
}

pub fn distance_grid(p: &Permutation, lambda: f64) -> Result<f64> {
    LimitPermuton::new(lambda)?.distance_grid(p)
}

/// The rate function `F(x, y)`; equals 1 on the curve.
pub fn f_xy(lambda: f64, x: f64, y: f64) -> Result<f64> {
    LimitPermuton::new(lambda)?.rate(x, y)
}

pub fn sample_limit_point(lambda: f64, s: &mut RandomStream) -> Result<(f64, f64)> {
    Ok(LimitPermuton::new(lambda)?.sample_point(s))
}
