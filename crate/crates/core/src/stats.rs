//! Scalar permutation statistics.
//!
//! Inversions are counted with a Fenwick tree over values, O(n log n).
//! Everything else is a single pass.

use crate::error::{Error, Result};
use crate::permutation::Permutation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StatSummary {
    pub records: usize,
    pub descents: usize,
    pub inversions: u64,
    pub cycles: usize,
    pub first_value: usize,
    /// Positions with `sigma(i) >= i`.
    pub weak_exceedances: usize,
    /// Positions with `sigma(i) < i`.
    pub anti_exceedances: usize,
}

/// Left-to-right maxima.
pub fn records(p: &Permutation) -> usize {
    let mut best = 0;
    let mut count = 0;
    for &v in p.word() {
        if v > best {
            best = v;
            count += 1;
        }
    }
    count
}

/// Positions `i >= 2` with `sigma(i-1) > sigma(i)`.
pub fn descents(p: &Permutation) -> usize {
    p.word().windows(2).filter(|w| w[0] > w[1]).count()
}

pub fn anti_exceedances(p: &Permutation) -> usize {
    p.word()
        .iter()
        .enumerate()
        .filter(|&(i, &v)| (v as usize) < i + 1)
        .count()
}

pub fn weak_exceedances(p: &Permutation) -> usize {
    p.len() - anti_exceedances(p)
}

/// Entry `j - 1` is `inv_j`, the number of `i < j` with `sigma(i) > sigma(j)`.
pub fn inv_profile(p: &Permutation) -> Vec<u32> {
    let n = p.len();
    let mut tree = vec![0u32; n + 1];
    p.word()
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            // values smaller than v seen so far
            let mut smaller = 0;
            let mut k = v as usize - 1;
            while k > 0 {
                smaller += tree[k];
                k &= k - 1;
            }
            let mut k = v as usize;
            while k <= n {
                tree[k] += 1;
                k += k & k.wrapping_neg();
            }
            j as u32 - smaller
        })
        .collect()
}

pub fn inversions(p: &Permutation) -> u64 {
    inv_profile(p).iter().map(|&c| c as u64).sum()
}

/// All seven statistics. Errors on the empty permutation, where `sigma(1)`
/// does not exist.
pub fn statistics(p: &Permutation) -> Result<StatSummary> {
    if p.is_empty() {
        return Err(Error::EmptyPermutation);
    }
    let anti = anti_exceedances(p);
    Ok(StatSummary {
        records: records(p),
        descents: descents(p),
        inversions: inversions(p),
        cycles: p.cycle_count(),
        first_value: p.at(1),
        weak_exceedances: p.len() - anti,
        anti_exceedances: anti,
    })
}

impl Permutation {
    pub fn statistics(&self) -> Result<StatSummary> {
        statistics(self)
    }

    pub fn inv_profile(&self) -> Vec<u32> {
        inv_profile(self)
    }
}
