//! Permutations stored as words.
//!
//! All public indexing is 1-based: `p.at(i)` is `sigma(i)` for `i` in `1..=n`
//! and the word holds the values `1..=n`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A bijection of `{1, ..., n}` stored as its word `sigma(1) sigma(2) ... sigma(n)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Permutation {
    word: Vec<u32>,
}

impl Permutation {
    /// Validates `values` as a rearrangement of `1..=n`.
    pub fn from_word(values: Vec<u32>) -> Result<Self> {
        let n = values.len();
        let mut seen = vec![false; n];
        for &v in &values {
            let v = v as usize;
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::NotABijection { n });
            }
            seen[v - 1] = true;
        }
        Ok(Self { word: values })
    }

    /// Wraps a word the caller has already produced as a bijection.
    pub(crate) fn from_word_unchecked(word: Vec<u32>) -> Self {
        debug_assert!(Self::from_word(word.clone()).is_ok());
        Self { word }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            word: (1..=n as u32).collect(),
        }
    }

    /// The word `n (n-1) ... 1`.
    pub fn decreasing(n: usize) -> Self {
        Self {
            word: (1..=n as u32).rev().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn word(&self) -> &[u32] {
        &self.word
    }

    pub fn into_word(self) -> Vec<u32> {
        self.word
    }

    /// `sigma(i)` for a 1-based position. Panics outside `1..=n`.
    pub fn at(&self, i: usize) -> usize {
        self.word[i - 1] as usize
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.word.len()];
        for (pos, &v) in self.word.iter().enumerate() {
            inv[v as usize - 1] = pos as u32 + 1;
        }
        Self { word: inv }
    }

    /// The word read right to left.
    pub fn reversed(&self) -> Self {
        let mut word = self.word.clone();
        word.reverse();
        Self { word }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Domain(format!(
                "cannot compose sizes {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Self {
            word: other
                .word
                .iter()
                .map(|&v| self.word[v as usize - 1])
                .collect(),
        })
    }

    /// Largest value among the first `i` positions.
    pub fn lmax(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.len() {
            return Err(Error::PositionOutOfRange {
                position: i,
                n: self.len(),
            });
        }
        Ok(self.word[..i].iter().copied().max().unwrap_or(0) as usize)
    }

    /// Running maxima: entry `i - 1` is `lmax(sigma, i)`.
    pub fn prefix_maxima(&self) -> Vec<u32> {
        let mut best = 0;
        self.word
            .iter()
            .map(|&v| {
                best = best.max(v);
                best
            })
            .collect()
    }

    /// Whether position `i` (1-based) carries a record.
    pub fn is_record_at(&self, i: usize) -> bool {
        let v = self.word[i - 1];
        self.word[..i - 1].iter().all(|&w| w < v)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.word {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Parses one line of space-separated 1-based values.
    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split_whitespace()
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_word(values)
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = Error;

    fn try_from(values: Vec<u32>) -> Result<Self> {
        Self::from_word(values)
    }
}

/// Lexicographic iterator over all permutations of size `n`.
pub fn all_permutations(n: usize) -> impl Iterator<Item = Permutation> {
    let mut next = Some((1..=n as u32).collect::<Vec<_>>());
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut w = current.clone();
        if let Some(i) = (0..w.len().saturating_sub(1)).rev().find(|&i| w[i] < w[i + 1]) {
            let j = (i + 1..w.len()).rev().find(|&j| w[j] > w[i]).unwrap();
            w.swap(i, j);
            w[i + 1..].reverse();
            next = Some(w);
        }
        Some(Permutation::from_word_unchecked(current))
    })
}
