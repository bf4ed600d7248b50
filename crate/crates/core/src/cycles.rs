use std::fmt;

use crate::error::{Error, Result};
use crate::permutation::Permutation;

/// A set of disjoint cycles covering `{1, ..., n}`.
///
/// A cycle `(a b c)` maps `a -> b -> c -> a`. The stored form is canonical:
/// each cycle starts at its largest element and cycles are sorted by that
/// element, so two decompositions of the same permutation compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleDecomposition {
    n: usize,
    cycles: Vec<Vec<u32>>,
}

impl CycleDecomposition {
    /// Builds a decomposition from cycles written in any rotation and order.
    pub fn new(cycles: Vec<Vec<u32>>) -> Result<Self> {
        let n: usize = cycles.iter().map(Vec::len).sum();
        let mut seen = vec![false; n];
        for &v in cycles.iter().flatten() {
            let v = v as usize;
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::NotAPartition { n });
            }
            seen[v - 1] = true;
        }
        let mut cycles: Vec<Vec<u32>> = cycles
            .into_iter()
            .filter(|c| !c.is_empty())
            .map(|mut c| {
                let top = (0..c.len()).max_by_key(|&k| c[k]).unwrap();
                c.rotate_left(top);
                c
            })
            .collect();
        cycles.sort_unstable_by_key(|c| c[0]);
        Ok(Self { n, cycles })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Cycles in canonical form: maximum first, sorted by increasing maximum.
    pub fn cycles(&self) -> &[Vec<u32>] {
        &self.cycles
    }

    pub fn to_permutation(&self) -> Permutation {
        let mut word = vec![0u32; self.n];
        for c in &self.cycles {
            for (k, &a) in c.iter().enumerate() {
                word[a as usize - 1] = c[(k + 1) % c.len()];
            }
        }
        Permutation::from_word_unchecked(word)
    }
}

impl fmt::Display for CycleDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cycles {
            f.write_str("(")?;
            for (k, v) in c.iter().enumerate() {
                if k > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl Permutation {
    /// Cycle decomposition in canonical form, O(n).
    pub fn to_cycles(&self) -> CycleDecomposition {
        let n = self.len();
        let word = self.word();
        // Walking values from n down to 1 makes the first unvisited value the
        // maximum of its cycle; the resulting list is sorted by decreasing max.
        let mut visited = vec![false; n];
        let mut cycles = Vec::new();
        for start in (1..=n).rev() {
            if visited[start - 1] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut v = start;
            while !visited[v - 1] {
                visited[v - 1] = true;
                cycle.push(v as u32);
                v = word[v - 1] as usize;
            }
            cycles.push(cycle);
        }
        cycles.reverse();
        CycleDecomposition { n, cycles }
    }

    pub fn from_cycles(c: &CycleDecomposition) -> Self {
        c.to_permutation()
    }

    pub fn cycle_count(&self) -> usize {
        let word = self.word();
        let mut visited = vec![false; word.len()];
        let mut count = 0;
        for start in 0..word.len() {
            if visited[start] {
                continue;
            }
            count += 1;
            let mut v = start;
            while !visited[v] {
                visited[v] = true;
                v = word[v] as usize - 1;
            }
        }
        count
    }
}
