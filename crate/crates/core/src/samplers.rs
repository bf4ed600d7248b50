//! Linear-time samplers for the Ewens and record-biased distributions.
//!
//! Every sampler is generic over [`Choices`], so the same code runs against
//! a [`RandomStream`] in production and against the exhaustive branch
//! enumerator in [`crate::oracle`].

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::foata::foata;
use crate::permutation::Permutation;
use crate::rng::{Branch, Choices, RandomStream};

const NIL: u32 = u32::MAX;

/// How the bias parameter theta depends on the size n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RecordBias {
    Fixed(f64),
    /// theta = lambda * n
    LinearInSize(f64),
    /// theta = n^exponent
    PowerOfSize(f64),
}

impl RecordBias {
    pub fn resolve_theta(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain("theta is resolved for n >= 1".into()));
        }
        let theta = match *self {
            RecordBias::Fixed(t) => t,
            RecordBias::LinearInSize(lambda) => lambda * n as f64,
            RecordBias::PowerOfSize(e) => {
                if e <= 0.0 {
                    return Err(Error::NonPositiveTheta(e));
                }
                (n as f64).powf(e)
            }
        };
        if theta > 0.0 && theta.is_finite() {
            Ok(theta)
        } else {
            Err(Error::NonPositiveTheta(theta))
        }
    }
}

impl fmt::Display for RecordBias {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecordBias::Fixed(t) => write!(f, "fixed:{t}"),
            RecordBias::LinearInSize(l) => write!(f, "linear:{l}"),
            RecordBias::PowerOfSize(e) => write!(f, "power:{e}"),
        }
    }
}

impl FromStr for RecordBias {
    type Err = Error;

    /// `fixed:<theta>`, `linear:<lambda>` or `power:<exponent>`.
    fn from_str(s: &str) -> Result<Self> {
        let (mode, value) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("theta spec {s:?} lacks ':'")))?;
        let x: f64 = value
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("theta spec {s:?}: {e}")))?;
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::NonPositiveTheta(x));
        }
        match mode.trim() {
            "fixed" => Ok(RecordBias::Fixed(x)),
            "linear" => Ok(RecordBias::LinearInSize(x)),
            "power" => Ok(RecordBias::PowerOfSize(x)),
            other => Err(Error::Parse(format!("unknown theta mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplerKind {
    /// Values placed left to right into empty slots.
    SlotWord,
    /// Sequences opened by the largest available value, built right to left.
    SequenceOfSequences,
    /// Diagram grown column by column.
    Diagram,
    /// Ewens via the Chinese restaurant process, pushed through Foata.
    FoataFromEwens,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 4] = [
        SamplerKind::SlotWord,
        SamplerKind::SequenceOfSequences,
        SamplerKind::Diagram,
        SamplerKind::FoataFromEwens,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SamplerKind::SlotWord => "slots",
            SamplerKind::SequenceOfSequences => "sequences",
            SamplerKind::Diagram => "diagram",
            SamplerKind::FoataFromEwens => "foata",
        }
    }

    pub fn sample<C: Choices + ?Sized>(&self, n: usize, theta: f64, choices: &mut C) -> Permutation {
        match self {
            SamplerKind::SlotWord => sample_slots(n, theta, choices),
            SamplerKind::SequenceOfSequences => sample_sequences(n, theta, choices),
            SamplerKind::Diagram => sample_diagram(n, theta, choices),
            SamplerKind::FoataFromEwens => sample_foata(n, theta, choices),
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SamplerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown sampler {s:?}")))
    }
}

/// Ewens permutation (weight `theta^cyc`) by the Chinese restaurant process.
///
/// Step `i` either closes `i` into a fixed point or inserts it before a
/// uniformly chosen `j < i` in `j`'s cycle. Keeps `sigma` and its inverse.
pub fn sample_ewens<C: Choices + ?Sized>(n: usize, theta: f64, choices: &mut C) -> Permutation {
    let mut sigma = vec![0u32; n];
    let mut inv = vec![0u32; n];
    for i in 0..n {
        match choices.pick(theta, i) {
            Branch::Favored => {
                sigma[i] = i as u32 + 1;
                inv[i] = i as u32 + 1;
            }
            Branch::Other(j) => {
                let before = inv[j] as usize - 1;
                sigma[i] = j as u32 + 1;
                sigma[before] = i as u32 + 1;
                inv[i] = before as u32 + 1;
                inv[j] = i as u32 + 1;
            }
        }
    }
    Permutation::from_word_unchecked(sigma)
}

/// Removes `A[k]` by swapping in the last cell, keeping `inv_a` in sync.
#[inline]
fn swap_remove(a: &mut Vec<u32>, inv_a: &mut [u32], k: usize) {
    let last = a.pop().expect("swap_remove on empty array");
    if k < a.len() {
        a[k] = last;
        inv_a[last as usize] = k as u32;
    }
}

/// Record-biased permutation: value `i` goes to the leftmost empty slot with
/// probability `theta / (theta + n - i)`, otherwise to a uniform other empty slot.
///
/// The leftmost empty slot only moves right, so it is found by scanning a
/// bitset of filled slots (amortized O(1)). The other empty slots live in a
/// gap-free array `A`. `cell[s]` holds the index of `s` inside `A` while `s`
/// is empty and its value once filled, so one array serves as both the
/// inverse of `A` and the output word.
pub fn sample_slots<C: Choices + ?Sized>(n: usize, theta: f64, choices: &mut C) -> Permutation {
    if n == 0 {
        return Permutation::default();
    }
    let mut cell: Vec<u32> = (0..n as u32).map(|p| p.wrapping_sub(1)).collect();
    let mut filled = vec![0u64; n.div_ceil(64)];
    let mut head = 0usize;
    let mut a: Vec<u32> = (1..n as u32).collect();

    for value in 1..=n as u32 {
        let pos = match choices.pick(theta, a.len()) {
            Branch::Favored => {
                let pos = head;
                head = next_empty(&filled, pos + 1, n);
                if head < n {
                    // the new minimum leaves A
                    let at = cell[head] as usize;
                    swap_remove(&mut a, &mut cell, at);
                }
                pos
            }
            Branch::Other(k) => {
                // never the head: A excludes the minimum
                let pos = a[k] as usize;
                swap_remove(&mut a, &mut cell, k);
                pos
            }
        };
        filled[pos / 64] |= 1 << (pos % 64);
        cell[pos] = value;
    }
    Permutation::from_word_unchecked(cell)
}

/// First slot at or after `from` whose bit is clear, or `n` if none.
#[inline]
fn next_empty(filled: &[u64], from: usize, n: usize) -> usize {
    let mut w = from / 64;
    if w >= filled.len() {
        return n;
    }
    let mut free = !filled[w] & (!0u64 << (from % 64));
    while free == 0 {
        w += 1;
        if w == filled.len() {
            return n;
        }
        free = !filled[w];
    }
    (w * 64 + free.trailing_zeros() as usize).min(n)
}

/// Record-biased permutation as a sequence of sequences.
///
/// Each new sequence opens with the largest remaining value (a record);
/// otherwise a uniformly chosen remaining value, the maximum included, is
/// appended to the open sequence. Sequences are laid out right to left, so
/// the output lists them in reverse order of creation.
pub fn sample_sequences<C: Choices + ?Sized>(n: usize, theta: f64, choices: &mut C) -> Permutation {
    if n == 0 {
        return Permutation::default();
    }
    // Remaining values 0..n: linked list in increasing order (tail = max)
    // and an array of all of them with its inverse index.
    let mut next: Vec<u32> = (1..=n as u32).collect();
    next[n - 1] = NIL;
    let mut prev: Vec<u32> = (0..n as u32).map(|p| p.wrapping_sub(1)).collect();
    prev[0] = NIL;
    let mut head = 0u32;
    let mut tail = n as u32 - 1;
    let mut a: Vec<u32> = (0..n as u32).collect();
    let mut inv_a: Vec<u32> = (0..n as u32).collect();

    let mut generated = Vec::with_capacity(n);
    let mut starts = Vec::new();
    for step in 0..n {
        let branch = if step == 0 {
            Branch::Favored
        } else {
            choices.pick(theta, a.len())
        };
        let v = match branch {
            Branch::Favored => {
                starts.push(generated.len());
                tail
            }
            Branch::Other(k) => a[k],
        };
        let at = inv_a[v as usize] as usize;
        swap_remove(&mut a, &mut inv_a, at);
        let (p, q) = (prev[v as usize], next[v as usize]);
        if p == NIL {
            head = q;
        } else {
            next[p as usize] = q;
        }
        if q == NIL {
            tail = p;
        } else {
            prev[q as usize] = p;
        }
        generated.push(v + 1);
    }
    debug_assert!(head == NIL && tail == NIL);

    let mut word = Vec::with_capacity(n);
    let mut end = n;
    for &start in starts.iter().rev() {
        word.extend_from_slice(&generated[start..end]);
        end = start;
    }
    Permutation::from_word_unchecked(word)
}

/// Record-biased permutation grown as a diagram, one column per step.
///
/// Column `i`'s point is the highest with probability `theta / (theta + i - 1)`,
/// otherwise it sits just below the point of a uniformly chosen earlier column.
///
/// Placing a column just below column `j` makes it a child of `j`; the final
/// top-to-bottom order is the preorder of this forest with later children
/// first. Heights come from two sweeps (subtree sizes backwards, positions
/// forwards) instead of walking a linked list, so the memory accesses are
/// independent of each other.
pub fn sample_diagram<C: Choices + ?Sized>(n: usize, theta: f64, choices: &mut C) -> Permutation {
    let mut parent = vec![NIL; n];
    for col in 0..n {
        if let Branch::Other(j) = choices.pick(theta, col) {
            parent[col] = j as u32;
        }
    }
    // offset[c]: sizes of the later siblings of c, which sit between c and its parent
    let mut below = vec![0u32; n];
    let mut offset = vec![0u32; n];
    let mut roots = 0u32;
    for c in (0..n).rev() {
        let size = 1 + below[c];
        let acc = match parent[c] {
            NIL => &mut roots,
            p => &mut below[p as usize],
        };
        offset[c] = *acc;
        *acc += size;
    }
    // reuse `offset` for the depth from the top, 0 for the highest point
    for c in 0..n {
        let base = match parent[c] {
            NIL => 0,
            p => offset[p as usize] + 1,
        };
        offset[c] += base;
    }
    let word = offset.into_iter().map(|depth| n as u32 - depth).collect();
    Permutation::from_word_unchecked(word)
}

/// Foata image of an Ewens permutation, which is record-biased.
pub fn sample_foata<C: Choices + ?Sized>(n: usize, theta: f64, choices: &mut C) -> Permutation {
    foata(&sample_ewens(n, theta, choices))
}

/// Applies `f` to `count` samples; sample `k` uses `RandomStream::derive(seed, k)`.
/// Output order follows `k` whatever the thread count.
pub fn batch_map<T, F>(
    kind: SamplerKind,
    n: usize,
    bias: RecordBias,
    count: usize,
    seed: u64,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Permutation) -> T + Sync + Send,
{
    batch_map_range(kind, n, bias, 0..count as u64, seed, f)
}

/// [`batch_map`] restricted to the sample indices in `range`, so a long
/// batch can be produced in chunks.
pub fn batch_map_range<T, F>(
    kind: SamplerKind,
    n: usize,
    bias: RecordBias,
    range: Range<u64>,
    seed: u64,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Permutation) -> T + Sync + Send,
{
    let theta = if n == 0 { 1.0 } else { bias.resolve_theta(n)? };
    Ok(range
        .into_par_iter()
        .map(|k| f(kind.sample(n, theta, &mut RandomStream::derive(seed, k))))
        .collect())
}

pub fn batch_sample(
    kind: SamplerKind,
    n: usize,
    bias: RecordBias,
    count: usize,
    seed: u64,
) -> Result<Vec<Permutation>> {
    batch_map(kind, n, bias, count, seed, |p| p)
}
