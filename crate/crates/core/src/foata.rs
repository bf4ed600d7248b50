//! Foata's fundamental bijection, mapping cycles to records.
//!
//! `foata` writes each cycle starting from its maximum, orders the cycles by
//! increasing maximum and reads the result as a word. `foata_inverse` cuts a
//! word before each record and closes every block into a cycle.

use crate::permutation::Permutation;

/// Cycles of `p` become the records of the result. O(n).
pub fn foata(p: &Permutation) -> Permutation {
    let n = p.len();
    let word = p.word();
    // Mark each value with the maximum of its cycle; a value is a cycle head
    // exactly when it is its own mark. Bucketing by head gives the order.
    let mut head_of = vec![0u32; n];
    let mut visited = vec![false; n];
    for start in (1..=n).rev() {
        if visited[start - 1] {
            continue;
        }
        let mut v = start;
        while !visited[v - 1] {
            visited[v - 1] = true;
            head_of[v - 1] = start as u32;
            v = word[v - 1] as usize;
        }
    }
    let mut out = Vec::with_capacity(n);
    for head in 1..=n {
        if head_of[head - 1] as usize != head {
            continue;
        }
        let mut v = head;
        loop {
            out.push(v as u32);
            v = word[v - 1] as usize;
            if v == head {
                break;
            }
        }
    }
    Permutation::from_word_unchecked(out)
}

/// Inverse of [`foata`]: records of `p` become the cycles of the result.
pub fn foata_inverse(p: &Permutation) -> Permutation {
    let w = p.word();
    let mut out = vec![0u32; w.len()];
    let mut block_start = 0;
    let mut best = 0;
    for k in 0..=w.len() {
        let starts_block = k == w.len() || w[k] > best;
        if starts_block && k > 0 {
            // close the block w[block_start..k] into a cycle
            for t in block_start..k {
                let next = if t + 1 < k { w[t + 1] } else { w[block_start] };
                out[w[t] as usize - 1] = next;
            }
            block_start = k;
        }
        if k < w.len() {
            best = best.max(w[k]);
        }
    }
    Permutation::from_word_unchecked(out)
}

impl Permutation {
    pub fn foata(&self) -> Permutation {
        foata(self)
    }

    pub fn foata_inverse(&self) -> Permutation {
        foata_inverse(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::all_permutations;
    use crate::stats::{anti_exceedances, descents, records};
    use std::collections::HashSet;

    #[test]
    fn worked_example() {
        let sigma = Permutation::from_word(vec![6, 3, 2, 1, 7, 4, 5]).unwrap();
        let image = Permutation::from_word(vec![3, 2, 6, 4, 1, 7, 5]).unwrap();
        assert_eq!(foata(&sigma), image);
        assert_eq!(foata_inverse(&image), sigma);
    }

    #[test]
    fn identity_is_fixed() {
        for n in 0..6 {
            assert_eq!(foata(&Permutation::identity(n)), Permutation::identity(n));
            assert_eq!(foata_inverse(&Permutation::identity(n)), Permutation::identity(n));
        }
    }

    #[test]
    fn records_equal_cycles_on_s4() {
        for p in all_permutations(4) {
            assert_eq!(records(&foata(&p)), p.cycle_count());
        }
    }

    #[test]
    fn descents_equal_anti_exceedances_on_s5() {
        for p in all_permutations(5) {
            assert_eq!(anti_exceedances(&foata_inverse(&p)), descents(&p));
        }
    }

    #[test]
    fn exhaustive_bijection_up_to_seven() {
        for n in 0..=7 {
            let mut images = HashSet::new();
            for p in all_permutations(n) {
                let f = foata(&p);
                assert_eq!(foata_inverse(&f), p);
                assert_eq!(foata(&foata_inverse(&p)), p);
                assert_eq!(records(&f), p.cycle_count());
                assert_eq!(foata_inverse(&p).cycle_count(), records(&p));
                assert_eq!(anti_exceedances(&foata_inverse(&p)), descents(&p));
                images.insert(f);
            }
            assert_eq!(images.len(), (1..=n).product::<usize>());
        }
    }
}
