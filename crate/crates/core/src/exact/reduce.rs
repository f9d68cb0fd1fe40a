//! Rank-based table reduction.
//!
//! Fix a support `S` containing the anchor. A cut of `S` is a subset `X` of
//! `S` without the anchor; a partition is consistent with `X` when every
//! block lies entirely inside or outside `X`. Over GF(2), the partitions `P`
//! and `R` join to a single block exactly when the number of cuts
//! consistent with both is odd, that is when their cut vectors have inner
//! product 1. So if `P` is a sum of cheaper rows, one of those rows
//! completes every `R` that `P` completes, at no greater cost. Keeping a
//! greedy basis in cost order therefore leaves the optimum unchanged while
//! shrinking a group to at most `2^(|S| - 1)` entries.

use super::partition::{decode, MAX_BAG};
use crate::graph::Weight;

/// Largest support for which reduction is attempted: 4096 columns.
pub(crate) const MAX_REDUCED_SUPPORT: usize = 13;

/// Rows in echelon form keyed by their lowest set bit.
struct Basis {
    words: usize,
    /// Row index for each pivot column, `u32::MAX` if none.
    by_pivot: Vec<u32>,
    rows: Vec<u64>,
    rank: usize,
    scratch: Vec<u64>,
}

impl Basis {
    fn new(columns: usize) -> Self {
        let words = columns.div_ceil(64);
        Basis {
            words,
            by_pivot: vec![u32::MAX; columns],
            rows: Vec::new(),
            rank: 0,
            scratch: vec![0; words],
        }
    }

    /// Adds the vector in `scratch` if it is independent of the basis, and
    /// clears `scratch` either way.
    fn insert_scratch(&mut self) -> bool {
        let w = self.words;
        let mut word = 0;
        loop {
            while word < w && self.scratch[word] == 0 {
                word += 1;
            }
            if word == w {
                return false;
            }
            let pivot = word * 64 + self.scratch[word].trailing_zeros() as usize;
            let r = self.by_pivot[pivot];
            if r == u32::MAX {
                self.by_pivot[pivot] = self.rank as u32;
                self.rank += 1;
                self.rows.extend_from_slice(&self.scratch);
                self.scratch.fill(0);
                return true;
            }
            // basis rows vanish below their pivot
            let row = &self.rows[r as usize * w..(r as usize + 1) * w];
            for (a, b) in self.scratch[word..].iter_mut().zip(&row[word..]) {
                *a ^= b;
            }
        }
    }
}

/// Indices into `group` of a representative subset. `group` holds
/// `(cost, key)` pairs over one support `support` (a position bitmask of a
/// bag of size `len`) and must be sorted by cost.
pub(crate) fn representatives(group: &[(Weight, u128)], len: usize, support: u32, anchor_pos: usize) -> Vec<usize> {
    let s = support.count_ones() as usize;
    debug_assert!(support >> anchor_pos & 1 == 1);
    if s > MAX_REDUCED_SUPPORT || group.len() <= 1 {
        return (0..group.len()).collect();
    }
    // compressed column index of each non-anchor support position
    let mut column = [usize::MAX; MAX_BAG];
    let mut c = 0;
    for (p, slot) in column.iter_mut().enumerate().take(len) {
        if support >> p & 1 == 1 && p != anchor_pos {
            *slot = c;
            c += 1;
        }
    }
    let columns = 1usize << (s - 1);
    let mut basis = Basis::new(columns);
    let mut kept = Vec::new();
    let mut cuts: Vec<usize> = Vec::with_capacity(columns);
    for (i, &(_, key)) in group.iter().enumerate() {
        if basis.rank == columns {
            break;
        }
        let labels = decode(key, len);
        let root = labels[anchor_pos];
        let mut block_mask = [0usize; MAX_BAG + 1];
        for p in 0..len {
            let l = labels[p];
            if l != 0 && l != root {
                block_mask[l as usize] |= 1 << column[p];
            }
        }
        cuts.clear();
        cuts.push(0);
        for &m in block_mask.iter().filter(|&&m| m != 0) {
            for j in 0..cuts.len() {
                cuts.push(cuts[j] | m);
            }
        }
        for &x in &cuts {
            basis.scratch[x / 64] |= 1 << (x % 64);
        }
        if basis.insert_scratch() {
            kept.push(i);
        }
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::partition::{encode_canonical, support, Labels};

    fn key(labels: &[u8]) -> u128 {
        let mut l: Labels = [0; MAX_BAG];
        l[..labels.len()].copy_from_slice(labels);
        encode_canonical(&mut l, labels.len())
    }

    #[test]
    fn full_rank_stops_the_scan() {
        let rows = [
            (1, key(&[1, 1, 1])),
            (2, key(&[1, 2, 2])),
            (3, key(&[1, 2, 3])),
            (4, key(&[1, 1, 2])),
            (5, key(&[1, 2, 1])),
        ];
        // the first four rows already span the four cuts
        assert_eq!(representatives(&rows, 3, 0b111, 0), vec![0, 1, 2, 3]);
    }

    #[test]
    fn duplicate_vectors_are_dropped() {
        let rows = [(1, key(&[1, 2, 1])), (5, key(&[1, 2, 1]))];
        assert_eq!(representatives(&rows, 3, 0b111, 0), vec![0]);
    }

    #[test]
    fn group_never_exceeds_cut_count() {
        // all 15 partitions of a 4-set
        let mut rows = Vec::new();
        for a in 1..=2u8 {
            for b in 1..=3u8 {
                for c in 1..=4u8 {
                    let k = key(&[1, a, b, c]);
                    if !rows.iter().any(|&(_, x)| x == k) {
                        rows.push((rows.len() as Weight, k));
                    }
                }
            }
        }
        assert_eq!(rows.len(), 15);
        assert_eq!(support(rows[0].1, 4), 0b1111);
        let kept = representatives(&rows, 4, 0b1111, 0);
        assert_eq!(kept.len(), 8);
    }
}
