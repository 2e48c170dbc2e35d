//! Dense GF(2) matrices with one packed `u64` per row.
//!
//! Vectors use the same convention as register values: coordinate 1 is the
//! most significant of the `cols` bits, so a row read back is exactly the
//! measured string that produced it.

use serde::{Deserialize, Serialize};

use crate::oracle::mask;

/// Row-major matrix over GF(2), at most 64 columns.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitMatrix {
    cols: u32,
    rows: Vec<u64>,
}

impl BitMatrix {
    pub fn new(cols: u32) -> Self {
        assert!((1..=64).contains(&cols), "column count {cols} out of range");
        BitMatrix { cols, rows: Vec::new() }
    }

    pub fn from_rows(cols: u32, rows: impl IntoIterator<Item = u64>) -> Self {
        let mut m = Self::new(cols);
        for r in rows {
            m.push_row(r);
        }
        m
    }

    pub fn identity(cols: u32) -> Self {
        Self::from_rows(cols, (0..cols).map(|j| 1u64 << (cols - 1 - j)))
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    /// Appends a row; panics if `y` has bits beyond `cols`.
    pub fn push_row(&mut self, y: u64) {
        assert!(y <= mask(self.cols), "row {y:#x} wider than {} columns", self.cols);
        self.rows.push(y);
    }

    /// Value-style append.
    pub fn append_row(mut self, y: u64) -> Self {
        self.push_row(y);
        self
    }

    /// Row-by-row products `M·x`.
    pub fn mul_vec(&self, x: u64) -> Vec<bool> {
        self.rows.iter().map(|r| (r & x).count_ones() % 2 == 1).collect()
    }

    pub fn annihilates(&self, x: u64) -> bool {
        self.rows.iter().all(|r| (r & x).count_ones().is_multiple_of(2))
    }

    /// Reduced row-echelon form of the rows; returns `(rows, pivot bits)` with
    /// pivots in descending bit order (ascending coordinate).
    fn rref(&self) -> (Vec<u64>, Vec<u32>) {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for bit in (0..self.cols).rev() {
            let b = 1u64 << bit;
            let Some(p) = (next..rows.len()).find(|&i| rows[i] & b != 0) else {
                continue;
            };
            rows.swap(next, p);
            let pivot_row = rows[next];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != next && *r & b != 0 {
                    *r ^= pivot_row;
                }
            }
            pivots.push(bit);
            next += 1;
            if next == rows.len() {
                break;
            }
        }
        rows.truncate(next);
        (rows, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : Mx = 0}`, one vector per free column in ascending
    /// coordinate order. Empty means only the zero solution.
    pub fn nullspace_basis(&self) -> Vec<u64> {
        let (rows, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in (0..self.cols).rev().filter(|b| !pivots.contains(b)) {
            let fb = 1u64 << free;
            let mut x = fb;
            for (r, &p) in rows.iter().zip(&pivots) {
                if r & fb != 0 {
                    x |= 1u64 << p;
                }
            }
            basis.push(x);
        }
        basis
    }
}

/// Smallest nonzero element (as an integer, i.e. lexicographically with
/// coordinate 1 first) of the span of `vectors`.
pub fn min_nonzero_in_span(vectors: &[u64]) -> Option<u64> {
    // Echelonize by leading bit; the vector owning the lowest leading bit is the minimum.
    let mut basis: Vec<u64> = Vec::new();
    for &v in vectors {
        let mut v = v;
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.into_iter().min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use proptest::prelude::*;

    fn span(vectors: &[u64]) -> std::collections::BTreeSet<u64> {
        let mut out = std::collections::BTreeSet::from([0u64]);
        for &v in vectors {
            let more: Vec<u64> = out.iter().map(|x| x ^ v).collect();
            out.extend(more);
        }
        out
    }

    #[test]
    fn identity_full_rank() {
        let m = BitMatrix::identity(7);
        assert_eq!(m.rank(), 7);
        assert!(m.nullspace_basis().is_empty());
    }

    #[test]
    fn zero_matrix() {
        let m = BitMatrix::from_rows(5, [0, 0, 0]);
        assert_eq!(m.rank(), 0);
        assert_eq!(m.nullspace_basis().len(), 5);
        assert_eq!(BitMatrix::new(3).rank(), 0);
    }

    #[test]
    fn repeated_first_coordinate() {
        let e1 = 0b1000;
        let m = BitMatrix::from_rows(4, [e1; 6]);
        let basis = m.nullspace_basis();
        assert_eq!(basis.len(), 3);
        assert!(basis.iter().all(|x| x & e1 == 0));
        assert_eq!(basis, vec![0b0100, 0b0010, 0b0001]);
    }

    #[test]
    fn rank_matches_span_size() {
        let mut rng = seed::stream(19);
        for _ in 0..200 {
            let rows: Vec<u64> = (0..8).map(|_| seed::below(&mut rng, 64)).collect();
            let m = BitMatrix::from_rows(6, rows.iter().copied());
            assert_eq!(span(&rows).len(), 1 << m.rank());
        }
    }

    #[test]
    fn nullspace_matches_exhaustive() {
        let mut rng = seed::stream(23);
        for _ in 0..200 {
            let m = BitMatrix::from_rows(6, (0..10).map(|_| seed::below(&mut rng, 64)));
            let truth: Vec<u64> = (0..64).filter(|&x| m.annihilates(x)).collect();
            let basis = m.nullspace_basis();
            assert_eq!(span(&basis).into_iter().collect::<Vec<_>>(), truth);
            assert_eq!(basis.len(), 6 - m.rank());
        }
    }

    #[test]
    fn append_and_read_back() {
        let mut m = BitMatrix::new(4);
        for t in 0..9u64 {
            m = m.append_row(t % 16);
        }
        assert_eq!(m.row_count(), 9);
        assert_eq!(m.row(5), 5);
        let r = m.rank();
        assert_eq!(m.append_row(0).rank(), r);
    }

    #[test]
    fn min_nonzero() {
        assert_eq!(min_nonzero_in_span(&[]), None);
        assert_eq!(min_nonzero_in_span(&[0]), None);
        assert_eq!(min_nonzero_in_span(&[0b110, 0b101]), Some(0b011));
        assert_eq!(min_nonzero_in_span(&[0b1000, 0b1100, 0b1110]), Some(0b0010));
    }

    proptest! {
        #[test]
        fn nullspace_dimension_and_annihilation(rows in proptest::collection::vec(0u64..1024, 0..14)) {
            let m = BitMatrix::from_rows(10, rows.iter().copied());
            let basis = m.nullspace_basis();
            prop_assert_eq!(basis.len(), 10 - m.rank());
            prop_assert!(m.rank() <= rows.len().min(10));
            for x in span(&basis) {
                prop_assert!(m.annihilates(x));
            }
        }

        #[test]
        fn rank_invariant_under_row_permutation(mut rows in proptest::collection::vec(0u64..256, 1..12), rot in 0usize..12) {
            let r1 = BitMatrix::from_rows(8, rows.iter().copied()).rank();
            let k = rot % rows.len();
            rows.rotate_left(k);
            rows.reverse();
            prop_assert_eq!(BitMatrix::from_rows(8, rows).rank(), r1);
        }

        #[test]
        fn min_nonzero_is_brute_force_min(vs in proptest::collection::vec(0u64..512, 0..6)) {
            let brute = span(&vs).into_iter().find(|&x| x != 0);
            prop_assert_eq!(min_nonzero_in_span(&vs), brute);
        }
    }
}
