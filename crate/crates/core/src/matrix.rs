//! Dense bit-packed boolean matrices.
//!
//! Rows are stored as contiguous `u64` words, so row scans and row-mask
//! intersections are word-wise. Column neighbourhoods are derived lazily and
//! cached; a matrix never changes after construction.

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub(crate) const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A fixed-length bitset used for row and column masks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self { len, words: vec![!0; words_for(len)] };
        s.trim();
        s
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut s = Self::new(len);
        for &i in indices {
            s.insert(i);
        }
        s
    }

    pub(crate) fn from_words(len: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        let mut s = Self { len, words };
        s.trim();
        s
    }

    fn trim(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        if i < self.len {
            self.words[i / WORD] &= !(1 << (i % WORD));
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn intersection_count(&self, other: &BitSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersection(&self, other: &BitSet) -> BitSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn complement(&self) -> BitSet {
        let words = self.words.iter().map(|w| !w).collect();
        BitSet::from_words(self.len, words)
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Ascending iterator over set positions.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

/// An immutable `m x n` 0/1 matrix, bit-packed by row.
pub struct BooleanMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
    col_cache: OnceLock<Vec<BitSet>>,
}

impl Clone for BooleanMatrix {
    fn clone(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            words_per_row: self.words_per_row,
            data: self.data.clone(),
            col_cache: OnceLock::new(),
        }
    }
}

impl PartialEq for BooleanMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl Eq for BooleanMatrix {}

impl fmt::Debug for BooleanMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BooleanMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl BooleanMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = words_for(cols);
        Self {
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
            col_cache: OnceLock::new(),
        }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| true)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| i == j)
    }

    /// The half-graph `G(i, j) = 1` iff `i >= j`.
    pub fn half_graph(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| i >= j)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.data[i * m.words_per_row + j / WORD] |= 1 << (j % WORD);
                }
            }
        }
        m
    }

    /// Builds a matrix from nested rows; every row must have the same length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {} has {} entries, expected {cols}",
                    i + 1,
                    r.len()
                )));
            }
            if let Some(&x) = r.iter().find(|&&x| x > 1) {
                return Err(Error::Dimension(format!("entry {x} in row {} is not 0/1", i + 1)));
            }
        }
        Ok(Self::from_fn(rows.len(), cols, |i, j| rows[i].as_ref()[j] == 1))
    }

    pub(crate) fn from_row_sets(cols: usize, rows: Vec<BitSet>) -> Self {
        let words_per_row = words_for(cols);
        let mut data = Vec::with_capacity(rows.len() * words_per_row);
        for r in &rows {
            debug_assert_eq!(r.len(), cols);
            data.extend_from_slice(r.words());
        }
        Self { rows: rows.len(), cols, words_per_row, data, col_cache: OnceLock::new() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols, "({i}, {j}) out of range {}x{}", self.rows, self.cols);
        self.data[i * self.words_per_row + j / WORD] >> (j % WORD) & 1 == 1
    }

    pub(crate) fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    /// The row mask `R_i` as a bitset over columns.
    pub fn row_set(&self, i: usize) -> BitSet {
        BitSet::from_words(self.cols, self.row_words(i).to_vec())
    }

    /// Column masks `C_j` as bitsets over rows, computed once per matrix.
    pub fn col_sets(&self) -> &[BitSet] {
        self.col_cache.get_or_init(|| {
            let mut cols = vec![BitSet::new(self.rows); self.cols];
            for i in 0..self.rows {
                for j in self.row_set(i).iter() {
                    cols[j].insert(i);
                }
            }
            cols
        })
    }

    pub fn col_set(&self, j: usize) -> &BitSet {
        &self.col_sets()[j]
    }

    pub fn row_count(&self, i: usize) -> usize {
        self.row_words(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn col_count(&self, j: usize) -> usize {
        self.col_set(j).count()
    }

    /// `R_i = { j : A(i, j) = 1 }`, ascending and 0-based.
    pub fn row_nbhd(&self, i: usize) -> Result<Vec<usize>> {
        if i >= self.rows {
            return Err(Error::IndexOutOfRange { kind: "row", index: i, bound: self.rows });
        }
        Ok(self.row_set(i).to_vec())
    }

    /// `C_j = { i : A(i, j) = 1 }`, ascending and 0-based.
    pub fn col_nbhd(&self, j: usize) -> Result<Vec<usize>> {
        if j >= self.cols {
            return Err(Error::IndexOutOfRange { kind: "column", index: j, bound: self.cols });
        }
        Ok(self.col_set(j).to_vec())
    }

    /// Number of 1-entries, i.e. the squared Frobenius norm.
    pub fn support_size(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn density(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            0.0
        } else {
            self.support_size() as f64 / (self.rows * self.cols) as f64
        }
    }

    /// Number of 1-entries of the submatrix on `rows x cols`.
    pub fn block_support(&self, rows: &BitSet, cols: &BitSet) -> usize {
        rows.iter()
            .map(|i| {
                self.row_words(i)
                    .iter()
                    .zip(cols.words())
                    .map(|(a, b)| (a & b).count_ones() as usize)
                    .sum::<usize>()
            })
            .sum()
    }

    /// The submatrix `A_{S x T}`. Index lists must be in range; their order
    /// defines the row and column order of the result.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if let Some(&i) = rows.iter().find(|&&i| i >= self.rows) {
            return Err(Error::IndexOutOfRange { kind: "row", index: i, bound: self.rows });
        }
        if let Some(&j) = cols.iter().find(|&&j| j >= self.cols) {
            return Err(Error::IndexOutOfRange { kind: "column", index: j, bound: self.cols });
        }
        Ok(Self::from_fn(rows.len(), cols.len(), |a, b| self.get(rows[a], cols[b])))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Rows as 0/1 byte vectors.
    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| u8::from(self.get(i, j))).collect())
            .collect()
    }
}

/// A submatrix together with the parent indices of its rows and columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub matrix: BooleanMatrix,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Restriction {
    pub fn new(parent: &BooleanMatrix, rows: &[usize], cols: &[usize]) -> Result<Self> {
        Ok(Self { matrix: parent.restrict(rows, cols)?, rows: rows.to_vec(), cols: cols.to_vec() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lower() -> BooleanMatrix {
        BooleanMatrix::from_rows(&[[1, 0], [1, 1]]).unwrap()
    }

    #[test]
    fn support_size_examples() {
        assert_eq!(BooleanMatrix::identity(3).support_size(), 3);
        assert_eq!(BooleanMatrix::ones(2, 3).support_size(), 6);
        assert_eq!(lower().support_size(), 3);
        assert_eq!(BooleanMatrix::zeros(0, 5).support_size(), 0);
    }

    #[test]
    fn neighbourhoods() {
        // 1-based (i=2) -> {2}
        assert_eq!(BooleanMatrix::identity(3).row_nbhd(1).unwrap(), vec![1]);
        assert_eq!(BooleanMatrix::ones(2, 3).row_nbhd(0).unwrap(), vec![0, 1, 2]);
        assert_eq!(lower().col_nbhd(0).unwrap(), vec![0, 1]);
        assert!(matches!(lower().row_nbhd(2), Err(Error::IndexOutOfRange { .. })));
        assert!(lower().col_nbhd(7).is_err());
    }

    #[test]
    fn restrict_examples() {
        let id = BooleanMatrix::identity(3);
        assert_eq!(id.restrict(&[0, 1], &[0, 1]).unwrap(), BooleanMatrix::identity(2));
        assert_eq!(id.restrict(&[0, 1, 2], &[0, 1, 2]).unwrap(), id);
        assert_eq!(lower().restrict(&[1], &[0, 1]).unwrap(), BooleanMatrix::ones(1, 2));
        let empty = id.restrict(&[], &[0, 1]).unwrap();
        assert_eq!(empty.shape(), (0, 2));
        assert_eq!(empty.support_size(), 0);
        assert!(id.restrict(&[3], &[0]).is_err());
    }

    #[test]
    fn wide_rows_cross_word_boundaries() {
        let m = BooleanMatrix::from_fn(3, 130, |i, j| (i + j) % 7 == 0);
        let direct = (0..3).flat_map(|i| (0..130).map(move |j| (i, j))).filter(|&(i, j)| (i + j) % 7 == 0).count();
        assert_eq!(m.support_size(), direct);
        let by_cols: usize = (0..130).map(|j| m.col_count(j)).sum();
        assert_eq!(by_cols, direct);
        assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn ragged_rows_rejected() {
        let rows: Vec<Vec<u8>> = vec![vec![1, 0], vec![1]];
        assert!(BooleanMatrix::from_rows(&rows).is_err());
        assert!(BooleanMatrix::from_rows(&[[2u8]]).is_err());
    }

    #[test]
    fn bitset_ops() {
        let mut a = BitSet::from_indices(70, &[0, 5, 64, 69]);
        let b = BitSet::from_indices(70, &[5, 69]);
        assert_eq!(a.count(), 4);
        assert_eq!(a.intersection_count(&b), 2);
        assert!(b.is_subset(&a));
        assert_eq!(a.complement().count(), 66);
        a.difference_with(&b);
        assert_eq!(a.to_vec(), vec![0, 64]);
        assert!(a.is_disjoint(&b));
        assert_eq!(BitSet::full(70).count(), 70);
    }
}
