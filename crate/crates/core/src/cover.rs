//! Rectangles, blocky covers and blocky recognition.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{BitSet, BooleanMatrix};

/// A set product `S x T` with sorted, 0-based index sets.
///
/// Serialized with 1-based indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rectangle {
    #[serde(with = "crate::io::one_based")]
    pub rows: Vec<usize>,
    #[serde(with = "crate::io::one_based")]
    pub cols: Vec<usize>,
}

impl Rectangle {
    /// Sorts and deduplicates both index sets.
    pub fn new(mut rows: Vec<usize>, mut cols: Vec<usize>) -> Self {
        rows.sort_unstable();
        rows.dedup();
        cols.sort_unstable();
        cols.dedup();
        Self { rows, cols }
    }

    pub fn size(&self) -> usize {
        self.rows.len() * self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty() || self.cols.is_empty()
    }

    /// True when every cell of the rectangle is a 1 of `a`.
    pub fn is_one_rectangle(&self, a: &BooleanMatrix) -> bool {
        let cols = BitSet::from_indices(a.cols(), &self.cols);
        self.rows.iter().all(|&i| cols.is_subset(&a.row_set(i)))
    }

    /// Relabels indices through parent maps `rows[i]`, `cols[j]`.
    pub fn map_to(&self, row_map: &[usize], col_map: &[usize]) -> Rectangle {
        Rectangle::new(
            self.rows.iter().map(|&i| row_map[i]).collect(),
            self.cols.iter().map(|&j| col_map[j]).collect(),
        )
    }
}

/// A family of 1-rectangles with pairwise disjoint row sets and pairwise
/// disjoint column sets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockyCover {
    pub blocks: Vec<Rectangle>,
}

impl BlockyCover {
    pub fn new(blocks: Vec<Rectangle>) -> Self {
        Self { blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// `sum |S_k| * |T_k|`, exact by disjointness.
    pub fn support_size(&self) -> usize {
        self.blocks.iter().map(Rectangle::size).sum()
    }

    /// Checks index ranges, non-emptiness and pairwise disjointness.
    pub fn validate(&self, rows: usize, cols: usize) -> Result<()> {
        let mut row_used = BitSet::new(rows);
        let mut col_used = BitSet::new(cols);
        for (k, b) in self.blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::InvalidCover(format!("block {} is empty", k + 1)));
            }
            for &i in &b.rows {
                if i >= rows {
                    return Err(Error::IndexOutOfRange { kind: "row", index: i, bound: rows });
                }
                if row_used.contains(i) {
                    return Err(Error::InvalidCover(format!(
                        "row {} appears in more than one block",
                        i + 1
                    )));
                }
                row_used.insert(i);
            }
            for &j in &b.cols {
                if j >= cols {
                    return Err(Error::IndexOutOfRange { kind: "column", index: j, bound: cols });
                }
                if col_used.contains(j) {
                    return Err(Error::InvalidCover(format!(
                        "column {} appears in more than one block",
                        j + 1
                    )));
                }
                col_used.insert(j);
            }
        }
        Ok(())
    }

    /// The 0/1 matrix whose support is the union of the blocks.
    pub fn indicator(&self, rows: usize, cols: usize) -> BooleanMatrix {
        let mut sets = vec![BitSet::new(cols); rows];
        for b in &self.blocks {
            let t = BitSet::from_indices(cols, &b.cols);
            for &i in &b.rows {
                sets[i].union_with(&t);
            }
        }
        BooleanMatrix::from_row_sets(cols, sets)
    }
}

/// Recognises blocky matrices by grouping rows with identical nonzero
/// neighbourhoods; returns the canonical cover, or `None` if two distinct
/// neighbourhoods overlap.
pub fn is_blocky(a: &BooleanMatrix) -> Option<BlockyCover> {
    let mut groups: HashMap<&[u64], usize> = HashMap::new();
    let mut blocks: Vec<(Vec<usize>, BitSet)> = Vec::new();
    for i in 0..a.rows() {
        let words = a.row_words(i);
        if words.iter().all(|&w| w == 0) {
            continue;
        }
        match groups.get(words) {
            Some(&k) => blocks[k].0.push(i),
            None => {
                groups.insert(words, blocks.len());
                blocks.push((vec![i], a.row_set(i)));
            }
        }
    }
    let mut used = BitSet::new(a.cols());
    for (_, cols) in &blocks {
        if !cols.is_disjoint(&used) {
            return None;
        }
        used.union_with(cols);
    }
    Some(BlockyCover::new(
        blocks.into_iter().map(|(rows, cols)| Rectangle { rows, cols: cols.to_vec() }).collect(),
    ))
}

/// Validates `cover` against `a` and returns its support size. Fails on the
/// first covered cell (row-major within block order) that is a 0 of `a`.
pub fn cover_support(a: &BooleanMatrix, cover: &BlockyCover) -> Result<usize> {
    cover.validate(a.rows(), a.cols())?;
    for b in &cover.blocks {
        for &i in &b.rows {
            if let Some(&j) = b.cols.iter().find(|&&j| !a.get(i, j)) {
                return Err(Error::CoverNotSubset { row: i, col: j });
            }
        }
    }
    Ok(cover.support_size())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect(rows: &[usize], cols: &[usize]) -> Rectangle {
        Rectangle::new(rows.to_vec(), cols.to_vec())
    }

    #[test]
    fn identity_is_blocky_with_singletons() {
        let cover = is_blocky(&BooleanMatrix::identity(3)).unwrap();
        assert_eq!(cover.blocks, vec![rect(&[0], &[0]), rect(&[1], &[1]), rect(&[2], &[2])]);
    }

    #[test]
    fn forbidden_pattern_is_not_blocky() {
        let a = BooleanMatrix::from_rows(&[[1, 0], [1, 1]]).unwrap();
        assert!(is_blocky(&a).is_none());
    }

    #[test]
    fn zero_matrix_has_empty_cover() {
        assert!(is_blocky(&BooleanMatrix::zeros(3, 4)).unwrap().is_empty());
        assert!(is_blocky(&BooleanMatrix::zeros(0, 0)).unwrap().is_empty());
    }

    #[test]
    fn cover_support_examples() {
        let id = BooleanMatrix::identity(3);
        let c = is_blocky(&id).unwrap();
        assert_eq!(cover_support(&id, &c).unwrap(), 3);

        let ones = BooleanMatrix::ones(2, 2);
        assert_eq!(cover_support(&ones, &BlockyCover::new(vec![rect(&[0, 1], &[0, 1])])).unwrap(), 4);

        let a = BooleanMatrix::from_rows(&[[1, 0], [1, 1]]).unwrap();
        let err = cover_support(&a, &BlockyCover::new(vec![rect(&[0], &[0, 1])])).unwrap_err();
        assert!(matches!(err, Error::CoverNotSubset { row: 0, col: 1 }));
        assert_eq!(err.to_string(), "cover cell (1, 2) is not a 1-entry of the matrix");
    }

    #[test]
    fn overlapping_blocks_rejected() {
        let c = BlockyCover::new(vec![rect(&[0], &[0]), rect(&[0], &[1])]);
        assert!(c.validate(2, 2).is_err());
        let c = BlockyCover::new(vec![rect(&[0], &[1]), rect(&[1], &[1])]);
        assert!(c.validate(2, 2).is_err());
        let c = BlockyCover::new(vec![rect(&[], &[1])]);
        assert!(c.validate(2, 2).is_err());
    }

    #[test]
    fn indicator_matches_support() {
        let c = BlockyCover::new(vec![rect(&[0, 1], &[0]), rect(&[2], &[1, 2])]);
        let ind = c.indicator(3, 3);
        assert_eq!(ind.support_size(), c.support_size());
        assert_eq!(is_blocky(&ind).unwrap(), c);
    }
}
