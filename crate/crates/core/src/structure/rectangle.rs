//! Largest all-ones rectangle (maximum edge biclique).

use serde::{Deserialize, Serialize};

use crate::cover::Rectangle;
use crate::error::{Error, Result};
use crate::matrix::{BitSet, BooleanMatrix};

/// Exact search enumerates subsets of the shorter side; above this it is
/// refused in `Exact` mode and `Auto` falls back to peeling.
pub const RECT_EXACT_LIMIT: usize = 20;
/// Peeling seeds per side, densest lines first.
const PEEL_SEEDS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RectMode {
    Exact,
    Greedy,
    /// Exact when the shorter side is within the limit, greedy otherwise.
    Auto,
}

/// Largest 1-rectangle found by `mode`. Fails on matrices without 1-entries.
pub fn max_one_rectangle(a: &BooleanMatrix, mode: RectMode) -> Result<Rectangle> {
    max_one_rectangle_with(a, mode, RECT_EXACT_LIMIT)
}

pub fn max_one_rectangle_with(a: &BooleanMatrix, mode: RectMode, exact_limit: usize) -> Result<Rectangle> {
    if a.is_zero() {
        return Err(Error::Precondition("no 1-rectangle in a zero matrix".into()));
    }
    let short = a.rows().min(a.cols());
    match mode {
        RectMode::Exact if short > exact_limit => Err(Error::InvalidParameter(format!(
            "exact rectangle search needs a side of at most {exact_limit}, matrix is {}x{}",
            a.rows(),
            a.cols()
        ))),
        RectMode::Exact => Ok(exact(a)),
        RectMode::Auto if short <= exact_limit => Ok(exact(a)),
        _ => Ok(greedy(a)),
    }
}

fn exact(a: &BooleanMatrix) -> Rectangle {
    if a.cols() <= a.rows() {
        exact_over_cols(a)
    } else {
        let r = exact_over_cols(&a.transpose());
        Rectangle { rows: r.cols, cols: r.rows }
    }
}

struct Bnb<'a> {
    cols: Vec<&'a BitSet>,
    order: Vec<usize>,
    best: usize,
    best_set: Option<(BitSet, Vec<usize>)>,
}

impl Bnb<'_> {
    /// Columns `order[pos..]` are undecided; `rows` is the common support of
    /// the chosen columns `chosen`.
    fn search(&mut self, pos: usize, rows: &BitSet, chosen: &mut Vec<usize>) {
        let height = rows.count();
        if height == 0 {
            return;
        }
        let value = height * chosen.len();
        if value > self.best {
            self.best = value;
            self.best_set = Some((rows.clone(), chosen.clone()));
        }
        let live = self.order[pos..].iter().filter(|&&c| !self.cols[c].is_disjoint(rows)).count();
        if height * (chosen.len() + live) <= self.best {
            return;
        }
        for p in pos..self.order.len() {
            let c = self.order[p];
            let next = rows.intersection(self.cols[c]);
            if next.is_empty() {
                continue;
            }
            let free = next.count() == height;
            chosen.push(c);
            self.search(p + 1, &next, chosen);
            chosen.pop();
            // a column containing every current row is never worth skipping
            if free {
                break;
            }
        }
    }
}

fn exact_over_cols(a: &BooleanMatrix) -> Rectangle {
    let mut order: Vec<usize> = (0..a.cols()).collect();
    order.sort_by_key(|&j| (std::cmp::Reverse(a.col_count(j)), j));
    let mut bnb = Bnb { cols: a.col_sets().iter().collect(), order, best: 0, best_set: None };
    bnb.search(0, &BitSet::full(a.rows()), &mut Vec::new());
    let (rows, _) = bnb.best_set.expect("matrix has a 1-entry");
    close(a, rows)
}

/// Extends a row set to the maximal rectangle `S' x T'` with
/// `T' = common support of S` and `S' = common support of T'`.
fn close(a: &BooleanMatrix, rows: BitSet) -> Rectangle {
    let mut cols = BitSet::full(a.cols());
    for i in rows.iter() {
        cols.intersect_with(&a.row_set(i));
    }
    let mut rows = BitSet::full(a.rows());
    for j in cols.iter() {
        rows.intersect_with(a.col_set(j));
    }
    Rectangle { rows: rows.to_vec(), cols: cols.to_vec() }
}

/// Repeatedly removes the sparsest row or column (rows first, then smaller
/// index, on ties) until the submatrix is all ones.
fn peel(a: &BooleanMatrix, mut rows: BitSet, mut cols: BitSet) -> Rectangle {
    loop {
        let (h, w) = (rows.count(), cols.count());
        let row_counts: Vec<(usize, usize)> =
            rows.iter().map(|i| (i, a.row_set(i).intersection_count(&cols))).collect();
        if row_counts.iter().all(|&(_, c)| c == w) {
            break;
        }
        let col_counts: Vec<(usize, usize)> =
            cols.iter().map(|j| (j, a.col_set(j).intersection_count(&rows))).collect();
        // density c/w for rows and c/h for columns, compared exactly
        let (ri, rc) = *row_counts.iter().min_by_key(|&&(i, c)| (c, i)).expect("nonempty");
        let (cj, cc) = *col_counts.iter().min_by_key(|&&(j, c)| (c, j)).expect("nonempty");
        if rc * h <= cc * w {
            rows.remove(ri);
        } else {
            cols.remove(cj);
        }
    }
    close(a, rows)
}

fn greedy(a: &BooleanMatrix) -> Rectangle {
    let mut seeds = vec![(BitSet::full(a.rows()), BitSet::full(a.cols()))];
    let mut by_row: Vec<usize> = (0..a.rows()).filter(|&i| a.row_count(i) > 0).collect();
    by_row.sort_by_key(|&i| (std::cmp::Reverse(a.row_count(i)), i));
    seeds.extend(by_row.into_iter().take(PEEL_SEEDS).map(|i| (BitSet::full(a.rows()), a.row_set(i))));
    let mut by_col: Vec<usize> = (0..a.cols()).filter(|&j| a.col_count(j) > 0).collect();
    by_col.sort_by_key(|&j| (std::cmp::Reverse(a.col_count(j)), j));
    seeds.extend(by_col.into_iter().take(PEEL_SEEDS).map(|j| (a.col_set(j).clone(), BitSet::full(a.cols()))));

    let mut best: Option<Rectangle> = None;
    for (rows, cols) in seeds {
        if a.block_support(&rows, &cols) == 0 {
            continue;
        }
        let r = peel(a, rows, cols);
        if best.as_ref().is_none_or(|b| r.size() > b.size()) {
            best = Some(r);
        }
    }
    best.expect("matrix has a 1-entry")
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Every column subset, rows = common support.
    fn brute_force(a: &BooleanMatrix) -> usize {
        let n = a.cols();
        let mut best = 0;
        for mask in 1u32..1 << n {
            let cols: Vec<usize> = (0..n).filter(|&j| mask >> j & 1 == 1).collect();
            let rows = (0..a.rows()).filter(|&i| cols.iter().all(|&j| a.get(i, j))).count();
            best = best.max(rows * cols.len());
        }
        best
    }

    #[test]
    fn all_ones_gives_full_rectangle() {
        for mode in [RectMode::Exact, RectMode::Greedy] {
            let r = max_one_rectangle(&BooleanMatrix::ones(3, 5), mode).unwrap();
            assert_eq!(r.size(), 15);
        }
    }

    #[test]
    fn identity_gives_singleton() {
        for mode in [RectMode::Exact, RectMode::Greedy] {
            assert_eq!(max_one_rectangle(&BooleanMatrix::identity(6), mode).unwrap().size(), 1);
        }
    }

    #[test]
    fn complement_of_identity_four() {
        let a = BooleanMatrix::from_fn(4, 4, |i, j| i != j);
        let oracle = brute_force(&a);
        assert_eq!(oracle, 4);
        let r = max_one_rectangle(&a, RectMode::Exact).unwrap();
        assert_eq!(r.size(), oracle);
        assert!(r.is_one_rectangle(&a));
    }

    #[test]
    fn zero_matrix_is_an_error() {
        assert!(max_one_rectangle(&BooleanMatrix::zeros(2, 2), RectMode::Auto).is_err());
    }

    #[test]
    fn exact_refuses_large_inputs() {
        let a = BooleanMatrix::ones(25, 25);
        assert!(max_one_rectangle(&a, RectMode::Exact).is_err());
        assert_eq!(max_one_rectangle(&a, RectMode::Auto).unwrap().size(), 625);
    }

    #[test]
    fn exact_matches_brute_force_on_pseudorandom_matrices() {
        let mut state = 0x2545_F491_4F6C_DD1Du64;
        for _ in 0..200 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let (m, n) = (1 + (state % 7) as usize, 1 + (state >> 8) as usize % 7);
            let bits = state >> 16;
            let a = BooleanMatrix::from_fn(m, n, |i, j| bits >> ((i * 7 + j) % 48) & 1 == 1 || (i + j) % 5 == 0);
            let oracle = brute_force(&a);
            let exact = max_one_rectangle(&a, RectMode::Exact).unwrap();
            let greedy = max_one_rectangle(&a, RectMode::Greedy).unwrap();
            assert_eq!(exact.size(), oracle);
            assert!(exact.is_one_rectangle(&a));
            assert!(greedy.is_one_rectangle(&a));
            assert!(greedy.size() <= exact.size());
        }
    }
}
