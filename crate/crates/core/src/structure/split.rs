//! The case split around a pivotal row: either a dense block `C_j ∩ Δ_i`
//! inside `Δ_i x R_i`, or a part `Δ_i \ C_j` of smaller threshold dimension.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::{column_mass, delta_mass, ensure_valid, Correlations, Factorization};
use crate::matrix::{BitSet, BooleanMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitKind {
    Rect,
    TdDrop,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitOutcome {
    pub kind: SplitKind,
    #[serde(with = "crate::io::one_based_opt")]
    pub pivot_row: Option<usize>,
    /// `argmin_{t in R_i} |C_t ∩ Δ_i|`, smallest index on ties.
    #[serde(with = "crate::io::one_based_opt")]
    pub pivot_col: Option<usize>,
    #[serde(with = "crate::io::one_based")]
    pub delta: Vec<usize>,
    #[serde(with = "crate::io::one_based")]
    pub pivot_cols: Vec<usize>,
    /// `S`: `C_j ∩ Δ_i` for `Rect`, `Δ_i \ C_j` for `TdDrop`.
    #[serde(with = "crate::io::one_based")]
    pub row_part: Vec<usize>,
    /// `support(A_{S x R_i})`.
    pub retained_ones: usize,
    /// `support(A_{Δ_i x R_i})`.
    pub delta_block_ones: usize,
    /// `support(A_{Δ_i x [n]})`.
    pub delta_rows_ones: usize,
    /// `support(A_{[m] x R_i})`.
    pub column_mass: usize,
    /// `support(A_{Δ_i^c x R_i^c})`.
    pub complement_ones: usize,
    pub support: usize,
    pub lambda: f64,
}

impl SplitOutcome {
    /// `2 * retained >= support(A_{Δ_i x R_i})`, in integers.
    pub fn retains_half(&self) -> bool {
        2 * self.retained_ones >= self.delta_block_ones
    }

    /// `support(A_{Δ^c x R^c}) >= F - 10 lambda^4 support(A_{Δ x R})`.
    pub fn complement_bound_holds(&self, tol: f64) -> bool {
        let l4 = self.lambda.powi(4);
        self.complement_ones as f64 >= self.support as f64 - 10.0 * l4 * self.delta_block_ones as f64 - tol
    }

    pub fn complement_rows(&self, m: usize) -> Vec<usize> {
        BitSet::from_indices(m, &self.delta).complement().to_vec()
    }

    pub fn complement_cols(&self, n: usize) -> Vec<usize> {
        BitSet::from_indices(n, &self.pivot_cols).complement().to_vec()
    }
}

/// Checks `(1/(4 lambda^2)) ||A_{Δ x [n]}||^2 <= ||A_{[m] x R_i}||^2 <= 2 lambda^2 ||A_{Δ x R_i}||^2`.
fn sandwich(lambda: f64, tol: f64, delta_rows: usize, mass: usize, inside: usize) -> bool {
    let l2 = lambda * lambda;
    delta_rows as f64 <= 4.0 * l2 * mass as f64 + tol && mass as f64 * (1.0 - tol) <= 2.0 * l2 * inside as f64
}

pub fn lemma_split(a: &BooleanMatrix, f: &Factorization, i: usize) -> Result<SplitOutcome> {
    ensure_valid(a, f)?;
    lemma_split_with(a, f, &Correlations::new(f), i)
}

pub(crate) fn lemma_split_with(
    a: &BooleanMatrix,
    f: &Factorization,
    corr: &Correlations,
    i: usize,
) -> Result<SplitOutcome> {
    if i >= a.rows() {
        return Err(Error::IndexOutOfRange { kind: "row", index: i, bound: a.rows() });
    }
    let ri = a.row_set(i);
    if ri.is_empty() {
        return Err(Error::Precondition(format!("row {} has no 1-entries", i + 1)));
    }
    let delta = corr.delta(i);
    let delta_block_ones = a.block_support(delta, &ri);
    let delta_rows_ones = delta_mass(a, delta);
    let mass = column_mass(a, i);
    if !sandwich(f.lambda(), f.tol(), delta_rows_ones, mass, delta_block_ones) {
        return Err(Error::Precondition(format!(
            "row {} violates the sandwich condition: delta rows {delta_rows_ones}, column mass {mass}, inside {delta_block_ones}",
            i + 1
        )));
    }
    let j = ri
        .iter()
        .min_by_key(|&t| (a.col_set(t).intersection_count(delta), t))
        .expect("R_i is nonempty");
    let dense = delta.intersection(a.col_set(j));
    let dense_ones = a.block_support(&dense, &ri);
    let (kind, row_part, retained_ones) = if 2 * dense_ones > delta_block_ones {
        (SplitKind::Rect, dense, dense_ones)
    } else {
        let mut rest = delta.clone();
        rest.difference_with(a.col_set(j));
        (SplitKind::TdDrop, rest, delta_block_ones - dense_ones)
    };
    let complement_ones = a.block_support(&delta.complement(), &ri.complement());
    Ok(SplitOutcome {
        kind,
        pivot_row: Some(i),
        pivot_col: Some(j),
        delta: delta.to_vec(),
        pivot_cols: ri.to_vec(),
        row_part: row_part.to_vec(),
        retained_ones,
        delta_block_ones,
        delta_rows_ones,
        column_mass: mass,
        complement_ones,
        support: a.support_size(),
        lambda: f.lambda(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::DEFAULT_TOL;
    use nalgebra::DMatrix;

    #[test]
    fn all_ones_rank_one_is_a_full_rect() {
        let a = BooleanMatrix::ones(3, 4);
        let f = Factorization::new(DMatrix::from_element(3, 1, 1.0), DMatrix::from_element(1, 4, 1.0), 1.0, DEFAULT_TOL)
            .unwrap();
        let s = lemma_split(&a, &f, 0).unwrap();
        assert_eq!(s.kind, SplitKind::Rect);
        assert_eq!(s.pivot_col, Some(0));
        assert_eq!(s.row_part, vec![0, 1, 2]);
        assert_eq!(s.retained_ones, 12);
        assert!(s.retains_half() && s.complement_bound_holds(DEFAULT_TOL));
    }

    #[test]
    fn identity_is_a_singleton_rect() {
        let a = BooleanMatrix::identity(4);
        let f = Factorization::new(DMatrix::identity(4, 4), DMatrix::identity(4, 4), 1.0, DEFAULT_TOL).unwrap();
        let s = lemma_split(&a, &f, 0).unwrap();
        assert_eq!((s.kind, s.pivot_col, s.row_part.clone()), (SplitKind::Rect, Some(0), vec![0]));
        assert_eq!(s.complement_ones, 3);
        assert_eq!(s.complement_rows(4), vec![1, 2, 3]);
    }

    #[test]
    fn empty_row_is_rejected() {
        let a = BooleanMatrix::from_rows(&[[1, 0], [0, 0]]).unwrap();
        let f = Factorization::new(
            DMatrix::from_row_slice(2, 1, &[1.0, 0.0]),
            DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
            1.0,
            DEFAULT_TOL,
        )
        .unwrap();
        assert!(lemma_split(&a, &f, 1).is_err());
    }
}
