//! λ-factorizations `A = UV` and the quantities built on them: the
//! potential, the Δ-sets of strongly correlated rows, pivotal rows and the
//! column-projection step that trades 1-entries for potential.

use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::cover::BlockyCover;
use crate::error::{Error, Result};
use crate::matrix::{BitSet, BooleanMatrix};

pub const DEFAULT_TOL: f64 = 1e-9;

/// A factorization `A = UV` with rows of `U` in the unit ball and columns of
/// `V` in the ball of radius `lambda`.
///
/// `U` is `m x t`, `V` is `t x n`, and `t <= m + n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    u: DMatrix<f64>,
    v: DMatrix<f64>,
    lambda: f64,
    tol: f64,
}

impl Factorization {
    pub fn new(u: DMatrix<f64>, v: DMatrix<f64>, lambda: f64, tol: f64) -> Result<Self> {
        if u.ncols() != v.nrows() {
            return Err(Error::Dimension(format!(
                "U is {}x{} but V is {}x{}",
                u.nrows(),
                u.ncols(),
                v.nrows(),
                v.ncols()
            )));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
        }
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be nonnegative, got {tol}")));
        }
        let (m, t, n) = (u.nrows(), u.ncols(), v.ncols());
        if t > m + n {
            return Err(Error::Dimension(format!("ambient dimension {t} exceeds m + n = {}", m + n)));
        }
        if u.iter().chain(v.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite factor entry".into()));
        }
        Ok(Self { u, v, lambda, tol })
    }

    pub fn rows(&self) -> usize {
        self.u.nrows()
    }

    pub fn cols(&self) -> usize {
        self.v.ncols()
    }

    /// Ambient dimension `t`.
    pub fn dim(&self) -> usize {
        self.u.ncols()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn u(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn row_norm_sq(&self, i: usize) -> f64 {
        self.u.row(i).norm_squared()
    }

    pub fn col_norm(&self, j: usize) -> f64 {
        self.v.column(j).norm()
    }

    /// `<u_r, u_s>`.
    pub fn row_inner(&self, r: usize, s: usize) -> f64 {
        self.u.row(r).dot(&self.u.row(s))
    }

    /// The row Gram matrix `U U^T`.
    pub fn row_gram(&self) -> DMatrix<f64> {
        &self.u * self.u.transpose()
    }

    /// The column Gram matrix `V^T V`.
    pub fn col_gram(&self) -> DMatrix<f64> {
        self.v.transpose() * &self.v
    }

    pub fn product(&self) -> DMatrix<f64> {
        &self.u * &self.v
    }

    /// Restricts to the rows `rows` of `U` and the columns `cols` of `V`.
    /// Deleting rows and columns keeps every norm bound, so the result is a
    /// λ-factorization of the matching submatrix. When the ambient dimension
    /// would exceed `m' + n'`, the vectors are rewritten in an orthonormal
    /// basis of their span, which preserves all inner products.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if let Some(&i) = rows.iter().find(|&&i| i >= self.rows()) {
            return Err(Error::IndexOutOfRange { kind: "row", index: i, bound: self.rows() });
        }
        if let Some(&j) = cols.iter().find(|&&j| j >= self.cols()) {
            return Err(Error::IndexOutOfRange { kind: "column", index: j, bound: self.cols() });
        }
        let u = self.u.select_rows(rows);
        let v = self.v.select_columns(cols);
        let (u, v) = compress(u, v);
        Factorization::new(u, v, self.lambda, self.tol)
    }
}

/// Re-expresses `(U, V)` in at most `m + n` coordinates.
pub(crate) fn compress(u: DMatrix<f64>, v: DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let (m, t, n) = (u.nrows(), u.ncols(), v.ncols());
    if t <= m + n {
        return (u, v);
    }
    let mut w = DMatrix::<f64>::zeros(t, m + n);
    w.columns_mut(0, m).copy_from(&u.transpose());
    w.columns_mut(m, n).copy_from(&v);
    // W = QR with orthonormal Q, so R^T R = W^T W.
    let r = w.qr().r();
    let u = r.columns(0, m).transpose();
    let v = r.columns(m, n).into_owned();
    (u, v)
}

/// One failed λ-factorization condition. Indices are 0-based; `Display`
/// prints them 1-based.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Shape { expected: (usize, usize), found: (usize, usize) },
    RowNorm { row: usize, norm: f64, bound: f64 },
    ColNorm { col: usize, norm: f64, bound: f64 },
    Reproduction { row: usize, col: usize, value: f64, expected: u8 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Shape { expected, found } => write!(
                f,
                "factorization is {}x{} but the matrix is {}x{}",
                found.0, found.1, expected.0, expected.1
            ),
            Violation::RowNorm { row, norm, bound } => {
                write!(f, "row {} of U has norm {norm} > {bound}", row + 1)
            }
            Violation::ColNorm { col, norm, bound } => {
                write!(f, "column {} of V has norm {norm} > {bound}", col + 1)
            }
            Violation::Reproduction { row, col, value, expected } => write!(
                f,
                "<u_{}, v_{}> = {value} but A({}, {}) = {expected} (error {:e})",
                row + 1,
                col + 1,
                row + 1,
                col + 1,
                (value - f64::from(expected)).abs()
            ),
        }
    }
}

/// Checks every λ-factorization condition of `f` against `a` and returns all
/// violations; an empty list means the factorization is valid.
pub fn verify(a: &BooleanMatrix, f: &Factorization) -> Vec<Violation> {
    if a.shape() != (f.rows(), f.cols()) {
        return vec![Violation::Shape { expected: a.shape(), found: (f.rows(), f.cols()) }];
    }
    let tol = f.tol;
    let mut out = Vec::new();
    for i in 0..f.rows() {
        let norm = f.row_norm_sq(i).sqrt();
        if norm > 1.0 + tol {
            out.push(Violation::RowNorm { row: i, norm, bound: 1.0 });
        }
    }
    for j in 0..f.cols() {
        let norm = f.col_norm(j);
        if norm > f.lambda + tol {
            out.push(Violation::ColNorm { col: j, norm, bound: f.lambda });
        }
    }
    let p = f.product();
    for i in 0..f.rows() {
        for j in 0..f.cols() {
            let expected = u8::from(a.get(i, j));
            let value = p[(i, j)];
            if (value - f64::from(expected)).abs() > tol {
                out.push(Violation::Reproduction { row: i, col: j, value, expected });
            }
        }
    }
    out
}

pub(crate) fn ensure_valid(a: &BooleanMatrix, f: &Factorization) -> Result<()> {
    let v = verify(a, f);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidFactorization(v))
    }
}

/// The λ = 1 witness for a blocky matrix: `u_i = e_k` for `i` in `S_k` and
/// `v_j = e_k` for `j` in `T_k`.
pub fn canonical_blocky_factorization(cover: &BlockyCover, m: usize, n: usize) -> Result<Factorization> {
    cover.validate(m, n)?;
    let t = cover.len();
    let mut u = DMatrix::zeros(m, t);
    let mut v = DMatrix::zeros(t, n);
    for (k, b) in cover.blocks.iter().enumerate() {
        for &i in &b.rows {
            u[(i, k)] = 1.0;
        }
        for &j in &b.cols {
            v[(k, j)] = 1.0;
        }
    }
    Factorization::new(u, v, 1.0, DEFAULT_TOL)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PotentialReport {
    /// `sum_s ||u_s||^2 |R_s|`.
    pub value: f64,
    pub per_row: Vec<f64>,
    /// `F / lambda^2`.
    pub lower: f64,
    /// `F`.
    pub upper: f64,
}

impl PotentialReport {
    pub fn within_bounds(&self, tol: f64) -> bool {
        self.lower - tol <= self.value && self.value <= self.upper + tol
    }
}

fn potential_unchecked(a: &BooleanMatrix, f: &Factorization) -> PotentialReport {
    let per_row: Vec<f64> = (0..a.rows()).map(|s| f.row_norm_sq(s) * a.row_count(s) as f64).collect();
    let support = a.support_size() as f64;
    PotentialReport {
        value: per_row.iter().sum(),
        per_row,
        lower: support / (f.lambda * f.lambda),
        upper: support,
    }
}

/// The potential of `a` under the factorization in hand (squared row norms
/// weighted by row supports).
pub fn potential(a: &BooleanMatrix, f: &Factorization) -> Result<PotentialReport> {
    ensure_valid(a, f)?;
    Ok(potential_unchecked(a, f))
}

/// `1 / (2 lambda^2)`, the squared-correlation threshold defining Δ-sets.
pub fn delta_threshold(lambda: f64) -> f64 {
    1.0 / (2.0 * lambda * lambda)
}

/// `Δ_i = { s : <u_i, u_s>^2 >= 1/(2 lambda^2) }`, ascending.
pub fn delta_set(f: &Factorization, i: usize) -> Result<Vec<usize>> {
    if i >= f.rows() {
        return Err(Error::IndexOutOfRange { kind: "row", index: i, bound: f.rows() });
    }
    let thr = delta_threshold(f.lambda);
    Ok((0..f.rows())
        .filter(|&s| {
            let ip = f.row_inner(i, s);
            ip * ip >= thr
        })
        .collect())
}

/// Shared per-matrix tables: the row Gram matrix and every Δ-set as a row mask.
#[derive(Clone, Debug)]
pub struct Correlations {
    gram: DMatrix<f64>,
    deltas: Vec<BitSet>,
}

impl Correlations {
    pub fn new(f: &Factorization) -> Self {
        let gram = f.row_gram();
        let m = f.rows();
        let thr = delta_threshold(f.lambda);
        let deltas = (0..m)
            .map(|i| {
                let mut d = BitSet::new(m);
                for s in 0..m {
                    let ip = gram[(i, s)];
                    if ip * ip >= thr {
                        d.insert(s);
                    }
                }
                d
            })
            .collect();
        Self { gram, deltas }
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn delta(&self, i: usize) -> &BitSet {
        &self.deltas[i]
    }
}

/// Number of ordered pairs `(r, s)` in `C_t x C_t` with
/// `<u_r, u_s>^2 >= 1/(2 lambda^2)`.
pub fn large_pair_count(f: &Factorization, a: &BooleanMatrix, t: usize) -> Result<usize> {
    if t >= a.cols() {
        return Err(Error::IndexOutOfRange { kind: "column", index: t, bound: a.cols() });
    }
    let thr = delta_threshold(f.lambda);
    let col = a.col_nbhd(t)?;
    let mut count = 0;
    for &r in &col {
        for &s in &col {
            let ip = f.row_inner(r, s);
            if ip * ip >= thr {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Squared inner-product sums over each row support (columns of `V`) and
/// each column support (rows of `U`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InnerProductSums {
    /// `sum_{r,s in R_i} <v_r, v_s>^2`.
    pub rows: Vec<f64>,
    /// `sum_{r,s in C_j} <u_r, u_s>^2`.
    pub cols: Vec<f64>,
}

impl InnerProductSums {
    /// Lists every failed bound `|R_i|^2 <= rows[i] <= lambda^4 |R_i|^2` and
    /// `|C_j|^2 / lambda^2 <= cols[j] <= |C_j|^2`, with slack `tol` relative
    /// to the bound's magnitude.
    pub fn failures(&self, a: &BooleanMatrix, lambda: f64, tol: f64) -> Vec<String> {
        let le = |x: f64, y: f64| x <= y + tol * y.abs().max(1.0);
        let mut out = Vec::new();
        let l2 = lambda * lambda;
        for (i, &s) in self.rows.iter().enumerate() {
            let r2 = (a.row_count(i) as f64).powi(2);
            if !le(r2, s) || !le(s, l2 * l2 * r2) {
                out.push(format!("row {}: sum {s} outside [{r2}, {}]", i + 1, l2 * l2 * r2));
            }
        }
        for (j, &s) in self.cols.iter().enumerate() {
            let c2 = (a.col_count(j) as f64).powi(2);
            if !le(c2 / l2, s) || !le(s, c2) {
                out.push(format!("column {}: sum {s} outside [{}, {c2}]", j + 1, c2 / l2));
            }
        }
        out
    }
}

pub fn inner_product_sums(f: &Factorization, a: &BooleanMatrix) -> Result<InnerProductSums> {
    ensure_valid(a, f)?;
    let vg = f.col_gram();
    let ug = f.row_gram();
    let pair_sum = |g: &DMatrix<f64>, idx: &[usize]| -> f64 {
        let mut acc = 0.0;
        for &r in idx {
            for &s in idx {
                acc += g[(r, s)] * g[(r, s)];
            }
        }
        acc
    };
    let rows = (0..a.rows()).map(|i| pair_sum(&vg, &a.row_set(i).to_vec())).collect();
    let cols = (0..a.cols()).map(|j| pair_sum(&ug, &a.col_set(j).to_vec())).collect();
    Ok(InnerProductSums { rows, cols })
}

/// `||A_{Δ_i x R_i}||^2` and `||A_{[m] x R_i}||^2` for a candidate row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PivotCertificate {
    pub row: usize,
    pub inside: usize,
    pub column_mass: usize,
}

impl PivotCertificate {
    pub fn ratio(&self) -> f64 {
        self.inside as f64 / self.column_mass as f64
    }
}

/// `||A_{[m] x R_i}||^2 = sum_{t in R_i} |C_t|`.
pub(crate) fn column_mass(a: &BooleanMatrix, i: usize) -> usize {
    a.row_set(i).iter().map(|t| a.col_count(t)).sum()
}

/// `||A_{Δ_i x [n]}||^2 = sum_{s in Δ_i} |R_s|`.
pub(crate) fn delta_mass(a: &BooleanMatrix, delta: &BitSet) -> usize {
    delta.iter().map(|s| a.row_count(s)).sum()
}

/// Finds the nonzero row maximising `||A_{Δ_i x R_i}||^2 / ||A_{[m] x R_i}||^2`
/// (smallest index on ties) and checks it reaches `1/(2 lambda^2)`.
pub fn pivotal_row(a: &BooleanMatrix, f: &Factorization) -> Result<PivotCertificate> {
    ensure_valid(a, f)?;
    pivotal_row_with(a, f, &Correlations::new(f))
}

pub(crate) fn pivotal_row_with(
    a: &BooleanMatrix,
    f: &Factorization,
    corr: &Correlations,
) -> Result<PivotCertificate> {
    let mut best: Option<PivotCertificate> = None;
    for i in 0..a.rows() {
        let ri = a.row_set(i);
        if ri.is_empty() {
            continue;
        }
        let cert = PivotCertificate {
            row: i,
            inside: a.block_support(corr.delta(i), &ri),
            column_mass: column_mass(a, i),
        };
        let better = match best {
            None => true,
            // inside/mass > best.inside/best.mass, exactly
            Some(b) => (cert.inside as u128) * (b.column_mass as u128) > (b.inside as u128) * (cert.column_mass as u128),
        };
        if better {
            best = Some(cert);
        }
    }
    let best = best.ok_or_else(|| Error::Precondition("pivotal row requested for a zero matrix".into()))?;
    let l2 = f.lambda * f.lambda;
    if (2.0 * l2 * best.inside as f64) < best.column_mass as f64 * (1.0 - f.tol) {
        return Err(Error::Invariant(format!(
            "no pivotal row: best ratio {} below 1/(2 lambda^2) = {}",
            best.ratio(),
            1.0 / (2.0 * l2)
        )));
    }
    Ok(best)
}

/// Whether row `i` triggers the projection step:
/// `||A_{Δ_i x [n]}||^2 > 4 lambda^2 ||A_{[m] x R_i}||^2 + tol`.
pub fn projection_guard(a: &BooleanMatrix, f: &Factorization, corr: &Correlations, i: usize) -> bool {
    let mass = column_mass(a, i);
    mass > 0 && delta_mass(a, corr.delta(i)) as f64 > 4.0 * f.lambda * f.lambda * mass as f64 + f.tol
}

/// Output of [`project_columns`].
#[derive(Clone, Debug)]
pub struct Projection {
    /// `A_{[m] x R_i^c}`.
    pub matrix: BooleanMatrix,
    pub factorization: Factorization,
    /// Parent indices of the kept columns.
    pub kept_cols: Vec<usize>,
    /// `support(A) - support(A')`.
    pub eta: usize,
}

/// Deletes the columns `R_i` and replaces each `u_s` by its component
/// orthogonal to `u_i`. Because `<u_i, v_t> = 0` off `R_i`, the result is a
/// λ-factorization of the remaining columns.
pub fn project_columns(a: &BooleanMatrix, f: &Factorization, i: usize) -> Result<Projection> {
    if a.shape() != (f.rows(), f.cols()) {
        return Err(Error::Dimension("matrix and factorization shapes differ".into()));
    }
    if i >= a.rows() {
        return Err(Error::IndexOutOfRange { kind: "row", index: i, bound: a.rows() });
    }
    let ri = a.row_set(i);
    if ri.is_empty() {
        return Err(Error::Precondition(format!("row {} has no 1-entries", i + 1)));
    }
    let pivot = f.u.row(i).into_owned();
    let pivot_sq = pivot.norm_squared();
    if pivot_sq.sqrt() <= f.tol {
        return Err(Error::Precondition(format!("row {} of U is numerically zero", i + 1)));
    }
    let mut u = f.u.clone();
    for s in 0..u.nrows() {
        let c = u.row(s).dot(&pivot) / pivot_sq;
        let mut row = u.row_mut(s);
        row -= &pivot * c;
    }
    let kept_cols = ri.complement().to_vec();
    let v = f.v.select_columns(&kept_cols);
    let matrix = a.restrict(&(0..a.rows()).collect::<Vec<_>>(), &kept_cols)?;
    let eta = a.support_size() - matrix.support_size();
    let (u, v) = compress(u, v);
    let factorization = Factorization::new(u, v, f.lambda, f.tol)?;
    Ok(Projection { matrix, factorization, kept_cols, eta })
}

/// The two sides of `||XY||_F^2 <= ||X X^T||_F * ||Y^T Y||_F`.
pub fn trace_bound(x: &DMatrix<f64>, y: &DMatrix<f64>) -> (f64, f64) {
    let lhs = (x * y).norm_squared();
    let rhs = (x * x.transpose()).norm() * (y.transpose() * y).norm();
    (lhs, rhs)
}
