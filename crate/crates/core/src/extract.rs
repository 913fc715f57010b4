//! Blocky cover extraction from a λ-factorization, with a step-by-step trace.
//!
//! Each node of the recursion works on a submatrix of the input and the
//! restriction of the factorization to it. In order:
//!
//! * zero matrix: nothing to cover;
//! * blocky matrix: take its canonical cover;
//! * first row `i` with `||A_{Δ_i x [n]}||^2 > 4 lambda^2 ||A_{[m] x R_i}||^2`:
//!   delete the columns `R_i`, project the rows of `U` off `u_i`, recurse;
//! * otherwise split at the pivotal row. A dense split contributes one
//!   1-rectangle from `S x R_i` and recurses on `Δ_i^c x R_i^c`; a
//!   threshold-dimension drop recurses on both `S x R_i` and `Δ_i^c x R_i^c`.
//!
//! Row parts of the children live in `Δ_i` and `Δ_i^c`, column parts in `R_i`
//! and `R_i^c`, so the collected rectangles are row- and column-disjoint.

use serde::{Deserialize, Serialize};

use crate::cover::{cover_support, is_blocky, BlockyCover, Rectangle};
use crate::error::{Error, Result};
use crate::factor::{
    ensure_valid, pivotal_row_with, potential, project_columns, projection_guard, verify, Correlations,
    Factorization,
};
use crate::matrix::BooleanMatrix;
use crate::structure::{
    lemma_split_with, max_one_rectangle_with, threshold_dimension_with, RectMode, SplitKind, SplitOutcome,
    TdOptions, RECT_EXACT_LIMIT,
};

/// Calibrated stand-in for the unspecified constant in the coverage ledger.
pub const DEFAULT_LEDGER_CONSTANT: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractOptions {
    pub ledger_constant: f64,
    pub rect_exact_limit: usize,
    pub td: TdOptions,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self { ledger_constant: DEFAULT_LEDGER_CONSTANT, rect_exact_limit: RECT_EXACT_LIMIT, td: TdOptions::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    ZeroBase,
    BlockyBase,
    Projection,
    Rect,
    TdDrop,
}

/// One node of the recursion. All index sets are in the coordinates of the
/// input matrix and serialize 1-based.
#[derive(Clone, Debug, Serialize)]
pub struct TraceStep {
    pub id: usize,
    pub parent: Option<usize>,
    pub branch: Branch,
    #[serde(with = "crate::io::one_based")]
    pub rows: Vec<usize>,
    #[serde(with = "crate::io::one_based")]
    pub cols: Vec<usize>,
    /// `F`, the number of 1-entries of the node's submatrix.
    pub support: usize,
    /// `Π` under the node's factorization.
    pub potential: f64,
    pub lambda: f64,
    /// Threshold dimension used in the ledger (an upper bound when inexact).
    pub td: usize,
    pub td_exact: bool,
    /// Total support and potential handed to the children.
    pub post_support: Option<usize>,
    pub post_potential: Option<f64>,
    /// Support removed by a projection step.
    pub eta: Option<usize>,
    /// Whether the projected factorization passed verification.
    pub projection_verified: Option<bool>,
    /// The qualifying row of a projection step.
    #[serde(with = "crate::io::one_based_opt")]
    pub projection_row: Option<usize>,
    pub split: Option<SplitOutcome>,
    /// Blocks contributed directly by this step.
    pub blocks: Vec<Rectangle>,
    pub children: Vec<usize>,
    pub subtree_coverage: usize,
    /// `b = (F - Π/2) / (C (40 lambda^4)^d)`.
    pub ledger: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtractionTrace {
    pub rows: usize,
    pub cols: usize,
    pub support: usize,
    pub lambda: f64,
    pub ledger_constant: f64,
    pub steps: Vec<TraceStep>,
    pub cover: BlockyCover,
    pub coverage: usize,
}

impl ExtractionTrace {
    pub fn coverage_fraction(&self) -> f64 {
        if self.support == 0 {
            1.0
        } else {
            self.coverage as f64 / self.support as f64
        }
    }
}

pub fn ledger_value(support: usize, potential: f64, lambda: f64, td: usize, constant: f64) -> f64 {
    let base = 40.0 * lambda.powi(4);
    (support as f64 - potential / 2.0) / (constant * base.powi(td as i32))
}

struct Node {
    a: BooleanMatrix,
    f: Factorization,
    rows: Vec<usize>,
    cols: Vec<usize>,
}

struct Extractor {
    opts: ExtractOptions,
    steps: Vec<TraceStep>,
    blocks: Vec<Rectangle>,
}

fn pick(map: &[usize], idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|&k| map[k]).collect()
}

fn map_split(s: &SplitOutcome, rows: &[usize], cols: &[usize]) -> SplitOutcome {
    SplitOutcome {
        pivot_row: s.pivot_row.map(|i| rows[i]),
        pivot_col: s.pivot_col.map(|j| cols[j]),
        delta: pick(rows, &s.delta),
        pivot_cols: pick(cols, &s.pivot_cols),
        row_part: pick(rows, &s.row_part),
        ..s.clone()
    }
}

impl Extractor {
    fn child(&self, node: &Node, rows: &[usize], cols: &[usize]) -> Result<Node> {
        Ok(Node {
            a: node.a.restrict(rows, cols)?,
            f: node.f.restrict(rows, cols)?,
            rows: pick(&node.rows, rows),
            cols: pick(&node.cols, cols),
        })
    }

    fn visit(&mut self, node: Node, parent: Option<usize>) -> Result<usize> {
        let Node { a, f, .. } = &node;
        let support = a.support_size();
        let pot = potential(a, f)?.value;
        let id = self.steps.len();
        let lambda = f.lambda();
        self.steps.push(TraceStep {
            id,
            parent,
            branch: Branch::ZeroBase,
            rows: node.rows.clone(),
            cols: node.cols.clone(),
            support,
            potential: pot,
            lambda,
            td: 0,
            td_exact: true,
            post_support: None,
            post_potential: None,
            eta: None,
            projection_verified: None,
            projection_row: None,
            split: None,
            blocks: Vec::new(),
            children: Vec::new(),
            subtree_coverage: 0,
            ledger: 0.0,
        });
        let mut children = Vec::new();
        let mut own = Vec::new();

        let branch = if a.is_zero() {
            Branch::ZeroBase
        } else if let Some(cover) = is_blocky(a) {
            self.steps[id].td = 1;
            own = cover.blocks.iter().map(|b| b.map_to(&node.rows, &node.cols)).collect();
            Branch::BlockyBase
        } else {
            let td = threshold_dimension_with(a, self.opts.td);
            self.steps[id].td = td.upper;
            self.steps[id].td_exact = td.exact;
            let corr = Correlations::new(f);
            if let Some(i) = (0..a.rows()).find(|&i| projection_guard(a, f, &corr, i)) {
                let p = project_columns(a, f, i)?;
                let verified = verify(&p.matrix, &p.factorization).is_empty();
                let post = potential(&p.matrix, &p.factorization)?.value;
                let step = &mut self.steps[id];
                step.eta = Some(p.eta);
                step.projection_verified = Some(verified);
                step.projection_row = Some(node.rows[i]);
                step.post_support = Some(p.matrix.support_size());
                step.post_potential = Some(post);
                let next = Node {
                    rows: node.rows.clone(),
                    cols: pick(&node.cols, &p.kept_cols),
                    a: p.matrix,
                    f: p.factorization,
                };
                children.push(self.visit(next, Some(id))?);
                Branch::Projection
            } else {
                let pivot = pivotal_row_with(a, f, &corr)?;
                let split = lemma_split_with(a, f, &corr, pivot.row).map_err(|e| match e {
                    Error::Precondition(msg) => Error::Invariant(msg),
                    other => other,
                })?;
                let rest_rows = split.complement_rows(a.rows());
                let rest_cols = split.complement_cols(a.cols());
                let rest = self.child(&node, &rest_rows, &rest_cols)?;
                let mut post_support = rest.a.support_size();
                let mut post_potential = potential(&rest.a, &rest.f)?.value;
                match split.kind {
                    SplitKind::Rect => {
                        let sub = a.restrict(&split.row_part, &split.pivot_cols)?;
                        let r = max_one_rectangle_with(&sub, RectMode::Auto, self.opts.rect_exact_limit)?;
                        let local = r.map_to(&split.row_part, &split.pivot_cols);
                        own.push(local.map_to(&node.rows, &node.cols));
                    }
                    SplitKind::TdDrop => {
                        let part = self.child(&node, &split.row_part, &split.pivot_cols)?;
                        post_support += part.a.support_size();
                        post_potential += potential(&part.a, &part.f)?.value;
                        children.push(self.visit(part, Some(id))?);
                    }
                }
                self.steps[id].post_support = Some(post_support);
                self.steps[id].post_potential = Some(post_potential);
                self.steps[id].split = Some(map_split(&split, &node.rows, &node.cols));
                children.push(self.visit(rest, Some(id))?);
                match split.kind {
                    SplitKind::Rect => Branch::Rect,
                    SplitKind::TdDrop => Branch::TdDrop,
                }
            }
        };

        let direct: usize = own.iter().map(Rectangle::size).sum();
        let below: usize = children.iter().map(|&c| self.steps[c].subtree_coverage).sum();
        self.blocks.extend(own.iter().cloned());
        let step = &mut self.steps[id];
        step.branch = branch;
        step.blocks = own;
        step.children = children;
        step.subtree_coverage = direct + below;
        step.ledger = ledger_value(support, pot, lambda, step.td, self.opts.ledger_constant);
        Ok(id)
    }
}

pub fn extract_blocky(a: &BooleanMatrix, f: &Factorization) -> Result<(BlockyCover, ExtractionTrace)> {
    extract_blocky_with(a, f, &ExtractOptions::default())
}

pub fn extract_blocky_with(
    a: &BooleanMatrix,
    f: &Factorization,
    opts: &ExtractOptions,
) -> Result<(BlockyCover, ExtractionTrace)> {
    ensure_valid(a, f)?;
    let mut ex = Extractor { opts: *opts, steps: Vec::new(), blocks: Vec::new() };
    let root = Node { a: a.clone(), f: f.clone(), rows: (0..a.rows()).collect(), cols: (0..a.cols()).collect() };
    ex.visit(root, None)?;
    let cover = BlockyCover::new(ex.blocks);
    let coverage = cover_support(a, &cover).map_err(|e| Error::Invariant(format!("extracted cover is invalid: {e}")))?;
    if coverage != ex.steps[0].subtree_coverage {
        return Err(Error::Invariant("cover size disagrees with the trace".into()));
    }
    let trace = ExtractionTrace {
        rows: a.rows(),
        cols: a.cols(),
        support: a.support_size(),
        lambda: f.lambda(),
        ledger_constant: opts.ledger_constant,
        steps: ex.steps,
        cover: cover.clone(),
        coverage,
    };
    Ok((cover, trace))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerFlag {
    pub step: usize,
    pub reason: String,
}

/// Re-checks every step of a trace: realized subtree coverage against the
/// ledger value `b(F, Π, d)` (recomputed with `constant`), exact coverage at
/// base cases, and the identities `b(1, Π, d) = 1`, `b(F, Π, 1) = F` and
/// `b(F, F/lambda^2, d) = F`.
pub fn guarantee_ledger(trace: &ExtractionTrace, constant: f64) -> Vec<LedgerFlag> {
    let mut flags = Vec::new();
    let mut flag = |step: usize, reason: String| flags.push(LedgerFlag { step, reason });
    for s in &trace.steps {
        let b = ledger_value(s.support, s.potential, s.lambda, s.td, constant);
        let cov = s.subtree_coverage as f64;
        if cov < b - 1e-9 * b.abs().max(1.0) {
            flag(s.id, format!("coverage {} below ledger value {b}", s.subtree_coverage));
        }
        let must_cover_all = matches!(s.branch, Branch::ZeroBase | Branch::BlockyBase)
            || s.support == 1
            || (s.td_exact && s.td <= 1)
            || s.potential <= s.support as f64 / (s.lambda * s.lambda) + 1e-9;
        if must_cover_all && s.subtree_coverage != s.support {
            flag(s.id, format!("base case covers {} of {} ones", s.subtree_coverage, s.support));
        }
        let direct: usize = s.blocks.iter().map(Rectangle::size).sum();
        let below: usize = s.children.iter().map(|&c| trace.steps[c].subtree_coverage).sum();
        if direct + below != s.subtree_coverage {
            flag(s.id, "subtree coverage does not add up".into());
        }
    }
    flags
}

/// A block of a cover certified to have `2n|S| >= coverage` and
/// `2m|T| >= coverage`, i.e. `|S| >= c'F/(2n)` and `|T| >= c'F/(2m)` with
/// `c' = coverage / F`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorollaryRectangle {
    /// Position of the block in the cover.
    #[serde(with = "crate::io::one_based_index")]
    pub block: usize,
    pub rectangle: Rectangle,
    pub s: usize,
    pub t: usize,
    pub coverage: usize,
    pub support: usize,
    /// `c'F / (2n)` and `c'F / (2m)`.
    pub row_threshold: f64,
    pub col_threshold: f64,
}

impl CorollaryRectangle {
    pub fn certified(&self, m: usize, n: usize) -> bool {
        2 * n * self.s >= self.coverage && 2 * m * self.t >= self.coverage
    }
}

/// Picks the first block of `cover` meeting both size thresholds. Blocks
/// failing the row threshold cover fewer than `coverage/2` ones in total (their
/// column sets are disjoint), likewise for columns, so one always survives.
pub fn corollary_rectangle(a: &BooleanMatrix, cover: &BlockyCover) -> Result<CorollaryRectangle> {
    let coverage = cover_support(a, cover)?;
    if coverage == 0 {
        return Err(Error::Precondition("cover has no 1-entries".into()));
    }
    let (m, n) = a.shape();
    let (k, block) = cover
        .blocks
        .iter()
        .enumerate()
        .find(|(_, b)| 2 * n * b.rows.len() >= coverage && 2 * m * b.cols.len() >= coverage)
        .ok_or_else(|| Error::Invariant("no block meets both thresholds".into()))?;
    Ok(CorollaryRectangle {
        block: k,
        rectangle: block.clone(),
        s: block.rows.len(),
        t: block.cols.len(),
        coverage,
        support: a.support_size(),
        row_threshold: coverage as f64 / (2 * n) as f64,
        col_threshold: coverage as f64 / (2 * m) as f64,
    })
}
