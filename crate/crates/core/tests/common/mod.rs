//! Reference computations written directly from the definitions. They share
//! no code with the library beyond the matrix and factorization containers.
#![allow(dead_code)]

use blocky::cover::BlockyCover;
use blocky::extract::{Branch, ExtractionTrace};
use blocky::factor::project_columns;
use blocky::factor::Factorization;
use blocky::matrix::BooleanMatrix;

pub const TOL: f64 = 1e-9;

pub fn dense(a: &BooleanMatrix) -> Vec<Vec<bool>> {
    (0..a.rows()).map(|i| (0..a.cols()).map(|j| a.get(i, j)).collect()).collect()
}

fn row(f: &Factorization, i: usize) -> Vec<f64> {
    (0..f.dim()).map(|k| f.u()[(i, k)]).collect()
}

fn col(f: &Factorization, j: usize) -> Vec<f64> {
    (0..f.dim()).map(|k| f.v()[(k, j)]).collect()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `<u_r, u_s>` for all pairs.
pub fn u_gram(f: &Factorization) -> Vec<Vec<f64>> {
    let rows: Vec<Vec<f64>> = (0..f.rows()).map(|i| row(f, i)).collect();
    rows.iter().map(|x| rows.iter().map(|y| dot(x, y)).collect()).collect()
}

pub fn v_gram(f: &Factorization) -> Vec<Vec<f64>> {
    let cols: Vec<Vec<f64>> = (0..f.cols()).map(|j| col(f, j)).collect();
    cols.iter().map(|x| cols.iter().map(|y| dot(x, y)).collect()).collect()
}

/// Entrywise reproduction within `tol` and the two norm bounds.
pub fn is_lambda_factorization(a: &BooleanMatrix, f: &Factorization, tol: f64) -> bool {
    if (f.rows(), f.cols()) != a.shape() {
        return false;
    }
    let rows: Vec<Vec<f64>> = (0..f.rows()).map(|i| row(f, i)).collect();
    let cols: Vec<Vec<f64>> = (0..f.cols()).map(|j| col(f, j)).collect();
    rows.iter().all(|u| dot(u, u).sqrt() <= 1.0 + tol)
        && cols.iter().all(|v| dot(v, v).sqrt() <= f.lambda() + tol)
        && (0..a.rows()).all(|i| {
            (0..a.cols()).all(|j| (dot(&rows[i], &cols[j]) - f64::from(u8::from(a.get(i, j)))).abs() <= tol)
        })
}

/// `sum_s ||u_s||^2 |R_s|`.
pub fn potential(a: &BooleanMatrix, f: &Factorization) -> f64 {
    (0..a.rows())
        .map(|s| {
            let u = row(f, s);
            dot(&u, &u) * (0..a.cols()).filter(|&j| a.get(s, j)).count() as f64
        })
        .sum()
}

/// Rows `s` with `<u_i, u_s>^2 >= 1/(2 lambda^2)`.
pub fn delta(f: &Factorization, i: usize) -> Vec<usize> {
    let ui = row(f, i);
    let thr = 1.0 / (2.0 * f.lambda() * f.lambda());
    (0..f.rows())
        .filter(|&s| {
            let ip = dot(&ui, &row(f, s));
            ip * ip >= thr
        })
        .collect()
}

pub fn block_ones(a: &BooleanMatrix, rows: &[usize], cols: &[usize]) -> usize {
    rows.iter().map(|&i| cols.iter().filter(|&&j| a.get(i, j)).count()).sum()
}

/// Rectangles are all-ones in `a`, pairwise row- and column-disjoint and in range.
pub fn cover_ok(a: &BooleanMatrix, cover: &BlockyCover) -> bool {
    let mut row_used = vec![false; a.rows()];
    let mut col_used = vec![false; a.cols()];
    for b in &cover.blocks {
        if b.rows.is_empty() || b.cols.is_empty() {
            return false;
        }
        for &i in &b.rows {
            if i >= a.rows() || std::mem::replace(&mut row_used[i], true) {
                return false;
            }
        }
        for &j in &b.cols {
            if j >= a.cols() || std::mem::replace(&mut col_used[j], true) {
                return false;
            }
        }
        if block_ones(a, &b.rows, &b.cols) != b.rows.len() * b.cols.len() {
            return false;
        }
    }
    true
}

pub fn cover_size(cover: &BlockyCover) -> usize {
    cover.blocks.iter().map(|b| b.rows.len() * b.cols.len()).sum()
}

/// Blocky iff any two nonzero rows have equal or disjoint supports.
pub fn is_blocky(a: &BooleanMatrix) -> bool {
    let d = dense(a);
    d.iter().all(|r| {
        d.iter().all(|s| r == s || r.iter().zip(s).all(|(x, y)| !(*x && *y)))
    })
}

/// Longest staircase by trying every ordered sequence of distinct rows and
/// every ordered sequence of distinct columns of each length.
pub fn td_by_sequences(a: &BooleanMatrix) -> usize {
    fn sequences(n: usize, len: usize) -> Vec<Vec<usize>> {
        if len == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for prefix in sequences(n, len - 1) {
            for x in 0..n {
                if !prefix.contains(&x) {
                    let mut p = prefix.clone();
                    p.push(x);
                    out.push(p);
                }
            }
        }
        out
    }
    let d = dense(a);
    let mut best = 0;
    for len in 1..=a.rows().min(a.cols()) {
        let rows = sequences(a.rows(), len);
        let cols = sequences(a.cols(), len);
        let found = rows.iter().any(|r| {
            cols.iter().any(|c| (0..len).all(|s| (0..len).all(|t| d[r[s]][c[t]] == (s >= t))))
        });
        if !found {
            break;
        }
        best = len;
    }
    best
}

/// `sum_a |2^-k sum_{x in S} (-1)^{a . x}|`, straight from the definition.
pub fn walsh_norm(k: usize, values: &[bool]) -> f64 {
    let n = 1usize << k;
    (0..n)
        .map(|a| {
            let s: f64 = (0..n)
                .filter(|&x| values[x])
                .map(|x| if (a & x).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
                .sum();
            (s / n as f64).abs()
        })
        .sum()
}

/// Sum of moduli of the DFT of the indicator of `{0..n-1}` in `Z_2n`.
pub fn cyclic_interval_norm(n: usize) -> f64 {
    let p = 2 * n;
    (0..p)
        .map(|a| {
            let (mut re, mut im) = (0.0, 0.0);
            for x in 0..n {
                let theta = -2.0 * std::f64::consts::PI * (a * x) as f64 / p as f64;
                re += theta.cos();
                im += theta.sin();
            }
            (re * re + im * im).sqrt() / p as f64
        })
        .sum()
}

/// Deterministic xorshift stream for test inputs.
pub struct XorShift(pub u64);

impl XorShift {
    pub fn next(&mut self) -> u64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        self.0
    }

    pub fn bit(&mut self) -> bool {
        self.next() >> 32 & 1 == 1
    }
}

/// Replays a trace from the root: projections through `project_columns`,
/// the other branches by restriction. Calls `visit` with each step's local
/// matrix and factorization.
pub fn replay(a: &BooleanMatrix, f: &Factorization, trace: &ExtractionTrace, mut visit: impl FnMut(usize, &BooleanMatrix, &Factorization)) {
    let mut stack = vec![(0usize, a.clone(), f.clone())];
    while let Some((id, a, f)) = stack.pop() {
        visit(id, &a, &f);
        let step = &trace.steps[id];
        for &child in &step.children {
            let cs = &trace.steps[child];
            let local = |sub: &[usize], sup: &[usize]| -> Vec<usize> {
                sub.iter().map(|x| sup.iter().position(|y| y == x).expect("child inside parent")).collect()
            };
            let (rows, cols) = (local(&cs.rows, &step.rows), local(&cs.cols, &step.cols));
            let (ca, cf) = if step.branch == Branch::Projection {
                let p = project_columns(&a, &f, local(&[step.projection_row.unwrap()], &step.rows)[0]).expect("replayable");
                let keep = local(&cs.cols, &p.kept_cols.iter().map(|&j| step.cols[j]).collect::<Vec<_>>());
                (p.matrix.restrict(&rows, &keep).unwrap(), p.factorization.restrict(&rows, &keep).unwrap())
            } else {
                (a.restrict(&rows, &cols).unwrap(), f.restrict(&rows, &cols).unwrap())
            };
            stack.push((child, ca, cf));
        }
    }
}
