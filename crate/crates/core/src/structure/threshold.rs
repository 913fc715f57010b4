//! Threshold dimension: the longest staircase `A(i_s, j_t) = 1 iff s >= t`.

use std::collections::HashMap;

use serde::Serialize;

use crate::matrix::{BitSet, BooleanMatrix};

/// Matrices whose deduplicated side lengths are at most this are solved
/// exactly without a node budget.
pub const TD_EXACT_LIMIT: usize = 24;
/// Node budget for the search above the exact limit.
pub const TD_NODE_BUDGET: usize = 200_000;

/// Row and column sequences forming a half-graph pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Staircase {
    #[serde(with = "crate::io::one_based")]
    pub rows: Vec<usize>,
    #[serde(with = "crate::io::one_based")]
    pub cols: Vec<usize>,
}

impl Staircase {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Checks `A(i_s, j_t) = 1 iff s >= t` and distinctness.
    pub fn holds_in(&self, a: &BooleanMatrix) -> bool {
        let distinct = |v: &[usize]| {
            let mut w = v.to_vec();
            w.sort_unstable();
            w.dedup();
            w.len() == v.len()
        };
        self.rows.len() == self.cols.len()
            && distinct(&self.rows)
            && distinct(&self.cols)
            && self.rows.iter().all(|&i| i < a.rows())
            && self.cols.iter().all(|&j| j < a.cols())
            && self.rows.iter().enumerate().all(|(s, &i)| {
                self.cols.iter().enumerate().all(|(t, &j)| a.get(i, j) == (s >= t))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThresholdDimension {
    /// Exact value, or the length of the witness when inexact.
    pub value: usize,
    /// Upper bound; equals `value` when exact.
    pub upper: usize,
    pub exact: bool,
    /// Present whenever `value >= 1`.
    pub witness: Option<Staircase>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct TdOptions {
    pub exact_limit: usize,
    pub node_budget: usize,
}

impl Default for TdOptions {
    fn default() -> Self {
        Self { exact_limit: TD_EXACT_LIMIT, node_budget: TD_NODE_BUDGET }
    }
}

pub fn threshold_dimension(a: &BooleanMatrix) -> ThresholdDimension {
    threshold_dimension_with(a, TdOptions::default())
}

/// Staircase rows have pairwise distinct nonzero patterns (and likewise for
/// columns), so duplicate and zero lines are dropped before searching.
fn reduce(a: &BooleanMatrix) -> (BooleanMatrix, Vec<usize>, Vec<usize>) {
    let mut seen: HashMap<&[u64], ()> = HashMap::new();
    let mut rows = Vec::new();
    for i in 0..a.rows() {
        let w = a.row_words(i);
        if w.iter().any(|&x| x != 0) && seen.insert(w, ()).is_none() {
            rows.push(i);
        }
    }
    let mut seen_cols: HashMap<Vec<u64>, ()> = HashMap::new();
    let mut cols = Vec::new();
    for j in 0..a.cols() {
        let c = a.col_set(j);
        let key: Vec<u64> = rows.iter().map(|&i| u64::from(c.contains(i))).collect();
        if key.iter().any(|&x| x != 0) && seen_cols.insert(key, ()).is_none() {
            cols.push(j);
        }
    }
    let b = a.restrict(&rows, &cols).expect("indices come from the matrix");
    (b, rows, cols)
}

/// Lines beyond this many (after deduplication) are only handled greedily.
const MASK_BITS: usize = 128;

fn bits(mut x: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (x != 0).then(|| {
            let i = x.trailing_zeros() as usize;
            x &= x - 1;
            i
        })
    })
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    lb: usize,
    ub: usize,
    /// First pair of a staircase of length `lb`.
    pick: Option<(usize, usize)>,
}

/// Depth-first search over staircase prefixes on a deduplicated matrix with at
/// most 128 rows and columns. A state is the pair (candidate rows, candidate
/// columns) as bit masks.
struct Search {
    rows: Vec<u128>,
    cols: Vec<u128>,
    memo: HashMap<(u128, u128), Entry>,
    nodes: usize,
    budget: usize,
}

impl Search {
    fn new(b: &BooleanMatrix, budget: usize) -> Self {
        let mask = |set: &BitSet| set.iter().fold(0u128, |acc, x| acc | 1 << x);
        Self {
            rows: (0..b.rows()).map(|i| mask(&b.row_set(i))).collect(),
            cols: b.col_sets().iter().map(mask).collect(),
            memo: HashMap::new(),
            nodes: 0,
            budget,
        }
    }

    /// Future steps only see a row through its pattern on `k` and a column
    /// through its pattern on `r`, so lines with an empty or repeated pattern
    /// are dropped, keeping the smallest index of each class. Dropping a
    /// repeated row never merges two distinct columns, so one pass per side
    /// suffices.
    fn canonical(&self, r: u128, k: u128) -> (u128, u128) {
        let keep = |set: u128, lines: &[u128], other: u128| {
            let mut pats: Vec<(u128, usize)> =
                bits(set).map(|x| (lines[x] & other, x)).filter(|&(p, _)| p != 0).collect();
            pats.sort_unstable();
            pats.dedup_by_key(|(p, _)| *p);
            pats.iter().fold(0u128, |acc, &(_, x)| acc | 1 << x)
        };
        let r2 = keep(r, &self.rows, k);
        (r2, keep(k, &self.cols, r2))
    }

    fn step(&self, r: u128, k: u128, i: usize, j: usize) -> (u128, u128) {
        self.canonical(r & self.cols[j] & !(1 << i), k & !self.rows[i])
    }

    /// Bounds on the longest staircase extension from candidate rows `r` (1
    /// on every chosen column) and candidate columns `k` (0 on every chosen
    /// row), both canonical. The result `(lb, ub)` is exact (`lb == ub`) or
    /// proves `ub < need`. `None` when the budget runs out.
    fn solve(&mut self, r: u128, k: u128, need: usize) -> Option<(usize, usize)> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        let known = self.memo.get(&(r, k)).copied();
        if let Some(e) = known {
            if e.lb == e.ub || e.ub < need {
                return Some((e.lb, e.ub));
            }
        }
        // staircase rows have distinct nonempty patterns on the chosen columns
        let bound = (r.count_ones().min(k.count_ones()) as usize).min(known.map_or(usize::MAX, |e| e.ub));
        if bound < need {
            self.record(r, k, Entry { lb: known.map_or(0, |e| e.lb), ub: bound, pick: known.and_then(|e| e.pick) });
            return Some((known.map_or(0, |e| e.lb), bound));
        }
        let mut best = Entry { lb: 0, ub: 0, pick: None };
        let mut loose = 0;
        'outer: for i in bits(r) {
            for j in bits(self.rows[i] & k) {
                if best.lb >= bound {
                    break 'outer;
                }
                let (r2, k2) = self.step(r, k, i, j);
                let (clb, cub) = self.solve(r2, k2, need.max(best.lb + 1) - 1)?;
                if clb + 1 > best.lb {
                    best.lb = clb + 1;
                    best.pick = Some((i, j));
                }
                if clb != cub {
                    loose = loose.max(cub + 1);
                }
            }
        }
        best.ub = if best.lb >= bound { best.lb } else { best.lb.max(loose) };
        self.record(r, k, best);
        let e = self.memo[&(r, k)];
        Some((e.lb, e.ub))
    }

    /// Keeps the larger lower bound (with its pick) and the smaller upper bound.
    fn record(&mut self, r: u128, k: u128, new: Entry) {
        let e = self.memo.entry((r, k)).or_insert(new);
        if new.lb > e.lb {
            e.lb = new.lb;
            e.pick = new.pick;
        }
        e.ub = e.ub.min(new.ub);
    }

    fn witness(&self, mut r: u128, mut k: u128) -> Staircase {
        let mut st = Staircase { rows: Vec::new(), cols: Vec::new() };
        while let Some(&Entry { pick: Some((i, j)), .. }) = self.memo.get(&(r, k)) {
            st.rows.push(i);
            st.cols.push(j);
            (r, k) = self.step(r, k, i, j);
        }
        st
    }
}

/// Builds a staircase by always taking the pair that keeps the most room.
fn greedy_staircase(b: &BooleanMatrix) -> Staircase {
    let row_sets: Vec<BitSet> = (0..b.rows()).map(|i| b.row_set(i)).collect();
    let mut r = BitSet::full(b.rows());
    let mut k = BitSet::full(b.cols());
    let mut st = Staircase { rows: Vec::new(), cols: Vec::new() };
    loop {
        let mut pick: Option<(usize, usize, usize)> = None;
        for i in r.iter() {
            for j in row_sets[i].intersection(&k).iter() {
                let mut r2 = r.intersection(b.col_set(j));
                r2.remove(i);
                let mut k2 = k.clone();
                k2.difference_with(&row_sets[i]);
                let room = r2.count().min(k2.count());
                if pick.is_none_or(|(_, _, best)| room > best) {
                    pick = Some((i, j, room));
                }
            }
        }
        let Some((i, j, _)) = pick else { break };
        st.rows.push(i);
        st.cols.push(j);
        r.intersect_with(b.col_set(j));
        r.remove(i);
        k.difference_with(&row_sets[i]);
    }
    st
}

/// Threshold dimension with a staircase witness. Exact when the deduplicated
/// matrix fits `opts.exact_limit` or the budgeted search completes; otherwise
/// a greedy lower bound and the distinct-line upper bound. Matrices with more
/// than 128 distinct rows or columns go straight to the greedy bound.
/// The all-zero matrix has threshold dimension 0.
pub fn threshold_dimension_with(a: &BooleanMatrix, opts: TdOptions) -> ThresholdDimension {
    let (b, row_map, col_map) = reduce(a);
    if b.rows() == 0 {
        return ThresholdDimension { value: 0, upper: 0, exact: true, witness: None };
    }
    let small = b.rows().max(b.cols()) <= opts.exact_limit;
    let map = |st: Staircase| Staircase {
        rows: st.rows.into_iter().map(|i| row_map[i]).collect(),
        cols: st.cols.into_iter().map(|j| col_map[j]).collect(),
    };
    let exact = if b.rows().max(b.cols()) <= MASK_BITS {
        let mut search = Search::new(&b, if small { usize::MAX } else { opts.node_budget });
        let full = |len: usize| if len == MASK_BITS { u128::MAX } else { (1u128 << len) - 1 };
        let (r, k) = search.canonical(full(b.rows()), full(b.cols()));
        let greedy = greedy_staircase(&b);
        search.solve(r, k, greedy.len() + 1).map(|(lb, ub)| {
            if lb == ub && lb > greedy.len() {
                (lb, search.witness(r, k))
            } else {
                (greedy.len(), greedy)
            }
        })
    } else {
        None
    };
    match exact {
        Some((d, witness)) => {
            debug_assert_eq!(witness.len(), d);
            ThresholdDimension { value: d, upper: d, exact: true, witness: Some(map(witness)) }
        }
        None => {
            let witness = map(greedy_staircase(&b));
            let upper = b.rows().min(b.cols());
            ThresholdDimension {
                value: witness.len(),
                upper,
                exact: witness.len() == upper,
                witness: Some(witness),
            }
        }
    }
}
