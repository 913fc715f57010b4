//! Re-derives every branch decision of extraction traces from the node's
//! matrix and factorization.

mod common;

use blocky::extract::{extract_blocky, Branch, ExtractionTrace};
use blocky::factor::Factorization;
use blocky::families::{generate, regression_corpus, standard_corpus, FamilySpec};
use blocky::matrix::BooleanMatrix;
use blocky::structure::SplitKind;
use common::*;

fn audit(a0: &BooleanMatrix, f0: &Factorization, trace: &ExtractionTrace) -> Vec<String> {
    let mut problems = Vec::new();
    let mut visited = 0;
    replay(a0, f0, trace, |id, a, f| {
        visited += 1;
        let s = &trace.steps[id];
        let mut fail = |msg: String| problems.push(format!("step {id}: {msg}"));
        if s.support != a.support_size() {
            fail(format!("support {} vs {}", s.support, a.support_size()));
        }
        if (s.potential - potential(a, f)).abs() > 1e-6 {
            fail("potential".into());
        }
        let rows_of = |i: usize| -> Vec<usize> { (0..a.cols()).filter(|&j| a.get(i, j)).collect() };
        let mass = |r: &[usize]| -> usize { r.iter().map(|&j| a.col_count(j)).sum() };
        let l2 = f.lambda() * f.lambda();
        let expected = if a.is_zero() {
            Branch::ZeroBase
        } else if is_blocky(a) {
            Branch::BlockyBase
        } else {
            let guard = (0..a.rows()).find(|&i| {
                let r = rows_of(i);
                let d = delta(f, i);
                let d_mass: usize = d.iter().map(|&x| a.row_count(x)).sum();
                !r.is_empty() && d_mass as f64 > 4.0 * l2 * mass(&r) as f64 + f.tol()
            });
            match guard {
                Some(i) => {
                    if s.projection_row != Some(s.rows[i]) {
                        fail(format!("projection row {:?}, expected {}", s.projection_row, s.rows[i]));
                    }
                    Branch::Projection
                }
                None => {
                    // largest inside/mass, compared by cross-multiplication
                    let mut best: Option<(usize, usize, usize)> = None;
                    for i in (0..a.rows()).filter(|&i| a.row_count(i) > 0) {
                        let r = rows_of(i);
                        let (inside, m) = (block_ones(a, &delta(f, i), &r), mass(&r));
                        if best.is_none_or(|(_, bi, bm)| inside * bm > bi * m) {
                            best = Some((i, inside, m));
                        }
                    }
                    let (i, _, _) = best.expect("nonzero");
                    let sp = s.split.as_ref().expect("split recorded");
                    let r = rows_of(i);
                    let d = delta(f, i);
                    let j = *r.iter().min_by_key(|&&t| (d.iter().filter(|&&x| a.get(x, t)).count(), t)).unwrap();
                    let dense: Vec<usize> = d.iter().copied().filter(|&x| a.get(x, j)).collect();
                    let rect = 2 * block_ones(a, &dense, &r) > block_ones(a, &d, &r);
                    let to_orig = |v: &[usize], map: &[usize]| -> Vec<usize> { v.iter().map(|&x| map[x]).collect() };
                    if sp.pivot_row != Some(s.rows[i]) || sp.pivot_col != Some(s.cols[j]) {
                        fail(format!("pivot ({:?}, {:?}), expected ({}, {})", sp.pivot_row, sp.pivot_col, s.rows[i], s.cols[j]));
                    }
                    if sp.delta != to_orig(&d, &s.rows) || sp.pivot_cols != to_orig(&r, &s.cols) {
                        fail("delta or pivot columns".into());
                    }
                    let part: Vec<usize> = if rect {
                        dense
                    } else {
                        d.iter().copied().filter(|&x| !a.get(x, j)).collect()
                    };
                    if sp.row_part != to_orig(&part, &s.rows) {
                        fail("row part".into());
                    }
                    match (rect, sp.kind) {
                        (true, SplitKind::Rect) => {
                            let ok = s.blocks.len() == 1
                                && s.blocks[0].rows.iter().all(|x| sp.row_part.contains(x))
                                && s.blocks[0].cols.iter().all(|x| sp.pivot_cols.contains(x));
                            if !ok {
                                fail("rectangle outside S x R_i".into());
                            }
                            Branch::Rect
                        }
                        (false, SplitKind::TdDrop) => Branch::TdDrop,
                        _ => {
                            fail(format!("split kind {:?}", sp.kind));
                            s.branch
                        }
                    }
                }
            }
        };
        if s.branch != expected {
            fail(format!("branch {:?}, expected {expected:?}", s.branch));
        }
    });
    if visited != trace.steps.len() {
        problems.push(format!("replayed {visited} of {} steps", trace.steps.len()));
    }
    problems
}

#[test]
fn regression_traces_follow_the_branch_rules() {
    for (k, spec) in regression_corpus().iter().enumerate() {
        let inst = generate(spec).unwrap();
        let f = inst.factorization.as_ref().unwrap();
        let (_, trace) = extract_blocky(&inst.matrix, f).unwrap();
        let problems = audit(&inst.matrix, f, &trace);
        assert!(problems.is_empty(), "instance {k}: {problems:?}");
    }
}

#[test]
fn traces_with_projections_follow_the_branch_rules() {
    let mut projections = 0;
    for (name, spec) in standard_corpus() {
        if !matches!(spec, FamilySpec::NestedBlockyDifference { carve: Some(_), .. }) {
            continue;
        }
        let inst = generate(&spec).unwrap();
        let f = inst.factorization.as_ref().unwrap();
        let (_, trace) = extract_blocky(&inst.matrix, f).unwrap();
        projections += trace.steps.iter().filter(|s| s.branch == Branch::Projection).count();
        let problems = audit(&inst.matrix, f, &trace);
        assert!(problems.is_empty(), "{name}: {problems:?}");
    }
    assert!(projections > 0);
}

#[test]
fn group_lift_traces_follow_the_branch_rules() {
    for (name, spec) in standard_corpus().into_iter().filter(|(_, s)| matches!(s, FamilySpec::GroupLiftRandom { k: 1..=4, .. })) {
        let inst = generate(&spec).unwrap();
        let f = inst.factorization.as_ref().unwrap();
        let (_, trace) = extract_blocky(&inst.matrix, f).unwrap();
        let problems = audit(&inst.matrix, f, &trace);
        assert!(problems.is_empty(), "{name}: {problems:?}");
    }
}
