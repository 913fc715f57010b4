mod common;

use blocky::cover::{cover_support, is_blocky as recognize_blocky};
use blocky::extract::{extract_blocky, guarantee_ledger, DEFAULT_LEDGER_CONSTANT};
use blocky::factor::potential as lib_potential;
use blocky::families::{generate, FamilySpec};
use blocky::gamma2::{group_lift, GroupFunction};
use blocky::io::{format_factorization, format_matrix, parse_factorization, parse_matrix};
use blocky::matrix::BooleanMatrix;
use blocky::structure::{max_one_rectangle, threshold_dimension, RectMode};
use common::*;
use proptest::prelude::*;

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = BooleanMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(m, n)| {
        proptest::collection::vec(any::<bool>(), m * n).prop_map(move |bits| BooleanMatrix::from_fn(m, n, |i, j| bits[i * n + j]))
    })
}

fn nested() -> impl Strategy<Value = FamilySpec> {
    (4usize..=40, 4usize..=40, 1usize..=6, any::<u64>())
        .prop_map(|(m, n, blocks, seed)| FamilySpec::NestedBlockyDifference { m, n, blocks, seed, carve: None })
}

#[test]
fn blocky_iff_threshold_dimension_at_most_one_up_to_four_by_four() {
    for m in 1..=4 {
        for n in 1..=4 {
            for mask in 0u32..1 << (m * n) {
                let a = BooleanMatrix::from_fn(m, n, |i, j| mask >> (i * n + j) & 1 == 1);
                let blocky = recognize_blocky(&a).is_some();
                assert_eq!(blocky, threshold_dimension(&a).value <= 1, "{m}x{n} mask {mask}");
                assert_eq!(blocky, is_blocky(&a), "{m}x{n} mask {mask}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn restrict_composes(a in matrix(10, 10), seed in any::<u64>()) {
        let mut rng = XorShift(seed | 1);
        let pick = |len: usize, rng: &mut XorShift| -> Vec<usize> { (0..len).filter(|_| rng.bit()).collect() };
        let (s, t) = (pick(a.rows(), &mut rng), pick(a.cols(), &mut rng));
        let b = a.restrict(&s, &t).unwrap();
        let (s2, t2) = (pick(s.len(), &mut rng), pick(t.len(), &mut rng));
        let composed_rows: Vec<usize> = s2.iter().map(|&i| s[i]).collect();
        let composed_cols: Vec<usize> = t2.iter().map(|&j| t[j]).collect();
        prop_assert_eq!(b.restrict(&s2, &t2).unwrap(), a.restrict(&composed_rows, &composed_cols).unwrap());
    }

    #[test]
    fn cover_support_counts_the_indicator(spec in nested()) {
        let inst = generate(&spec).unwrap();
        let (cover, _) = extract_blocky(&inst.matrix, inst.factorization.as_ref().unwrap()).unwrap();
        let ind = cover.indicator(inst.matrix.rows(), inst.matrix.cols());
        prop_assert_eq!(cover_support(&inst.matrix, &cover).unwrap(), ind.support_size());
        prop_assert!(cover_ok(&inst.matrix, &cover));
    }

    #[test]
    fn exact_rectangle_dominates_greedy(a in matrix(9, 9)) {
        prop_assume!(!a.is_zero());
        let exact = max_one_rectangle(&a, RectMode::Exact).unwrap();
        let greedy = max_one_rectangle(&a, RectMode::Greedy).unwrap();
        prop_assert!(exact.is_one_rectangle(&a) && greedy.is_one_rectangle(&a));
        prop_assert!(exact.size() >= greedy.size());
        // every column subset, rows = common support
        let mut best = 0;
        for mask in 1u32..1 << a.cols() {
            let cols: Vec<usize> = (0..a.cols()).filter(|&j| mask >> j & 1 == 1).collect();
            let rows = (0..a.rows()).filter(|&i| cols.iter().all(|&j| a.get(i, j))).count();
            best = best.max(rows * cols.len());
        }
        prop_assert_eq!(exact.size(), best);
    }

    #[test]
    fn threshold_dimension_witness_is_a_staircase(a in matrix(12, 12)) {
        let td = threshold_dimension(&a);
        prop_assert_eq!(td.witness.as_ref().map_or(0, |w| w.len()), td.value);
        if let Some(w) = &td.witness {
            prop_assert!(w.holds_in(&a));
        }
        if a.rows() <= 5 && a.cols() <= 5 {
            prop_assert_eq!(td.value, td_by_sequences(&a));
        }
    }

    #[test]
    fn potential_sits_between_its_bounds(spec in nested()) {
        let inst = generate(&spec).unwrap();
        let f = inst.factorization.as_ref().unwrap();
        prop_assert!(is_lambda_factorization(&inst.matrix, f, TOL));
        let p = lib_potential(&inst.matrix, f).unwrap();
        prop_assert!((p.value - potential(&inst.matrix, f)).abs() <= 1e-9);
        prop_assert!(p.within_bounds(TOL));
    }

    #[test]
    fn extraction_is_valid_and_meets_the_ledger(spec in nested()) {
        let inst = generate(&spec).unwrap();
        let (cover, trace) = extract_blocky(&inst.matrix, inst.factorization.as_ref().unwrap()).unwrap();
        prop_assert!(cover_ok(&inst.matrix, &cover));
        prop_assert_eq!(cover_size(&cover), trace.coverage);
        prop_assert!(guarantee_ledger(&trace, DEFAULT_LEDGER_CONSTANT).is_empty());
    }

    #[test]
    fn text_formats_round_trip(spec in nested()) {
        let inst = generate(&spec).unwrap();
        let f = inst.factorization.as_ref().unwrap();
        prop_assert_eq!(parse_matrix(&format_matrix(&inst.matrix)).unwrap(), inst.matrix.clone());
        let back = parse_factorization(&format_factorization(f), TOL).unwrap();
        prop_assert_eq!(back.u(), f.u());
        prop_assert_eq!(back.v(), f.v());
        prop_assert_eq!(back.lambda(), f.lambda());
    }

    #[test]
    fn group_lift_norm_matches_the_definition(k in 1usize..=5, bits in any::<u32>()) {
        let values: Vec<bool> = (0..1usize << k).map(|x| bits >> x & 1 == 1).collect();
        prop_assume!(values.contains(&true));
        let g = GroupFunction::new(k, values.clone()).unwrap();
        let (a, f) = group_lift(&g).unwrap();
        prop_assert!((g.algebra_norm() - walsh_norm(k, &values)).abs() <= 1e-12);
        prop_assert!(is_lambda_factorization(&a, &f, TOL));
    }
}
