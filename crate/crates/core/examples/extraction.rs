//! Extract a blocky cover, audit the trace and pick one large rectangle.

use std::collections::BTreeMap;

use blocky::extract::{corollary_rectangle, extract_blocky, guarantee_ledger, DEFAULT_LEDGER_CONSTANT};
use blocky::families::{generate, FamilySpec};

fn main() -> blocky::Result<()> {
    let spec = FamilySpec::NestedBlockyDifference { m: 40, n: 48, blocks: 5, seed: 2, carve: None };
    let inst = generate(&spec)?;
    let f = inst.factorization.as_ref().expect("witness");
    let (cover, trace) = extract_blocky(&inst.matrix, f)?;

    println!("covered {} of {} ones with {} blocks", trace.coverage, trace.support, cover.len());
    let mut branches = BTreeMap::new();
    for s in &trace.steps {
        *branches.entry(format!("{:?}", s.branch)).or_insert(0) += 1;
    }
    println!("branches: {branches:?}");
    println!("ledger flags: {}", guarantee_ledger(&trace, DEFAULT_LEDGER_CONSTANT).len());

    let r = corollary_rectangle(&inst.matrix, &cover)?;
    println!(
        "block {}: {} x {} (thresholds {:.2} and {:.2})",
        r.block + 1,
        r.s,
        r.t,
        r.row_threshold,
        r.col_threshold
    );
    Ok(())
}
