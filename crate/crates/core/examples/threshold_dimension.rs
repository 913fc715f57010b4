//! Threshold dimension with a staircase witness.

use blocky::families::{generate, FamilySpec};
use blocky::matrix::BooleanMatrix;
use blocky::structure::threshold_dimension;

fn main() -> blocky::Result<()> {
    for n in [1, 4, 9] {
        let td = threshold_dimension(&BooleanMatrix::half_graph(n));
        println!("half graph {n}: TD {} (exact: {})", td.value, td.exact);
    }
    let inst = generate(&FamilySpec::StaircasePattern { d: 5, m: 20, n: 16, seed: 3 })?;
    let td = threshold_dimension(&inst.matrix);
    let w = td.witness.expect("nonzero matrix");
    let one_based = |v: &[usize]| v.iter().map(|x| x + 1).collect::<Vec<_>>();
    println!("shuffled staircase: TD {}, rows {:?}, cols {:?}", td.value, one_based(&w.rows), one_based(&w.cols));
    assert!(w.holds_in(&inst.matrix));
    Ok(())
}
