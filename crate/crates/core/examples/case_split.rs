//! The split around a pivotal row: a dense block or a part of lower
//! threshold dimension.

use blocky::factor::pivotal_row;
use blocky::families::{generate, FamilySpec};
use blocky::structure::lemma_split;

fn main() -> blocky::Result<()> {
    for seed in 0..6 {
        let spec = FamilySpec::NestedBlockyDifference { m: 24, n: 24, blocks: 3, seed, carve: None };
        let inst = generate(&spec)?;
        let f = inst.factorization.as_ref().expect("witness");
        if inst.matrix.is_zero() {
            continue;
        }
        let i = pivotal_row(&inst.matrix, f)?.row;
        let s = lemma_split(&inst.matrix, f, i)?;
        println!(
            "seed {seed}: row {} -> {:?}, keeps {} of {} ones, complement {}",
            i + 1,
            s.kind,
            s.retained_ones,
            s.delta_block_ones,
            s.complement_ones
        );
    }
    Ok(())
}
