//! Potential, Δ-sets and the pivotal row of a nested blocky difference.

use blocky::factor::{delta_set, pivotal_row, potential};
use blocky::families::{generate, FamilySpec};

fn main() -> blocky::Result<()> {
    let spec = FamilySpec::NestedBlockyDifference { m: 16, n: 16, blocks: 3, seed: 7, carve: None };
    let inst = generate(&spec)?;
    let (a, f) = (&inst.matrix, inst.factorization.as_ref().expect("differences carry a witness"));

    let p = potential(a, f)?;
    println!("F = {}, lambda = {}", a.support_size(), f.lambda());
    println!("{:.3} <= potential {:.3} <= {:.0}", p.lower, p.value, p.upper);

    let pivot = pivotal_row(a, f)?;
    let delta = delta_set(f, pivot.row)?;
    println!(
        "pivotal row {}: |delta| = {}, inside {} of column mass {} (ratio {:.3})",
        pivot.row + 1,
        delta.len(),
        pivot.inside,
        pivot.column_mass,
        pivot.ratio()
    );
    Ok(())
}
