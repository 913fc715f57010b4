//! Largest all-ones rectangle, exact and greedy.

use blocky::families::{generate, FamilySpec};
use blocky::structure::{max_one_rectangle, RectMode};

fn main() -> blocky::Result<()> {
    let inst = generate(&FamilySpec::GroupLiftRandom { k: 4, density: 0.6, seed: 11 })?;
    for mode in [RectMode::Exact, RectMode::Greedy] {
        let r = max_one_rectangle(&inst.matrix, mode)?;
        println!("{mode:?}: {} x {} = {}", r.rows.len(), r.cols.len(), r.size());
    }
    Ok(())
}
