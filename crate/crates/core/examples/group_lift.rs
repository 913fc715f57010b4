//! Fourier algebra norm of a function on Z_2^k and its translation matrix.

use blocky::cover::is_blocky;
use blocky::gamma2::{group_lift, GroupFunction};

fn main() -> blocky::Result<()> {
    // indicator of a subgroup coset: norm 1, blocky lift
    let coset = GroupFunction::coset(3, &[1, 2], 4);
    let (a, f) = group_lift(&coset)?;
    println!("coset: |f|_A = {}, lambda = {}, blocky = {}", coset.algebra_norm(), f.lambda(), is_blocky(&a).is_some());

    // all points except the origin
    let g = GroupFunction::from_fn(2, |x| x != 0);
    let (a, f) = group_lift(&g)?;
    println!("1 - delta_0: |f|_A = {}, coefficients {:?}", g.algebra_norm(), g.coeffs());
    println!("lift is {}x{} with inner dimension {}", a.rows(), a.cols(), f.dim());
    Ok(())
}
