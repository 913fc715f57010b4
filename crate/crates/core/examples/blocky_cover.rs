//! Recognize a blocky matrix, read off its rectangles and build the
//! canonical 1-factorization.

use blocky::cover::is_blocky;
use blocky::factor::{canonical_blocky_factorization, verify};
use blocky::matrix::BooleanMatrix;

fn main() -> blocky::Result<()> {
    let a = BooleanMatrix::from_rows(&[
        [1, 1, 0, 0, 0],
        [0, 0, 1, 1, 1],
        [1, 1, 0, 0, 0],
        [0, 0, 0, 0, 0],
    ])?;
    let cover = is_blocky(&a).expect("rows share patterns");
    let one_based = |v: &[usize]| v.iter().map(|x| x + 1).collect::<Vec<_>>();
    for (k, b) in cover.blocks.iter().enumerate() {
        println!("block {}: rows {:?} x cols {:?}", k + 1, one_based(&b.rows), one_based(&b.cols));
    }
    let f = canonical_blocky_factorization(&cover, a.rows(), a.cols())?;
    println!("lambda = {}, violations = {}", f.lambda(), verify(&a, &f).len());

    let staircase = BooleanMatrix::from_rows(&[[1, 0], [1, 1]])?;
    println!("[[1,0],[1,1]] blocky: {}", is_blocky(&staircase).is_some());
    Ok(())
}
