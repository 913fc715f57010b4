//! Searching for a factorization witness by alternating least squares.

use blocky::gamma2::{als_search, AlsOptions};
use blocky::matrix::BooleanMatrix;

fn main() -> blocky::Result<()> {
    let id = BooleanMatrix::identity(6);
    let report = als_search(&id, &AlsOptions { lambda: 1.0, ..AlsOptions::default() })?;
    println!("identity 6 at lambda 1: found = {}", report.factorization.is_some());

    // gamma-2 of [[1,0],[1,1]] exceeds 1, so every restart fails
    let tri = BooleanMatrix::from_rows(&[[1, 0], [1, 1]])?;
    let report = als_search(&tri, &AlsOptions { lambda: 1.0, ..AlsOptions::default() })?;
    for run in &report.runs {
        println!("seed {}: error {:.2e} after {} iterations", run.seed, run.error, run.iterations);
    }
    Ok(())
}
