//! Lower bound on the gamma-2 norm of half-graphs via the cyclic interval matrix.

use blocky::gamma2::halfgraph_lower_bound;

fn main() -> blocky::Result<()> {
    println!("{:>6} {:>10} {:>14}", "n", "bound", "ln(n)/(2 pi)");
    for p in 0..=12 {
        let n = 1usize << p;
        let v = halfgraph_lower_bound(n)?;
        println!("{n:>6} {v:>10.5} {:>14.5}", (n as f64).ln() / (2.0 * std::f64::consts::PI));
    }
    Ok(())
}
