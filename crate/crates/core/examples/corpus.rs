//! Write a small corpus to a directory and load it back.

use blocky::families::FamilySpec;
use blocky::suite::{load_corpus, write_corpus};

fn main() -> blocky::Result<()> {
    let dir = std::env::temp_dir().join("blocky-corpus-example");
    let specs = vec![
        ("id5".to_owned(), FamilySpec::Identity { n: 5 }),
        ("hg6".to_owned(), FamilySpec::HalfGraph { n: 6 }),
        ("lift".to_owned(), FamilySpec::GroupLiftRandom { k: 3, density: 0.5, seed: 1 }),
    ];
    write_corpus(&dir, &specs)?;
    for e in load_corpus(&dir, 1e-9)? {
        let truth = e.sidecar.map(|s| s.truth).unwrap_or_default();
        println!(
            "{}: {}x{}, factorization: {}, known TD: {:?}",
            e.name,
            e.matrix.rows(),
            e.matrix.cols(),
            matches!(e.factorization, Some(Ok(_))),
            truth.td
        );
    }
    Ok(())
}
