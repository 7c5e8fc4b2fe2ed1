//! Extract the feature catalogue for one sequence and print the
//! 20-feature subset used by the small belief-network model.
//!
//! Run with `cargo run --example extract_features`.

use premirna::features::{extract_all, FeatureConfig, FeatureSubset, SELECTED_20};
use premirna::sequence::RnaSequence;

fn main() -> premirna::Result<()> {
    let seq = RnaSequence::new(
        "example",
        "GCAUGGGGGCAUAAGCGCAAAAGCGCUUAUGCCCCCAUGCAUG",
    )?;
    // trimmed sampling counts so the example runs in a blink; defaults are
    // n_samples = 200, n_shuffles = 100
    let config = FeatureConfig {
        n_samples: 50,
        n_shuffles: 20,
        ..FeatureConfig::default()
    };
    let features = extract_all(&seq, &config)?;
    println!("sequence {} ({} nt)\n", seq.id(), seq.len());
    println!("{:<18}{:>12}", "feature", "value");
    for name in SELECTED_20 {
        println!("{name:<18}{:>12.4}", features.get(name).unwrap());
    }
    println!(
        "\nfull catalogue: {} features ({:?} subset shown)",
        features.values().len(),
        FeatureSubset::Selected20
    );
    Ok(())
}
