//! Rebalance a skewed dataset by clustering the majority class and keeping
//! its most self-similar cluster.
//!
//! Run with `cargo run --example kmeans_undersample`.

use ndarray::Array2;
use premirna::balance::{kmeans, undersample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> premirna::Result<()> {
    // 300 majority-class points: one coherent clump plus scattered noise
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut rows = Vec::new();
    for _ in 0..120 {
        rows.push(2.0 + rng.gen_range(-0.4..0.4));
        rows.push(-1.0 + rng.gen_range(-0.4..0.4));
    }
    for _ in 0..180 {
        rows.push(rng.gen_range(-8.0..8.0));
        rows.push(rng.gen_range(-8.0..8.0));
    }
    let majority = Array2::from_shape_vec((300, 2), rows).unwrap();

    let km = kmeans(&majority, 5, 0)?;
    println!("k-means inertia per iteration: {:?}", km.inertia_history);

    let n_minority = 60;
    let picked = undersample(&majority, n_minority, 5, 0)?;
    let clump_hits = picked.iter().filter(|&&i| i < 120).count();
    println!(
        "kept {} of 300 majority examples to match {} minority examples",
        picked.len(),
        n_minority
    );
    println!("{clump_hits} of them come from the coherent clump");
    Ok(())
}
