//! Fold a few RNA sequences and print the predicted structure.
//!
//! Run with `cargo run --example fold_sequence`.

use premirna::fold::{fold, pairing_stats};
use premirna::sequence::RnaSequence;

fn main() -> premirna::Result<()> {
    let inputs = [
        ("perfect_hairpin", "GGGGGAAAACCCCC"),
        ("wobbly", "GGGUGAAAACACCC"),
        ("no_structure", "AAAAAAACAAAAAA"),
        (
            "longer",
            "GCGCGAUGCGGGGGAAAACCCCCAUGCAUGCGGGAAACCCUAGCAUG",
        ),
    ];
    for (id, bases) in inputs {
        let seq = RnaSequence::new(id, bases)?;
        let ss = fold(&seq);
        println!("{id}");
        println!("  {}", seq.to_string_bases());
        println!("  {}", ss.dot_bracket);
        println!(
            "  energy {:.1}, {} stem(s), {} loop(s), hairpin length {}",
            ss.energy, ss.stem_count, ss.loop_count, ss.hairpin_length
        );
        let stats = pairing_stats(&ss);
        println!(
            "  pairs: {} A-U, {} G-C, {} G-U\n",
            stats["|A-U|"], stats["|G-C|"], stats["|G-U|"]
        );
    }
    Ok(())
}
