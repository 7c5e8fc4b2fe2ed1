//! Dinucleotide-preserving sequence shuffling (Altschul-Erikson).
//!
//! Produces a random permutation of the sequence with exactly the same set
//! of adjacent-pair (dinucleotide) counts, hence the same mononucleotide
//! counts and the same first and last base. Used for folding z-score
//! backgrounds and for synthetic negative examples.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::sequence::{Base, RnaSequence};

/// Shuffles `seq` preserving all dinucleotide counts.
///
/// The walk-through-edge-graph construction: each base is a vertex, each
/// adjacent pair an edge; a uniform random Eulerian path with the original
/// endpoints is drawn by sampling last-edge trees until they connect to the
/// final vertex, then permuting the remaining edges.
pub fn dinucleotide_shuffle<R: Rng>(seq: &RnaSequence, rng: &mut R) -> RnaSequence {
    let bases: Vec<Base> = seq.bases().collect();
    let shuffled = shuffle_bases(&bases, rng);
    let s: String = shuffled.iter().map(|b| b.to_char()).collect();
    RnaSequence::new(seq.id().to_string(), &s).expect("shuffle preserves validity")
}

fn shuffle_bases<R: Rng>(bases: &[Base], rng: &mut R) -> Vec<Base> {
    let n = bases.len();
    if n < 3 {
        return bases.to_vec();
    }
    let first = bases[0].index();
    let last = bases[n - 1].index();

    // edge multiset: edges[v] = successors of v in order of appearance
    let mut edges: [Vec<usize>; 4] = Default::default();
    for w in bases.windows(2) {
        edges[w[0].index()].push(w[1].index());
    }

    // pick last edges for every vertex except the final one until the
    // last-edge graph connects all used vertices to `last`
    let mut last_edge: [Option<usize>; 4] = [None; 4];
    loop {
        for v in 0..4 {
            last_edge[v] = if v != last && !edges[v].is_empty() {
                Some(edges[v][rng.gen_range(0..edges[v].len())])
            } else {
                None
            };
        }
        let connected = (0..4).all(|v| {
            if v == last || edges[v].is_empty() {
                return true;
            }
            // follow last edges; the path must reach `last` (cycle detection
            // by bounded walk length)
            let mut cur = v;
            for _ in 0..8 {
                match last_edge[cur] {
                    Some(next) => {
                        cur = next;
                        if cur == last {
                            return true;
                        }
                    }
                    None => return cur == last,
                }
            }
            false
        });
        if connected {
            break;
        }
    }

    // permute each vertex's edges with its designated last edge at the end
    let mut ordered: [Vec<usize>; 4] = Default::default();
    for v in 0..4 {
        let mut pool = edges[v].clone();
        if let Some(le) = last_edge[v] {
            let pos = pool.iter().position(|&e| e == le).unwrap();
            pool.swap_remove(pos);
            pool.shuffle(rng);
            pool.push(le);
        } else {
            pool.shuffle(rng);
        }
        ordered[v] = pool;
    }

    // walk the Eulerian path
    let mut next_idx = [0usize; 4];
    let mut out = Vec::with_capacity(n);
    let mut cur = first;
    out.push(Base::ALL[cur]);
    for _ in 1..n {
        let e = ordered[cur][next_idx[cur]];
        next_idx[cur] += 1;
        out.push(Base::ALL[e]);
        cur = e;
    }
    out
}

/// Dinucleotide count table indexed `[from][to]`.
pub fn dinucleotide_counts(seq: &RnaSequence) -> [[usize; 4]; 4] {
    let mut counts = [[0usize; 4]; 4];
    let bases: Vec<Base> = seq.bases().collect();
    for w in bases.windows(2) {
        counts[w[0].index()][w[1].index()] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn seq(s: &str) -> RnaSequence {
        RnaSequence::new("t", s).unwrap()
    }

    #[test]
    fn homopolymer_is_fixed_point() {
        let s = seq("AAAAAAAA");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(dinucleotide_shuffle(&s, &mut rng), s);
    }

    #[test]
    fn deterministic_given_seed() {
        let s = seq("GGGAUAUCCCAAGGCUAGCUGAUC");
        let a = dinucleotide_shuffle(&s, &mut ChaCha8Rng::seed_from_u64(9));
        let b = dinucleotide_shuffle(&s, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn shuffles_actually_move_bases() {
        let s = seq("GGGGGAAAAACCCCCUUUAUGCAUGC");
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut changed = false;
        for _ in 0..10 {
            if dinucleotide_shuffle(&s, &mut rng) != s {
                changed = true;
            }
        }
        assert!(changed);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(128))]
        #[test]
        fn preserves_dinucleotide_counts(
            bases in proptest::collection::vec(0u8..4, 1..80),
            shuffle_seed in 0u64..1000,
        ) {
            let s: String = bases
                .iter()
                .map(|&b| Base::ALL[b as usize].to_char())
                .collect();
            let rna = seq(&s);
            let mut rng = ChaCha8Rng::seed_from_u64(shuffle_seed);
            let shuffled = dinucleotide_shuffle(&rna, &mut rng);
            proptest::prop_assert_eq!(
                dinucleotide_counts(&rna),
                dinucleotide_counts(&shuffled)
            );
            proptest::prop_assert_eq!(rna.base(0), shuffled.base(0));
            proptest::prop_assert_eq!(rna.base(rna.len() - 1), shuffled.base(shuffled.len() - 1));
        }
    }
}
