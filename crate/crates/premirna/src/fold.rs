//! Secondary-structure prediction by dynamic programming.
//!
//! The energy model is deliberately simple and fully self-contained: each
//! base pair contributes a fixed score (G-C = -3.0, A-U = -2.0, G-U = -1.0)
//! and every loop opening (a maximal run of unpaired bases enclosed by at
//! least one pair) costs +0.5. Structures are non-crossing with a minimum
//! hairpin loop of 3 unpaired bases. The DP finds the exact optimum of this
//! model over all valid structures; for short sequences this is verified
//! against exhaustive enumeration in the test suite.
//!
//! The same tables drive a stochastic traceback that samples structures with
//! Boltzmann-like weights over the traceback choices. This is an honest
//! approximation of a structure ensemble, not a partition function.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::sequence::{Base, RnaSequence};

/// Scoring constants of the folding model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    pub gc: f64,
    pub au: f64,
    pub gu: f64,
    /// Cost of opening a loop (one maximal enclosed unpaired run).
    pub loop_penalty: f64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        EnergyParams {
            gc: -3.0,
            au: -2.0,
            gu: -1.0,
            loop_penalty: 0.5,
        }
    }
}

impl EnergyParams {
    /// Pair score, or `None` if the two bases cannot pair.
    /// Watson-Crick (A-U, G-C) and wobble (G-U) pairs are allowed.
    pub fn pair_score(&self, a: Base, b: Base) -> Option<f64> {
        use Base::*;
        match (a, b) {
            (G, C) | (C, G) => Some(self.gc),
            (A, U) | (U, A) => Some(self.au),
            (G, U) | (U, G) => Some(self.gu),
            _ => None,
        }
    }
}

/// Minimum number of unpaired bases in a hairpin loop.
pub const MIN_HAIRPIN_LOOP: usize = 3;

/// A predicted secondary structure with the derived counts used by the
/// feature catalogue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondaryStructure {
    pub dot_bracket: String,
    /// Base pairs (i, j) with i < j, non-crossing, each index at most once.
    pub pairs: Vec<(usize, usize)>,
    pub energy: f64,
    /// Maximal runs of stacked adjacent pairs.
    pub stem_count: usize,
    /// Maximal unpaired runs enclosed by at least one pair.
    pub loop_count: usize,
    /// Span from the first to the last paired base (IH), 0 if unpaired.
    pub hairpin_length: usize,
    /// Longest hairpin loop (IL), 0 if none.
    pub loop_length: usize,
    /// Longest stem (IC).
    pub max_consecutive_pairs: usize,
    /// (|A-U|, |G-C|, |G-U|) pair counts.
    pub pair_type_counts: (usize, usize, usize),
    hairpin_loops: usize,
}

impl SecondaryStructure {
    /// Builds the structure record (dot-bracket, counts, energy) from a pair
    /// list. The pair list must be non-crossing with unique indices.
    pub fn from_pairs(seq: &RnaSequence, mut pairs: Vec<(usize, usize)>, params: &EnergyParams) -> Self {
        pairs.sort_unstable();
        let n = seq.len();
        let mut dot = vec!['.'; n];
        let mut partner = vec![usize::MAX; n];
        for &(i, j) in &pairs {
            dot[i] = '(';
            dot[j] = ')';
            partner[i] = j;
            partner[j] = i;
        }

        // enclosed unpaired runs
        let enclosed = enclosed_mask(n, &pairs);
        let mut loop_count = 0usize;
        let mut k = 0;
        while k < n {
            if partner[k] == usize::MAX && enclosed[k] {
                loop_count += 1;
                while k < n && partner[k] == usize::MAX {
                    k += 1;
                }
            } else {
                k += 1;
            }
        }

        // stems: runs of stacked pairs (i,j), (i+1,j-1)
        let mut stem_count = 0usize;
        let mut max_stack = 0usize;
        let mut idx = 0;
        while idx < pairs.len() {
            let mut run = 1;
            while idx + run < pairs.len() {
                let (a, b) = pairs[idx + run - 1];
                if pairs[idx + run] == (a + 1, b - 1) {
                    run += 1;
                } else {
                    break;
                }
            }
            stem_count += 1;
            max_stack = max_stack.max(run);
            idx += run;
        }

        // hairpin loops: interiors of pairs that enclose no other pair
        let mut hairpin_loops = 0usize;
        let mut loop_length = 0usize;
        for &(i, j) in &pairs {
            let interior_paired = (i + 1..j).any(|p| partner[p] != usize::MAX);
            if !interior_paired {
                hairpin_loops += 1;
                loop_length = loop_length.max(j - i - 1);
            }
        }

        let hairpin_length = match (pairs.first(), pairs.iter().map(|&(_, j)| j).max()) {
            (Some(&(first, _)), Some(last)) => last - first + 1,
            _ => 0,
        };

        let mut counts = (0usize, 0usize, 0usize);
        for &(i, j) in &pairs {
            use Base::*;
            match (seq.base(i), seq.base(j)) {
                (A, U) | (U, A) => counts.0 += 1,
                (G, C) | (C, G) => counts.1 += 1,
                (G, U) | (U, G) => counts.2 += 1,
                other => panic!("non-canonical pair {other:?}"),
            }
        }

        let energy = structure_energy(seq, &pairs, params);

        SecondaryStructure {
            dot_bracket: dot.into_iter().collect(),
            pairs,
            energy,
            stem_count,
            loop_count,
            hairpin_length,
            loop_length,
            max_consecutive_pairs: max_stack,
            pair_type_counts: counts,
            hairpin_loops,
        }
    }

    pub fn total_paired_bases(&self) -> usize {
        2 * self.pairs.len()
    }

    pub fn hairpin_loop_count(&self) -> usize {
        self.hairpin_loops
    }
}

fn enclosed_mask(n: usize, pairs: &[(usize, usize)]) -> Vec<bool> {
    let mut enclosed = vec![false; n];
    for &(i, j) in pairs {
        for e in enclosed.iter_mut().take(j).skip(i + 1) {
            *e = true;
        }
    }
    enclosed
}

/// Energy of an arbitrary valid structure under the model: sum of pair
/// scores plus one loop penalty per maximal enclosed unpaired run.
pub fn structure_energy(seq: &RnaSequence, pairs: &[(usize, usize)], params: &EnergyParams) -> f64 {
    let n = seq.len();
    let mut paired = vec![false; n];
    let mut e = 0.0;
    for &(i, j) in pairs {
        paired[i] = true;
        paired[j] = true;
        e += params
            .pair_score(seq.base(i), seq.base(j))
            .expect("non-canonical pair in structure");
    }
    let enclosed = enclosed_mask(n, pairs);
    let mut k = 0;
    while k < n {
        if !paired[k] && enclosed[k] {
            e += params.loop_penalty;
            while k < n && !paired[k] {
                k += 1;
            }
        } else {
            k += 1;
        }
    }
    e
}

const INF: f64 = f64::INFINITY;

/// DP tables over one sequence. Computed once, then reused for the MFE
/// traceback and for stochastic sampling.
pub struct FoldTables<'a> {
    seq: &'a RnaSequence,
    params: EnergyParams,
    n: usize,
    /// v[i][j]: min energy of [i..j] with (i,j) paired.
    v: Vec<f64>,
    /// Enclosed region [i..j] just after a closed element (next unpaired
    /// base opens a fresh loop run).
    r0: Vec<f64>,
    /// Enclosed region [i..j] with an unpaired run already open on the left.
    ru: Vec<f64>,
    /// Like r0/ru but required to contain at least one pair.
    p0: Vec<f64>,
    pu: Vec<f64>,
    /// f[k]: min energy of the exterior suffix [k..n).
    f: Vec<f64>,
}

impl<'a> FoldTables<'a> {
    pub fn compute(seq: &'a RnaSequence, params: EnergyParams) -> Self {
        let n = seq.len();
        let sz = n * n;
        let mut t = FoldTables {
            seq,
            params,
            n,
            v: vec![INF; sz],
            r0: vec![INF; sz.max(1)],
            ru: vec![INF; sz.max(1)],
            p0: vec![INF; sz.max(1)],
            pu: vec![INF; sz.max(1)],
            f: vec![0.0; n + 1],
        };
        t.fill();
        t
    }

    #[inline]
    fn at(&self, table: &[f64], i: usize, j: usize) -> f64 {
        table[i * self.n + j]
    }

    // Empty-region conventions: r* = 0, p* = infeasible.
    #[inline]
    fn r0_of(&self, i: usize, j: usize) -> f64 {
        if i > j {
            0.0
        } else {
            self.at(&self.r0, i, j)
        }
    }
    #[inline]
    fn ru_of(&self, i: usize, j: usize) -> f64 {
        if i > j {
            0.0
        } else {
            self.at(&self.ru, i, j)
        }
    }
    #[inline]
    fn p0_of(&self, i: usize, j: usize) -> f64 {
        if i > j {
            INF
        } else {
            self.at(&self.p0, i, j)
        }
    }
    #[inline]
    fn pu_of(&self, i: usize, j: usize) -> f64 {
        if i > j {
            INF
        } else {
            self.at(&self.pu, i, j)
        }
    }
    #[inline]
    fn v_of(&self, i: usize, j: usize) -> f64 {
        if i >= j {
            INF
        } else {
            self.at(&self.v, i, j)
        }
    }

    #[inline]
    fn pair_score(&self, i: usize, j: usize) -> Option<f64> {
        self.params.pair_score(self.seq.base(i), self.seq.base(j))
    }

    fn fill(&mut self) {
        let n = self.n;
        for span in 0..n {
            for i in 0..n - span {
                let j = i + span;
                // v first: it only needs strictly smaller spans.
                if span > MIN_HAIRPIN_LOOP {
                    if let Some(s) = self.pair_score(i, j) {
                        let gap = j - i - 1;
                        let hairpin = if gap >= MIN_HAIRPIN_LOOP {
                            self.params.loop_penalty
                        } else {
                            INF
                        };
                        let interior = self.p0_of(i + 1, j - 1);
                        let best = hairpin.min(interior);
                        if best < INF {
                            self.v[i * n + j] = s + best;
                        }
                    }
                }

                // r0/ru/p0/pu: may use v(i, l) for l <= j (v(i, j) is ready).
                let mut r0 = self.params.loop_penalty + self.ru_of(i + 1, j);
                let mut ru = self.ru_of(i + 1, j);
                let mut p0 = self.params.loop_penalty + self.pu_of(i + 1, j);
                let mut pu = self.pu_of(i + 1, j);
                for l in (i + MIN_HAIRPIN_LOOP + 1)..=j {
                    let v = self.v_of(i, l);
                    if v < INF {
                        let rest = self.r0_of(l + 1, j);
                        let total = v + rest;
                        r0 = r0.min(total);
                        ru = ru.min(total);
                        p0 = p0.min(total);
                        pu = pu.min(total);
                    }
                }
                self.r0[i * n + j] = r0;
                self.ru[i * n + j] = ru;
                self.p0[i * n + j] = p0;
                self.pu[i * n + j] = pu;
            }
        }

        // exterior: unpaired bases cost nothing outside any pair
        for k in (0..n).rev() {
            let mut best = self.f[k + 1];
            for l in (k + MIN_HAIRPIN_LOOP + 1)..n {
                let v = self.v_of(k, l);
                if v < INF {
                    best = best.min(v + self.f[l + 1]);
                }
            }
            self.f[k] = best;
        }
    }

    /// Minimum energy over all valid structures.
    pub fn mfe(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.f[0]
        }
    }

    /// Deterministic traceback of one optimal structure. Ties prefer the
    /// pairing branch and then the leftmost split.
    pub fn mfe_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        if self.n == 0 {
            return pairs;
        }
        // exterior walk
        let mut k = 0;
        while k < self.n {
            let target = self.f[k];
            let mut advanced = false;
            for l in (k + MIN_HAIRPIN_LOOP + 1)..self.n {
                let v = self.v_of(k, l);
                if v < INF && close(v + self.f[l + 1], target) {
                    self.trace_v(k, l, &mut pairs);
                    k = l + 1;
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                k += 1;
            }
        }
        pairs.sort_unstable();
        pairs
    }

    fn trace_v(&self, i: usize, j: usize, pairs: &mut Vec<(usize, usize)>) {
        pairs.push((i, j));
        let s = self.pair_score(i, j).expect("traceback hit invalid pair");
        let target = self.v_of(i, j) - s;
        // pairing branch preferred
        let interior = self.p0_of(i + 1, j - 1);
        if interior < INF && close(interior, target) {
            self.trace_run(i + 1, j - 1, true, true, pairs);
        }
        // otherwise hairpin: nothing inside
    }

    /// Traceback through an enclosed region. `fresh` = no run open on the
    /// left; `need_pair` = region must contain a pair.
    fn trace_run(&self, mut i: usize, j: usize, mut fresh: bool, mut need_pair: bool, pairs: &mut Vec<(usize, usize)>) {
        while i <= j {
            let target = match (fresh, need_pair) {
                (true, true) => self.p0_of(i, j),
                (true, false) => self.r0_of(i, j),
                (false, true) => self.pu_of(i, j),
                (false, false) => self.ru_of(i, j),
            };
            // pairing at i preferred, leftmost partner
            let mut paired = false;
            for l in (i + MIN_HAIRPIN_LOOP + 1)..=j {
                let v = self.v_of(i, l);
                if v < INF && close(v + self.r0_of(l + 1, j), target) {
                    self.trace_v(i, l, pairs);
                    i = l + 1;
                    fresh = true;
                    need_pair = false;
                    paired = true;
                    break;
                }
            }
            if !paired {
                // i unpaired; opening a run if none is open
                i += 1;
                fresh = false;
            }
        }
    }

    /// Samples one structure by stochastic traceback. At every decision
    /// point the options are weighted by exp(-E_opt / temperature) where
    /// E_opt is the best completion energy through that option.
    pub fn sample_pairs<R: Rng>(&self, temperature: f64, rng: &mut R) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        if self.n == 0 {
            return pairs;
        }
        let mut k = 0;
        while k < self.n {
            let mut opts: Vec<(Option<usize>, f64)> = vec![(None, self.f[k + 1])];
            for l in (k + MIN_HAIRPIN_LOOP + 1)..self.n {
                let v = self.v_of(k, l);
                if v < INF {
                    opts.push((Some(l), v + self.f[l + 1]));
                }
            }
            match pick(&opts, temperature, rng) {
                Some(l) => {
                    self.sample_v(k, l, temperature, rng, &mut pairs);
                    k = l + 1;
                }
                None => k += 1,
            }
        }
        pairs.sort_unstable();
        pairs
    }

    fn sample_v<R: Rng>(&self, i: usize, j: usize, temp: f64, rng: &mut R, pairs: &mut Vec<(usize, usize)>) {
        pairs.push((i, j));
        let gap = j - i - 1;
        let hairpin = if gap >= MIN_HAIRPIN_LOOP {
            self.params.loop_penalty
        } else {
            INF
        };
        let interior = self.p0_of(i + 1, j - 1);
        let opts = vec![(None, hairpin), (Some(0usize), interior)];
        if pick(&opts, temp, rng).is_some() {
            self.sample_run(i + 1, j - 1, true, true, temp, rng, pairs);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn sample_run<R: Rng>(
        &self,
        mut i: usize,
        j: usize,
        mut fresh: bool,
        mut need_pair: bool,
        temp: f64,
        rng: &mut R,
        pairs: &mut Vec<(usize, usize)>,
    ) {
        while i <= j {
            let unpaired_cost = match (fresh, need_pair) {
                (true, true) => self.params.loop_penalty + self.pu_of(i + 1, j),
                (true, false) => self.params.loop_penalty + self.ru_of(i + 1, j),
                (false, true) => self.pu_of(i + 1, j),
                (false, false) => self.ru_of(i + 1, j),
            };
            let mut opts: Vec<(Option<usize>, f64)> = vec![(None, unpaired_cost)];
            for l in (i + MIN_HAIRPIN_LOOP + 1)..=j {
                let v = self.v_of(i, l);
                if v < INF {
                    opts.push((Some(l), v + self.r0_of(l + 1, j)));
                }
            }
            match pick(&opts, temp, rng) {
                Some(l) => {
                    self.sample_v(i, l, temp, rng, pairs);
                    i = l + 1;
                    fresh = true;
                    need_pair = false;
                }
                None => {
                    i += 1;
                    fresh = false;
                }
            }
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9
}

/// Categorical draw over `(choice, energy)` options with Boltzmann-like
/// weights. Infeasible (infinite) options get zero weight.
fn pick<R: Rng, T: Copy>(opts: &[(Option<T>, f64)], temperature: f64, rng: &mut R) -> Option<T> {
    let min = opts.iter().map(|&(_, e)| e).fold(INF, f64::min);
    debug_assert!(min < INF, "no feasible traceback option");
    let weights: Vec<f64> = opts
        .iter()
        .map(|&(_, e)| {
            if e.is_finite() {
                (-(e - min) / temperature).exp()
            } else {
                0.0
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (k, w) in weights.iter().enumerate() {
        u -= w;
        if u <= 0.0 {
            return opts[k].0;
        }
    }
    opts.last().unwrap().0
}

/// Predicts the minimum-energy structure with default parameters.
pub fn fold(seq: &RnaSequence) -> SecondaryStructure {
    fold_with(seq, &EnergyParams::default())
}

/// Predicts the minimum-energy structure under `params`.
pub fn fold_with(seq: &RnaSequence, params: &EnergyParams) -> SecondaryStructure {
    let tables = FoldTables::compute(seq, *params);
    let pairs = tables.mfe_pairs();
    let ss = SecondaryStructure::from_pairs(seq, pairs, params);
    debug_assert!(
        close(ss.energy, tables.mfe()),
        "traceback energy {} disagrees with DP optimum {}",
        ss.energy,
        tables.mfe()
    );
    ss
}

/// Named structural quantities used by the feature catalogue.
pub fn pairing_stats(ss: &SecondaryStructure) -> std::collections::BTreeMap<String, f64> {
    let (au, gc, gu) = ss.pair_type_counts;
    let mut m = std::collections::BTreeMap::new();
    m.insert("|A-U|".into(), au as f64);
    m.insert("|G-C|".into(), gc as f64);
    m.insert("|G-U|".into(), gu as f64);
    m.insert("total_bases".into(), ss.total_paired_bases() as f64);
    m.insert("stem_count".into(), ss.stem_count as f64);
    m.insert("loop_count".into(), ss.loop_count as f64);
    let avg_bp_stem = if ss.stem_count == 0 {
        0.0
    } else {
        ss.pairs.len() as f64 / ss.stem_count as f64
    };
    m.insert("Avg_BP_Stem".into(), avg_bp_stem);
    m.insert("IH".into(), ss.hairpin_length as f64);
    m.insert("IL".into(), ss.loop_length as f64);
    m.insert("IC".into(), ss.max_consecutive_pairs as f64);
    let pct_l = if ss.hairpin_length == 0 {
        0.0
    } else {
        ss.loop_length as f64 / ss.hairpin_length as f64
    };
    m.insert("%L".into(), pct_l);
    m
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::RnaSequence;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn seq(s: &str) -> RnaSequence {
        RnaSequence::new("t", s).unwrap()
    }

    #[test]
    fn simple_hairpin() {
        let ss = fold(&seq("GGGAAACCC"));
        assert_eq!(ss.dot_bracket, "(((...)))");
        assert_eq!(ss.pairs, vec![(0, 8), (1, 7), (2, 6)]);
        assert_eq!(ss.pair_type_counts, (0, 3, 0));
        // 3 G-C pairs + one loop opening
        assert_eq!(ss.energy, 3.0 * -3.0 + 0.5);
        assert_eq!(ss.stem_count, 1);
        assert_eq!(ss.loop_count, 1);
        assert_eq!(ss.max_consecutive_pairs, 3);
        assert_eq!(ss.hairpin_length, 9);
        assert_eq!(ss.loop_length, 3);
    }

    #[test]
    fn no_complementary_bases() {
        let ss = fold(&seq("AAAAAA"));
        assert_eq!(ss.dot_bracket, "......");
        assert!(ss.pairs.is_empty());
        assert_eq!(ss.energy, 0.0);
    }

    #[test]
    fn short_sequences_fold_empty() {
        for s in ["A", "GC", "GGCC"] {
            let ss = fold(&seq(s));
            // too short for any hairpin
            assert!(ss.pairs.is_empty(), "{s}");
            assert_eq!(ss.energy, 0.0);
        }
    }

    #[test]
    fn dp_matches_brute_force_on_random_short_sequences() {
        let params = EnergyParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..120 {
            let len = rng.gen_range(1..=12usize);
            let s: String = (0..len)
                .map(|_| crate::sequence::Base::ALL[rng.gen_range(0..4)].to_char())
                .collect();
            let rna = seq(&s);
            let dp = fold_with(&rna, &params).energy;
            let bf = oracle::brute_force_mfe(&rna, &params);
            assert_eq!(dp, bf, "sequence {s}");
        }
    }

    #[test]
    fn energy_never_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..60 {
            let len = rng.gen_range(1..=40usize);
            let s: String = (0..len)
                .map(|_| crate::sequence::Base::ALL[rng.gen_range(0..4)].to_char())
                .collect();
            assert!(fold(&seq(&s)).energy <= 0.0, "{s}");
        }
    }

    #[test]
    fn reversal_symmetry() {
        // reversing the sequence maps every structure to a mirrored one
        // with identical pair identities and loop count, so the optimum is
        // unchanged (note: reverse *complement* breaks wobble pairs)
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let len = rng.gen_range(4..=30usize);
            let s: Vec<crate::sequence::Base> = (0..len)
                .map(|_| crate::sequence::Base::ALL[rng.gen_range(0..4)])
                .collect();
            let fwd: String = s.iter().map(|b| b.to_char()).collect();
            let rev: String = s.iter().rev().map(|b| b.to_char()).collect();
            assert_eq!(fold(&seq(&fwd)).energy, fold(&seq(&rev)).energy, "{fwd}");
        }
    }

    #[test]
    fn deterministic_traceback() {
        let a = fold(&seq("GGGAAACCCUUUGGGAAACCC"));
        let b = fold(&seq("GGGAAACCCUUUGGGAAACCC"));
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_is_seeded_and_valid() {
        let rna = seq("GGGGAAAACCCCAUAUGGCC");
        let tables = FoldTables::compute(&rna, EnergyParams::default());
        let mut r1 = ChaCha8Rng::seed_from_u64(42);
        let mut r2 = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let p1 = tables.sample_pairs(1.0, &mut r1);
            let p2 = tables.sample_pairs(1.0, &mut r2);
            assert_eq!(p1, p2);
            // sampled structures are valid and at least as high-energy as MFE
            let e = structure_energy(&rna, &p1, &EnergyParams::default());
            assert!(e >= tables.mfe() - 1e-9);
        }
    }

    #[test]
    fn pairing_stats_hand_counts() {
        let ss = fold(&seq("GGGAAACCC"));
        let stats = pairing_stats(&ss);
        assert_eq!(stats["|G-C|"], 3.0);
        assert_eq!(stats["|A-U|"], 0.0);
        assert_eq!(stats["|G-U|"], 0.0);
        assert_eq!(stats["total_bases"], 6.0);
        assert_eq!(stats["stem_count"], 1.0);
        assert_eq!(stats["Avg_BP_Stem"], 3.0);
        assert_eq!(stats["IC"], 3.0);
        assert_eq!(stats["%L"], 3.0 / 9.0);
    }

    #[test]
    fn pairing_stats_empty_structure() {
        let ss = fold(&seq("AAAAAA"));
        let stats = pairing_stats(&ss);
        assert_eq!(stats["total_bases"], 0.0);
        assert_eq!(stats["Avg_BP_Stem"], 0.0);
        assert_eq!(stats["%L"], 0.0);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn fold_invariants(bases in proptest::collection::vec(0u8..4, 1..35)) {
            let s: String = bases
                .iter()
                .map(|&b| crate::sequence::Base::ALL[b as usize].to_char())
                .collect();
            let rna = seq(&s);
            let ss = fold(&rna);
            // dot-bracket consistent with pairs
            let rebuilt = SecondaryStructure::from_pairs(&rna, ss.pairs.clone(), &EnergyParams::default());
            proptest::prop_assert_eq!(&rebuilt.dot_bracket, &ss.dot_bracket);
            // non-crossing, unique indices, min hairpin loop
            let mut seen = std::collections::HashSet::new();
            for &(i, j) in &ss.pairs {
                proptest::prop_assert!(i < j);
                proptest::prop_assert!(seen.insert(i) && seen.insert(j));
            }
            for &(i, j) in &ss.pairs {
                for &(k, l) in &ss.pairs {
                    // no i < k < j < l crossings
                    proptest::prop_assert!(!(i < k && k < j && j < l));
                }
                let interior_paired = (i + 1..j).any(|p| seen.contains(&p));
                if !interior_paired {
                    proptest::prop_assert!(j - i - 1 >= MIN_HAIRPIN_LOOP);
                }
            }
            proptest::prop_assert!(ss.energy <= 0.0);
        }
    }
}
