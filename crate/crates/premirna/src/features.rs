//! The sequence/structure feature catalogue for feature-based learning.
//!
//! Features are grouped as: composition (di/trinucleotide frequencies),
//! structure-derived quantities of the predicted fold, thermodynamic sums
//! over the paired bases, ensemble statistics over sampled structures, and
//! z-scores of folding measures against dinucleotide-shuffled backgrounds.
//! `extract_all` concatenates every group into one canonically ordered
//! vector; `SELECTED_20` names the 20-feature subset used by the smaller
//! DBN input. Zero denominators and degenerate structures resolve to 0 so
//! every feature is total and finite.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fold::{structure_energy, EnergyParams, FoldTables, SecondaryStructure};
use crate::sequence::{Base, RnaSequence};
use crate::shuffle::dinucleotide_shuffle;
use crate::{Error, Result};

/// Melting/thermodynamic constants, one editable table. Enthalpy in
/// kcal/mol-shaped units, entropy in cal/(mol·K)-shaped units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoParams {
    pub h_gc: f64,
    pub h_au: f64,
    pub h_gu: f64,
    pub s_gc: f64,
    pub s_au: f64,
    pub s_gu: f64,
    /// Cation correction added to the entropy sum in the melting formula.
    pub salt: f64,
}

impl Default for ThermoParams {
    fn default() -> Self {
        ThermoParams {
            h_gc: -9.1,
            h_au: -6.8,
            h_gu: -4.5,
            s_gc: -23.0,
            s_au: -19.0,
            s_gu: -14.0,
            salt: -10.8,
        }
    }
}

/// Everything feature extraction depends on. Part of a model's recorded
/// pipeline so predictions replay the exact same computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub energy: EnergyParams,
    pub thermo: ThermoParams,
    /// Stochastic tracebacks per sequence for ensemble features.
    pub n_samples: usize,
    pub temperature: f64,
    /// Dinucleotide shuffles for z-score backgrounds (>= 10).
    pub n_shuffles: usize,
    pub seed: u64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            energy: EnergyParams::default(),
            thermo: ThermoParams::default(),
            n_samples: 200,
            temperature: 1.0,
            n_shuffles: 100,
            seed: 0,
        }
    }
}

const BASES: [char; 4] = ['A', 'C', 'G', 'U'];

/// Canonical feature order: 16 dinucleotides, 64 trinucleotides, then the
/// scalar catalogue.
pub fn canonical_names() -> &'static [String] {
    static NAMES: OnceLock<Vec<String>> = OnceLock::new();
    NAMES.get_or_init(|| {
        let mut names = Vec::new();
        for x in BASES {
            for y in BASES {
                names.push(format!("{x}{y}"));
            }
        }
        for x in BASES {
            for y in BASES {
                for z in BASES {
                    names.push(format!("{x}{y}{z}"));
                }
            }
        }
        for n in [
            "A+U%", "G+C%", "L", "Freq", "dP", "dG", "dD", "dQ", "dF", "MFEI1", "MFEI2", "MFEI3",
            "MFEI4", "MFEI5", "dS", "dS/L", "dH", "dH/L", "Tm", "Tm/L", "BP/GC", "BP/GU", "BP/AU",
            "G/C", "Avg_BP_Stem", "|A-U|/L", "|G-C|/L", "|G-U|/L", "|A-U|%/n_stems",
            "|G-C|%/n_stems", "|G-U|%/n_stems", "zP", "zG", "zD", "zQ", "zSP", "dPs", "EAFE",
            "CE/L", "Diff", "IH", "IL", "IC", "%L",
        ] {
            names.push(n.to_string());
        }
        names
    })
}

/// The 20-feature subset used as the small DBN input.
pub const SELECTED_20: [&str; 20] = [
    "A+U%", "AG", "AU", "CU", "GA", "UU", "MFEI4", "dPs", "EAFE", "Freq", "dH/L", "Tm", "Tm/L",
    "|G-C|/L", "|A-U|%/n_stems", "|G-U|%/n_stems", "L", "CE/L", "zG", "zSP",
];

/// Named feature subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSubset {
    Full,
    Selected20,
}

impl FeatureSubset {
    pub fn names(self) -> Vec<String> {
        match self {
            FeatureSubset::Full => canonical_names().to_vec(),
            FeatureSubset::Selected20 => SELECTED_20.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(FeatureSubset::Full),
            "selected20" => Ok(FeatureSubset::Selected20),
            other => Err(Error::InvalidArgument(format!(
                "unknown feature subset '{other}' (expected 'full' or 'selected20')"
            ))),
        }
    }
}

/// A complete feature vector in canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    fn from_map(map: &BTreeMap<String, f64>) -> Self {
        let values = canonical_names()
            .iter()
            .map(|n| *map.get(n).unwrap_or_else(|| panic!("missing feature {n}")))
            .collect();
        FeatureVector { values }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        let idx = canonical_names().iter().position(|n| n == name)?;
        Some(self.values[idx])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Values restricted to a named subset, in subset order.
    pub fn subset(&self, subset: FeatureSubset) -> Vec<f64> {
        subset
            .names()
            .iter()
            .map(|n| self.get(n).expect("canonical name"))
            .collect()
    }
}

fn frac(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Di/trinucleotide frequencies and aggregate composition. Requires length
/// >= 3 so both window sizes are defined.
pub fn composition_features(seq: &RnaSequence) -> Result<BTreeMap<String, f64>> {
    let l = seq.len();
    if l < 3 {
        return Err(Error::Feature {
            id: seq.id().to_string(),
            reason: format!("length {l} too short for trinucleotide (XYZ) frequencies"),
        });
    }
    let idx: Vec<usize> = seq.indices().iter().map(|&b| b as usize).collect();
    let mut m = BTreeMap::new();

    let mut di = [[0usize; 4]; 4];
    for w in idx.windows(2) {
        di[w[0]][w[1]] += 1;
    }
    for (x, cx) in BASES.iter().enumerate() {
        for (y, cy) in BASES.iter().enumerate() {
            m.insert(format!("{cx}{cy}"), di[x][y] as f64 / (l - 1) as f64);
        }
    }

    let mut tri = [[[0usize; 4]; 4]; 4];
    for w in idx.windows(3) {
        tri[w[0]][w[1]][w[2]] += 1;
    }
    for (x, cx) in BASES.iter().enumerate() {
        for (y, cy) in BASES.iter().enumerate() {
            for (z, cz) in BASES.iter().enumerate() {
                m.insert(format!("{cx}{cy}{cz}"), tri[x][y][z] as f64 / (l - 2) as f64);
            }
        }
    }

    let au = idx.iter().filter(|&&b| b == 0 || b == 3).count();
    m.insert("A+U%".into(), au as f64 / l as f64);
    m.insert("G+C%".into(), (l - au) as f64 / l as f64);
    m.insert("L".into(), l as f64);
    Ok(m)
}

/// Structure-derived features of the predicted fold.
pub fn structure_features(seq: &RnaSequence, ss: &SecondaryStructure) -> BTreeMap<String, f64> {
    let l = seq.len() as f64;
    let (au, gc, gu) = ss.pair_type_counts;
    let (au, gc, gu) = (au as f64, gc as f64, gu as f64);
    let total = ss.total_paired_bases() as f64;
    let stems = ss.stem_count as f64;
    let loops = ss.loop_count as f64;
    let gc_frac = seq
        .bases()
        .filter(|b| matches!(b, Base::G | Base::C))
        .count() as f64
        / l;
    let au_frac = 1.0 - gc_frac;
    let dg = ss.energy / l;

    let mut m = BTreeMap::new();
    m.insert("dP".into(), total / l);
    m.insert("dG".into(), dg);
    m.insert("MFEI1".into(), frac(dg, gc_frac));
    m.insert("MFEI2".into(), frac(dg, stems));
    m.insert("MFEI3".into(), frac(dg, loops));
    m.insert("MFEI4".into(), frac(dg, total));
    m.insert("MFEI5".into(), frac(dg, au_frac));
    m.insert("BP/GC".into(), frac(total, gc));
    m.insert("BP/GU".into(), frac(total, gu));
    m.insert("BP/AU".into(), frac(total, au));
    m.insert(
        "G/C".into(),
        seq.bases()
            .filter(|b| matches!(b, Base::G | Base::C))
            .count() as f64,
    );
    m.insert("Avg_BP_Stem".into(), frac(ss.pairs.len() as f64, stems));
    m.insert("|A-U|/L".into(), au / l);
    m.insert("|G-C|/L".into(), gc / l);
    m.insert("|G-U|/L".into(), gu / l);
    m.insert("|A-U|%/n_stems".into(), frac(au / l, stems));
    m.insert("|G-C|%/n_stems".into(), frac(gc / l, stems));
    m.insert("|G-U|%/n_stems".into(), frac(gu / l, stems));
    m.insert("IH".into(), ss.hairpin_length as f64);
    m.insert("IL".into(), ss.loop_length as f64);
    m.insert("IC".into(), ss.max_consecutive_pairs as f64);
    m.insert(
        "%L".into(),
        frac(ss.loop_length as f64, ss.hairpin_length as f64),
    );
    m.insert("dF".into(), tree_compactness(ss));
    m
}

/// Compactness of the coarse-grained structure tree: the second-smallest
/// Laplacian eigenvalue (algebraic connectivity) of the element graph whose
/// nodes are the exterior, the stems, and the loops, connected by direct
/// containment.
fn tree_compactness(ss: &SecondaryStructure) -> f64 {
    // element intervals: stems as (outer_i, outer_j), loops as unpaired runs
    let mut intervals: Vec<(usize, usize)> = Vec::new();
    let pairs = &ss.pairs;
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
        intervals.push(pairs[idx]);
        idx += run;
    }
    let n_chars: Vec<char> = ss.dot_bracket.chars().collect();
    let n = n_chars.len();
    let enclosed: Vec<bool> = {
        let mut e = vec![false; n];
        for &(i, j) in pairs {
            for x in e.iter_mut().take(j).skip(i + 1) {
                *x = true;
            }
        }
        e
    };
    let mut k = 0;
    while k < n {
        if n_chars[k] == '.' && enclosed[k] {
            let start = k;
            while k < n && n_chars[k] == '.' {
                k += 1;
            }
            intervals.push((start, k - 1));
        } else {
            k += 1;
        }
    }

    let m = intervals.len() + 1; // + exterior node
    if m < 2 {
        return 0.0;
    }
    // parent = smallest strict container, else exterior (node 0)
    let mut lap = DMatrix::<f64>::zeros(m, m);
    for (a, &(ia, ja)) in intervals.iter().enumerate() {
        let mut parent = 0usize;
        let mut best_span = usize::MAX;
        for (b, &(ib, jb)) in intervals.iter().enumerate() {
            if a != b && ib <= ia && ja <= jb && (ib, jb) != (ia, ja) {
                let span = jb - ib;
                if span < best_span {
                    best_span = span;
                    parent = b + 1;
                }
            }
        }
        let u = a + 1;
        lap[(u, parent)] -= 1.0;
        lap[(parent, u)] -= 1.0;
        lap[(u, u)] += 1.0;
        lap[(parent, parent)] += 1.0;
    }
    let eig = lap.symmetric_eigenvalues();
    let mut vals: Vec<f64> = eig.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals.get(1).copied().unwrap_or(0.0).max(0.0)
}

/// Enthalpy/entropy sums over pairs and the melting temperature.
pub fn thermo_features(
    seq: &RnaSequence,
    ss: &SecondaryStructure,
    params: &ThermoParams,
) -> BTreeMap<String, f64> {
    let l = seq.len() as f64;
    let (au, gc, gu) = ss.pair_type_counts;
    let dh = gc as f64 * params.h_gc + au as f64 * params.h_au + gu as f64 * params.h_gu;
    let ds = gc as f64 * params.s_gc + au as f64 * params.s_au + gu as f64 * params.s_gu;
    let tm = if ss.pairs.is_empty() {
        0.0
    } else {
        (1000.0 * dh / (ds + params.salt) - 273.15).clamp(0.0, 150.0)
    };
    let mut m = BTreeMap::new();
    m.insert("dH".into(), dh);
    m.insert("dH/L".into(), dh / l);
    m.insert("dS".into(), ds);
    m.insert("dS/L".into(), ds / l);
    m.insert("Tm".into(), tm);
    m.insert("Tm/L".into(), tm / l);
    m
}

/// Folding measures that feed both the ensemble features and the z-score
/// backgrounds.
struct FoldingMeasures {
    d_p: f64,
    d_g: f64,
    d_d: f64,
    d_q: f64,
    d_ps: f64,
    freq: f64,
    eafe: f64,
    ce_l: f64,
    diff: f64,
}

fn folding_measures(
    seq: &RnaSequence,
    config: &FeatureConfig,
    rng: &mut ChaCha8Rng,
) -> FoldingMeasures {
    let l = seq.len() as f64;
    let tables = FoldTables::compute(seq, config.energy);
    let mfe_pairs = tables.mfe_pairs();
    let mfe = tables.mfe();
    let d_p = 2.0 * mfe_pairs.len() as f64 / l;
    let d_g = mfe / l;

    if mfe_pairs.is_empty() {
        // no pairings possible: the structure space is the empty structure
        return FoldingMeasures {
            d_p,
            d_g,
            d_d: 0.0,
            d_q: 0.0,
            d_ps: 0.0,
            freq: 0.0,
            eafe: 0.0,
            ce_l: 0.0,
            diff: 0.0,
        };
    }

    let n_samples = config.n_samples.max(1);
    let mut pair_counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut mfe_hits = 0usize;
    let mut energy_sum = 0.0;
    for _ in 0..n_samples {
        let pairs = tables.sample_pairs(config.temperature, rng);
        if pairs == mfe_pairs {
            mfe_hits += 1;
        }
        energy_sum += structure_energy(seq, &pairs, &config.energy);
        for &p in &pairs {
            *pair_counts.entry(p).or_insert(0) += 1;
        }
    }
    let ns = n_samples as f64;
    let efe = energy_sum / ns;

    // pair probabilities
    let mut d_q = 0.0;
    let mut d_d = 0.0;
    let mut per_pos_paired = vec![0.0f64; seq.len()];
    let mut per_pos_entropy = vec![0.0f64; seq.len()];
    let mut centroid = Vec::new();
    for (&(i, j), &c) in &pair_counts {
        let p = c as f64 / ns;
        if p > 0.0 && p < 1.0 {
            d_q -= p * p.ln();
        }
        d_d += 2.0 * p * (1.0 - p);
        per_pos_paired[i] += p;
        per_pos_paired[j] += p;
        if p > 0.0 {
            per_pos_entropy[i] -= p * p.ln();
            per_pos_entropy[j] -= p * p.ln();
        }
        if p > 0.5 {
            centroid.push((i, j));
        }
    }
    // positional entropy includes the unpaired outcome
    let mut d_ps = 0.0;
    for k in 0..seq.len() {
        let pu = (1.0 - per_pos_paired[k]).clamp(0.0, 1.0);
        let mut s = per_pos_entropy[k];
        if pu > 0.0 && pu < 1.0 {
            s -= pu * pu.ln();
        }
        d_ps += s;
    }
    d_ps /= l;
    d_q /= l;
    d_d /= l;
    let ce = structure_energy(seq, &centroid, &config.energy);

    FoldingMeasures {
        d_p,
        d_g,
        d_d,
        d_q,
        d_ps,
        freq: mfe_hits as f64 / ns,
        eafe: efe / l,
        ce_l: ce / l,
        diff: (mfe - efe).abs() / l,
    }
}

/// Ensemble features estimated from stochastic tracebacks.
pub fn ensemble_features(seq: &RnaSequence, config: &FeatureConfig) -> BTreeMap<String, f64> {
    let mut rng = derive_rng(config.seed, seq.id(), 0x454e53); // "ENS"
    let fm = folding_measures(seq, config, &mut rng);
    let mut m = BTreeMap::new();
    m.insert("Freq".into(), fm.freq);
    m.insert("dQ".into(), fm.d_q);
    m.insert("dD".into(), fm.d_d);
    m.insert("dPs".into(), fm.d_ps);
    m.insert("EAFE".into(), fm.eafe);
    m.insert("CE/L".into(), fm.ce_l);
    m.insert("Diff".into(), fm.diff);
    m
}

/// Z-scores of the folding measures against a dinucleotide-shuffled
/// background: zP (pairing propensity), zG (folding energy), zD (base-pair
/// distance), zQ (entropy), zSP (positional entropy).
pub fn zscore_features(seq: &RnaSequence, config: &FeatureConfig) -> Result<BTreeMap<String, f64>> {
    if config.n_shuffles < 10 {
        return Err(Error::InvalidArgument(format!(
            "n_shuffles must be >= 10, got {}",
            config.n_shuffles
        )));
    }
    let mut rng = derive_rng(config.seed, seq.id(), 0x5a53); // "ZS"
    let base = folding_measures(seq, config, &mut rng);
    let observed = [base.d_p, base.d_g, base.d_d, base.d_q, base.d_ps];

    let mut background: [Vec<f64>; 5] = Default::default();
    for _ in 0..config.n_shuffles {
        let shuffled = dinucleotide_shuffle(seq, &mut rng);
        let fm = folding_measures(&shuffled, config, &mut rng);
        for (store, v) in background
            .iter_mut()
            .zip([fm.d_p, fm.d_g, fm.d_d, fm.d_q, fm.d_ps])
        {
            store.push(v);
        }
    }

    let mut m = BTreeMap::new();
    for (name, (obs, bg)) in ["zP", "zG", "zD", "zQ", "zSP"]
        .iter()
        .zip(observed.iter().zip(background.iter()))
    {
        let n = bg.len() as f64;
        let mean = bg.iter().sum::<f64>() / n;
        let var = bg.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let std = var.sqrt();
        let z = if std == 0.0 { 0.0 } else { (obs - mean) / std };
        m.insert(name.to_string(), z);
    }
    Ok(m)
}

/// Seed derivation: master seed, a stable hash of the sequence id, and a
/// per-purpose tag, so extraction stays deterministic and order free.
fn derive_rng(seed: u64, id: &str, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(id) ^ tag.wrapping_mul(0x9e3779b97f4a7c15))
}

fn fnv1a(s: &str) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Computes every feature in the canonical catalogue for one sequence.
pub fn extract_all(seq: &RnaSequence, config: &FeatureConfig) -> Result<FeatureVector> {
    let mut m = composition_features(seq)?;
    let ss = crate::fold::fold_with(seq, &config.energy);
    m.extend(structure_features(seq, &ss));
    m.extend(thermo_features(seq, &ss, &config.thermo));
    m.extend(ensemble_features(seq, config));
    m.extend(zscore_features(seq, config)?);
    let v = FeatureVector::from_map(&m);
    for (name, &x) in canonical_names().iter().zip(v.values()) {
        if !x.is_finite() {
            return Err(Error::NonFinite(format!(
                "feature {name} of '{}' is {x}",
                seq.id()
            )));
        }
    }
    Ok(v)
}

/// Per-feature min/max fitted on a training split only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

/// Fits min-max statistics column-wise on a non-empty training matrix.
pub fn fit_normalizer(train: &Array2<f64>) -> Result<NormalizationStats> {
    if train.nrows() == 0 {
        return Err(Error::Data("cannot fit normalizer on empty matrix".into()));
    }
    let mut min = vec![f64::INFINITY; train.ncols()];
    let mut max = vec![f64::NEG_INFINITY; train.ncols()];
    for row in train.rows() {
        for (j, &v) in row.iter().enumerate() {
            min[j] = min[j].min(v);
            max[j] = max[j].max(v);
        }
    }
    Ok(NormalizationStats { min, max })
}

/// Scales one vector to [0,1] per feature; constant features map to 0 and
/// out-of-range test values are clamped.
pub fn apply_normalizer(stats: &NormalizationStats, vec: &Array1<f64>) -> Array1<f64> {
    Array1::from_iter(vec.iter().enumerate().map(|(j, &v)| {
        let range = stats.max[j] - stats.min[j];
        if range == 0.0 {
            0.0
        } else {
            ((v - stats.min[j]) / range).clamp(0.0, 1.0)
        }
    }))
}

/// Applies the normalizer to every row of a matrix.
pub fn normalize_matrix(stats: &NormalizationStats, m: &Array2<f64>) -> Array2<f64> {
    let mut out = m.clone();
    for mut row in out.rows_mut() {
        let scaled = apply_normalizer(stats, &row.to_owned());
        row.assign(&scaled);
    }
    out
}
